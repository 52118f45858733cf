#include <map>

#include "doctest.h"

#include "common.hpp"
#include "intent/knowledge_base.hpp"
#include "intent/reasoner.hpp"

using namespace intent;

namespace {

const KnowledgeBase& kb() {
  static const KnowledgeBase k = KnowledgeBase::load(fixture::data("kitchen.kb"));
  return k;
}

const PlanLibrary& plans() {
  static const PlanLibrary lib = load_plan_library(fixture::data("kitchen.plan"));
  return lib;
}

const Explanation& of_goal(const std::vector<Explanation>& ex, const std::string& goal) {
  for (const auto& e : ex)
    if (e.goal_name == goal) return e;
  FAIL("no explanation for " << goal);
  return ex.front();
}

}  // namespace

TEST_CASE("property matrix golden") {
  const std::vector<std::string> props{"movable", "eatable", "drinkable", "cookable", "washable"};
  const std::map<std::string, std::vector<int>> table{
      {"Sink", {0, 0, 0, 0, 0}},     {"Hobs", {0, 0, 0, 0, 0}},    {"Plate", {1, 0, 0, 0, 1}},
      {"Glass", {1, 0, 1, 0, 1}},    {"Biscuits", {1, 1, 0, 0, 0}}, {"Meal", {1, 1, 0, 1, 0}},
      {"WaterBottle", {1, 0, 1, 0, 0}},
  };
  CHECK(kb().property_names() == props);
  for (const auto& [entity, row] : table)
    for (std::size_t i = 0; i < props.size(); ++i) {
      CAPTURE(entity);
      CAPTURE(props[i]);
      CHECK(kb().has_property(entity, props[i]) == (row[i] == 1));
    }
}

TEST_CASE("taxonomy") {
  CHECK(kb().is_a("Plate", "Vessel"));
  CHECK(kb().is_a("Plate", "Item"));
  CHECK(kb().is_a("Plate", "Object"));
  CHECK_FALSE(kb().is_a("Plate", "Food"));
  CHECK(kb().is_a("human", "Agent"));
  CHECK(kb().parent("Vessel") == "Item");
  CHECK(kb().parent("Object") == std::nullopt);
  CHECK_THROWS(KnowledgeBase::parse("[classes]\nA < B\nB < A\n"));
  CHECK_THROWS(KnowledgeBase::parse("[classes]\nA < Nowhere\n"));
}

TEST_CASE("action validation") {
  CHECK(kb().validate_action("Human", "Eat", "Biscuits", "Plate"));
  const auto cook = kb().validate_action("Human", "Cook", "Plate", "Hobs");
  CHECK_FALSE(cook);
  CHECK(cook.reason.find("cookable") != std::string::npos);
  const auto wash = kb().validate_action("Human", "Wash", "Glass", std::nullopt);
  CHECK(wash);
  CHECK(wash.destination == "Sink");
  CHECK_FALSE(kb().validate_action("tiago", "Eat", "Meal", "Plate"));
  CHECK_FALSE(kb().validate_action("human", "Eat", "Meal", "Sink"));
  CHECK_THROWS_AS(kb().validate_action("human", "Fly", "Meal", std::nullopt), std::invalid_argument);
  CHECK_THROWS_AS(kb().validate_action("human", "Eat", "Cake", std::nullopt), std::invalid_argument);
}

TEST_CASE("inference agrees with the explicit statement") {
  for (const auto& action : kb().actions())
    for (const auto& target : kb().entities()) {
      const auto inferred = kb().validate_action("human", action, target, std::nullopt);
      if (!inferred.destination) continue;
      const auto explicit_v = kb().validate_action("human", action, target, *inferred.destination);
      CAPTURE(action);
      CAPTURE(target);
      CHECK(explicit_v.valid == inferred.valid);
    }
}

TEST_CASE("explanation validation") {
  const auto ex = explain(plans(), std::vector<std::string>{"PickAndPlace"});
  const std::vector<Binding> biscuits{{"Biscuits", std::string("Plate")}};
  CHECK_FALSE(kb().validate_explanation(plans(), of_goal(ex, "Lunch"), biscuits));
  CHECK(kb().validate_explanation(plans(), of_goal(ex, "Breakfast"), biscuits));
  CHECK_FALSE(kb().validate_explanation(plans(), of_goal(ex, "Drink"), biscuits));

  const auto none = initial_explanations(plans());
  for (const auto& e : none) CHECK(kb().validate_explanation(plans(), e, {}));
}

TEST_CASE("filtering never adds explanations") {
  const auto ex = explain(plans(), std::vector<std::string>{"PickAndPlace"});
  for (const auto* item : {"Biscuits", "Meal", "WaterBottle", "Plate", "Glass"}) {
    const std::vector<Binding> b{{item, std::nullopt}};
    std::size_t kept = 0;
    for (const auto& e : ex) kept += kb().validate_explanation(plans(), e, b) ? 1 : 0;
    CHECK(kept <= ex.size());
  }
}

TEST_CASE("robot capabilities") {
  CHECK(kb().robot_capable("Wash"));
  CHECK(kb().robot_capable("PickAndPlace"));
  CHECK(kb().robot_capable("Cook"));
  CHECK_FALSE(kb().robot_capable("Eat"));
  CHECK_FALSE(kb().robot_capable("Sip"));
  CHECK_FALSE(kb().robot_capable("Wash", "Toaster"));
}

TEST_CASE("rule engine") {
  FactSet facts{{"action", {"s1", "Wash"}}, {"destination", {"s2", "Plate"}}, {"action", {"s2", "Eat"}}};
  const std::vector<InferenceRule> rules{parse_rule("action(?s, Wash) -> destination(?s, Sink)"),
                                         parse_rule("action(?s, Eat) -> destination(?s, Glass)")};
  forward_chain(facts, rules, {"destination"});
  CHECK(facts.contains(Atom{"destination", {"s1", "Sink"}}));
  CHECK_FALSE(facts.contains(Atom{"destination", {"s2", "Glass"}}));  // functional, already set
  CHECK(to_string(parse_atom("p(a, b)")) == "p(a, b)");
  CHECK_THROWS(parse_rule("p(?x) q(?x)"));
}

TEST_CASE("role constraints") {
  CHECK(parse_role_constraint("*").any());
  CHECK(parse_role_constraint("movable,!eatable").terms.size() == 2);
  CHECK(kb().satisfies("Plate", parse_role_constraint("movable,!eatable")));
  CHECK_FALSE(kb().satisfies("Meal", parse_role_constraint("movable,!eatable")));
  CHECK(kb().satisfies_term("Plate", "Plate"));
  CHECK_THROWS_AS(parse_role_constraint("a,,b"), std::invalid_argument);
}

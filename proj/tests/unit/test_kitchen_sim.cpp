#include <set>

#include "doctest.h"

#include "common.hpp"
#include "intent/kitchen_sim.hpp"

using namespace intent;
using K = DirectiveKind;

namespace {

const Scenario& kitchen() {
  static const Scenario s = load_scenario(fixture::data("kitchen.scn"));
  return s;
}

Scenario line_scenario() {
  Scenario s;
  s.id = "line";
  s.room = {0, 0, 10, 2};
  s.initial.oois.push_back({"cup", "Glass", {4.4, 0}, true});
  s.initial.oois.push_back({"sink", "Sink", {8, 0}, false});
  return s;
}

std::string movement_of(const std::optional<std::string>& label) { return label->substr(0, label->find('/')); }

}  // namespace

TEST_CASE("walking four metres takes twenty ticks") {
  SimParams p;
  const auto tr = run_script(line_scenario(), {{K::GoTo, "cup", 0}}, p, {0, 0}, 0.0);
  // One state per stride, then a still tick while the script winds down.
  REQUIRE(tr.states.size() == 21);
  for (std::size_t i = 0; i < 20; ++i) CHECK(*tr.labels[i] == "WALK/cup");
  CHECK(tr.states[19].agent.position.x == doctest::Approx(4.0));
  CHECK(movement_of(tr.labels[20]) == "STILL");
}

TEST_CASE("carrying keeps the item with the agent") {
  SimParams p;
  const AgentScript s{{K::GoTo, "cup", 0}, {K::Pick, "cup", 0}, {K::GoTo, "sink", 0}, {K::Place, "sink", 0}};
  const auto tr = run_script(line_scenario(), s, p, {0, 0}, 0.0);
  CHECK_NOTHROW(validate(tr));
  bool carried = false;
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const auto& st = tr.states[i];
    if (st.agent.held_object) {
      CHECK(st.find(*st.agent.held_object)->position == st.agent.position);
      carried = true;
    }
    // TRANSPORT exactly when moving while holding.
    const bool moving = i > 0 && distance(tr.states[i - 1].agent.position, st.agent.position) > 1e-9;
    CHECK((movement_of(tr.labels[i]) == "TRANSPORT") == (moving && st.agent.held_object.has_value()));
  }
  CHECK(carried);
  CHECK(tr.states.back().find("cup")->position == Point2{8, 0});
}

TEST_CASE("impossible directives throw") {
  KitchenSim sim(line_scenario(), {});
  sim.load_script({{K::Pick, "sink", 0}});
  CHECK_THROWS_AS(sim.step(), std::invalid_argument);
  KitchenSim far(line_scenario(), {});
  Steer pick;
  pick.kind = Steer::Kind::Pick;
  pick.ooi = "cup";
  CHECK_THROWS_AS(far.steer(pick), std::invalid_argument);
  Steer place;
  place.kind = Steer::Kind::Place;
  CHECK_THROWS_AS(far.steer(place), std::invalid_argument);
  SimParams bad;
  bad.walk_speed = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("goal scripts") {
  for (const auto* goal : {"Breakfast", "Drink", "Lunch"}) {
    SimParams p;
    p.seed = 3;
    const auto tr = simulate_goal(kitchen(), goal, p);
    CAPTURE(goal);
    CHECK_NOTHROW(validate(tr));
    CHECK(tr.states.size() >= 40);
    CHECK(tr.states.size() <= 400);
    CHECK(simulate_goal(kitchen(), goal, p) == tr);
  }
  CHECK_THROWS_AS(script_for_goal("Dinner"), std::invalid_argument);

  // Breakfast uses the biscuits at the plate; Lunch visits hobs, plate and sink.
  std::vector<std::string> uses;
  for (const auto& d : script_for_goal("Lunch"))
    if (d.kind == K::UseAt) uses.push_back(d.ooi);
  CHECK(uses == std::vector<std::string>{"hobs", "plate", "sink"});
  uses.clear();
  for (const auto& d : script_for_goal("Breakfast"))
    if (d.kind == K::UseAt) uses.push_back(d.ooi);
  CHECK(uses.front() == "plate");
}

TEST_CASE("noise only perturbs what is reported") {
  SimParams p;
  p.seed = 4;
  p.noise_sigma = 0.05;
  const auto noisy = simulate_goal(kitchen(), "Drink", p);
  p.noise_sigma = 0.0;
  const auto clean = simulate_goal(kitchen(), "Drink", p);
  CHECK(noisy.states.size() == clean.states.size());
  CHECK(noisy.labels == clean.labels);
  CHECK(noisy.states != clean.states);
}

TEST_CASE("dataset generation") {
  SimParams p;
  p.seed = 11;
  const auto one = generate_dataset(kitchen(), 1, p);
  std::set<Movement> labels;
  for (const auto& r : one) labels.insert(r.label);
  CHECK(labels.size() == 5);

  const auto ten = generate_dataset(kitchen(), 10, p);
  CHECK(ten.size() >= 150);
  CHECK(ten.size() <= 1000);
  CHECK(generate_dataset(kitchen(), 10, p) == ten);
  std::set<int> groups;
  for (const auto& r : ten) groups.insert(r.group);
  CHECK(groups.size() == 10);
  CHECK_THROWS_AS(generate_dataset(kitchen(), 0, p), std::invalid_argument);
}

TEST_CASE("random starts keep clear of objects") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const auto p = random_start(kitchen(), rng);
    for (const auto& o : kitchen().initial.oois) CHECK(distance(p, o.position) >= 1.0);
    CHECK(p.x >= kitchen().room.min_x);
    CHECK(p.x <= kitchen().room.max_x);
  }
}

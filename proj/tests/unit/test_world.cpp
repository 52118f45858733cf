#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"

#include "common.hpp"
#include "intent/kitchen_sim.hpp"
#include "intent/text_util.hpp"
#include "intent/world.hpp"

using namespace intent;
using std::numbers::pi;

TEST_CASE("kitchen scenario has seven OOIs") {
  const auto sc = load_scenario(fixture::data("kitchen.scn"));
  CHECK(sc.id == "kitchen");
  CHECK(sc.initial.oois.size() == 7);
  std::set<std::string> labels;
  for (const auto& o : sc.initial.oois) labels.insert(o.label);
  CHECK(labels == std::set<std::string>{"WaterBottle", "Meal", "Biscuits", "Glass", "Plate", "Hobs", "Sink"});
  CHECK(sc.vocabulary.size() == 7);
}

TEST_CASE("scenario without OOIs is valid") {
  const auto sc = parse_scenario("[scenario]\nid = empty\nroom = 0 0 4 4\n[agent]\nx = 1\ny = 1\nheading = 0\n");
  CHECK(sc.initial.oois.empty());
  CHECK_NOTHROW(validate(sc.initial));
}

TEST_CASE("duplicate OOI ids are rejected") {
  const std::string doc =
      "[scenario]\nid = d\nroom = 0 0 4 4\n[agent]\nx = 1\ny = 1\nheading = 0\n[ooi]\n"
      "plate Plate 1 1 yes\nplate Plate 2 2 yes\n";
  CHECK_THROWS(parse_scenario(doc));
}

TEST_CASE("scenario round trip") {
  const auto sc = load_scenario(fixture::data("kitchen.scn"));
  CHECK(parse_scenario(serialize_scenario(sc)) == sc);
}

TEST_CASE("heading angle") {
  AgentPose a;
  CHECK(heading_angle_to(a, {1, 0}) == doctest::Approx(0.0));
  CHECK(heading_angle_to(a, {-1, 0}) == doctest::Approx(pi));
  CHECK(heading_angle_to(a, {0, 1}) == doctest::Approx(pi / 2));
  CHECK(heading_angle_to(a, {0, 0}) == 0.0);
}

TEST_CASE("heading angle is rotation invariant") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-pi, pi), r(-5, 5);
  for (int i = 0; i < 200; ++i) {
    AgentPose a;
    a.heading = u(rng);
    const Point2 p{r(rng), r(rng)};
    const double rot = u(rng);
    AgentPose b = a;
    b.heading = normalize_angle(a.heading + rot);
    const Point2 q{p.x * std::cos(rot) - p.y * std::sin(rot), p.x * std::sin(rot) + p.y * std::cos(rot)};
    CHECK(heading_angle_to(b, q) == doctest::Approx(heading_angle_to(a, p)).epsilon(1e-9));
  }
}

TEST_CASE("normalize_angle range") {
  CHECK(normalize_angle(pi) == doctest::Approx(-pi));
  CHECK(normalize_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(normalize_angle(0.5) == doctest::Approx(0.5));
}

TEST_CASE("state validation") {
  WorldState s;
  s.oois.push_back({"plate", "Plate", {1, 1}, true});
  s.agent.held_object = "plate";
  CHECK_THROWS_AS(validate(s), std::invalid_argument);  // not co-located
  s.oois[0].position = s.agent.position;
  CHECK_NOTHROW(validate(s));
  s.agent.held_object = "ghost";
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s.agent.held_object.reset();
  s.agent.position.x = std::nan("");
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
}

TEST_CASE("trace round trip keeps labels") {
  const auto sc = load_scenario(fixture::data("kitchen.scn"));
  SimParams p;
  p.seed = 5;
  p.noise_sigma = 0.05;
  const auto tr = simulate_goal(sc, "Drink", p);
  const auto back = parse_trace(serialize_trace(tr));
  CHECK(back == tr);
  CHECK_NOTHROW(validate(back));
}

TEST_CASE("trace with a gap is invalid") {
  const auto sc = load_scenario(fixture::data("kitchen.scn"));
  Trace tr;
  tr.states = {sc.initial, sc.initial};
  tr.states[1].timestep = 2;
  CHECK_THROWS_AS(validate(tr), std::invalid_argument);
  CHECK_THROWS_AS(validate(Trace{}), std::invalid_argument);
}

TEST_CASE("malformed state line reports its line") {
  try {
    parse_trace("0 1 1 0 - 1 plate Plate 1 1 1\nbogus\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

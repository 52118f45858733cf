#include <random>

#include "doctest.h"

#include "intent/qsr.hpp"

using namespace intent;

TEST_CASE("QDC buckets") {
  CHECK(compute_qdc(0.3) == Qdc::Touch);
  CHECK(compute_qdc(0.6) == Qdc::Touch);
  CHECK(compute_qdc(0.61) == Qdc::Near);
  CHECK(compute_qdc(2.0) == Qdc::Near);
  CHECK(compute_qdc(3.0) == Qdc::Medium);
  CHECK(compute_qdc(5.0) == Qdc::Far);
  CHECK(compute_qdc(6.0) == Qdc::Ignore);
  CHECK_THROWS_AS(compute_qdc(-1.0), std::invalid_argument);
}

TEST_CASE("QDC is monotone in distance") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 8);
  for (int i = 0; i < 500; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    CHECK(compute_qdc(a) <= compute_qdc(b));
  }
}

TEST_CASE("QTC and MOS") {
  CHECK(compute_qtc({2, 0}, {1, 0}, {0, 0}, 0.01) == Qtc::Minus);
  CHECK(compute_qtc({1, 0}, {1, 0}, {0, 0}, 0.01) == Qtc::Zero);
  CHECK(compute_qtc({1, 0}, {2, 0}, {0, 0}, 0.01) == Qtc::Plus);
  CHECK(compute_mos({0, 0}, {0, 0}, 0.01) == Mos::Stationary);
  CHECK(compute_mos({0, 0}, {0.5, 0}, 0.01) == Mos::Moving);
  CHECK(compute_mos({0, 0}, {0.01, 0}, 0.01) == Mos::Stationary);
}

TEST_CASE("QTC flips under time reversal") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int i = 0; i < 500; ++i) {
    const Point2 p{u(rng), u(rng)}, q{u(rng), u(rng)}, o{u(rng), u(rng)};
    const auto fwd = compute_qtc(p, q, o, 0.01);
    const auto back = compute_qtc(q, p, o, 0.01);
    if (fwd == Qtc::Zero) CHECK(back == Qtc::Zero);
    if (fwd == Qtc::Minus) CHECK(back == Qtc::Plus);
    if (fwd == Qtc::Plus) CHECK(back == Qtc::Minus);
  }
}

TEST_CASE("names round trip") {
  for (auto v : {Qdc::Touch, Qdc::Near, Qdc::Medium, Qdc::Far, Qdc::Ignore}) CHECK(parse_qdc(to_string(v)) == v);
  for (auto v : {Qtc::Minus, Qtc::Zero, Qtc::Plus}) CHECK(parse_qtc(to_string(v)) == v);
  for (auto v : {Mos::Moving, Mos::Stationary}) CHECK(parse_mos(to_string(v)) == v);
  for (auto v : {Hold::Holding, Hold::NotHolding}) CHECK(parse_hold(to_string(v)) == v);
  CHECK_THROWS(parse_qdc("close"));
}

namespace {

WorldState two_oois(double agent_x, std::int64_t t) {
  WorldState w;
  w.timestep = t;
  w.agent.position = {agent_x, 0};
  w.oois.push_back({"plate", "Plate", {0, 0}, true});
  w.oois.push_back({"sink", "Sink", {10, 0}, false});
  return w;
}

}  // namespace

TEST_CASE("engine ingest") {
  QsrEngine eng;
  QsrLibrary lib;
  const auto f0 = eng.ingest(two_oois(4.2, 0), lib);
  CHECK(f0.mos == Mos::Stationary);
  for (const auto& e : f0.entries) CHECK(e.qtc == Qtc::Zero);
  CHECK(f0.entries.size() == 2);

  // 4.2 m -> 4.0 m: Far and approaching; the sink at 6 m is out of range.
  const auto f1 = eng.ingest(two_oois(4.0, 1), lib);
  CHECK(f1.find("plate")->qdc == Qdc::Far);
  CHECK(f1.find("plate")->qtc == Qtc::Minus);
  CHECK(f1.find("sink")->qdc == Qdc::Ignore);
  CHECK(f1.find("sink")->qtc == Qtc::Plus);
  CHECK(f1.mos == Mos::Moving);
  CHECK(lib.size() == 2);
  CHECK(lib.at(1) == f1);

  CHECK_THROWS_AS(eng.ingest(two_oois(3.0, 1), lib), std::invalid_argument);
}

TEST_CASE("held object is touching and still") {
  QsrEngine eng;
  QsrLibrary lib;
  auto w = two_oois(2, 0);
  eng.ingest(w, lib);
  w.timestep = 1;
  w.agent.position = {1, 0};
  w.agent.held_object = "plate";
  w.oois[0].position = w.agent.position;
  const auto f = eng.ingest(w, lib);
  CHECK(f.hold == Hold::Holding);
  CHECK(f.find("plate")->qdc == Qdc::Touch);
  CHECK(f.find("plate")->qtc == Qtc::Zero);
}

TEST_CASE("identical streams give identical memories") {
  QsrLibrary a, b;
  QsrEngine ea, eb;
  for (int t = 0; t < 20; ++t) {
    ea.ingest(two_oois(5 - 0.2 * t, t), a);
    eb.ingest(two_oois(5 - 0.2 * t, t), b);
  }
  CHECK(a.snapshot() == b.snapshot());
  CHECK(dump_frame(a.at(3)) == dump_frame(b.at(3)));
}

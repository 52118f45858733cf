#include <set>

#include "doctest.h"

#include "common.hpp"
#include "intent/decision_tree.hpp"
#include "intent/kitchen_sim.hpp"
#include "intent/movement.hpp"

using namespace intent;

namespace {

QsrFrame frame(Mos mos, Hold hold, Qdc qdc, Qtc qtc) {
  QsrFrame f;
  f.mos = mos;
  f.hold = hold;
  f.entries.push_back({"plate", qdc, qtc});
  return f;
}

LabeledRow row(Mos mos, Hold now, Hold prev, Qdc qdc, Qtc qtc, Movement label, int group = 0) {
  MovementFeatures f;
  f.mos = mos;
  f.hold_now = now;
  f.hold_prev = prev;
  f.qdc_target = qdc;
  f.qtc_target = qtc;
  return {f, label, group};
}

const LabeledDataset& kitchen_rows() {
  static const LabeledDataset rows = [] {
    const auto cfg = default_config();
    SimParams p = cfg.sim;
    p.seed = cfg.dataset.seed;
    p.noise_sigma = cfg.dataset.noise_sigma;
    return generate_dataset(load_scenario(cfg.scenario_path), 10, p, cfg.qsr);
  }();
  return rows;
}

}  // namespace

TEST_CASE("feature extraction") {
  const auto still = frame(Mos::Stationary, Hold::NotHolding, Qdc::Near, Qtc::Zero);
  auto f = extract_features(still, nullptr, "plate");
  CHECK(f.mos == Mos::Stationary);
  CHECK(f.hold_now == Hold::NotHolding);
  CHECK(f.hold_prev == Hold::NotHolding);
  CHECK(f.qdc_target == Qdc::Near);
  CHECK(f.qtc_target == Qtc::Zero);

  const auto held = frame(Mos::Stationary, Hold::Holding, Qdc::Touch, Qtc::Zero);
  f = extract_features(held, &still, "plate");
  CHECK(f.hold_now == Hold::Holding);
  CHECK(f.hold_prev == Hold::NotHolding);
  f = extract_features(still, &held, "plate");
  CHECK(f.hold_now == Hold::NotHolding);
  CHECK(f.hold_prev == Hold::Holding);

  CHECK_THROWS_AS(extract_features(still, nullptr, "ghost"), std::invalid_argument);
}

TEST_CASE("feature schema") {
  CHECK(all_feature_combinations().size() == 120);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    CHECK(feature_index(kFeatureNames[i]) == i);
    for (std::size_t v = 0; v < kFeatureArity[i]; ++v)
      CHECK(parse_feature_value(i, feature_value_name(i, v)) == v);
  }
}

TEST_CASE("dataset text round trip") {
  const LabeledDataset rows{row(Mos::Moving, Hold::Holding, Hold::Holding, Qdc::Touch, Qtc::Zero, Movement::Transport, 3),
                            row(Mos::Stationary, Hold::NotHolding, Hold::NotHolding, Qdc::Far, Qtc::Plus, Movement::Still, 1)};
  CHECK(parse_dataset(serialize_dataset(rows)) == rows);
}

TEST_CASE("single class gives one leaf") {
  const LabeledDataset rows{row(Mos::Moving, Hold::NotHolding, Hold::NotHolding, Qdc::Far, Qtc::Minus, Movement::Walk),
                            row(Mos::Moving, Hold::NotHolding, Hold::NotHolding, Qdc::Near, Qtc::Plus, Movement::Walk)};
  const auto t = train(rows);
  CHECK(t.nodes().size() == 1);
  for (const auto& f : all_feature_combinations()) CHECK(t.classify(f) == Movement::Walk);
  CHECK_THROWS_AS(train(LabeledDataset{}), std::invalid_argument);
}

TEST_CASE("separable on hold_now") {
  LabeledDataset rows;
  for (auto q : {Qdc::Touch, Qdc::Near, Qdc::Far})
    for (auto c : {Qtc::Minus, Qtc::Zero, Qtc::Plus}) {
      rows.push_back(row(Mos::Moving, Hold::Holding, Hold::Holding, q, c, Movement::Transport));
      rows.push_back(row(Mos::Moving, Hold::NotHolding, Hold::NotHolding, q, c, Movement::Walk));
    }
  const auto t = train(rows);
  CHECK(t.splits_on(feature_index("hold_now")));
  CHECK(accuracy(t, rows) == 1.0);
}

TEST_CASE("tree trained on the kitchen dataset") {
  const auto& rows = kitchen_rows();
  const auto counts = class_counts(rows);
  for (auto n : counts) CHECK(n > 0);
  CHECK(rows.size() > 150);

  const auto t = train(rows);
  CHECK(t.classify(row(Mos::Stationary, Hold::NotHolding, Hold::NotHolding, Qdc::Far, Qtc::Zero, Movement::Still).features) ==
        Movement::Still);
  CHECK(t.classify(row(Mos::Moving, Hold::Holding, Hold::Holding, Qdc::Touch, Qtc::Zero, Movement::Transport).features) ==
        Movement::Transport);
  CHECK(t.classify(row(Mos::Stationary, Hold::Holding, Hold::NotHolding, Qdc::Touch, Qtc::Zero, Movement::Pick).features) ==
        Movement::Pick);
  CHECK(t.classify(row(Mos::Stationary, Hold::NotHolding, Hold::Holding, Qdc::Touch, Qtc::Zero, Movement::Place).features) ==
        Movement::Place);

  SUBCASE("total over every feature combination") {
    for (const auto& f : all_feature_combinations()) CHECK_NOTHROW(t.classify(f));
  }
  SUBCASE("deterministic and round trips") {
    CHECK(train(rows).serialize() == t.serialize());
    CHECK(DecisionTree::parse(t.serialize()) == t);
  }
}

TEST_CASE("conflict-free data is fit exactly") {
  LabeledDataset rows;
  std::set<std::size_t> seen;
  const auto& src = kitchen_rows();
  // Keep the first label of each feature combination.
  for (const auto& r : src) {
    std::size_t key = 0;
    for (std::size_t i = 0; i < kFeatureCount; ++i) key = key * 8 + feature_value(r.features, i);
    if (seen.insert(key).second) rows.push_back(r);
  }
  CHECK(accuracy(train(rows), rows) == 1.0);
}

TEST_CASE("grouped cross validation holds out each trial") {
  const auto cv = grouped_cross_validation(kitchen_rows());
  CHECK(cv.groups.size() == 10);
  CHECK(cv.fold_accuracy.size() == 10);
  CHECK(cv.mean_accuracy >= 0.90);
}

TEST_CASE("malformed tree text") {
  CHECK_THROWS(DecisionTree::parse("split feature=nope\n"));
}

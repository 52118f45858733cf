#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "intent/qsr.hpp"

namespace intent {

enum class Movement { Still, Walk, Transport, Pick, Place };
inline constexpr std::size_t kMovementCount = 5;
inline constexpr std::array<Movement, kMovementCount> kAllMovements{Movement::Still, Movement::Walk,
                                                                     Movement::Transport, Movement::Pick,
                                                                     Movement::Place};

std::string_view to_string(Movement m);
Movement parse_movement(std::string_view s);

/// Categorical inputs of the movement classifier, relative to the current
/// focus target.
struct MovementFeatures {
  Hold hold_now = Hold::NotHolding;
  Hold hold_prev = Hold::NotHolding;
  Mos mos = Mos::Stationary;
  Qdc qdc_target = Qdc::Ignore;
  Qtc qtc_target = Qtc::Zero;

  friend bool operator==(const MovementFeatures&, const MovementFeatures&) = default;
};

/// Feature schema, in declaration order. Ties in split gain are broken by
/// this order, then by value order.
inline constexpr std::size_t kFeatureCount = 5;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{"hold_now", "hold_prev", "mos",
                                                                           "qdc_target", "qtc_target"};
inline constexpr std::array<std::size_t, kFeatureCount> kFeatureArity{2, 2, 2, 5, 3};

std::size_t feature_value(const MovementFeatures& f, std::size_t feature);
std::string_view feature_value_name(std::size_t feature, std::size_t value);
std::size_t parse_feature_value(std::size_t feature, std::string_view name);
std::size_t feature_index(std::string_view name);

/// Every one of the 2*2*2*5*3 feature combinations.
std::vector<MovementFeatures> all_feature_combinations();

/// Throws std::invalid_argument when `target` is absent from `frame`.
MovementFeatures extract_features(const QsrFrame& frame, const QsrFrame* prev_frame, std::string_view target);

struct LabeledRow {
  MovementFeatures features;
  Movement label = Movement::Still;
  int group = 0;  // originating trial, for grouped cross-validation

  friend bool operator==(const LabeledRow&, const LabeledRow&) = default;
};

using LabeledDataset = std::vector<LabeledRow>;

/// Comma-separated table with header
/// `group,mos,hold_now,hold_prev,qdc_target,qtc_target,label`.
std::string serialize_dataset(std::span<const LabeledRow> rows);
LabeledDataset parse_dataset(std::string_view text);

std::array<std::size_t, kMovementCount> class_counts(std::span<const LabeledRow> rows);

}  // namespace intent

#include "intent/movement.hpp"

#include <stdexcept>

#include "intent/text_util.hpp"

namespace intent {

std::string_view to_string(Movement m) {
  switch (m) {
    case Movement::Still: return "STILL";
    case Movement::Walk: return "WALK";
    case Movement::Transport: return "TRANSPORT";
    case Movement::Pick: return "PICK";
    case Movement::Place: return "PLACE";
  }
  return "?";
}

Movement parse_movement(std::string_view s) {
  for (auto m : kAllMovements)
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown movement '" + std::string(s) + "'");
}

std::size_t feature_value(const MovementFeatures& f, std::size_t feature) {
  switch (feature) {
    case 0: return static_cast<std::size_t>(f.hold_now);
    case 1: return static_cast<std::size_t>(f.hold_prev);
    case 2: return static_cast<std::size_t>(f.mos);
    case 3: return static_cast<std::size_t>(f.qdc_target);
    case 4: return static_cast<std::size_t>(f.qtc_target);
    default: throw std::out_of_range("feature index");
  }
}

std::string_view feature_value_name(std::size_t feature, std::size_t value) {
  if (feature >= kFeatureCount || value >= kFeatureArity[feature]) throw std::out_of_range("feature value");
  switch (feature) {
    case 0:
    case 1: return to_string(static_cast<Hold>(value));
    case 2: return to_string(static_cast<Mos>(value));
    case 3: return to_string(static_cast<Qdc>(value));
    default: return to_string(static_cast<Qtc>(value));
  }
}

std::size_t parse_feature_value(std::size_t feature, std::string_view name) {
  if (feature >= kFeatureCount) throw std::out_of_range("feature index");
  for (std::size_t v = 0; v < kFeatureArity[feature]; ++v)
    if (feature_value_name(feature, v) == name) return v;
  throw std::invalid_argument("unknown value '" + std::string(name) + "' for feature " +
                              std::string(kFeatureNames[feature]));
}

std::size_t feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    if (kFeatureNames[i] == name) return i;
  throw std::invalid_argument("unknown feature '" + std::string(name) + "'");
}

std::vector<MovementFeatures> all_feature_combinations() {
  std::vector<MovementFeatures> out;
  for (auto now : {Hold::Holding, Hold::NotHolding})
    for (auto prev : {Hold::Holding, Hold::NotHolding})
      for (auto mos : {Mos::Moving, Mos::Stationary})
        for (auto qdc : {Qdc::Touch, Qdc::Near, Qdc::Medium, Qdc::Far, Qdc::Ignore})
          for (auto qtc : {Qtc::Minus, Qtc::Zero, Qtc::Plus}) out.push_back({now, prev, mos, qdc, qtc});
  return out;
}

MovementFeatures extract_features(const QsrFrame& frame, const QsrFrame* prev_frame, std::string_view target) {
  const QsrEntry* e = frame.find(target);
  if (!e) throw std::invalid_argument("target '" + std::string(target) + "' missing from frame");
  MovementFeatures f;
  f.mos = frame.mos;
  f.hold_now = frame.hold;
  f.hold_prev = prev_frame ? prev_frame->hold : Hold::NotHolding;
  f.qdc_target = e->qdc;
  f.qtc_target = e->qtc;
  return f;
}

std::string serialize_dataset(std::span<const LabeledRow> rows) {
  std::string out = "group";
  for (auto name : kFeatureNames) out += ',' + std::string(name);
  out += ",label\n";
  for (const auto& r : rows) {
    out += std::to_string(r.group);
    for (std::size_t f = 0; f < kFeatureCount; ++f)
      out += ',' + std::string(feature_value_name(f, feature_value(r.features, f)));
    out += ',' + std::string(to_string(r.label)) + '\n';
  }
  return out;
}

LabeledDataset parse_dataset(std::string_view content) {
  LabeledDataset rows;
  std::size_t line_no = 0;
  for (auto raw : text::lines(content)) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.starts_with("group")) continue;
    const auto cols = text::split(line, ',');
    if (cols.size() != kFeatureCount + 2) throw ParseError("dataset row needs 7 columns", line_no);
    LabeledRow r;
    try {
      r.group = static_cast<int>(text::to_int(text::trim(cols[0]), line_no));
      r.features.mos = static_cast<Mos>(parse_feature_value(0, text::trim(cols[1])));
      r.features.hold_now = static_cast<Hold>(parse_feature_value(1, text::trim(cols[2])));
      r.features.hold_prev = static_cast<Hold>(parse_feature_value(2, text::trim(cols[3])));
      r.features.qdc_target = static_cast<Qdc>(parse_feature_value(3, text::trim(cols[4])));
      r.features.qtc_target = static_cast<Qtc>(parse_feature_value(4, text::trim(cols[5])));
      r.label = parse_movement(text::trim(cols[6]));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_no);
    }
    rows.push_back(r);
  }
  return rows;
}

std::array<std::size_t, kMovementCount> class_counts(std::span<const LabeledRow> rows) {
  std::array<std::size_t, kMovementCount> counts{};
  for (const auto& r : rows) ++counts[static_cast<std::size_t>(r.label)];
  return counts;
}

}  // namespace intent

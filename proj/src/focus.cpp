#include "intent/focus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "intent/text_util.hpp"

namespace intent {

void FocusWeights::validate() const {
  if (qdc < 0.0 || qtc < 0.0) throw std::invalid_argument("focus weights must be non-negative");
  if (std::abs(qdc + qtc - 1.0) > 1e-9) throw std::invalid_argument("focus weights must sum to 1");
}

void FocusConfig::validate() const {
  weights.validate();
  if (window == 0 || majority == 0 || majority > window)
    throw std::invalid_argument("focus window/majority out of range");
  if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("focus tau out of range");
  if (tie_tolerance < 0.0) throw std::invalid_argument("negative tie tolerance");
}

double encode(Qdc v) {
  switch (v) {
    case Qdc::Touch: return 0.5;
    case Qdc::Near: return 0.25;
    case Qdc::Medium: return 0.125;
    case Qdc::Far: return 0.0;
    case Qdc::Ignore: return 0.0;
  }
  return 0.0;
}

double encode(Qtc v) {
  switch (v) {
    case Qtc::Zero: return 0.5;
    case Qtc::Minus: return 0.25;
    case Qtc::Plus: return 0.0;
  }
  return 0.0;
}

double focus_score(Qdc qdc, Qtc qtc, double theta, const FocusWeights& weights) {
  theta = std::clamp(theta, 0.0, std::numbers::pi);
  return (weights.qdc * encode(qdc) + weights.qtc * encode(qtc)) / (1.0 + theta);
}

double FocusDistribution::probability(std::string_view id) const {
  for (const auto& e : entries)
    if (e.id == id) return e.probability;
  return 0.0;
}

FocusDistribution normalize(std::int64_t timestep, std::span<const RawScore> raw) {
  FocusDistribution d;
  d.timestep = timestep;
  double total = 0.0;
  for (const auto& r : raw) total += r.score;
  d.entries.reserve(raw.size());
  for (const auto& r : raw) d.entries.push_back({r.id, total > 0.0 ? r.score / total : 0.0, r.qdc});
  return d;
}

FocusDistribution estimate_distribution(const QsrFrame& frame, const WorldState& world, const FocusWeights& weights) {
  std::vector<RawScore> raw;
  raw.reserve(frame.entries.size());
  for (const auto& e : frame.entries) {
    const Ooi* o = world.find(e.id);
    const bool held = world.agent.held_object && *world.agent.held_object == e.id;
    const double theta = (held || !o) ? 0.0 : heading_angle_to(world.agent, o->position);
    raw.push_back({e.id, focus_score(e.qdc, e.qtc, theta, weights), e.qdc});
  }
  return normalize(frame.timestep, raw);
}

namespace {

void push(std::deque<std::optional<OoiId>>& window, std::optional<OoiId> id, std::size_t capacity) {
  window.push_back(std::move(id));
  while (window.size() > capacity) window.pop_front();
}

// Majority holder of the window; otherwise the previous pick survives for as
// long as it still occupies at least one slot.
std::optional<OoiId> elect(const std::deque<std::optional<OoiId>>& window, const std::optional<OoiId>& previous,
                           std::size_t majority) {
  std::map<OoiId, std::size_t> counts;
  for (const auto& slot : window)
    if (slot) ++counts[*slot];
  for (const auto& [id, n] : counts)
    if (n >= majority) return id;
  if (previous && counts.count(*previous)) return previous;
  return std::nullopt;
}

}  // namespace

FocusState update(const FocusDistribution& dist, FocusState state, const FocusConfig& config) {
  std::vector<std::size_t> ranked(dist.entries.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i] = i;
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    return dist.entries[a].probability > dist.entries[b].probability;
  });

  const bool any_mass = !ranked.empty() && dist.entries[ranked.front()].probability > 0.0;
  std::optional<OoiId> target_pick;
  std::optional<OoiId> destination_pick;

  if (any_mass) {
    const auto& top = dist.entries[ranked[0]];
    const double second = ranked.size() > 1 ? dist.entries[ranked[1]].probability : 0.0;
    const auto& standing = state.current_target;
    const double standing_p = standing ? dist.probability(*standing) : 0.0;

    if (standing && standing_p > 0.0 && standing_p >= top.probability - config.tie_tolerance) {
      // Tie (or outright lead) with a standing target: it keeps its status.
      target_pick = standing;
    } else if (top.probability > config.tau && top.probability > second) {
      target_pick = top.id;
    }

    const OoiId& excluded = target_pick ? *target_pick : top.id;
    for (std::size_t idx : ranked) {
      const auto& e = dist.entries[idx];
      if (e.id == excluded || e.qdc == Qdc::Ignore) continue;
      if (e.probability <= 0.0) break;
      destination_pick = e.id;
      break;
    }
  }

  push(state.target_window, target_pick, config.window);
  push(state.destination_window, destination_pick, config.window);
  state.current_target = elect(state.target_window, state.current_target, config.majority);
  state.current_destination = elect(state.destination_window, state.current_destination, config.majority);
  if (state.current_destination && state.current_target && *state.current_destination == *state.current_target)
    state.current_destination.reset();
  return state;
}

FocusEstimator::FocusEstimator(FocusConfig config) : config_(config) { config_.validate(); }

const FocusState& FocusEstimator::observe(const QsrFrame& frame, const WorldState& world) {
  last_ = estimate_distribution(frame, world, config_.weights);
  state_ = update(last_, std::move(state_), config_);
  return state_;
}

std::string dump_distribution(const FocusDistribution& dist) {
  std::string out = "t=" + std::to_string(dist.timestep);
  for (const auto& e : dist.entries) out += ' ' + e.id + '=' + text::fmt(e.probability);
  return out;
}

}  // namespace intent

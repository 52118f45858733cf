#include "intent/qsr.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace intent {

std::string_view to_string(Qdc v) {
  switch (v) {
    case Qdc::Touch: return "touch";
    case Qdc::Near: return "near";
    case Qdc::Medium: return "medium";
    case Qdc::Far: return "far";
    case Qdc::Ignore: return "ignore";
  }
  return "?";
}

std::string_view to_string(Qtc v) {
  switch (v) {
    case Qtc::Minus: return "-";
    case Qtc::Zero: return "0";
    case Qtc::Plus: return "+";
  }
  return "?";
}

std::string_view to_string(Mos v) { return v == Mos::Moving ? "moving" : "stationary"; }
std::string_view to_string(Hold v) { return v == Hold::Holding ? "holding" : "not_holding"; }

Qdc parse_qdc(std::string_view s) {
  for (auto v : {Qdc::Touch, Qdc::Near, Qdc::Medium, Qdc::Far, Qdc::Ignore})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown QDC value '" + std::string(s) + "'");
}

Qtc parse_qtc(std::string_view s) {
  for (auto v : {Qtc::Minus, Qtc::Zero, Qtc::Plus})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown QTC value '" + std::string(s) + "'");
}

Mos parse_mos(std::string_view s) {
  for (auto v : {Mos::Moving, Mos::Stationary})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown MOS value '" + std::string(s) + "'");
}

Hold parse_hold(std::string_view s) {
  for (auto v : {Hold::Holding, Hold::NotHolding})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown HOLD value '" + std::string(s) + "'");
}

void QdcThresholds::validate() const {
  if (upper[0] <= 0.0) throw std::invalid_argument("QDC thresholds must be positive");
  for (std::size_t i = 1; i < upper.size(); ++i)
    if (!(upper[i] > upper[i - 1])) throw std::invalid_argument("QDC thresholds must be strictly increasing");
}

Qdc compute_qdc(double distance, const QdcThresholds& thresholds) {
  if (!(distance >= 0.0)) throw std::invalid_argument("negative distance");
  static constexpr std::array<Qdc, 4> buckets{Qdc::Touch, Qdc::Near, Qdc::Medium, Qdc::Far};
  for (std::size_t i = 0; i < buckets.size(); ++i)
    if (distance <= thresholds.upper[i]) return buckets[i];
  return Qdc::Ignore;
}

Qtc compute_qtc(Point2 agent_prev, Point2 agent_curr, Point2 ooi_pos, double motion_epsilon) {
  const double before = distance(agent_prev, ooi_pos);
  const double after = distance(agent_curr, ooi_pos);
  if (after < before - motion_epsilon) return Qtc::Minus;
  if (after > before + motion_epsilon) return Qtc::Plus;
  return Qtc::Zero;
}

Mos compute_mos(Point2 agent_prev, Point2 agent_curr, double motion_epsilon) {
  return distance(agent_prev, agent_curr) > motion_epsilon ? Mos::Moving : Mos::Stationary;
}

const QsrEntry* QsrFrame::find(std::string_view id) const {
  auto it = std::find_if(entries.begin(), entries.end(), [&](const QsrEntry& e) { return e.id == id; });
  return it == entries.end() ? nullptr : &*it;
}

void QsrLibrary::append(QsrFrame frame) {
  std::unique_lock lock(mutex_);
  if (!frames_.empty() && frame.timestep <= frames_.back().timestep)
    throw std::invalid_argument("QSR library timesteps must strictly increase");
  frames_.push_back(std::move(frame));
}

std::size_t QsrLibrary::size() const {
  std::shared_lock lock(mutex_);
  return frames_.size();
}

const QsrFrame& QsrLibrary::at(std::size_t index) const {
  std::shared_lock lock(mutex_);
  return frames_.at(index);
}

std::optional<QsrFrame> QsrLibrary::last() const {
  std::shared_lock lock(mutex_);
  if (frames_.empty()) return std::nullopt;
  return frames_.back();
}

std::vector<QsrFrame> QsrLibrary::snapshot() const {
  std::shared_lock lock(mutex_);
  return {frames_.begin(), frames_.end()};
}

QsrEngine::QsrEngine(QsrConfig config) : config_(config) { config_.qdc.validate(); }

QsrFrame QsrEngine::compute(const WorldState& world) const {
  QsrFrame frame;
  frame.timestep = world.timestep;
  frame.hold = world.agent.held_object ? Hold::Holding : Hold::NotHolding;
  const Point2 here = world.agent.position;
  const Point2 before = prev_ ? prev_->agent.position : here;
  frame.mos = prev_ ? compute_mos(before, here, config_.motion_epsilon) : Mos::Stationary;

  frame.entries.reserve(world.oois.size());
  for (const auto& o : world.oois) {
    QsrEntry e;
    e.id = o.id;
    if (world.agent.held_object && *world.agent.held_object == o.id) {
      // Coupled to the agent: touching and not moving relative to it.
      e.qdc = Qdc::Touch;
      e.qtc = Qtc::Zero;
    } else {
      e.qdc = compute_qdc(distance(here, o.position), config_.qdc);
      e.qtc = prev_ ? compute_qtc(before, here, o.position, config_.motion_epsilon) : Qtc::Zero;
    }
    frame.entries.push_back(std::move(e));
  }
  return frame;
}

QsrFrame QsrEngine::ingest(const WorldState& world, QsrLibrary& library) {
  if (prev_ && world.timestep <= prev_->timestep)
    throw std::invalid_argument("out-of-order timestep " + std::to_string(world.timestep));
  auto frame = compute(world);
  library.append(frame);
  prev_ = world;
  return frame;
}

std::string dump_frame(const QsrFrame& frame) {
  std::string out;
  const auto t = "t=" + std::to_string(frame.timestep);
  for (const auto& e : frame.entries) {
    out += t + " ooi=" + e.id + " qdc=" + std::string(to_string(e.qdc)) + " qtc=" + std::string(to_string(e.qtc)) +
           "\n";
  }
  out += t + " agent mos=" + std::string(to_string(frame.mos)) + " hold=" + std::string(to_string(frame.hold)) + "\n";
  return out;
}

}  // namespace intent

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "intent/world.hpp"

namespace intent {

/// Qualitative distance bucket. Declaration order is the distance order.
enum class Qdc { Touch, Near, Medium, Far, Ignore };
/// QTC_B11 relation of the agent with respect to an OOI.
enum class Qtc { Minus, Zero, Plus };
enum class Mos { Moving, Stationary };
enum class Hold { Holding, NotHolding };

std::string_view to_string(Qdc v);
std::string_view to_string(Qtc v);
std::string_view to_string(Mos v);
std::string_view to_string(Hold v);
Qdc parse_qdc(std::string_view s);
Qtc parse_qtc(std::string_view s);
Mos parse_mos(std::string_view s);
Hold parse_hold(std::string_view s);

/// Upper bounds (closed) of Touch, Near, Medium, Far. Anything beyond the
/// last bound is Ignore.
struct QdcThresholds {
  std::array<double, 4> upper{0.6, 2.0, 3.0, 5.0};

  void validate() const;
};

struct QsrConfig {
  QdcThresholds qdc;
  double motion_epsilon = 0.01;  // metres, shared by QTC and MOS
};

Qdc compute_qdc(double distance, const QdcThresholds& thresholds = {});
Qtc compute_qtc(Point2 agent_prev, Point2 agent_curr, Point2 ooi_pos, double motion_epsilon);
Mos compute_mos(Point2 agent_prev, Point2 agent_curr, double motion_epsilon);

struct QsrEntry {
  OoiId id;
  Qdc qdc = Qdc::Ignore;
  Qtc qtc = Qtc::Zero;

  friend bool operator==(const QsrEntry&, const QsrEntry&) = default;
};

struct QsrFrame {
  std::int64_t timestep = 0;
  std::vector<QsrEntry> entries;  // same order as WorldState::oois
  Mos mos = Mos::Stationary;
  Hold hold = Hold::NotHolding;

  const QsrEntry* find(std::string_view id) const;

  friend bool operator==(const QsrFrame&, const QsrFrame&) = default;
};

/// Append-only sensory memory. Appended frames never move or change, so
/// references returned by at() stay valid while other threads append.
class QsrLibrary {
public:
  void append(QsrFrame frame);
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  const QsrFrame& at(std::size_t index) const;
  std::optional<QsrFrame> last() const;
  std::vector<QsrFrame> snapshot() const;

private:
  mutable std::shared_mutex mutex_;
  std::deque<QsrFrame> frames_;
};

/// Stateful transformer from a perception stream into QSR frames. One
/// engine per stream.
class QsrEngine {
public:
  explicit QsrEngine(QsrConfig config = {});

  /// Computes the frame for `world` against the previously ingested state,
  /// appends it to `library` and returns it. Throws std::invalid_argument
  /// on an out-of-order timestep.
  QsrFrame ingest(const WorldState& world, QsrLibrary& library);
  QsrFrame compute(const WorldState& world) const;

  const std::optional<WorldState>& previous() const { return prev_; }
  const QsrConfig& config() const { return config_; }
  void reset() { prev_.reset(); }

private:
  QsrConfig config_;
  std::optional<WorldState> prev_;
};

/// Golden-test dump: `t=<n> ooi=<id> qdc=<v> qtc=<v>` per OOI, then
/// `t=<n> agent mos=<v> hold=<v>`.
std::string dump_frame(const QsrFrame& frame);

}  // namespace intent

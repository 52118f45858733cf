#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "intent/qsr.hpp"
#include "intent/world.hpp"

namespace intent {

struct FocusWeights {
  double qdc = 0.5;
  double qtc = 0.5;

  /// Both non-negative, summing to 1 (within 1e-9).
  void validate() const;
};

struct FocusConfig {
  FocusWeights weights;
  double tau = 0.5;            // election threshold on normalized probability
  std::size_t window = 4;      // sliding window length
  std::size_t majority = 3;    // slots needed to declare a target
  double tie_tolerance = 0.05; // probability gap still treated as a tie

  void validate() const;
};

double encode(Qdc v);
double encode(Qtc v);

/// (w_qdc * enc(qdc) + w_qtc * enc(qtc)) / (1 + theta), theta in radians.
double focus_score(Qdc qdc, Qtc qtc, double theta, const FocusWeights& weights);

struct RawScore {
  OoiId id;
  double score = 0.0;
  Qdc qdc = Qdc::Touch;
};

struct FocusEntry {
  OoiId id;
  double probability = 0.0;
  Qdc qdc = Qdc::Touch;

  friend bool operator==(const FocusEntry&, const FocusEntry&) = default;
};

struct FocusDistribution {
  std::int64_t timestep = 0;
  std::vector<FocusEntry> entries;

  double probability(std::string_view id) const;
  friend bool operator==(const FocusDistribution&, const FocusDistribution&) = default;
};

/// Divides each score by the total. An all-zero input yields an all-zero
/// distribution.
FocusDistribution normalize(std::int64_t timestep, std::span<const RawScore> raw);

/// Scores every OOI of `frame` using the agent pose in `world` and
/// normalizes. Held objects are coincident with the agent, so theta = 0.
FocusDistribution estimate_distribution(const QsrFrame& frame, const WorldState& world,
                                        const FocusWeights& weights);

struct FocusState {
  std::deque<std::optional<OoiId>> target_window;
  std::deque<std::optional<OoiId>> destination_window;
  std::optional<OoiId> current_target;
  std::optional<OoiId> current_destination;

  friend bool operator==(const FocusState&, const FocusState&) = default;
};

/// One election round: pushes this frame's target and destination
/// candidates into their windows and recomputes the current picks.
FocusState update(const FocusDistribution& dist, FocusState state, const FocusConfig& config = {});

class FocusEstimator {
public:
  explicit FocusEstimator(FocusConfig config = {});

  const FocusState& observe(const QsrFrame& frame, const WorldState& world);
  const FocusState& state() const { return state_; }
  const FocusDistribution& last_distribution() const { return last_; }
  void reset() { state_ = {}; last_ = {}; }

private:
  FocusConfig config_;
  FocusState state_;
  FocusDistribution last_;
};

/// `t=<n> <id>=<p> ...` with every OOI in declaration order.
std::string dump_distribution(const FocusDistribution& dist);

}  // namespace intent

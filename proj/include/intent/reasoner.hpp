#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "intent/plan_library.hpp"

namespace intent {

enum class LeafStatus { Unobserved, Observed, Missed };

/// One hypothesis: a goal's plan tree with its leaves marked.
struct Explanation {
  std::size_t goal = 0;              // index into PlanLibrary::goals
  std::string goal_name;
  std::vector<LeafStatus> marks;     // per leaf, temporal order
  std::vector<int> observation;      // per leaf: index of the matching observation, -1 if none
  double observed_fraction = 0.0;
  double missed_fraction = 0.0;
  double score = 0.0;
  double confidence = 0.0;

  std::size_t observed_count() const;
  std::size_t missed_count() const;

  friend bool operator==(const Explanation&, const Explanation&) = default;
};

/// One unmarked explanation per goal.
std::vector<Explanation> initial_explanations(const PlanLibrary& lib);

/// Consumes one observation: every explanation forks once per unobserved
/// leaf labelled `symbol`; unobserved leaves to its left become missed.
/// Explanations with no such leaf are dropped, duplicates merged. Scores
/// and confidences are recomputed.
std::vector<Explanation> extend(const PlanLibrary& lib, std::span<const Explanation> current, std::string_view symbol,
                                int observation_index);

std::vector<Explanation> explain(const PlanLibrary& lib, std::span<const std::string> observations);

/// Recomputes fractions and scores, then normalizes confidences to sum to 1
/// (all zero when every score is zero). Sorted by descending score, then by
/// goal order, then by marks.
void rescore(std::vector<Explanation>& explanations);

struct Commitment {
  std::size_t index = 0;  // into the explanation list
  std::string goal;
  double confidence = 0.0;

  friend bool operator==(const Commitment&, const Commitment&) = default;
};

/// Commits when a single explanation remains, or when the unique top score
/// belongs to an explanation with no missed leaves and no other goal has a
/// missed-free explanation.
std::optional<Commitment> best(std::span<const Explanation> explanations);

struct FrontierStep {
  std::size_t leaf = 0;
  std::string symbol;
  LeafConstraint constraint;

  friend bool operator==(const FrontierStep&, const FrontierStep&) = default;
};

/// Unobserved leaves of `e` in temporal order.
std::vector<FrontierStep> frontier(const PlanLibrary& lib, const Explanation& e);

/// Indented rendering with `[x]` observed, `[ ]` unobserved, `[-]` missed.
std::string render(const PlanLibrary& lib, const Explanation& e);

/// Incremental wrapper holding the explanation set between observations.
class GoalReasoner {
public:
  explicit GoalReasoner(PlanLibrary lib);

  /// Returns the candidate set after `symbol` without applying it.
  std::vector<Explanation> preview(std::string_view symbol) const;
  /// Replaces the current set (e.g. with a filtered preview).
  void accept(std::string symbol, std::vector<Explanation> next);
  void observe(std::string symbol);
  void reset();

  const PlanLibrary& library() const { return lib_; }
  const std::vector<Explanation>& explanations() const { return current_; }
  const std::vector<std::string>& observations() const { return observations_; }

private:
  PlanLibrary lib_;
  std::vector<Explanation> current_;
  std::vector<std::string> observations_;
};

}  // namespace intent

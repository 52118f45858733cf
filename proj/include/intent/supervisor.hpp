#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "intent/actions.hpp"
#include "intent/config.hpp"
#include "intent/decision_tree.hpp"
#include "intent/focus.hpp"
#include "intent/kitchen_sim.hpp"
#include "intent/knowledge_base.hpp"
#include "intent/plan_library.hpp"
#include "intent/qsr.hpp"
#include "intent/reasoner.hpp"
#include "intent/world.hpp"

namespace intent {

enum class EventKind { Frame, Focus, Movement, Action, Explanation, Commitment, Collaboration, Rejection };

std::string_view to_string(EventKind k);

struct PipelineEvent {
  std::int64_t timestep = 0;
  EventKind kind = EventKind::Frame;
  std::string payload;

  friend bool operator==(const PipelineEvent&, const PipelineEvent&) = default;
};

/// `t=<n> <kind> <payload>`
std::string to_line(const PipelineEvent& e);
std::string to_text(const std::vector<PipelineEvent>& log);

/// Frontier step bound to concrete OOIs for presentation.
struct PlannedAction {
  std::string action;
  std::optional<OoiId> target;
  std::optional<OoiId> destination;

  friend bool operator==(const PlannedAction&, const PlannedAction&) = default;
};

std::string describe(const PlannedAction& a);

struct CollaborationPlan {
  std::vector<FrontierStep> wait_for;
  std::vector<FrontierStep> robot_actions;
  std::size_t trigger = 0;  // frontier index where the robot takes over
  std::vector<PlannedAction> grounded;  // whole frontier, when grounding was possible

  friend bool operator==(const CollaborationPlan&, const CollaborationPlan&) = default;
};

/// The robot takes the longest capable suffix of the frontier; the partner
/// is awaited for the rest.
CollaborationPlan plan_collaboration(const PlanLibrary& lib, const Explanation& e, const KnowledgeBase& kb,
                                     std::string_view robot_class = "Robot");

std::string describe(const CollaborationPlan& p);

/// Immutable inputs shared by sessions.
struct Models {
  Scenario scenario;
  PlanLibrary plans;
  KnowledgeBase kb;
  ActionLibrary actions;
  DecisionTree tree;
};

/// Trains the movement tree on a simulated dataset using the config's
/// dataset and simulation settings (noise included).
DecisionTree train_tree(const Scenario& scenario, const Config& config);

/// Loads every document named by `config`. The tree is read from
/// `tree_path` when set and trained otherwise.
Models load_models(const Config& config);

struct CommitRecord {
  std::string goal;
  double confidence = 0.0;
  std::int64_t timestep = 0;
  std::size_t observations = 0;  // accepted observations at commit time
  Explanation explanation;
  CollaborationPlan plan;
};

/// Single-producer/single-consumer hand-off between pipeline stages.
template <class T>
class Channel {
public:
  void push(T v) {
    {
      std::lock_guard lock(m_);
      q_.push_back(std::move(v));
    }
    cv_.notify_one();
  }
  void close() {
    {
      std::lock_guard lock(m_);
      closed_ = true;
    }
    cv_.notify_all();
  }
  /// Blocks until a value arrives; std::nullopt once closed and drained.
  std::optional<T> pop() {
    std::unique_lock lock(m_);
    cv_.wait(lock, [&] { return closed_ || !q_.empty(); });
    if (q_.empty()) return std::nullopt;
    T v = std::move(q_.front());
    q_.pop_front();
    return v;
  }

private:
  std::mutex m_;
  std::condition_variable cv_;
  std::deque<T> q_;
  bool closed_ = false;
};

/// One observed agent: perception -> movements -> actions -> goals ->
/// verification -> collaboration. Every pass appends to the event log.
class Session {
public:
  Session(std::shared_ptr<const Models> models, const Config& config);

  /// Runs one pipeline pass and returns its events. Throws
  /// std::invalid_argument for malformed or out-of-order states.
  std::vector<PipelineEvent> tick(const WorldState& world);

  /// Feeds a whole trace. With `supervisor.concurrent` the three stages
  /// run on their own threads; the log is identical either way.
  void run(const Trace& trace);

  const std::vector<PipelineEvent>& log() const { return log_; }
  const std::optional<CommitRecord>& commitment() const { return commitment_; }
  const std::vector<Explanation>& explanations() const { return c_.reasoner.explanations(); }
  const std::vector<std::string>& observations() const { return c_.reasoner.observations(); }
  const FocusDistribution& distribution() const { return a_.focus.last_distribution(); }
  const FocusState& focus() const { return a_.focus.state(); }
  const std::vector<RecognizedAction>& actions() const { return c_.accepted; }
  std::size_t commit_count() const { return commit_count_; }
  const Models& models() const { return *models_; }
  bool verifying() const { return options_.verify; }
  /// Wall-clock seconds from the first frame to the last commitment.
  std::optional<double> inference_seconds() const;

private:
  struct AB {
    WorldState world;
    QsrFrame frame;
    FocusState focus;
    std::vector<PipelineEvent> events;
  };
  struct BC {
    WorldState world;
    std::optional<RecognizedAction> action;
    std::vector<PipelineEvent> events;
  };

  struct StageA {
    QsrEngine qsr;
    QsrLibrary memory;
    FocusEstimator focus;
  };
  struct StageB {
    ActionRecognizer recognizer;
    std::optional<QsrFrame> prev;
  };
  struct StageC {
    GoalReasoner reasoner;
    std::vector<RecognizedAction> accepted;  // forwarded to the reasoner
    std::vector<Binding> bindings;
    std::optional<RecognizedAction> last;    // last accepted, for merging repeats
  };

  AB stage_a(const WorldState& world);
  BC stage_b(AB in);
  std::vector<PipelineEvent> stage_c(BC in);
  void finish(std::vector<PipelineEvent> events);

  std::optional<std::string> label_of(const WorldState& w, std::string_view id) const;

  std::shared_ptr<const Models> models_;
  SupervisorOptions options_;
  StageA a_;
  StageB b_;
  StageC c_;
  std::vector<PipelineEvent> log_;
  std::optional<CommitRecord> commitment_;
  std::size_t commit_count_ = 0;
  std::optional<std::chrono::steady_clock::time_point> started_;
  std::optional<std::chrono::steady_clock::time_point> committed_at_;
};

struct TrialMetrics {
  std::string goal;
  std::optional<std::string> committed_goal;
  bool correct = false;
  std::size_t observed = 0;
  std::size_t missed = 0;
  std::size_t waiting = 0;
  std::size_t planned = 0;
  std::optional<std::int64_t> commit_timestep;
  std::size_t observations_at_commit = 0;
  std::size_t trace_ticks = 0;
  double inference_seconds = 0.0;
};

struct TrialResult {
  TrialMetrics metrics;
  std::vector<PipelineEvent> events;
  std::vector<RecognizedAction> actions;
};

/// Simulates `goal` from a random start chosen by `seed`, with `noise`
/// perception noise, and runs the whole trace through a session.
TrialResult run_trial(std::shared_ptr<const Models> models, const Config& config, std::string_view goal,
                      std::uint64_t seed, bool verify, double noise);

struct TableVRow {
  std::vector<std::string> observations;
  std::size_t explanations = 0;
  double micros = 0.0;
  double confidence = 0.0;
  std::optional<std::string> outcome;
};

/// Incremental explain over `observations`, one row per prefix. Time is
/// the mean over `repeats` runs of the extension step.
std::vector<TableVRow> explain_rows(const PlanLibrary& lib, const std::vector<std::string>& observations,
                                    std::size_t repeats = 1000);

std::string format_table_v(const std::vector<std::vector<TableVRow>>& trials);

struct GoalSummary {
  std::string goal;
  std::size_t trials = 0;
  double observed = 0, missed = 0, waiting = 0, planned = 0, accuracy = 0, ticks = 0, seconds = 0;
};

GoalSummary summarize(std::string_view goal, const std::vector<TrialMetrics>& trials);
std::string format_table_vi(const std::vector<GoalSummary>& rows);

}  // namespace intent

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "intent/focus.hpp"
#include "intent/movement.hpp"

namespace intent {

/// Markov-chain state machine over movement symbols describing one action.
/// Several states may emit the same symbol (e.g. STILL -> WALK -> STILL).
class MarkovFsm {
public:
  static constexpr std::size_t kEnd = static_cast<std::size_t>(-1);

  struct State {
    std::string name;
    Movement symbol = Movement::Still;
    bool initial = false;
  };
  struct Edge {
    std::size_t to = kEnd;  // kEnd = absorption
    double probability = 0.0;
  };

  MarkovFsm(std::string name, std::vector<State> states, std::vector<std::vector<Edge>> edges);

  const std::string& name() const { return name_; }
  const std::vector<State>& states() const { return states_; }
  const std::vector<std::vector<Edge>>& edges() const { return edges_; }

  bool can_start_with(Movement m) const;
  bool emits(Movement m) const;

  /// Random walk from an initial state emitting `first`, until absorption
  /// or `max_length` symbols.
  std::vector<Movement> sample(Movement first, std::size_t max_length, std::mt19937_64& rng) const;

private:
  void validate() const;

  std::string name_;
  std::vector<State> states_;
  std::vector<std::vector<Edge>> edges_;
};

/// Maps (base action, destination label) to a contextualized action.
using ContextTable = std::map<std::string, std::map<std::string, std::string>, std::less<>>;

struct ActionLibrary {
  std::vector<MarkovFsm> fsms;
  ContextTable context;
};

/// Text format:
///   fsm <Name>
///     state <id> <MOVEMENT> [initial]
///     edge <from> <to|end> [probability]
///   context <Base> <DestinationLabel> <Action>
/// A state whose edges all omit the probability gets a uniform split.
ActionLibrary parse_action_library(std::string_view text);
ActionLibrary load_action_library(const std::string& path);

/// Whitespace-separated movement tokens; `#` starts a comment.
std::vector<Movement> parse_movement_sequence(std::string_view text);

/// Repeat-filtered movement history since the last committed action.
class ObservationQueue {
public:
  /// Appends `m` unless it equals the last symbol. Returns whether it did.
  bool push(Movement m);
  void clear() { symbols_.clear(); }
  bool empty() const { return symbols_.empty(); }
  std::size_t size() const { return symbols_.size(); }
  std::span<const Movement> symbols() const { return symbols_; }
  const std::vector<Movement>& vector() const { return symbols_; }

  friend bool operator==(const ObservationQueue&, const ObservationQueue&) = default;

private:
  std::vector<Movement> symbols_;
};

ObservationQueue push_movement(Movement m, ObservationQueue q);

struct EnsembleConfig {
  std::size_t sample_count = 100;
  std::size_t sample_max_length = 12;
  double win_threshold = 0.85;
  double win_margin = 0.05;
  std::uint64_t seed = 7;
  bool parallel = false;  // sample FSMs on worker threads

  void validate() const;
};

struct FsmScore {
  std::string name;
  double score = 0.0;

  friend bool operator==(const FsmScore&, const FsmScore&) = default;
};

struct EnsembleStep {
  std::vector<FsmScore> scores;       // one per FSM, library order
  std::optional<std::size_t> winner;  // index into scores

  friend bool operator==(const EnsembleStep&, const EnsembleStep&) = default;
};

class ActionEnsemble {
public:
  ActionEnsemble(std::vector<MarkovFsm> fsms, EnsembleConfig config = {});

  /// Scores every FSM against `queue` (non-empty). The generator of each FSM
  /// is derived from (seed, FSM name, step_index) only, so results do not
  /// depend on scheduling.
  EnsembleStep step(std::span<const Movement> queue, std::uint64_t step_index) const;

  const std::vector<MarkovFsm>& fsms() const { return fsms_; }
  const EnsembleConfig& config() const { return config_; }

  bool starts_any(Movement m) const;
  /// Whether `m` can occur in an action whose first symbol is `head`.
  bool continues(Movement head, Movement m) const;

private:
  double score_fsm(const MarkovFsm& fsm, std::span<const Movement> queue, std::uint64_t step_index) const;

  std::vector<MarkovFsm> fsms_;
  EnsembleConfig config_;
};

struct RecognizedAction {
  std::string base;
  std::string contextualized;  // equals base unless contextualization applied
  bool resolved = true;        // false: contextualization needed but impossible
  OoiId target;
  std::optional<OoiId> destination;
  std::int64_t commit_timestep = 0;

  friend bool operator==(const RecognizedAction&, const RecognizedAction&) = default;
};

/// Looks up (base, destination label). Bases absent from the table pass
/// through; a base present in the table with no matching destination
/// yields std::nullopt (unresolved).
std::optional<std::string> contextualize(std::string_view base, std::optional<std::string_view> destination_label,
                                         const ContextTable& table);

ContextTable default_context_table();

/// Stateful driver: repeat filtering, queue resynchronisation, scoring and
/// commitment against the focus state.
class ActionRecognizer {
public:
  ActionRecognizer(ActionEnsemble ensemble, ContextTable context);

  /// Feeds one classified movement. Returns the ensemble step when the
  /// filtered queue changed.
  std::optional<EnsembleStep> observe(Movement m);

  /// Binds the last winner to the focus target/destination and clears the
  /// queue. Without a standing target nothing is committed and the queue is
  /// kept. `label_of` resolves OOI ids to labels for contextualization.
  std::optional<RecognizedAction> commit(const EnsembleStep& step, const FocusState& focus, std::int64_t timestep,
                                         const std::function<std::optional<std::string>(std::string_view)>& label_of);

  const ObservationQueue& queue() const { return queue_; }
  const ActionEnsemble& ensemble() const { return ensemble_; }
  std::uint64_t steps() const { return steps_; }
  void reset();

private:
  ActionEnsemble ensemble_;
  ContextTable context_;
  ObservationQueue queue_;
  std::uint64_t steps_ = 0;
};

std::string describe(const RecognizedAction& a);

}  // namespace intent

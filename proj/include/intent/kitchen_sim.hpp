#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "intent/movement.hpp"
#include "intent/qsr.hpp"
#include "intent/world.hpp"

namespace intent {

struct SimParams {
  double walk_speed = 0.2;  // m/tick
  double turn_rate = 0.3;   // rad/tick
  double reach = 0.4;       // grasp distance, m
  double noise_sigma = 0.0; // reported-position noise, m
  int dwell_ticks = 5;
  int settle_ticks = 3;     // standing still facing an item before grasping it
  int use_cycles = 3;
  std::uint64_t seed = 1;

  void validate() const;
};

enum class DirectiveKind { GoTo, Pick, Place, Dwell, UseAt };

struct Directive {
  DirectiveKind kind = DirectiveKind::Dwell;
  OoiId ooi;      // GoTo/Pick/Place/UseAt; Dwell faces it when set
  int count = 0;  // Dwell ticks, UseAt cycles

  friend bool operator==(const Directive&, const Directive&) = default;
};

using AgentScript = std::vector<Directive>;

std::string to_string(const Directive& d);

/// Breakfast, Drink or Lunch on the kitchen scenario ids. Throws
/// std::invalid_argument for any other goal.
AgentScript script_for_goal(std::string_view goal, const SimParams& params = {});

struct TickLabel {
  Movement movement = Movement::Still;
  std::optional<OoiId> target;

  std::string token() const;  // MOVEMENT or MOVEMENT/ooi
};

struct SimTick {
  WorldState reported;  // what perception sees
  TickLabel label;      // ground truth
};

/// Steering commands of interactive sessions.
struct Steer {
  enum class Kind { Idle, Move, Face, Pick, Place } kind = Kind::Idle;
  double dx = 0.0, dy = 0.0, heading = 0.0;
  OoiId ooi;
};

/// Deterministic kitchen: one agent, static furniture, movable items.
class KitchenSim {
public:
  KitchenSim(Scenario scenario, SimParams params);

  void set_agent(Point2 position, double heading);
  void load_script(AgentScript script);
  bool finished() const { return cursor_ >= script_.size(); }

  /// Executes one tick of the script (STILL once it is exhausted).
  SimTick step();
  /// Executes one steering command. Throws std::invalid_argument when the
  /// command is impossible (out of reach, nothing held, ...).
  SimTick steer(const Steer& cmd);

  const WorldState& truth() const { return truth_; }
  const Scenario& scenario() const { return scenario_; }
  const SimParams& params() const { return params_; }
  std::int64_t next_timestep() const { return next_t_; }

private:
  SimTick emit(TickLabel label);
  void turn_toward(Point2 p);
  void grasp(const OoiId& id);
  void release_at(Point2 p);
  Ooi& ooi(const OoiId& id);

  Scenario scenario_;
  SimParams params_;
  WorldState truth_;
  AgentScript script_;
  std::size_t cursor_ = 0;
  int sub_ = 0;  // progress inside the current directive
  std::map<OoiId, OoiId> placed_at_;  // destination ooi -> item last placed there
  std::mt19937_64 noise_rng_;
  std::int64_t next_t_ = 0;
};

/// Uniform position inside the room, at least `clearance` from every OOI.
Point2 random_start(const Scenario& scenario, std::mt19937_64& rng, double clearance = 1.0);

/// Runs `script` to completion from a start pose. Ticks are capped at
/// `max_ticks` to guard against unreachable directives.
Trace run_script(const Scenario& scenario, const AgentScript& script, const SimParams& params, Point2 start,
                 double heading, std::size_t max_ticks = 5000);

/// Labeled trace of one goal from a seeded random start.
Trace simulate_goal(const Scenario& scenario, std::string_view goal, const SimParams& params);

/// Random still/walk/pick/transport/place/still trials, one trace each.
std::vector<Trace> generate_dataset_traces(const Scenario& scenario, std::size_t trials, const SimParams& params);

/// Feature rows from labeled traces; `group` is the trace index. Ticks
/// without a labelled target are skipped.
LabeledDataset dataset_from_traces(const std::vector<Trace>& traces, const QsrConfig& qsr = {});

LabeledDataset generate_dataset(const Scenario& scenario, std::size_t trials, const SimParams& params,
                                const QsrConfig& qsr = {});

}  // namespace intent

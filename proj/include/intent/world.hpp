#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intent {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

double distance(Point2 a, Point2 b);

/// Wraps an angle into [-pi, pi).
double normalize_angle(double radians);

using OoiId = std::string;

struct AgentPose {
  Point2 position;
  double heading = 0.0;  // radians, [-pi, pi)
  std::optional<OoiId> held_object;

  friend bool operator==(const AgentPose&, const AgentPose&) = default;
};

/// Object of interest: anything the agent can act on or toward. Walls and
/// floor are never OOIs.
struct Ooi {
  OoiId id;
  std::string label;
  Point2 position;
  bool graspable = false;

  friend bool operator==(const Ooi&, const Ooi&) = default;
};

struct WorldState {
  std::int64_t timestep = 0;
  AgentPose agent;
  std::vector<Ooi> oois;

  const Ooi* find(std::string_view id) const;
  Ooi* find(std::string_view id);

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

/// Checks the per-state invariants (finite coordinates, unique ids, held
/// object exists and is co-located). Throws std::invalid_argument.
void validate(const WorldState& state);

/// Absolute angle in [0, pi] between the agent's heading and the
/// agent->target line. A coincident target yields 0.
double heading_angle_to(const AgentPose& agent, Point2 target);

struct RoomBounds {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  friend bool operator==(const RoomBounds&, const RoomBounds&) = default;
};

struct Scenario {
  std::string id;
  RoomBounds room;
  std::vector<std::string> vocabulary;
  WorldState initial;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

Scenario parse_scenario(std::string_view document);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& scenario);

/// A recorded observation stream. `labels[i]` optionally carries the
/// ground-truth movement token for states[i], written as `MOVEMENT` or
/// `MOVEMENT/ooi` when the labelled target is known.
struct Trace {
  std::string scenario_id;
  std::vector<WorldState> states;
  std::vector<std::optional<std::string>> labels;

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Throws std::invalid_argument unless the trace is non-empty, timesteps
/// are contiguous from 0 and every state is valid.
void validate(const Trace& trace);

std::string serialize_trace(const Trace& trace);
Trace parse_trace(std::string_view text);
Trace load_trace(const std::string& path);

std::string serialize_state(const WorldState& state);
WorldState parse_state(std::string_view line, std::size_t line_no = 0);

}  // namespace intent

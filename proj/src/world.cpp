#include "intent/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "intent/text_util.hpp"

namespace intent {

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double normalize_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(radians + std::numbers::pi, two_pi);
  if (r < 0.0) r += two_pi;
  r -= std::numbers::pi;
  // fmod can land exactly on +pi after the shift for inputs like 3*pi.
  if (r >= std::numbers::pi) r -= two_pi;
  return r;
}

const Ooi* WorldState::find(std::string_view id) const {
  auto it = std::find_if(oois.begin(), oois.end(), [&](const Ooi& o) { return o.id == id; });
  return it == oois.end() ? nullptr : &*it;
}

Ooi* WorldState::find(std::string_view id) {
  auto it = std::find_if(oois.begin(), oois.end(), [&](const Ooi& o) { return o.id == id; });
  return it == oois.end() ? nullptr : &*it;
}

namespace {

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

void validate(const WorldState& state) {
  if (state.timestep < 0) throw std::invalid_argument("negative timestep");
  if (!finite(state.agent.position) || !std::isfinite(state.agent.heading))
    throw std::invalid_argument("agent pose is not finite");
  std::set<std::string_view> ids;
  for (const auto& o : state.oois) {
    if (!finite(o.position)) throw std::invalid_argument("OOI '" + o.id + "' has non-finite position");
    if (!ids.insert(o.id).second) throw std::invalid_argument("duplicate OOI id '" + o.id + "'");
  }
  if (state.agent.held_object) {
    const Ooi* held = state.find(*state.agent.held_object);
    if (!held) throw std::invalid_argument("held object '" + *state.agent.held_object + "' does not exist");
    if (!(held->position == state.agent.position))
      throw std::invalid_argument("held object '" + held->id + "' is not co-located with the agent");
  }
}

double heading_angle_to(const AgentPose& agent, Point2 target) {
  const double dx = target.x - agent.position.x;
  const double dy = target.y - agent.position.y;
  if (std::hypot(dx, dy) < 1e-12) return 0.0;
  return std::abs(normalize_angle(std::atan2(dy, dx) - agent.heading));
}

// ---------------------------------------------------------------------------
// Scenario documents

namespace {

bool parse_bool(std::string_view s, std::size_t line) {
  if (s == "yes" || s == "true" || s == "1") return true;
  if (s == "no" || s == "false" || s == "0") return false;
  throw ParseError("expected yes/no, got '" + std::string(s) + "'", line);
}

double parse_coord(std::string_view s, std::size_t line) {
  double v = 0.0;
  try {
    v = text::to_double(s, line);
  } catch (const ParseError&) {
    throw ParseError("malformed geometry '" + std::string(s) + "'", line);
  }
  if (!std::isfinite(v)) throw ParseError("malformed geometry '" + std::string(s) + "'", line);
  return v;
}

}  // namespace

Scenario parse_scenario(std::string_view document) {
  Scenario sc;
  std::string section;
  bool have_vocabulary = false;
  std::set<std::string, std::less<>> ids;
  std::size_t line_no = 0;

  for (auto raw : text::lines(document)) {
    ++line_no;
    auto line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", line_no);
      section = std::string(line.substr(1, line.size() - 2));
      if (section == "vocabulary") have_vocabulary = true;
      if (section != "scenario" && section != "vocabulary" && section != "agent" && section != "ooi")
        throw ParseError("unknown section [" + section + "]", line_no);
      continue;
    }
    if (section.empty()) throw ParseError("content before first section", line_no);

    if (section == "vocabulary") {
      for (auto w : text::split_ws(line)) sc.vocabulary.emplace_back(w);
      continue;
    }
    if (section == "ooi") {
      const auto f = text::split_ws(line);
      if (f.size() != 5) throw ParseError("OOI entry needs: id label x y graspable", line_no);
      Ooi o;
      o.id = std::string(f[0]);
      o.label = std::string(f[1]);
      o.position = {parse_coord(f[2], line_no), parse_coord(f[3], line_no)};
      o.graspable = parse_bool(f[4], line_no);
      if (!ids.insert(o.id).second) throw ParseError("duplicate OOI id '" + o.id + "'", line_no);
      sc.initial.oois.push_back(std::move(o));
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    if (section == "scenario") {
      if (key == "id") {
        sc.id = std::string(value);
      } else if (key == "room") {
        const auto f = text::split_ws(value);
        if (f.size() != 4) throw ParseError("room needs: min_x min_y max_x max_y", line_no);
        sc.room = {parse_coord(f[0], line_no), parse_coord(f[1], line_no), parse_coord(f[2], line_no),
                   parse_coord(f[3], line_no)};
        if (sc.room.max_x <= sc.room.min_x || sc.room.max_y <= sc.room.min_y)
          throw ParseError("malformed geometry: empty room", line_no);
      } else {
        throw ParseError("unknown scenario key '" + std::string(key) + "'", line_no);
      }
    } else {  // agent
      if (key == "x") {
        sc.initial.agent.position.x = parse_coord(value, line_no);
      } else if (key == "y") {
        sc.initial.agent.position.y = parse_coord(value, line_no);
      } else if (key == "heading") {
        sc.initial.agent.heading = normalize_angle(parse_coord(value, line_no));
      } else {
        throw ParseError("unknown agent key '" + std::string(key) + "'", line_no);
      }
    }
  }

  if (have_vocabulary) {
    for (const auto& o : sc.initial.oois) {
      if (std::find(sc.vocabulary.begin(), sc.vocabulary.end(), o.label) == sc.vocabulary.end())
        throw ParseError("unknown label '" + o.label + "' for OOI '" + o.id + "'");
    }
  }
  sc.initial.timestep = 0;
  sc.initial.agent.held_object.reset();
  return sc;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(text::read_file(path)); }

std::string serialize_scenario(const Scenario& sc) {
  std::ostringstream out;
  out << "[scenario]\n";
  out << "id = " << sc.id << "\n";
  out << "room = " << text::fmt(sc.room.min_x) << ' ' << text::fmt(sc.room.min_y) << ' ' << text::fmt(sc.room.max_x)
      << ' ' << text::fmt(sc.room.max_y) << "\n\n";
  if (!sc.vocabulary.empty()) {
    out << "[vocabulary]\n";
    for (std::size_t i = 0; i < sc.vocabulary.size(); ++i) out << (i ? " " : "") << sc.vocabulary[i];
    out << "\n\n";
  }
  out << "[agent]\n";
  out << "x = " << text::fmt(sc.initial.agent.position.x) << "\n";
  out << "y = " << text::fmt(sc.initial.agent.position.y) << "\n";
  out << "heading = " << text::fmt(sc.initial.agent.heading) << "\n\n";
  out << "[ooi]\n";
  for (const auto& o : sc.initial.oois) {
    out << o.id << ' ' << o.label << ' ' << text::fmt(o.position.x) << ' ' << text::fmt(o.position.y) << ' '
        << (o.graspable ? "yes" : "no") << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Trace logs: one WorldState per line,
//   t ax ay heading held n {id label x y graspable}* [label]

std::string serialize_state(const WorldState& s) {
  std::string out;
  out += std::to_string(s.timestep);
  out += ' ' + text::fmt(s.agent.position.x);
  out += ' ' + text::fmt(s.agent.position.y);
  out += ' ' + text::fmt(s.agent.heading);
  out += ' ' + (s.agent.held_object ? *s.agent.held_object : std::string("-"));
  out += ' ' + std::to_string(s.oois.size());
  for (const auto& o : s.oois) {
    out += ' ' + o.id + ' ' + o.label + ' ' + text::fmt(o.position.x) + ' ' + text::fmt(o.position.y) + ' ' +
           (o.graspable ? "1" : "0");
  }
  return out;
}

namespace {

WorldState parse_state_fields(const std::vector<std::string_view>& f, std::size_t& used, std::size_t line_no) {
  if (f.size() < 6) throw ParseError("truncated world state", line_no);
  WorldState s;
  s.timestep = text::to_int(f[0], line_no);
  s.agent.position = {parse_coord(f[1], line_no), parse_coord(f[2], line_no)};
  s.agent.heading = parse_coord(f[3], line_no);
  if (f[4] != "-") s.agent.held_object = std::string(f[4]);
  const auto n = text::to_int(f[5], line_no);
  if (n < 0 || f.size() < 6 + 5 * static_cast<std::size_t>(n)) throw ParseError("truncated OOI list", line_no);
  for (std::int64_t i = 0; i < n; ++i) {
    const std::size_t b = 6 + 5 * static_cast<std::size_t>(i);
    Ooi o;
    o.id = std::string(f[b]);
    o.label = std::string(f[b + 1]);
    o.position = {parse_coord(f[b + 2], line_no), parse_coord(f[b + 3], line_no)};
    o.graspable = parse_bool(f[b + 4], line_no);
    s.oois.push_back(std::move(o));
  }
  used = 6 + 5 * static_cast<std::size_t>(n);
  return s;
}

}  // namespace

WorldState parse_state(std::string_view line, std::size_t line_no) {
  const auto f = text::split_ws(line);
  std::size_t used = 0;
  auto s = parse_state_fields(f, used, line_no);
  if (used != f.size()) throw ParseError("trailing fields after world state", line_no);
  return s;
}

void validate(const Trace& trace) {
  if (trace.states.empty()) throw std::invalid_argument("empty trace");
  if (!trace.labels.empty() && trace.labels.size() != trace.states.size())
    throw std::invalid_argument("label column length differs from state count");
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    if (trace.states[i].timestep != static_cast<std::int64_t>(i))
      throw std::invalid_argument("timesteps must be contiguous from 0");
    validate(trace.states[i]);
  }
}

std::string serialize_trace(const Trace& trace) {
  std::string out = "# scenario " + trace.scenario_id + "\n";
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    out += serialize_state(trace.states[i]);
    if (i < trace.labels.size() && trace.labels[i]) out += ' ' + *trace.labels[i];
    out += '\n';
  }
  return out;
}

Trace parse_trace(std::string_view content) {
  Trace trace;
  bool any_label = false;
  std::size_t line_no = 0;
  for (auto raw : text::lines(content)) {
    ++line_no;
    auto line = text::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto f = text::split_ws(line.substr(1));
      if (f.size() == 2 && f[0] == "scenario") trace.scenario_id = std::string(f[1]);
      continue;
    }
    const auto f = text::split_ws(line);
    std::size_t used = 0;
    trace.states.push_back(parse_state_fields(f, used, line_no));
    if (used + 1 == f.size()) {
      trace.labels.emplace_back(std::string(f.back()));
      any_label = true;
    } else if (used == f.size()) {
      trace.labels.emplace_back(std::nullopt);
    } else {
      throw ParseError("unexpected trailing fields", line_no);
    }
  }
  if (!any_label) trace.labels.clear();
  return trace;
}

Trace load_trace(const std::string& path) { return parse_trace(text::read_file(path)); }

}  // namespace intent

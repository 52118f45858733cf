#include "intent/kitchen_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "intent/text_util.hpp"

namespace intent {

void SimParams::validate() const {
  if (!(walk_speed > 0.0) || !(turn_rate > 0.0) || !(reach > 0.0))
    throw std::invalid_argument("simulation speeds and reach must be positive");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise sigma must be non-negative");
  if (dwell_ticks < 1 || use_cycles < 1) throw std::invalid_argument("dwell ticks and use cycles must be positive");
  if (settle_ticks < 0) throw std::invalid_argument("settle ticks must be non-negative");
}

std::string to_string(const Directive& d) {
  switch (d.kind) {
    case DirectiveKind::GoTo: return "GoTo(" + d.ooi + ")";
    case DirectiveKind::Pick: return "Pick(" + d.ooi + ")";
    case DirectiveKind::Place: return "Place(" + d.ooi + ")";
    case DirectiveKind::Dwell:
      return "Dwell(" + (d.ooi.empty() ? "" : d.ooi + ", ") + std::to_string(d.count) + ")";
    case DirectiveKind::UseAt: return "UseAt(" + d.ooi + ", " + std::to_string(d.count) + ")";
  }
  return "?";
}

AgentScript script_for_goal(std::string_view goal, const SimParams& p) {
  using K = DirectiveKind;
  auto carry = [&p](const OoiId& item, const OoiId& to) {
    return AgentScript{{K::GoTo, item, 0}, {K::Dwell, item, p.settle_ticks}, {K::Pick, item, 0},
                       {K::GoTo, to, 0},   {K::Place, to, 0}};
  };
  AgentScript s{{K::Dwell, "", p.dwell_ticks}};
  auto append = [&s](const AgentScript& more) { s.insert(s.end(), more.begin(), more.end()); };
  auto use = [&](const OoiId& at) { s.push_back({K::UseAt, at, p.use_cycles}); };

  if (goal == "Breakfast") {
    append(carry("biscuits", "plate"));
    use("plate");
    append(carry("plate", "sink"));
    use("sink");
  } else if (goal == "Drink") {
    append(carry("bottle", "glass"));
    use("glass");
    append(carry("glass", "sink"));
    use("sink");
  } else if (goal == "Lunch") {
    append(carry("meal", "hobs"));
    use("hobs");
    append(carry("meal", "plate"));
    use("plate");
    append(carry("plate", "sink"));
    use("sink");
  } else {
    throw std::invalid_argument("no script for goal " + std::string(goal));
  }
  s.push_back({K::Dwell, "", p.dwell_ticks});
  return s;
}

std::string TickLabel::token() const {
  std::string out(to_string(movement));
  if (target) out += "/" + *target;
  return out;
}

KitchenSim::KitchenSim(Scenario scenario, SimParams params)
    : scenario_(std::move(scenario)), params_(params), truth_(scenario_.initial), noise_rng_(params.seed) {
  params_.validate();
  validate(truth_);
}

void KitchenSim::set_agent(Point2 position, double heading) {
  if (truth_.agent.held_object) ooi(*truth_.agent.held_object).position = position;
  truth_.agent.position = position;
  truth_.agent.heading = normalize_angle(heading);
}

void KitchenSim::load_script(AgentScript script) {
  for (const auto& d : script)
    if (d.kind != DirectiveKind::Dwell && !truth_.find(d.ooi)) throw std::invalid_argument("script refers to unknown OOI " + d.ooi);
  script_ = std::move(script);
  cursor_ = 0;
  sub_ = 0;
}

Ooi& KitchenSim::ooi(const OoiId& id) {
  auto* o = truth_.find(id);
  if (!o) throw std::invalid_argument("unknown OOI " + id);
  return *o;
}

void KitchenSim::turn_toward(Point2 p) {
  const auto& a = truth_.agent.position;
  if (distance(a, p) < 1e-9) return;
  const double want = std::atan2(p.y - a.y, p.x - a.x);
  const double diff = normalize_angle(want - truth_.agent.heading);
  truth_.agent.heading = normalize_angle(truth_.agent.heading + std::clamp(diff, -params_.turn_rate, params_.turn_rate));
}

void KitchenSim::grasp(const OoiId& id) {
  if (truth_.agent.held_object) throw std::invalid_argument("already holding " + *truth_.agent.held_object);
  auto& o = ooi(id);
  if (!o.graspable) throw std::invalid_argument(id + " cannot be grasped");
  if (distance(o.position, truth_.agent.position) > params_.reach + 1e-9)
    throw std::invalid_argument(id + " is out of reach");
  truth_.agent.held_object = id;
  o.position = truth_.agent.position;
  for (auto it = placed_at_.begin(); it != placed_at_.end();)
    it = it->second == id ? placed_at_.erase(it) : std::next(it);
}

void KitchenSim::release_at(Point2 p) {
  if (!truth_.agent.held_object) throw std::invalid_argument("nothing held");
  ooi(*truth_.agent.held_object).position = p;
  truth_.agent.held_object.reset();
}

SimTick KitchenSim::emit(TickLabel label) {
  truth_.timestep = next_t_++;
  SimTick out{truth_, std::move(label)};
  if (params_.noise_sigma > 0.0) {
    std::normal_distribution<double> n(0.0, params_.noise_sigma);
    out.reported.agent.position.x += n(noise_rng_);
    out.reported.agent.position.y += n(noise_rng_);
    for (auto& o : out.reported.oois) {
      if (out.reported.agent.held_object && o.id == *out.reported.agent.held_object) {
        o.position = out.reported.agent.position;
      } else {
        o.position.x += n(noise_rng_);
        o.position.y += n(noise_rng_);
      }
    }
  }
  return out;
}

SimTick KitchenSim::step() {
  using K = DirectiveKind;
  const auto& held = truth_.agent.held_object;
  while (cursor_ < script_.size()) {
    const Directive& d = script_[cursor_];
    switch (d.kind) {
      case K::GoTo: {
        const Point2 goal = ooi(d.ooi).position;
        const double dist = distance(truth_.agent.position, goal);
        if (dist <= params_.reach + 1e-9) {
          ++cursor_;
          continue;
        }
        turn_toward(goal);
        const double stride = std::min(params_.walk_speed, dist - params_.reach);
        auto& a = truth_.agent.position;
        a.x += (goal.x - a.x) / dist * stride;
        a.y += (goal.y - a.y) / dist * stride;
        if (held) ooi(*held).position = a;
        if (held) return emit({Movement::Transport, *held});
        return emit({Movement::Walk, d.ooi});
      }
      case K::Pick: {
        turn_toward(ooi(d.ooi).position);
        grasp(d.ooi);
        ++cursor_;
        return emit({Movement::Pick, d.ooi});
      }
      case K::Place: {
        const Point2 at = ooi(d.ooi).position;
        turn_toward(at);
        const OoiId item = held.value_or("");
        release_at(at);
        placed_at_[d.ooi] = item;
        ++cursor_;
        return emit({Movement::Place, item});
      }
      case K::Dwell: {
        if (sub_ >= d.count) {
          sub_ = 0;
          ++cursor_;
          continue;
        }
        ++sub_;
        if (!d.ooi.empty()) turn_toward(ooi(d.ooi).position);
        if (held) return emit({Movement::Still, *held});
        return emit({Movement::Still, d.ooi.empty() ? std::nullopt : std::optional<OoiId>(d.ooi)});
      }
      case K::UseAt: {
        if (sub_ >= 2 * d.count) {
          sub_ = 0;
          ++cursor_;
          continue;
        }
        auto it = placed_at_.find(d.ooi);
        const OoiId item = held ? *held : (it != placed_at_.end() ? it->second : "");
        if (item.empty()) throw std::invalid_argument("nothing to use at " + d.ooi);
        const Point2 at = ooi(d.ooi).position;
        turn_toward(at);
        if (sub_ % 2 == 0) {
          grasp(item);
          ++sub_;
          return emit({Movement::Pick, item});
        }
        release_at(at);
        placed_at_[d.ooi] = item;
        ++sub_;
        return emit({Movement::Place, item});
      }
    }
  }
  return emit({Movement::Still, held ? std::optional<OoiId>(*held) : std::nullopt});
}

SimTick KitchenSim::steer(const Steer& cmd) {
  const auto& held = truth_.agent.held_object;
  switch (cmd.kind) {
    case Steer::Kind::Idle:
      return emit({Movement::Still, held ? std::optional<OoiId>(*held) : std::nullopt});
    case Steer::Kind::Move: {
      const double len = std::hypot(cmd.dx, cmd.dy);
      if (!std::isfinite(len)) throw std::invalid_argument("non-finite move");
      const double k = len > params_.walk_speed ? params_.walk_speed / len : 1.0;
      auto& a = truth_.agent.position;
      const auto& r = scenario_.room;
      const Point2 next{std::clamp(a.x + cmd.dx * k, r.min_x, r.max_x), std::clamp(a.y + cmd.dy * k, r.min_y, r.max_y)};
      if (len > 1e-12) turn_toward(next);
      a = next;
      if (held) ooi(*held).position = a;
      if (len <= 1e-12) return emit({Movement::Still, held ? std::optional<OoiId>(*held) : std::nullopt});
      return emit({held ? Movement::Transport : Movement::Walk, held ? std::optional<OoiId>(*held) : std::nullopt});
    }
    case Steer::Kind::Face: {
      if (!std::isfinite(cmd.heading)) throw std::invalid_argument("non-finite heading");
      truth_.agent.heading = normalize_angle(cmd.heading);
      return emit({Movement::Still, held ? std::optional<OoiId>(*held) : std::nullopt});
    }
    case Steer::Kind::Pick:
      grasp(cmd.ooi);
      return emit({Movement::Pick, cmd.ooi});
    case Steer::Kind::Place: {
      if (!held) throw std::invalid_argument("nothing held");
      const OoiId item = *held;
      // lands on the nearest OOI within reach, otherwise where the agent stands
      Point2 at = truth_.agent.position;
      const Ooi* best = nullptr;
      for (const auto& o : truth_.oois) {
        if (o.id == item) continue;
        const double dd = distance(o.position, at);
        if (dd <= params_.reach + 1e-9 && (!best || dd < distance(best->position, at))) best = &o;
      }
      if (best) {
        placed_at_[best->id] = item;
        at = best->position;
      }
      release_at(at);
      return emit({Movement::Place, item});
    }
  }
  throw std::logic_error("unhandled steering command");
}

Point2 random_start(const Scenario& scenario, std::mt19937_64& rng, double clearance) {
  const auto& r = scenario.room;
  std::uniform_real_distribution<double> ux(r.min_x + 0.3, r.max_x - 0.3), uy(r.min_y + 0.3, r.max_y - 0.3);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const Point2 p{ux(rng), uy(rng)};
    const bool clear = std::all_of(scenario.initial.oois.begin(), scenario.initial.oois.end(),
                                   [&](const Ooi& o) { return distance(o.position, p) >= clearance; });
    if (clear) return p;
  }
  throw std::runtime_error("no free start position in scenario " + scenario.id);
}

Trace run_script(const Scenario& scenario, const AgentScript& script, const SimParams& params, Point2 start,
                 double heading, std::size_t max_ticks) {
  KitchenSim sim(scenario, params);
  sim.set_agent(start, heading);
  sim.load_script(script);
  Trace t;
  t.scenario_id = scenario.id;
  while (!sim.finished()) {
    if (t.states.size() >= max_ticks) throw std::runtime_error("script did not finish within the tick budget");
    auto tick = sim.step();
    // the final step() may only advance the cursor past trailing directives
    t.states.push_back(std::move(tick.reported));
    t.labels.push_back(tick.label.token());
  }
  return t;
}

Trace simulate_goal(const Scenario& scenario, std::string_view goal, const SimParams& params) {
  std::mt19937_64 rng(params.seed ^ 0x5eed5eedULL);
  const Point2 start = random_start(scenario, rng);
  std::uniform_real_distribution<double> uh(-std::numbers::pi, std::numbers::pi);
  return run_script(scenario, script_for_goal(goal, params), params, start, uh(rng));
}

std::vector<Trace> generate_dataset_traces(const Scenario& scenario, std::size_t trials, const SimParams& params) {
  if (trials == 0) throw std::invalid_argument("at least one trial is required");
  std::vector<const Ooi*> graspable, all;
  for (const auto& o : scenario.initial.oois) {
    all.push_back(&o);
    if (o.graspable) graspable.push_back(&o);
  }
  if (graspable.empty() || all.size() < 2) throw std::invalid_argument("scenario has nothing to carry");

  std::mt19937_64 rng(params.seed);
  std::vector<Trace> out;
  for (std::size_t i = 0; i < trials; ++i) {
    const Point2 start = random_start(scenario, rng);
    const double heading = std::uniform_real_distribution<double>(-std::numbers::pi, std::numbers::pi)(rng);
    const auto* item = graspable[std::uniform_int_distribution<std::size_t>(0, graspable.size() - 1)(rng)];
    const Ooi* dest = item;
    while (dest == item) dest = all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
    std::uniform_int_distribution<int> dwell(1, params.dwell_ticks);
    using K = DirectiveKind;
    const AgentScript script{{K::Dwell, "", dwell(rng)},  {K::GoTo, item->id, 0},
                             {K::Dwell, item->id, params.settle_ticks}, {K::Pick, item->id, 0},
                             {K::GoTo, dest->id, 0},      {K::Place, dest->id, 0},
                             {K::Dwell, "", dwell(rng)}};
    SimParams p = params;
    p.seed = rng();
    auto trace = run_script(scenario, script, p, start, heading);
    // The target of the standing-still ticks is the object about to be or
    // just carried.
    for (auto& l : trace.labels)
      if (l && l->find('/') == std::string::npos) *l += "/" + item->id;
    out.push_back(std::move(trace));
  }
  return out;
}

LabeledDataset dataset_from_traces(const std::vector<Trace>& traces, const QsrConfig& qsr) {
  LabeledDataset rows;
  for (std::size_t g = 0; g < traces.size(); ++g) {
    QsrEngine engine(qsr);
    QsrLibrary lib;
    std::optional<QsrFrame> prev;
    for (std::size_t i = 0; i < traces[g].states.size(); ++i) {
      auto frame = engine.ingest(traces[g].states[i], lib);
      const auto& label = traces[g].labels.at(i);
      if (label) {
        const auto slash = label->find('/');
        if (slash != std::string::npos) {
          LabeledRow row;
          row.features = extract_features(frame, prev ? &*prev : nullptr, label->substr(slash + 1));
          row.label = parse_movement(std::string_view(*label).substr(0, slash));
          row.group = static_cast<int>(g);
          rows.push_back(row);
        }
      }
      prev = std::move(frame);
    }
  }
  return rows;
}

LabeledDataset generate_dataset(const Scenario& scenario, std::size_t trials, const SimParams& params,
                                const QsrConfig& qsr) {
  return dataset_from_traces(generate_dataset_traces(scenario, trials, params), qsr);
}

}  // namespace intent

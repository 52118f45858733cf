#include "intent/supervisor.hpp"

#include <algorithm>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "intent/text_util.hpp"

namespace intent {

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Frame: return "frame";
    case EventKind::Focus: return "focus";
    case EventKind::Movement: return "movement";
    case EventKind::Action: return "action";
    case EventKind::Explanation: return "explanation";
    case EventKind::Commitment: return "commitment";
    case EventKind::Collaboration: return "collaboration";
    case EventKind::Rejection: return "rejection";
  }
  return "?";
}

std::string to_line(const PipelineEvent& e) {
  return "t=" + std::to_string(e.timestep) + " " + std::string(to_string(e.kind)) + " " + e.payload;
}

std::string to_text(const std::vector<PipelineEvent>& log) {
  std::string out;
  for (const auto& e : log) out += to_line(e) + "\n";
  return out;
}

std::string describe(const PlannedAction& a) {
  std::string out = a.action;
  if (!a.target) return out;
  out += "(" + *a.target;
  if (a.destination) out += (a.action == "PickAndPlace" ? " -> " : " @ ") + *a.destination;
  return out + ")";
}

CollaborationPlan plan_collaboration(const PlanLibrary& lib, const Explanation& e, const KnowledgeBase& kb,
                                     std::string_view robot_class) {
  const auto steps = frontier(lib, e);
  std::size_t trigger = steps.size();
  while (trigger > 0 && kb.robot_capable(steps[trigger - 1].symbol, robot_class)) --trigger;
  CollaborationPlan p;
  p.trigger = trigger;
  p.wait_for.assign(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(trigger));
  p.robot_actions.assign(steps.begin() + static_cast<std::ptrdiff_t>(trigger), steps.end());
  return p;
}

std::string describe(const CollaborationPlan& p) {
  auto list = [&](std::size_t from, std::size_t to, const std::vector<FrontierStep>& steps) {
    std::string out = "[";
    for (std::size_t i = from; i < to; ++i) {
      if (i > from) out += ", ";
      out += i < p.grounded.size() ? describe(p.grounded[i]) : steps[i - from].symbol;
    }
    return out + "]";
  };
  const std::size_t total = p.wait_for.size() + p.robot_actions.size();
  return "wait=" + list(0, p.trigger, p.wait_for) + " robot=" + list(p.trigger, total, p.robot_actions);
}

namespace {

const Ooi* ooi_by_label(const Scenario& s, std::string_view label) {
  for (const auto& o : s.initial.oois)
    if (o.label == label) return &o;
  return nullptr;
}

std::optional<std::string> inferred_destination(const KnowledgeBase& kb, std::string_view actor,
                                                std::string_view action, std::string_view target) {
  try {
    const auto v = kb.validate_action(actor, action, target, std::nullopt);
    return v.destination;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

/// Binds each frontier step to OOIs: constrained targets prefer the most
/// recently involved candidate, unconstrained ones follow the previous step,
/// destinations come from inference rules (looking one step ahead for
/// carries).
std::vector<PlannedAction> ground(const std::vector<FrontierStep>& steps, const Models& m, std::string_view actor,
                                  const std::vector<Binding>& observed) {
  std::vector<std::string> mentions;
  for (const auto& b : observed) {
    mentions.push_back(b.target);
    if (b.destination) mentions.push_back(*b.destination);
  }
  auto recency = [&](const std::string& label) -> long {
    for (std::size_t i = mentions.size(); i-- > 0;)
      if (mentions[i] == label) return static_cast<long>(i);
    return -1;
  };

  std::vector<std::optional<std::string>> targets(steps.size());
  std::optional<std::string> carried = observed.empty() ? std::nullopt : std::optional(observed.back().target);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& c = steps[i].constraint;
    if (c.target) {
      std::optional<std::string> pick;
      long best = -2;
      for (const auto& o : m.scenario.initial.oois) {
        if (!m.kb.has_entity(o.label) || !m.kb.satisfies(o.label, parse_role_constraint(*c.target))) continue;
        const long r = recency(o.label);
        if (r > best) {
          best = r;
          pick = o.label;
        }
      }
      targets[i] = pick;
    } else {
      targets[i] = carried;
    }
    if (targets[i]) {
      carried = targets[i];
      mentions.push_back(*targets[i]);
      if (auto d = inferred_destination(m.kb, actor, steps[i].symbol, *targets[i])) mentions.push_back(*d);
    }
  }

  std::vector<PlannedAction> out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    PlannedAction a{steps[i].symbol, std::nullopt, std::nullopt};
    if (targets[i]) {
      if (const auto* o = ooi_by_label(m.scenario, *targets[i])) a.target = o->id;
      auto d = inferred_destination(m.kb, actor, steps[i].symbol, *targets[i]);
      if (!d && i + 1 < steps.size() && targets[i + 1] == targets[i])
        d = inferred_destination(m.kb, actor, steps[i + 1].symbol, *targets[i]);
      if (d)
        if (const auto* o = ooi_by_label(m.scenario, *d)) a.destination = o->id;
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::string frame_payload(const WorldState& w, const QsrFrame& f) {
  return "agent=" + text::fixed(w.agent.position.x, 3) + "," + text::fixed(w.agent.position.y, 3) +
         " heading=" + text::fixed(w.agent.heading, 3) + " held=" + w.agent.held_object.value_or("-") +
         " mos=" + std::string(to_string(f.mos)) + " hold=" + std::string(to_string(f.hold));
}

std::string focus_payload(const FocusState& s, const FocusDistribution& d) {
  std::string out = "target=" + s.current_target.value_or("-") + " destination=" + s.current_destination.value_or("-") + " p=";
  for (std::size_t i = 0; i < d.entries.size(); ++i)
    out += (i ? "," : "") + d.entries[i].id + ":" + text::fixed(d.entries[i].probability, 4);
  return out;
}

}  // namespace

DecisionTree train_tree(const Scenario& scenario, const Config& config) {
  SimParams p = config.sim;
  p.seed = config.dataset.seed;
  p.noise_sigma = config.dataset.noise_sigma;
  const auto rows = generate_dataset(scenario, config.dataset.trials, p, config.qsr);
  return train(rows, config.tree);
}

Models load_models(const Config& config) {
  Models m;
  m.scenario = load_scenario(config.scenario_path);
  m.plans = load_plan_library(config.plan_path);
  m.kb = KnowledgeBase::load(config.kb_path);
  m.actions = load_action_library(config.actions_path);
  m.tree = config.tree_path.empty() ? train_tree(m.scenario, config)
                                    : DecisionTree::parse(text::read_file(config.tree_path));
  for (const auto& o : m.scenario.initial.oois)
    if (!m.kb.has_entity(o.label)) throw std::invalid_argument("OOI label " + o.label + " is not in the knowledge base");
  for (const auto& t : m.plans.terminals)
    if (!m.kb.has_action(t)) throw std::invalid_argument("plan action " + t + " has no knowledge-base rule");
  return m;
}

Session::Session(std::shared_ptr<const Models> models, const Config& config)
    : models_(std::move(models)),
      options_(config.supervisor),
      a_{QsrEngine(config.qsr), {}, FocusEstimator(config.focus)},
      b_{ActionRecognizer(ActionEnsemble(models_->actions.fsms, config.ensemble), models_->actions.context), {}},
      c_{GoalReasoner(models_->plans), {}, {}, {}} {
  if (!models_->kb.has_entity(options_.human) && !models_->kb.has_class(options_.human))
    throw std::invalid_argument("observed agent " + options_.human + " is not in the knowledge base");
}

std::optional<std::string> Session::label_of(const WorldState& w, std::string_view id) const {
  if (const auto* o = w.find(id)) return o->label;
  return std::nullopt;
}

Session::AB Session::stage_a(const WorldState& world) {
  AB out;
  out.world = world;
  out.frame = a_.qsr.ingest(world, a_.memory);
  const auto t = world.timestep;
  out.events.push_back({t, EventKind::Frame, frame_payload(world, out.frame)});
  if (!world.oois.empty()) {
    a_.focus.observe(out.frame, world);
    out.events.push_back({t, EventKind::Focus, focus_payload(a_.focus.state(), a_.focus.last_distribution())});
  }
  out.focus = a_.focus.state();
  return out;
}

Session::BC Session::stage_b(AB in) {
  BC out{std::move(in.world), std::nullopt, std::move(in.events)};
  const auto t = out.world.timestep;
  const auto prev = std::move(b_.prev);
  b_.prev = in.frame;
  if (!in.focus.current_target) return out;

  const auto features = extract_features(in.frame, prev ? &*prev : nullptr, *in.focus.current_target);
  const Movement m = models_->tree.classify(features);
  out.events.push_back({t, EventKind::Movement, std::string(to_string(m))});
  const auto step = b_.recognizer.observe(m);
  if (step && step->winner) {
    const auto& w = out.world;
    out.action = b_.recognizer.commit(*step, in.focus, t, [&](std::string_view id) { return label_of(w, id); });
  }
  return out;
}

std::vector<PipelineEvent> Session::stage_c(BC in) {
  auto events = std::move(in.events);
  if (!in.action) return events;
  const auto& a = *in.action;
  const auto t = in.world.timestep;
  const auto& kb = models_->kb;
  events.push_back({t, EventKind::Action, describe(a)});
  auto reject = [&](const std::string& why) {
    events.push_back({t, EventKind::Rejection, why});
    return events;
  };

  const auto target_label = label_of(in.world, a.target).value_or(a.target);
  std::optional<std::string> dest_label;
  if (a.destination) dest_label = label_of(in.world, *a.destination).value_or(*a.destination);

  if (options_.verify) {
    if (!a.resolved) return reject("action " + describe(a) + ": no meaning at " + dest_label.value_or("no destination"));
    if (!kb.has_action(a.contextualized)) return reject("action " + describe(a) + ": unknown to the knowledge base");
    try {
      const auto v = kb.validate_action(options_.human, a.contextualized, target_label,
                                        dest_label ? std::optional<std::string_view>(*dest_label) : std::nullopt);
      if (!v) return reject("action " + describe(a) + ": " + v.reason);
    } catch (const std::invalid_argument& e) {
      return reject("action " + describe(a) + ": " + e.what());
    }
  }

  const auto& lib = models_->plans;
  if (!a.resolved || !lib.is_terminal(a.contextualized)) return events;
  if (c_.last && c_.last->contextualized == a.contextualized && c_.last->target == a.target &&
      c_.last->destination == a.destination)
    return events;

  const Binding binding{target_label, dest_label};
  auto next = c_.reasoner.preview(a.contextualized);
  if (options_.verify) {
    auto bindings = c_.bindings;
    bindings.push_back(binding);
    std::vector<Explanation> kept;
    std::vector<std::string> dropped_goals;
    std::string first_reason;
    for (auto& e : next) {
      const auto v = kb.validate_explanation(lib, e, bindings);
      if (v) {
        kept.push_back(std::move(e));
      } else {
        if (first_reason.empty()) first_reason = v.reason;
        if (std::find(dropped_goals.begin(), dropped_goals.end(), e.goal_name) == dropped_goals.end())
          dropped_goals.push_back(e.goal_name);
      }
    }
    if (kept.empty() && !next.empty())
      return reject("observation " + describe(a) + " contradicts every explanation (" + first_reason + ")");
    if (kept.empty()) return reject("observation " + describe(a) + " fits no plan");
    if (!dropped_goals.empty()) {
      std::string goals;
      for (const auto& g : dropped_goals) goals += (goals.empty() ? "" : ",") + g;
      events.push_back({t, EventKind::Rejection, "explanations " + goals + ": " + first_reason});
    }
    next = std::move(kept);
  }
  c_.reasoner.accept(a.contextualized, std::move(next));
  c_.bindings.push_back(binding);
  c_.accepted.push_back(a);
  c_.last = a;

  const auto& ex = c_.reasoner.explanations();
  std::string summary = "obs=" + std::to_string(c_.reasoner.observations().size()) + " n=" + std::to_string(ex.size());
  if (!ex.empty()) summary += " top=" + ex.front().goal_name + " confidence=" + text::fixed(ex.front().confidence, 4);
  events.push_back({t, EventKind::Explanation, summary});

  const auto cm = best(ex);
  if (!cm) return events;
  bool fire = !commitment_;
  if (commitment_ && cm->goal != commitment_->goal) {
    double standing = 0.0;
    for (const auto& e : ex)
      if (e.goal_name == commitment_->goal) standing = std::max(standing, e.confidence);
    fire = cm->confidence > standing + options_.recommit_margin;
  }
  if (!fire) return events;

  CommitRecord rec;
  rec.goal = cm->goal;
  rec.confidence = cm->confidence;
  rec.timestep = t;
  rec.observations = c_.reasoner.observations().size();
  rec.explanation = ex[cm->index];
  rec.plan = plan_collaboration(lib, rec.explanation, kb, options_.robot_class);
  auto steps = rec.plan.wait_for;
  steps.insert(steps.end(), rec.plan.robot_actions.begin(), rec.plan.robot_actions.end());
  rec.plan.grounded = ground(steps, *models_, options_.human, c_.bindings);
  events.push_back({t, EventKind::Commitment,
                    "goal=" + rec.goal + " confidence=" + text::fixed(rec.confidence, 4) +
                        " observed=" + std::to_string(rec.explanation.observed_count()) +
                        " missed=" + std::to_string(rec.explanation.missed_count())});
  events.push_back({t, EventKind::Collaboration, describe(rec.plan)});
  commitment_ = std::move(rec);
  ++commit_count_;
  committed_at_ = std::chrono::steady_clock::now();
  return events;
}

void Session::finish(std::vector<PipelineEvent> events) {
  log_.insert(log_.end(), std::make_move_iterator(events.begin()), std::make_move_iterator(events.end()));
}

std::vector<PipelineEvent> Session::tick(const WorldState& world) {
  validate(world);
  if (!started_) started_ = std::chrono::steady_clock::now();
  auto events = stage_c(stage_b(stage_a(world)));
  log_.insert(log_.end(), events.begin(), events.end());
  return events;
}

void Session::run(const Trace& trace) {
  if (!options_.concurrent) {
    for (const auto& s : trace.states) tick(s);
    return;
  }
  for (const auto& s : trace.states) validate(s);
  if (!started_) started_ = std::chrono::steady_clock::now();

  Channel<AB> ab;
  Channel<BC> bc;
  std::exception_ptr err_a, err_b, err_c;
  {
    std::jthread perception([&] {
      try {
        for (const auto& s : trace.states) ab.push(stage_a(s));
      } catch (...) {
        err_a = std::current_exception();
      }
      ab.close();
    });
    std::jthread low_level([&] {
      try {
        while (auto m = ab.pop()) bc.push(stage_b(std::move(*m)));
      } catch (...) {
        err_b = std::current_exception();
        while (ab.pop()) {
        }
      }
      bc.close();
    });
    try {
      while (auto m = bc.pop()) finish(stage_c(std::move(*m)));
    } catch (...) {
      err_c = std::current_exception();
      while (bc.pop()) {
      }
    }
  }
  for (const auto& e : {err_a, err_b, err_c})
    if (e) std::rethrow_exception(e);
}

std::optional<double> Session::inference_seconds() const {
  if (!started_ || !committed_at_) return std::nullopt;
  return std::chrono::duration<double>(*committed_at_ - *started_).count();
}

TrialResult run_trial(std::shared_ptr<const Models> models, const Config& config, std::string_view goal,
                      std::uint64_t seed, bool verify, double noise) {
  SimParams p = config.sim;
  p.seed = seed;
  p.noise_sigma = noise;
  const auto trace = simulate_goal(models->scenario, goal, p);
  Config c = config;
  c.supervisor.verify = verify;
  Session session(models, c);
  session.run(trace);

  TrialResult r;
  auto& m = r.metrics;
  m.goal = std::string(goal);
  m.trace_ticks = trace.states.size();
  if (const auto& cm = session.commitment()) {
    m.committed_goal = cm->goal;
    m.correct = cm->goal == goal;
    m.observed = cm->explanation.observed_count();
    m.missed = cm->explanation.missed_count();
    m.waiting = cm->plan.wait_for.size();
    m.planned = cm->plan.robot_actions.size();
    m.commit_timestep = cm->timestep;
    m.observations_at_commit = cm->observations;
    m.inference_seconds = session.inference_seconds().value_or(0.0);
  }
  r.events = session.log();
  r.actions = session.actions();
  return r;
}

std::vector<TableVRow> explain_rows(const PlanLibrary& lib, const std::vector<std::string>& observations,
                                    std::size_t repeats) {
  std::vector<TableVRow> rows;
  auto cur = initial_explanations(lib);
  for (std::size_t k = 0; k < observations.size(); ++k) {
    std::vector<Explanation> next;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r)
      next = extend(lib, cur, observations[k], static_cast<int>(k));
    const auto t1 = std::chrono::steady_clock::now();
    cur = std::move(next);

    TableVRow row;
    row.observations.assign(observations.begin(), observations.begin() + static_cast<std::ptrdiff_t>(k + 1));
    row.explanations = cur.size();
    row.micros = std::chrono::duration<double, std::micro>(t1 - t0).count() / static_cast<double>(std::max<std::size_t>(repeats, 1));
    row.confidence = cur.empty() ? 0.0 : cur.front().confidence;
    if (auto c = best(cur)) row.outcome = c->goal;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_table_v(const std::vector<std::vector<TableVRow>>& trials) {
  std::ostringstream os;
  os << "TRIAL  ACTION          EXPLANATIONS  TIME(us)  CONFIDENCE  OUTCOME\n";
  for (std::size_t i = 0; i < trials.size(); ++i) {
    for (std::size_t k = 0; k < trials[i].size(); ++k) {
      const auto& r = trials[i][k];
      std::string id = k == 0 ? "#" + std::to_string(i + 1) : "";
      id.resize(7, ' ');
      std::string act = r.observations.back();
      act.resize(16, ' ');
      std::string n = std::to_string(r.explanations);
      n.resize(14, ' ');
      std::string us = text::fixed(r.micros, 2);
      us.resize(10, ' ');
      std::string conf = text::fixed(r.confidence, 4);
      conf.resize(12, ' ');
      os << id << act << n << us << conf << r.outcome.value_or("") << "\n";
    }
  }
  return os.str();
}

GoalSummary summarize(std::string_view goal, const std::vector<TrialMetrics>& trials) {
  GoalSummary s;
  s.goal = std::string(goal);
  for (const auto& m : trials) {
    if (m.goal != goal) continue;
    ++s.trials;
    s.observed += static_cast<double>(m.observed);
    s.missed += static_cast<double>(m.missed);
    s.waiting += static_cast<double>(m.waiting);
    s.planned += static_cast<double>(m.planned);
    s.accuracy += m.correct ? 1.0 : 0.0;
    s.ticks += static_cast<double>(m.commit_timestep.value_or(static_cast<std::int64_t>(m.trace_ticks)));
    s.seconds += m.inference_seconds;
  }
  if (s.trials > 0) {
    const double n = static_cast<double>(s.trials);
    s.observed /= n;
    s.missed /= n;
    s.waiting /= n;
    s.planned /= n;
    s.accuracy /= n;
    s.ticks /= n;
    s.seconds /= n;
  }
  return s;
}

std::string format_table_vi(const std::vector<GoalSummary>& rows) {
  std::ostringstream os;
  os << "GOAL       TRIALS  OBSERVED  MISSED  WAITING  PLANNED  ACCURACY  TICKS    TIME(s)\n";
  for (const auto& r : rows) {
    auto col = [](std::string s, std::size_t w) {
      s.resize(std::max(w, s.size() + 1), ' ');
      return s;
    };
    os << col(r.goal, 11) << col(std::to_string(r.trials), 8) << col(text::fixed(r.observed, 1), 10)
       << col(text::fixed(r.missed, 1), 8) << col(text::fixed(r.waiting, 1), 9) << col(text::fixed(r.planned, 1), 9)
       << col(text::fixed(100.0 * r.accuracy, 0) + "%", 10) << col(text::fixed(r.ticks, 1), 9)
       << text::fixed(r.seconds, 4) << "\n";
  }
  return os.str();
}

}  // namespace intent

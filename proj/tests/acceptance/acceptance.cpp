// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "intent/actions.hpp"
#include "intent/config.hpp"
#include "intent/decision_tree.hpp"
#include "intent/kitchen_sim.hpp"
#include "intent/plan_library.hpp"
#include "intent/reasoner.hpp"
#include "intent/supervisor.hpp"
#include "intent/text_util.hpp"

using namespace intent;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [" << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const std::vector<std::string> kGoals{"Breakfast", "Drink", "Lunch"};

std::shared_ptr<const Models> shared_models(const Config& cfg) {
  static const auto m = std::make_shared<const Models>(load_models(cfg));
  return m;
}

// Expected rows of the reasoner table: explanations, confidence, outcome.
struct ExpectedRow {
  std::string action;
  std::size_t explanations;
  double confidence;
  std::string outcome;
};

const std::vector<std::vector<ExpectedRow>> kReasonerTable{
    {{"PickAndPlace", 7, 0.23, ""}, {"Eat", 3, 0.53, "Breakfast"}},
    {{"PickAndPlace", 7, 0.23, ""}, {"Sip", 1, 1.0, "Drink"}},
    {{"PickAndPlace", 7, 0.23, ""}, {"Cook", 1, 1.0, "Lunch"}},
    {{"PickAndPlace", 7, 0.23, ""}, {"PickAndPlace", 5, 0.28, ""}, {"Eat", 1, 1.0, "Lunch"}},
    {{"PickAndPlace", 7, 0.23, ""}, {"PickAndPlace", 5, 0.28, ""}, {"PickAndPlace", 1, 1.0, "Lunch"}},
    {{"PickAndPlace", 7, 0.23, ""}, {"PickAndPlace", 5, 0.28, ""}, {"Wash", 5, 0.30, ""}},
    {{"Sip", 1, 1.0, "Drink"}},
    {{"Eat", 2, 0.69, ""}},
    {{"Wash", 3, 0.41, ""}, {"Cook", 0, 0.0, ""}},
};

Outcome reasoner_table(const Config& cfg) {
  Outcome o;
  const auto lib = load_plan_library(cfg.plan_path);
  std::size_t rows = 0;
  double worst_us = 0.0, worst_gap = 0.0;
  for (std::size_t t = 0; t < kReasonerTable.size(); ++t) {
    std::vector<std::string> obs;
    for (const auto& r : kReasonerTable[t]) obs.push_back(r.action);
    const auto got = explain_rows(lib, obs, 200);
    for (std::size_t i = 0; i < got.size(); ++i) {
      const auto& want = kReasonerTable[t][i];
      const std::string where = "#" + std::to_string(t + 1) + " row " + std::to_string(i + 1);
      o.require(got[i].explanations == want.explanations, where + " count " + std::to_string(got[i].explanations));
      const double gap = std::abs(got[i].confidence - want.confidence);
      worst_gap = std::max(worst_gap, gap);
      o.require(gap <= 0.02, where + " confidence " + text::fixed(got[i].confidence, 3));
      o.require(got[i].outcome.value_or("") == want.outcome, where + " outcome");
      worst_us = std::max(worst_us, got[i].micros);
      ++rows;
    }
  }
  o.require(worst_us < 1000.0, "slowest row over 1 ms");
  o.detail << " " << rows << " rows, max |dconf| " << text::fixed(worst_gap, 4) << ", slowest "
           << text::fixed(worst_us, 2) << " us";
  return o;
}

Outcome two_goal(const Config& cfg) {
  Outcome o;
  const auto lib = load_plan_library(std::filesystem::path(cfg.plan_path).parent_path().string() + "/two_goal.plan");
  const auto ex = explain(lib, std::vector<std::string>{"A"});
  std::map<std::string, double> conf;
  for (const auto& e : ex) conf[e.goal_name] = std::max(conf[e.goal_name], e.confidence);
  o.require(ex.size() == 2, "two explanations");
  o.require(!ex.empty() && ex.front().goal_name == "G1", "G1 ranks first");
  o.require(std::abs(conf["G1"] - 0.59) <= 0.03, "P(G1)");
  o.require(std::abs(conf["G2"] - 0.39) <= 0.03, "P(G2)");
  o.detail << " P(G1)=" << text::fixed(conf["G1"], 3) << " P(G2)=" << text::fixed(conf["G2"], 3);
  return o;
}

Outcome classifier(const Config& cfg) {
  Outcome o;
  const auto t0 = Clock::now();
  SimParams p = cfg.sim;
  p.seed = cfg.dataset.seed;
  p.noise_sigma = cfg.dataset.noise_sigma;
  const auto rows = generate_dataset(load_scenario(cfg.scenario_path), 10, p, cfg.qsr);
  const auto cv = grouped_cross_validation(rows, cfg.tree);
  const double secs = seconds_since(t0);
  const auto counts = class_counts(rows);
  o.require(cv.groups.size() == 10, "10 groups");
  o.require(cv.mean_accuracy >= 0.90, "accuracy below 0.90");
  o.require(secs < 10.0, "slower than 10 s");
  for (auto n : counts) o.require(n > 0, "every class present");
  o.detail << " " << rows.size() << " rows (";
  for (std::size_t i = 0; i < kMovementCount; ++i)
    o.detail << (i ? " " : "") << to_string(kAllMovements[i]) << "=" << counts[i];
  o.detail << "), 10-fold grouped CV " << text::fixed(cv.mean_accuracy, 4) << ", " << text::fixed(secs, 2) << " s";
  return o;
}

Outcome fixture_sequences(const Config& cfg) {
  Outcome o;
  const auto t0 = Clock::now();
  const auto lib = load_action_library(cfg.actions_path);
  const std::string dir = std::filesystem::path(cfg.actions_path).parent_path().string() + "/fixtures/";
  const std::vector<std::pair<std::string, std::string>> cases{
      {"pick_and_place.mov", "PickAndPlace"}, {"use_loop.mov", "Use"}, {"relocate.mov", "Relocate"}};
  for (const auto& [file, want] : cases) {
    ActionRecognizer r(ActionEnsemble(lib.fsms, cfg.ensemble), lib.context);
    const auto seq = parse_movement_sequence(text::read_file(dir + file));
    std::string winner;
    std::size_t step = 0, filtered = 0;
    for (std::size_t i = 0; i < seq.size() && winner.empty(); ++i) {
      const auto s = r.observe(seq[i]);
      if (s && s->winner) {
        winner = s->scores[*s->winner].name;
        step = i + 1;
        filtered = r.queue().size();
      }
    }
    o.require(winner == want, file + " winner " + (winner.empty() ? "none" : winner));
    o.require(winner.empty() || filtered <= 6, file + " late");
    o.detail << " " << file << "->" << (winner.empty() ? "none" : winner) << "@" << step << "(filtered " << filtered
             << ")";
  }
  const double secs = seconds_since(t0);
  o.require(secs < 1.0, "slower than 1 s");
  o.detail << ", " << text::fixed(secs, 3) << " s";
  return o;
}

Outcome end_to_end(const Config& cfg) {
  Outcome o;
  const auto t0 = Clock::now();
  const auto models = shared_models(cfg);
  std::vector<TrialMetrics> all;
  std::map<std::string, GoalSummary> s;
  for (const auto& g : kGoals) {
    for (std::uint64_t k = 0; k < 5; ++k) all.push_back(run_trial(models, cfg, g, 1000 + k, true, 0.05).metrics);
    s[g] = summarize(g, all);
    o.require(s[g].accuracy == 1.0, g + " accuracy " + text::fixed(s[g].accuracy, 2));
  }
  o.require(s["Lunch"].observed > s["Breakfast"].observed && s["Lunch"].observed > s["Drink"].observed,
            "Lunch needs the most observations");
  o.require(s["Lunch"].ticks > s["Drink"].ticks && s["Drink"].ticks > s["Breakfast"].ticks,
            "ticks order Lunch > Drink > Breakfast");
  const double secs = seconds_since(t0);
  o.require(secs < 120.0, "slower than 2 min");
  for (const auto& g : kGoals)
    o.detail << " " << g << ": acc " << text::fixed(s[g].accuracy, 2) << " obs " << text::fixed(s[g].observed, 1)
             << " ticks " << text::fixed(s[g].ticks, 1) << ";";
  o.detail << " " << text::fixed(secs, 1) << " s";
  return o;
}

Outcome collaboration(const Config& cfg) {
  Outcome o;
  const auto models = shared_models(cfg);
  const auto& m = *models;
  auto capable_suffix_ok = [&](const CollaborationPlan& p) {
    for (const auto& s : p.robot_actions)
      if (!m.kb.robot_capable(s.symbol)) return false;
    return p.wait_for.empty() || !m.kb.robot_capable(p.wait_for.back().symbol);
  };

  for (const auto& g : kGoals) {
    const CollaborationPlan* plan = nullptr;
    Session probe(models, cfg);
    SimParams sp = cfg.sim;
    sp.seed = 1000;
    sp.noise_sigma = 0.05;
    probe.run(simulate_goal(m.scenario, g, sp));
    if (probe.commitment()) plan = &probe.commitment()->plan;
    o.require(plan != nullptr, g + " committed");
    if (!plan) continue;
    auto joined = plan->wait_for;
    joined.insert(joined.end(), plan->robot_actions.begin(), plan->robot_actions.end());
    o.require(joined == frontier(m.plans, probe.commitment()->explanation), g + " plan covers frontier");
    o.require(capable_suffix_ok(*plan), g + " robot takes the capable suffix");
    o.detail << " " << g << ": " << describe(*plan) << ";";
    if (g == "Lunch") {
      o.require(!plan->wait_for.empty() && plan->wait_for.back().symbol == "Eat", "Lunch waits for Eat");
      const bool shape = plan->robot_actions.size() == 2 && plan->robot_actions[0].symbol == "PickAndPlace" &&
                         plan->robot_actions[1].symbol == "Wash";
      o.require(shape, "Lunch robot does PickAndPlace + Wash");
      const auto& gr = plan->grounded;
      const bool grounded = gr.size() == joined.size() && gr[gr.size() - 2].target == "plate" &&
                            gr[gr.size() - 2].destination == "sink";
      o.require(grounded, "Lunch moves the plate to the sink");
    }
  }

  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<std::size_t> len(1, 4), sym(0, m.plans.terminals.size() - 1);
  std::size_t checked = 0, bad = 0;
  while (checked < 100) {
    std::vector<std::string> obs;
    for (auto k = len(rng); k > 0; --k) obs.push_back(m.plans.terminals[sym(rng)]);
    const auto ex = explain(m.plans, obs);
    const auto b = best(ex);
    if (!b) continue;
    const auto& e = ex[b->index];
    const auto p = plan_collaboration(m.plans, e, m.kb);
    auto joined = p.wait_for;
    joined.insert(joined.end(), p.robot_actions.begin(), p.robot_actions.end());
    if (joined != frontier(m.plans, e) || !capable_suffix_ok(p)) ++bad;
    ++checked;
  }
  o.require(bad == 0, std::to_string(bad) + " random plans violate conservation");
  o.detail << " " << checked << " random committed explanations, " << bad << " violations";
  return o;
}

Outcome ablation(const Config& cfg) {
  Outcome o;
  const auto models = shared_models(cfg);
  std::size_t strict = 0, trials = 0, late = 0, wrong_v = 0, wrong_n = 0;
  double sum_v = 0, sum_n = 0;
  for (const auto& g : kGoals)
    for (std::uint64_t k = 0; k < 10; ++k) {
      const auto v = run_trial(models, cfg, g, 2000 + k, true, 0.05).metrics;
      const auto n = run_trial(models, cfg, g, 2000 + k, false, 0.05).metrics;
      ++trials;
      wrong_v += v.correct ? 0 : 1;
      wrong_n += n.correct ? 0 : 1;
      if (!v.commit_timestep || !n.commit_timestep) continue;
      sum_v += static_cast<double>(*v.commit_timestep);
      sum_n += static_cast<double>(*n.commit_timestep);
      if (*v.commit_timestep > *n.commit_timestep) {
        ++late;
        o.detail << " late:" << g << "/" << 2000 + k;
      }
      if (*v.commit_timestep < *n.commit_timestep) ++strict;
    }
  o.require(wrong_v == 0, "verified accuracy");
  o.require(wrong_n == 0, "non-verified accuracy");
  o.require(late == 0, "verified committed later");
  o.require(strict >= 1, "no strict improvement");
  o.detail << " " << trials << " trial pairs, " << strict << " strictly earlier when verified, mean commit t "
           << text::fixed(sum_v / static_cast<double>(trials), 1) << " vs " << text::fixed(sum_n / static_cast<double>(trials), 1);
  return o;
}

Outcome determinism(Config cfg) {
  Outcome o;
  const auto models = shared_models(cfg);
  std::size_t runs = 0;
  for (const auto& g : kGoals)
    for (std::uint64_t seed : {7u, 1001u}) {
      cfg.supervisor.concurrent = false;
      const auto a = to_text(run_trial(models, cfg, g, seed, true, 0.05).events);
      const auto b = to_text(run_trial(models, cfg, g, seed, true, 0.05).events);
      cfg.supervisor.concurrent = true;
      const auto c = to_text(run_trial(models, cfg, g, seed, true, 0.05).events);
      o.require(a == b, g + " repeat differs");
      o.require(a == c, g + " concurrent differs");
      ++runs;
    }
  // A freshly trained tree is identical too.
  o.require(train_tree(models->scenario, cfg).serialize() == models->tree.serialize(), "tree retrains identically");
  o.detail << " " << runs << " seeded trials x (repeat, concurrent) byte-identical";
  return o;
}

}  // namespace

int main() {
  const Config cfg = default_config();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"goal reasoner reproduces the reasoner table", [&] { return reasoner_table(cfg); }},
      {"two-goal scoring example", [&] { return two_goal(cfg); }},
      {"movement classifier grouped CV >= 0.90", [&] { return classifier(cfg); }},
      {"action ensemble on the three fixture sequences", [&] { return fixture_sequences(cfg); }},
      {"end-to-end seeded noisy trials", [&] { return end_to_end(cfg); }},
      {"collaboration plans", [&] { return collaboration(cfg); }},
      {"verification ablation", [&] { return ablation(cfg); }},
      {"determinism", [&] { return determinism(cfg); }},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ":" << o.detail.str() << std::endl;
  }
  return failures;
}

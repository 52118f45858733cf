// Command-line front end: dataset generation, tree training, simulation,
// explanation, benchmarks and the interactive session server.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <memory>

#include "CLI11.hpp"

#include "intent/actions.hpp"
#include "intent/config.hpp"
#include "intent/decision_tree.hpp"
#include "intent/kitchen_sim.hpp"
#include "intent/reasoner.hpp"
#include "intent/session_server.hpp"
#include "intent/supervisor.hpp"
#include "intent/text_util.hpp"

namespace fs = std::filesystem;
using namespace intent;

namespace {

std::atomic<bool> g_stop{false};

Config config_from(const std::string& path) { return path.empty() ? default_config() : load_config(path); }

std::shared_ptr<const Models> models_for(const Config& c) { return std::make_shared<const Models>(load_models(c)); }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto part : text::split(s, ',')) {
    part = text::trim(part);
    if (part == "P&P" || part == "Pick&Place") part = "PickAndPlace";
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

const std::vector<std::vector<std::string>> kReasonerTrials{
    {"PickAndPlace", "Eat"},
    {"PickAndPlace", "Sip"},
    {"PickAndPlace", "Cook"},
    {"PickAndPlace", "PickAndPlace", "Eat"},
    {"PickAndPlace", "PickAndPlace", "PickAndPlace"},
    {"PickAndPlace", "PickAndPlace", "Wash"},
    {"Sip"},
    {"Eat"},
    {"Wash", "Cook"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intention reading over qualitative spatial relations"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file");

  // gen-traces
  auto* gen = app.add_subcommand("gen-traces", "Write random pick-and-place training traces");
  std::string gen_out = "traces";
  std::size_t gen_trials = 0;
  std::uint64_t gen_seed = 0;
  double gen_noise = -1;
  gen->add_option("-o,--out", gen_out, "Output directory");
  gen->add_option("--trials", gen_trials, "Number of trials (default from config)");
  gen->add_option("--seed", gen_seed, "Seed (default from config)");
  gen->add_option("--noise", gen_noise, "Position noise sigma in metres");

  // train-tree
  auto* tt = app.add_subcommand("train-tree", "Train the movement classifier from a trace directory");
  std::string tt_dir, tt_out = "movement.tree";
  tt->add_option("trace-dir", tt_dir, "Directory of .trace files")->required();
  tt->add_option("-o,--out", tt_out, "Tree file to write");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate one goal and run the full pipeline");
  std::string sim_goal;
  std::uint64_t sim_seed = 1;
  bool sim_no_verify = false, sim_concurrent = false, sim_quiet = false;
  double sim_noise = 0.0;
  std::string sim_log, sim_trace;
  sim->add_option("--goal", sim_goal, "Breakfast, Drink or Lunch")->required();
  sim->add_option("--seed", sim_seed, "Trial seed");
  sim->add_flag("--no-verify", sim_no_verify, "Bypass knowledge-base verification");
  sim->add_option("--noise", sim_noise, "Perception noise sigma in metres");
  sim->add_flag("--concurrent", sim_concurrent, "Run pipeline stages on separate threads");
  sim->add_flag("-q,--quiet", sim_quiet, "Only print the summary");
  sim->add_option("--log", sim_log, "Write the event log to this file");
  sim->add_option("--trace-out", sim_trace, "Write the simulated trace to this file");

  // recognize
  auto* rec = app.add_subcommand("recognize", "Score a movement sequence with the action ensemble");
  std::string rec_file;
  rec->add_option("file", rec_file, "Whitespace-separated movement tokens")->required();

  // explain
  auto* ex = app.add_subcommand("explain", "Explain an observation sequence against the plan library");
  std::string ex_obs, ex_plan;
  bool ex_trees = false;
  ex->add_option("--obs", ex_obs, "Comma-separated actions, e.g. PickAndPlace,Eat")->required();
  ex->add_option("--plan", ex_plan, "Plan library (default from config)");
  ex->add_flag("--trees", ex_trees, "Print every explanation tree");

  // bench
  auto* bench = app.add_subcommand("bench", "Reasoner table and end-to-end trials");
  std::size_t bench_trials = 5;
  double bench_noise = 0.05;
  bench->add_option("--trials", bench_trials, "Trials per goal");
  bench->add_option("--noise", bench_noise, "Perception noise sigma in metres");

  // serve
  auto* srv = app.add_subcommand("serve", "Interactive session stream over TCP");
  ServeOptions serve_opts;
  std::string replay;
  srv->add_option("--port", serve_opts.port, "TCP port (0 picks a free one)");
  srv->add_option("--replay", replay, "Stream a recorded trace to each client first");
  srv->add_option("--delay", serve_opts.replay_delay, "Seconds between replayed ticks");

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg = config_from(config_path);

    if (*gen) {
      SimParams p = cfg.sim;
      p.seed = gen_seed ? gen_seed : cfg.dataset.seed;
      p.noise_sigma = cfg.dataset.noise_sigma;
      if (gen_noise >= 0) p.noise_sigma = gen_noise;
      const auto scenario = load_scenario(cfg.scenario_path);
      const auto traces = generate_dataset_traces(scenario, gen_trials ? gen_trials : cfg.dataset.trials, p);
      fs::create_directories(gen_out);
      for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto path = (fs::path(gen_out) / ("trial_" + std::to_string(i) + ".trace")).string();
        text::write_file(path, serialize_trace(traces[i]));
      }
      std::cout << "wrote " << traces.size() << " traces to " << gen_out << "\n";
    } else if (*tt) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(tt_dir))
        if (e.path().extension() == ".trace") files.push_back(e.path());
      std::sort(files.begin(), files.end());
      if (files.empty()) throw std::runtime_error("no .trace files in " + tt_dir);
      std::vector<Trace> traces;
      for (const auto& f : files) traces.push_back(load_trace(f.string()));
      const auto rows = dataset_from_traces(traces, cfg.qsr);
      const auto tree = train(rows, cfg.tree);
      text::write_file(tt_out, tree.serialize());
      const auto cv = grouped_cross_validation(rows, cfg.tree);
      std::cout << rows.size() << " rows from " << traces.size() << " traces, depth " << tree.depth()
                << ", grouped CV accuracy " << text::fixed(cv.mean_accuracy, 4) << "\nwrote " << tt_out << "\n";
    } else if (*sim) {
      cfg.supervisor.concurrent = sim_concurrent;
      cfg.sim.noise_sigma = sim_noise;
      const auto models = models_for(cfg);
      if (!sim_trace.empty()) {
        SimParams p = cfg.sim;
        p.seed = sim_seed;
        text::write_file(sim_trace, serialize_trace(simulate_goal(models->scenario, sim_goal, p)));
      }
      const auto r = run_trial(models, cfg, sim_goal, sim_seed, !sim_no_verify, sim_noise);
      if (!sim_log.empty()) text::write_file(sim_log, to_text(r.events));
      if (!sim_quiet)
        for (const auto& e : r.events)
          if (e.kind != EventKind::Frame && e.kind != EventKind::Focus && e.kind != EventKind::Movement)
            std::cout << to_line(e) << "\n";
      const auto& m = r.metrics;
      std::cout << "goal=" << m.goal << " committed=" << m.committed_goal.value_or("-")
                << " correct=" << (m.correct ? "yes" : "no") << " observed=" << m.observed << " missed=" << m.missed
                << " waiting=" << m.waiting << " planned=" << m.planned
                << " commit_t=" << (m.commit_timestep ? std::to_string(*m.commit_timestep) : "-")
                << " ticks=" << m.trace_ticks << "\n";
      return m.correct ? 0 : 2;
    } else if (*rec) {
      const auto models = models_for(cfg);
      ActionRecognizer r(ActionEnsemble(models->actions.fsms, cfg.ensemble), models->actions.context);
      const auto seq = parse_movement_sequence(text::read_file(rec_file));
      for (std::size_t i = 0; i < seq.size(); ++i) {
        std::cout << "step " << i + 1 << " " << to_string(seq[i]);
        const auto s = r.observe(seq[i]);
        if (s) {
          for (const auto& sc : s->scores) std::cout << " " << sc.name << "=" << text::fixed(sc.score, 3);
          if (s->winner) {
            std::cout << " winner=" << s->scores[*s->winner].name;
            FocusState f;
            f.current_target = "x";
            r.commit(*s, f, static_cast<std::int64_t>(i), nullptr);
          }
        }
        std::cout << "\n";
      }
    } else if (*ex) {
      const auto lib = load_plan_library(ex_plan.empty() ? cfg.plan_path : ex_plan);
      const auto obs = split_list(ex_obs);
      std::cout << format_table_v({explain_rows(lib, obs)});
      if (ex_trees)
        for (const auto& e : explain(lib, obs)) std::cout << "\n" << render(lib, e);
    } else if (*bench) {
      const auto lib = load_plan_library(cfg.plan_path);
      std::vector<std::vector<TableVRow>> rows;
      for (const auto& t : kReasonerTrials) rows.push_back(explain_rows(lib, t));
      std::cout << format_table_v(rows) << "\n";

      const auto models = models_for(cfg);
      std::vector<TrialMetrics> metrics;
      std::vector<GoalSummary> summary;
      for (const std::string goal : {"Breakfast", "Drink", "Lunch"}) {
        for (std::size_t k = 0; k < bench_trials; ++k)
          metrics.push_back(run_trial(models, cfg, goal, 1000 + k, cfg.supervisor.verify, bench_noise).metrics);
        summary.push_back(summarize(goal, metrics));
      }
      std::cout << format_table_vi(summary);
    } else if (*srv) {
      if (!replay.empty()) serve_opts.replay = replay;
      const auto models = models_for(cfg);
      std::signal(SIGINT, [](int) { g_stop = true; });
      std::atomic<int> port{0};
      std::cerr << "serving on 127.0.0.1:" << serve_opts.port << "\n";
      serve(models, cfg, serve_opts, &g_stop, &port);
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << (e.line() ? " (line " + std::to_string(e.line()) + ")" : "") << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

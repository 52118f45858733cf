#include "intent/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <stdexcept>

#include "json.hpp"

#include "intent/text_util.hpp"

namespace intent {

using nlohmann::json;

namespace {

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty()) return p;
  std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(base) / path).lexically_normal().string();
}

}  // namespace

std::string data_dir() {
  if (const char* env = std::getenv("INTENT_DATA_DIR"); env && *env) return env;
  return INTENT_DATA_DIR;
}

void Config::validate() const {
  qsr.qdc.validate();
  if (!(qsr.motion_epsilon >= 0.0)) throw std::invalid_argument("motion_epsilon must be non-negative");
  focus.validate();
  ensemble.validate();
  sim.validate();
  if (!(supervisor.recommit_margin >= 0.0)) throw std::invalid_argument("recommit_margin must be non-negative");
  if (dataset.trials == 0) throw std::invalid_argument("dataset needs at least one trial");
  if (!(dataset.noise_sigma >= 0.0)) throw std::invalid_argument("dataset noise sigma must be non-negative");
}

Config default_config() {
  Config c;
  const auto d = data_dir();
  c.scenario_path = resolve(d, "kitchen.scn");
  c.plan_path = resolve(d, "kitchen.plan");
  c.kb_path = resolve(d, "kitchen.kb");
  c.actions_path = resolve(d, "actions.fsm");
  return c;
}

Config parse_config(const std::string& json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  Config c = default_config();
  try {
    if (j.contains("qsr")) {
      const auto& q = j["qsr"];
      if (q.contains("qdc")) {
        const auto v = q["qdc"].get<std::vector<double>>();
        if (v.size() != 4) throw std::invalid_argument("qdc needs four thresholds");
        c.qsr.qdc.upper = {v[0], v[1], v[2], v[3]};
      }
      take(q, "motion_epsilon", c.qsr.motion_epsilon);
    }
    if (j.contains("focus")) {
      const auto& f = j["focus"];
      take(f, "w_qdc", c.focus.weights.qdc);
      take(f, "w_qtc", c.focus.weights.qtc);
      take(f, "tau", c.focus.tau);
      take(f, "window", c.focus.window);
      take(f, "majority", c.focus.majority);
      take(f, "tie_tolerance", c.focus.tie_tolerance);
    }
    if (j.contains("ensemble")) {
      const auto& e = j["ensemble"];
      take(e, "sample_count", c.ensemble.sample_count);
      take(e, "sample_max_length", c.ensemble.sample_max_length);
      take(e, "win_threshold", c.ensemble.win_threshold);
      take(e, "win_margin", c.ensemble.win_margin);
      take(e, "seed", c.ensemble.seed);
      take(e, "parallel", c.ensemble.parallel);
    }
    if (j.contains("tree")) {
      take(j["tree"], "min_leaf", c.tree.min_leaf);
      take(j["tree"], "max_depth", c.tree.max_depth);
    }
    if (j.contains("sim")) {
      const auto& s = j["sim"];
      take(s, "walk_speed", c.sim.walk_speed);
      take(s, "turn_rate", c.sim.turn_rate);
      take(s, "reach", c.sim.reach);
      take(s, "noise_sigma", c.sim.noise_sigma);
      take(s, "dwell_ticks", c.sim.dwell_ticks);
      take(s, "settle_ticks", c.sim.settle_ticks);
      take(s, "use_cycles", c.sim.use_cycles);
      take(s, "seed", c.sim.seed);
    }
    if (j.contains("supervisor")) {
      const auto& s = j["supervisor"];
      take(s, "verify", c.supervisor.verify);
      take(s, "concurrent", c.supervisor.concurrent);
      take(s, "recommit_margin", c.supervisor.recommit_margin);
      take(s, "human", c.supervisor.human);
      take(s, "robot_class", c.supervisor.robot_class);
    }
    if (j.contains("dataset")) {
      take(j["dataset"], "trials", c.dataset.trials);
      take(j["dataset"], "seed", c.dataset.seed);
      take(j["dataset"], "noise_sigma", c.dataset.noise_sigma);
    }
    if (j.contains("paths")) {
      const auto& p = j["paths"];
      auto path = [&](const char* key, std::string& out) {
        if (p.contains(key)) out = resolve(base_dir, p[key].get<std::string>());
      };
      path("scenario", c.scenario_path);
      path("plan", c.plan_path);
      path("kb", c.kb_path);
      path("actions", c.actions_path);
      path("tree", c.tree_path);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

Config load_config(const std::string& path) {
  const auto base = std::filesystem::path(path).parent_path().string();
  return parse_config(text::read_file(path), base.empty() ? "." : base);
}

std::string to_json(const Config& c) {
  json j;
  j["qsr"] = {{"qdc", c.qsr.qdc.upper},
              {"motion_epsilon", c.qsr.motion_epsilon}};
  j["focus"] = {{"w_qdc", c.focus.weights.qdc}, {"w_qtc", c.focus.weights.qtc},   {"tau", c.focus.tau},
                {"window", c.focus.window},      {"majority", c.focus.majority}, {"tie_tolerance", c.focus.tie_tolerance}};
  j["ensemble"] = {{"sample_count", c.ensemble.sample_count}, {"sample_max_length", c.ensemble.sample_max_length},
                   {"win_threshold", c.ensemble.win_threshold}, {"win_margin", c.ensemble.win_margin},
                   {"seed", c.ensemble.seed},                 {"parallel", c.ensemble.parallel}};
  j["tree"] = {{"min_leaf", c.tree.min_leaf}, {"max_depth", c.tree.max_depth}};
  j["sim"] = {{"walk_speed", c.sim.walk_speed}, {"turn_rate", c.sim.turn_rate},   {"reach", c.sim.reach},
              {"noise_sigma", c.sim.noise_sigma}, {"dwell_ticks", c.sim.dwell_ticks}, {"settle_ticks", c.sim.settle_ticks}, {"use_cycles", c.sim.use_cycles},
              {"seed", c.sim.seed}};
  j["supervisor"] = {{"verify", c.supervisor.verify},
                     {"concurrent", c.supervisor.concurrent},
                     {"recommit_margin", c.supervisor.recommit_margin},
                     {"human", c.supervisor.human},
                     {"robot_class", c.supervisor.robot_class}};
  j["dataset"] = {{"trials", c.dataset.trials}, {"seed", c.dataset.seed}, {"noise_sigma", c.dataset.noise_sigma}};
  j["paths"] = {{"scenario", c.scenario_path}, {"plan", c.plan_path}, {"kb", c.kb_path},
                {"actions", c.actions_path},   {"tree", c.tree_path}};
  return j.dump(2);
}

}  // namespace intent

#pragma once

#include <cstdint>
#include <string>

#include "intent/actions.hpp"
#include "intent/decision_tree.hpp"
#include "intent/focus.hpp"
#include "intent/kitchen_sim.hpp"
#include "intent/qsr.hpp"

namespace intent {

struct SupervisorOptions {
  bool verify = true;
  bool concurrent = false;
  double recommit_margin = 0.1;
  std::string human = "human";       // knowledge-base entity performing observed actions
  std::string robot_class = "Robot"; // capability profile used for plans
};

struct DatasetOptions {
  std::size_t trials = 30;
  std::uint64_t seed = 11;
  double noise_sigma = 0.05;  // perception noise of the training traces
};

/// Everything tunable, loaded from one JSON document. Missing keys keep
/// their defaults; relative paths resolve against the document's folder.
struct Config {
  QsrConfig qsr;
  FocusConfig focus;
  EnsembleConfig ensemble;
  TreeParams tree;
  SimParams sim;
  SupervisorOptions supervisor;
  DatasetOptions dataset;

  std::string scenario_path;
  std::string plan_path;
  std::string kb_path;
  std::string actions_path;
  std::string tree_path;  // empty: train on startup

  void validate() const;
};

/// Default configuration pointing at the shipped data directory.
Config default_config();
Config parse_config(const std::string& json_text, const std::string& base_dir = ".");
Config load_config(const std::string& path);
std::string to_json(const Config& c);

/// Location of the shipped data files.
std::string data_dir();

}  // namespace intent

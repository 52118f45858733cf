#pragma once

#include <memory>
#include <string>

#include "intent/config.hpp"
#include "intent/supervisor.hpp"

namespace fixture {

inline std::string data(const std::string& name) { return std::string(INTENT_DATA_DIR) + "/" + name; }

// Trained once per test binary.
inline std::shared_ptr<const intent::Models> models() {
  static const auto m = std::make_shared<const intent::Models>(intent::load_models(intent::default_config()));
  return m;
}

}  // namespace fixture

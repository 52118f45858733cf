#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "intent/config.hpp"
#include "intent/kitchen_sim.hpp"
#include "intent/supervisor.hpp"

namespace intent {

/// Parses a steering line: `move <dx> <dy>`, `face <radians>`,
/// `pick <ooi>`, `place`, `idle`. Throws ParseError on anything else
/// (`reset` is handled by the protocol, not the simulator).
Steer parse_steer(std::string_view line);

/// Transport-independent session protocol. Every outgoing message is one
/// JSON object per line carrying `seq` (strictly increasing per
/// connection), `t` (timestep, -1 before the first tick) and `kind`.
class SessionProtocol {
public:
  SessionProtocol(std::shared_ptr<const Models> models, Config config);

  /// Snapshot of the scene, sent once on connect.
  std::vector<std::string> hello();
  /// Handles one client line and returns the messages it produced.
  std::vector<std::string> handle(std::string_view line);
  /// Feeds one recorded state (replay mode).
  std::vector<std::string> feed(const WorldState& state);

  const Session& session() const { return *session_; }
  std::uint64_t next_seq() const { return seq_; }

private:
  std::vector<std::string> publish(const std::vector<PipelineEvent>& events, std::int64_t t);
  std::string message(std::string_view kind, std::int64_t t, const std::string& json_body);
  void restart();

  std::shared_ptr<const Models> models_;
  Config config_;
  std::unique_ptr<KitchenSim> sim_;
  std::unique_ptr<Session> session_;
  std::uint64_t seq_ = 0;
  std::int64_t last_t_ = -1;
};

struct ServeOptions {
  int port = 7878;
  std::optional<std::string> replay;  // trace file streamed to each client
  double replay_delay = 0.0;          // seconds between replayed ticks
  std::size_t max_connections = 0;    // 0: serve forever
};

/// Blocking TCP server, one session per connection, connections served one
/// after another. `stop` is polled between connections and reads.
void serve(std::shared_ptr<const Models> models, const Config& config, const ServeOptions& options,
           const std::atomic<bool>* stop = nullptr, std::atomic<int>* bound_port = nullptr);

}  // namespace intent

#include "intent/session_server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "intent/text_util.hpp"

namespace intent {

using nlohmann::json;

Steer parse_steer(std::string_view line) {
  const auto tok = text::split_ws(line);
  if (tok.empty()) throw ParseError("empty command");
  Steer s;
  if (tok[0] == "move" && tok.size() == 3) {
    s.kind = Steer::Kind::Move;
    s.dx = text::to_double(tok[1]);
    s.dy = text::to_double(tok[2]);
  } else if (tok[0] == "face" && tok.size() == 2) {
    s.kind = Steer::Kind::Face;
    s.heading = text::to_double(tok[1]);
  } else if (tok[0] == "pick" && tok.size() == 2) {
    s.kind = Steer::Kind::Pick;
    s.ooi = std::string(tok[1]);
  } else if (tok[0] == "place" && tok.size() == 1) {
    s.kind = Steer::Kind::Place;
  } else if (tok[0] == "idle" && tok.size() == 1) {
    s.kind = Steer::Kind::Idle;
  } else {
    throw ParseError("unknown command: " + std::string(line));
  }
  return s;
}

SessionProtocol::SessionProtocol(std::shared_ptr<const Models> models, Config config)
    : models_(std::move(models)), config_(std::move(config)) {
  restart();
}

void SessionProtocol::restart() {
  sim_ = std::make_unique<KitchenSim>(models_->scenario, config_.sim);
  session_ = std::make_unique<Session>(models_, config_);
  last_t_ = -1;
}

std::string SessionProtocol::message(std::string_view kind, std::int64_t t, const std::string& json_body) {
  json j = json::parse(json_body);
  j["seq"] = seq_++;
  j["t"] = t;
  j["kind"] = kind;
  return j.dump();
}

std::vector<std::string> SessionProtocol::hello() {
  json j;
  const auto& w = sim_->truth();
  j["scenario"] = models_->scenario.id;
  const auto& r = models_->scenario.room;
  j["room"] = {r.min_x, r.min_y, r.max_x, r.max_y};
  j["agent"] = {{"x", w.agent.position.x}, {"y", w.agent.position.y}, {"heading", w.agent.heading}};
  j["oois"] = json::array();
  for (const auto& o : w.oois)
    j["oois"].push_back({{"id", o.id}, {"label", o.label}, {"x", o.position.x}, {"y", o.position.y}, {"graspable", o.graspable}});
  j["goals"] = models_->plans.goal_names();
  return {message("snapshot", last_t_, j.dump())};
}

std::vector<std::string> SessionProtocol::publish(const std::vector<PipelineEvent>& events, std::int64_t t) {
  std::vector<std::string> out;
  for (const auto& e : events) {
    json j;
    j["payload"] = e.payload;
    out.push_back(message(to_string(e.kind), e.timestep, j.dump()));
  }
  json d;
  d["p"] = json::object();
  for (const auto& e : session_->distribution().entries) d["p"][e.id] = e.probability;
  const auto& f = session_->focus();
  d["target"] = f.current_target ? json(*f.current_target) : json(nullptr);
  d["destination"] = f.current_destination ? json(*f.current_destination) : json(nullptr);
  out.push_back(message("distribution", t, d.dump()));
  return out;
}

std::vector<std::string> SessionProtocol::feed(const WorldState& state) {
  const auto events = session_->tick(state);
  last_t_ = state.timestep;
  return publish(events, state.timestep);
}

std::vector<std::string> SessionProtocol::handle(std::string_view line) {
  line = text::trim(line);
  if (line.empty()) return {};
  try {
    const auto tok = text::split_ws(line);
    if (tok[0] == "reset") {
      if (tok.size() > 2 || (tok.size() == 2 && tok[1] != models_->scenario.id))
        throw ParseError("unknown scenario: " + std::string(tok.size() == 2 ? tok[1] : ""));
      restart();
      return hello();
    }
    const auto cmd = parse_steer(line);
    const auto tick = sim_->steer(cmd);
    return feed(tick.reported);
  } catch (const std::exception& e) {
    json j;
    j["error"] = e.what();
    return {message("error", last_t_, j.dump())};
  }
}

namespace {

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const auto n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

bool send_lines(int fd, const std::vector<std::string>& lines) {
  std::string buf;
  for (const auto& l : lines) buf += l + "\n";
  return send_all(fd, buf);
}

bool stopping(const std::atomic<bool>* stop) { return stop && stop->load(); }

void serve_client(int fd, std::shared_ptr<const Models> models, const Config& config, const ServeOptions& options,
                  const std::atomic<bool>* stop) {
  SessionProtocol proto(models, config);
  if (!send_lines(fd, proto.hello())) return;

  if (options.replay) {
    const auto trace = load_trace(*options.replay);
    for (const auto& s : trace.states) {
      if (stopping(stop) || !send_lines(fd, proto.feed(s))) return;
      if (options.replay_delay > 0) std::this_thread::sleep_for(std::chrono::duration<double>(options.replay_delay));
    }
  }

  std::string pending;
  char buf[4096];
  while (!stopping(stop)) {
    pollfd p{fd, POLLIN, 0};
    const int r = ::poll(&p, 1, 200);
    if (r < 0 && errno == EINTR) continue;
    if (r < 0) return;
    if (r == 0) continue;
    const auto n = ::recv(fd, buf, sizeof buf, 0);
    if (n <= 0) return;
    pending.append(buf, static_cast<std::size_t>(n));
    for (auto nl = pending.find('\n'); nl != std::string::npos; nl = pending.find('\n')) {
      const std::string line = pending.substr(0, nl);
      pending.erase(0, nl + 1);
      if (!send_lines(fd, proto.handle(line))) return;
    }
  }
}

}  // namespace

void serve(std::shared_ptr<const Models> models, const Config& config, const ServeOptions& options,
           const std::atomic<bool>* stop, std::atomic<int>* bound_port) {
  const int srv = ::socket(AF_INET, SOCK_STREAM, 0);
  if (srv < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  const int yes = 1;
  ::setsockopt(srv, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(options.port));
  if (::bind(srv, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(srv, 4) < 0) {
    const std::string err = std::strerror(errno);
    ::close(srv);
    throw std::runtime_error("cannot listen on port " + std::to_string(options.port) + ": " + err);
  }
  socklen_t len = sizeof addr;
  ::getsockname(srv, reinterpret_cast<sockaddr*>(&addr), &len);
  if (bound_port) bound_port->store(ntohs(addr.sin_port));

  std::size_t served = 0;
  while (!stopping(stop) && (options.max_connections == 0 || served < options.max_connections)) {
    pollfd p{srv, POLLIN, 0};
    const int r = ::poll(&p, 1, 200);
    if (r <= 0) continue;
    const int fd = ::accept(srv, nullptr, nullptr);
    if (fd < 0) continue;
    try {
      serve_client(fd, models, config, options, stop);
    } catch (...) {
      ::close(fd);
      ::close(srv);
      throw;
    }
    ::close(fd);
    ++served;
  }
  ::close(srv);
}

}  // namespace intent

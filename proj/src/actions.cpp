#include "intent/actions.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <unordered_map>

#include "intent/similarity.hpp"
#include "intent/text_util.hpp"

namespace intent {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

MarkovFsm::MarkovFsm(std::string name, std::vector<State> states, std::vector<std::vector<Edge>> edges)
    : name_(std::move(name)), states_(std::move(states)), edges_(std::move(edges)) {
  validate();
}

void MarkovFsm::validate() const {
  if (name_.empty()) throw std::invalid_argument("fsm without a name");
  if (states_.empty()) throw std::invalid_argument("fsm " + name_ + " has no states");
  if (edges_.size() != states_.size()) throw std::invalid_argument("fsm " + name_ + ": edge table size mismatch");
  bool any_initial = false;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    any_initial = any_initial || states_[i].initial;
    double sum = 0.0;
    for (const auto& e : edges_[i]) {
      if (e.to != kEnd && e.to >= states_.size())
        throw std::invalid_argument("fsm " + name_ + ": edge to unknown state");
      if (!(e.probability >= 0.0)) throw std::invalid_argument("fsm " + name_ + ": negative probability");
      sum += e.probability;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("fsm " + name_ + ": outgoing probabilities of " + states_[i].name +
                                  " sum to " + text::fmt(sum));
  }
  if (!any_initial) throw std::invalid_argument("fsm " + name_ + " has no initial state");

  // every state must be reachable from some initial state
  std::vector<bool> seen(states_.size(), false);
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < states_.size(); ++s)
    if (states_[s].initial) {
      seen[s] = true;
      stack.push_back(s);
    }
  while (!stack.empty()) {
    const auto at = stack.back();
    stack.pop_back();
    for (const auto& e : edges_[at]) {
      if (e.to == kEnd || e.probability <= 0.0 || seen[e.to]) continue;
      seen[e.to] = true;
      stack.push_back(e.to);
    }
  }
  for (std::size_t s = 0; s < states_.size(); ++s)
    if (!seen[s]) throw std::invalid_argument("fsm " + name_ + ": state " + states_[s].name + " is unreachable");
}

bool MarkovFsm::can_start_with(Movement m) const {
  return std::any_of(states_.begin(), states_.end(), [m](const State& s) { return s.initial && s.symbol == m; });
}

bool MarkovFsm::emits(Movement m) const {
  return std::any_of(states_.begin(), states_.end(), [m](const State& s) { return s.symbol == m; });
}

std::vector<Movement> MarkovFsm::sample(Movement first, std::size_t max_length, std::mt19937_64& rng) const {
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < states_.size(); ++i)
    if (states_[i].initial && states_[i].symbol == first) starts.push_back(i);
  if (starts.empty()) return {};

  std::size_t at = starts[starts.size() == 1 ? 0 : static_cast<std::size_t>(uniform01(rng) * starts.size())];
  std::vector<Movement> out{states_[at].symbol};
  while (out.size() < max_length) {
    const auto& row = edges_[at];
    if (row.empty()) break;
    const double u = uniform01(rng);
    double acc = 0.0;
    std::size_t next = row.back().to;
    for (const auto& e : row) {
      acc += e.probability;
      if (u < acc) {
        next = e.to;
        break;
      }
    }
    if (next == kEnd) break;
    at = next;
    out.push_back(states_[at].symbol);
  }
  return out;
}

namespace {

struct PendingFsm {
  std::string name;
  std::size_t line = 0;
  std::vector<MarkovFsm::State> states;
  std::vector<bool> terminal;
  struct RawEdge {
    std::string from, to;
    std::optional<double> p;
    std::size_t line;
  };
  std::vector<RawEdge> edges;

  MarkovFsm build() const {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < states.size(); ++i) index[states[i].name] = i;
    std::vector<std::vector<RawEdge>> rows(states.size());
    for (const auto& e : edges) {
      auto f = index.find(e.from);
      if (f == index.end()) throw ParseError("unknown state " + e.from, e.line);
      if (e.to != "end" && !index.contains(e.to)) throw ParseError("unknown state " + e.to, e.line);
      rows[f->second].push_back(e);
    }
    std::vector<std::vector<MarkovFsm::Edge>> table(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
      auto row = rows[i];
      if (terminal[i] && std::none_of(row.begin(), row.end(), [](const RawEdge& e) { return e.to == "end"; }))
        row.push_back({states[i].name, "end", std::nullopt, line});
      const auto explicit_count =
          std::count_if(row.begin(), row.end(), [](const RawEdge& e) { return e.p.has_value(); });
      if (explicit_count != 0 && explicit_count != static_cast<std::ptrdiff_t>(row.size()))
        throw ParseError("state " + states[i].name + " mixes weighted and unweighted edges", line);
      for (const auto& e : row) {
        const double p = e.p ? *e.p : 1.0 / static_cast<double>(row.size());
        table[i].push_back({e.to == "end" ? MarkovFsm::kEnd : index.at(e.to), p});
      }
    }
    try {
      return MarkovFsm(name, states, std::move(table));
    } catch (const std::invalid_argument& err) {
      throw ParseError(err.what(), line);
    }
  }
};

}  // namespace

ActionLibrary parse_action_library(std::string_view doc) {
  ActionLibrary lib;
  std::optional<PendingFsm> cur;
  auto flush = [&] {
    if (!cur) return;
    for (const auto& f : lib.fsms)
      if (f.name() == cur->name) throw ParseError("duplicate fsm " + cur->name, cur->line);
    lib.fsms.push_back(cur->build());
    cur.reset();
  };

  const auto ls = text::lines(doc);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const std::size_t no = i + 1;
    const auto tok = text::split_ws(text::strip_comment(ls[i]));
    if (tok.empty()) continue;
    if (tok[0] == "fsm") {
      if (tok.size() != 2) throw ParseError("expected: fsm <name>", no);
      flush();
      cur = PendingFsm{std::string(tok[1]), no, {}, {}, {}};
    } else if (tok[0] == "state") {
      if (!cur) throw ParseError("state outside fsm", no);
      if (tok.size() < 3) throw ParseError("expected: state <id> <MOVEMENT> [initial] [terminal]", no);
      MarkovFsm::State s;
      s.name = std::string(tok[1]);
      if (s.name == "end") throw ParseError("'end' is reserved", no);
      try {
        s.symbol = parse_movement(tok[2]);
      } catch (const std::exception& e) {
        throw ParseError(e.what(), no);
      }
      bool term = false;
      for (std::size_t k = 3; k < tok.size(); ++k) {
        if (tok[k] == "initial") s.initial = true;
        else if (tok[k] == "terminal") term = true;
        else throw ParseError("unknown state flag " + std::string(tok[k]), no);
      }
      for (const auto& o : cur->states)
        if (o.name == s.name) throw ParseError("duplicate state " + s.name, no);
      cur->states.push_back(std::move(s));
      cur->terminal.push_back(term);
    } else if (tok[0] == "edge") {
      if (!cur) throw ParseError("edge outside fsm", no);
      if (tok.size() != 3 && tok.size() != 4) throw ParseError("expected: edge <from> <to|end> [p]", no);
      std::optional<double> p;
      if (tok.size() == 4) p = text::to_double(tok[3], no);
      cur->edges.push_back({std::string(tok[1]), std::string(tok[2]), p, no});
    } else if (tok[0] == "context") {
      if (tok.size() != 4) throw ParseError("expected: context <base> <label> <action>", no);
      auto& row = lib.context[std::string(tok[1])];
      if (!row.emplace(std::string(tok[2]), std::string(tok[3])).second)
        throw ParseError("duplicate context entry", no);
    } else {
      throw ParseError("unknown directive " + std::string(tok[0]), no);
    }
  }
  flush();
  if (lib.fsms.empty()) throw ParseError("no fsm defined");
  return lib;
}

ActionLibrary load_action_library(const std::string& path) { return parse_action_library(text::read_file(path)); }

std::vector<Movement> parse_movement_sequence(std::string_view doc) {
  std::vector<Movement> out;
  const auto ls = text::lines(doc);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    for (auto tok : text::split_ws(text::strip_comment(ls[i]))) {
      try {
        out.push_back(parse_movement(tok));
      } catch (const std::exception& e) {
        throw ParseError(e.what(), i + 1);
      }
    }
  }
  return out;
}

bool ObservationQueue::push(Movement m) {
  if (!symbols_.empty() && symbols_.back() == m) return false;
  symbols_.push_back(m);
  return true;
}

ObservationQueue push_movement(Movement m, ObservationQueue q) {
  q.push(m);
  return q;
}

void EnsembleConfig::validate() const {
  if (sample_count == 0) throw std::invalid_argument("sample_count must be positive");
  if (sample_max_length == 0) throw std::invalid_argument("sample_max_length must be positive");
  if (!(win_threshold > 0.0 && win_threshold < 1.0)) throw std::invalid_argument("win_threshold outside (0,1)");
  if (!(win_margin > 0.0 && win_margin < 1.0)) throw std::invalid_argument("win_margin outside (0,1)");
}

ActionEnsemble::ActionEnsemble(std::vector<MarkovFsm> fsms, EnsembleConfig config)
    : fsms_(std::move(fsms)), config_(config) {
  if (fsms_.empty()) throw std::invalid_argument("empty ensemble");
  config_.validate();
}

bool ActionEnsemble::starts_any(Movement m) const {
  return std::any_of(fsms_.begin(), fsms_.end(), [m](const MarkovFsm& f) { return f.can_start_with(m); });
}

bool ActionEnsemble::continues(Movement head, Movement m) const {
  return std::any_of(fsms_.begin(), fsms_.end(),
                     [&](const MarkovFsm& f) { return f.can_start_with(head) && f.emits(m); });
}

double ActionEnsemble::score_fsm(const MarkovFsm& fsm, std::span<const Movement> queue,
                                 std::uint64_t step_index) const {
  if (!fsm.can_start_with(queue.front())) return 0.0;
  std::mt19937_64 rng(splitmix64(config_.seed ^ splitmix64(fnv1a(fsm.name()) ^ splitmix64(step_index))));
  double best = 0.0;
  for (std::size_t i = 0; i < config_.sample_count; ++i) {
    const auto s = fsm.sample(queue.front(), config_.sample_max_length, rng);
    best = std::max(best, similarity(queue, std::span<const Movement>(s)));
    if (best >= 1.0) break;
  }
  return best;
}

EnsembleStep ActionEnsemble::step(std::span<const Movement> queue, std::uint64_t step_index) const {
  if (queue.empty()) throw std::invalid_argument("ensemble step on an empty queue");
  EnsembleStep out;
  out.scores.resize(fsms_.size());
  if (config_.parallel && fsms_.size() > 1) {
    std::vector<std::future<double>> jobs;
    for (const auto& f : fsms_)
      jobs.push_back(std::async(std::launch::async, [&, step_index] { return score_fsm(f, queue, step_index); }));
    for (std::size_t i = 0; i < fsms_.size(); ++i) out.scores[i] = {fsms_[i].name(), jobs[i].get()};
  } else {
    for (std::size_t i = 0; i < fsms_.size(); ++i)
      out.scores[i] = {fsms_[i].name(), score_fsm(fsms_[i], queue, step_index)};
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < out.scores.size(); ++i)
    if (out.scores[i].score > out.scores[best].score) best = i;
  double second = 0.0;
  for (std::size_t i = 0; i < out.scores.size(); ++i)
    if (i != best) second = std::max(second, out.scores[i].score);
  if (out.scores[best].score >= config_.win_threshold && out.scores[best].score - second >= config_.win_margin)
    out.winner = best;
  return out;
}

std::optional<std::string> contextualize(std::string_view base, std::optional<std::string_view> destination_label,
                                         const ContextTable& table) {
  auto row = table.find(base);
  if (row == table.end()) return std::string(base);
  if (!destination_label) return std::nullopt;
  auto hit = row->second.find(std::string(*destination_label));
  if (hit == row->second.end()) return std::nullopt;
  return hit->second;
}

ContextTable default_context_table() {
  return {{"Use", {{"Sink", "Wash"}, {"Hobs", "Cook"}, {"Plate", "Eat"}, {"Glass", "Sip"}}}};
}

ActionRecognizer::ActionRecognizer(ActionEnsemble ensemble, ContextTable context)
    : ensemble_(std::move(ensemble)), context_(std::move(context)) {}

std::optional<EnsembleStep> ActionRecognizer::observe(Movement m) {
  if (!queue_.empty() && queue_.vector().back() == m) return std::nullopt;
  // A symbol no action started by the queue head can produce means the
  // head was noise or a missed commit; start over from here.
  if (!queue_.empty() && !ensemble_.continues(queue_.vector().front(), m)) queue_.clear();
  if (queue_.empty() && !ensemble_.starts_any(m)) return std::nullopt;
  queue_.push(m);
  ++steps_;
  return ensemble_.step(queue_.symbols(), steps_);
}

std::optional<RecognizedAction> ActionRecognizer::commit(
    const EnsembleStep& step, const FocusState& focus, std::int64_t timestep,
    const std::function<std::optional<std::string>(std::string_view)>& label_of) {
  if (!step.winner || !focus.current_target) return std::nullopt;
  RecognizedAction a;
  a.base = step.scores.at(*step.winner).name;
  a.target = *focus.current_target;
  a.destination = focus.current_destination;
  a.commit_timestep = timestep;
  std::optional<std::string> label;
  if (a.destination && label_of) label = label_of(*a.destination);
  auto ctx = contextualize(a.base, label ? std::optional<std::string_view>(*label) : std::nullopt, context_);
  a.resolved = ctx.has_value();
  a.contextualized = ctx.value_or(a.base);
  queue_.clear();
  return a;
}

void ActionRecognizer::reset() {
  queue_.clear();
  steps_ = 0;
}

std::string describe(const RecognizedAction& a) {
  std::string out = a.contextualized + "(" + a.target;
  if (a.destination) out += (a.contextualized != a.base ? " @ " : " -> ") + *a.destination;
  out += ")";
  if (!a.resolved) out += " [unresolved]";
  return out;
}

}  // namespace intent

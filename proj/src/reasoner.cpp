#include "intent/reasoner.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "intent/text_util.hpp"

namespace intent {

std::size_t Explanation::observed_count() const {
  return static_cast<std::size_t>(std::count(marks.begin(), marks.end(), LeafStatus::Observed));
}

std::size_t Explanation::missed_count() const {
  return static_cast<std::size_t>(std::count(marks.begin(), marks.end(), LeafStatus::Missed));
}

std::vector<Explanation> initial_explanations(const PlanLibrary& lib) {
  std::vector<Explanation> out;
  for (std::size_t g = 0; g < lib.goals.size(); ++g) {
    Explanation e;
    e.goal = g;
    e.goal_name = lib.goals[g].goal();
    const auto n = lib.goals[g].leaf_count();
    e.marks.assign(n, LeafStatus::Unobserved);
    e.observation.assign(n, -1);
    out.push_back(std::move(e));
  }
  rescore(out);
  return out;
}

void rescore(std::vector<Explanation>& explanations) {
  double total = 0.0;
  for (auto& e : explanations) {
    const double n = static_cast<double>(e.marks.size());
    e.observed_fraction = n > 0 ? static_cast<double>(e.observed_count()) / n : 0.0;
    e.missed_fraction = n > 0 ? static_cast<double>(e.missed_count()) / n : 0.0;
    e.score = e.observed_fraction * (1.0 - e.missed_fraction);
    total += e.score;
  }
  for (auto& e : explanations) e.confidence = total > 0.0 ? e.score / total : 0.0;
  std::stable_sort(explanations.begin(), explanations.end(), [](const Explanation& a, const Explanation& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.goal != b.goal) return a.goal < b.goal;
    return a.marks < b.marks;
  });
}

std::vector<Explanation> extend(const PlanLibrary& lib, std::span<const Explanation> current, std::string_view symbol,
                                int observation_index) {
  std::vector<Explanation> out;
  std::set<std::pair<std::size_t, std::vector<LeafStatus>>> seen;
  for (const auto& e : current) {
    const auto leaves = lib.goals.at(e.goal).leaves();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (e.marks[i] != LeafStatus::Unobserved || leaves[i]->symbol != symbol) continue;
      Explanation fork = e;
      for (std::size_t j = 0; j < i; ++j)
        if (fork.marks[j] == LeafStatus::Unobserved) fork.marks[j] = LeafStatus::Missed;
      fork.marks[i] = LeafStatus::Observed;
      fork.observation[i] = observation_index;
      if (seen.emplace(fork.goal, fork.marks).second) out.push_back(std::move(fork));
    }
  }
  rescore(out);
  return out;
}

std::vector<Explanation> explain(const PlanLibrary& lib, std::span<const std::string> observations) {
  auto cur = initial_explanations(lib);
  for (std::size_t k = 0; k < observations.size(); ++k) cur = extend(lib, cur, observations[k], static_cast<int>(k));
  return cur;
}

std::optional<Commitment> best(std::span<const Explanation> explanations) {
  if (explanations.empty()) return std::nullopt;
  std::size_t top = 0;
  for (std::size_t i = 1; i < explanations.size(); ++i)
    if (explanations[i].score > explanations[top].score) top = i;
  const auto& t = explanations[top];
  auto commit = [&] { return Commitment{top, t.goal_name, t.confidence}; };
  if (explanations.size() == 1) return commit();
  if (t.score <= 0.0 || t.missed_count() != 0) return std::nullopt;
  for (std::size_t i = 0; i < explanations.size(); ++i) {
    if (i == top) continue;
    const auto& o = explanations[i];
    if (o.score >= t.score - 1e-12) return std::nullopt;
    if (o.goal != t.goal && o.missed_count() == 0) return std::nullopt;
  }
  return commit();
}

std::vector<FrontierStep> frontier(const PlanLibrary& lib, const Explanation& e) {
  std::vector<FrontierStep> out;
  const auto leaves = lib.goals.at(e.goal).leaves();
  for (std::size_t i = 0; i < leaves.size(); ++i)
    if (e.marks[i] == LeafStatus::Unobserved) out.push_back({i, leaves[i]->symbol, leaves[i]->constraint});
  return out;
}

namespace {

void render_node(const PlanNode& n, const Explanation& e, std::size_t& leaf, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  if (n.kind == NodeKind::Action) {
    switch (e.marks.at(leaf++)) {
      case LeafStatus::Observed: out += "[x] "; break;
      case LeafStatus::Unobserved: out += "[ ] "; break;
      case LeafStatus::Missed: out += "[-] "; break;
    }
  }
  out += n.symbol + "\n";
  for (const auto& c : n.children) render_node(c, e, leaf, depth + 1, out);
}

}  // namespace

std::string render(const PlanLibrary& lib, const Explanation& e) {
  std::string out = e.goal_name + " score=" + text::fixed(e.score, 4) + " confidence=" +
                    text::fixed(e.confidence, 4) + "\n";
  std::size_t leaf = 0;
  for (const auto& c : lib.goals.at(e.goal).root.children) render_node(c, e, leaf, 1, out);
  return out;
}

GoalReasoner::GoalReasoner(PlanLibrary lib) : lib_(std::move(lib)) {
  lib_.validate();
  reset();
}

std::vector<Explanation> GoalReasoner::preview(std::string_view symbol) const {
  return extend(lib_, current_, symbol, static_cast<int>(observations_.size()));
}

void GoalReasoner::accept(std::string symbol, std::vector<Explanation> next) {
  rescore(next);
  current_ = std::move(next);
  observations_.push_back(std::move(symbol));
}

void GoalReasoner::observe(std::string symbol) {
  auto next = preview(symbol);
  accept(std::move(symbol), std::move(next));
}

void GoalReasoner::reset() {
  current_ = initial_explanations(lib_);
  observations_.clear();
}

}  // namespace intent

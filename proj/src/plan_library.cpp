#include "intent/plan_library.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "intent/text_util.hpp"

namespace intent {

namespace {

void collect_leaves(const PlanNode& n, std::vector<const PlanNode*>& out) {
  if (n.kind == NodeKind::Action) {
    out.push_back(&n);
    return;
  }
  for (const auto& c : n.children) collect_leaves(c, out);
}

void check_node(const PlanLibrary& lib, const PlanNode& n, const std::string& goal) {
  switch (n.kind) {
    case NodeKind::Goal:
      throw std::invalid_argument("goal node nested inside " + goal);
    case NodeKind::Action:
      if (!lib.is_terminal(n.symbol)) throw std::invalid_argument("unknown action " + n.symbol + " in " + goal);
      if (!n.children.empty()) throw std::invalid_argument("action " + n.symbol + " has children in " + goal);
      break;
    case NodeKind::Subgoal:
      if (!lib.is_subgoal(n.symbol)) throw std::invalid_argument("unknown sub-goal " + n.symbol + " in " + goal);
      if (n.children.empty()) throw std::invalid_argument("empty sub-goal " + n.symbol + " in " + goal);
      if (!n.constraint.empty()) throw std::invalid_argument("constraint on sub-goal " + n.symbol);
      for (const auto& c : n.children) check_node(lib, c, goal);
      break;
  }
}

void write_node(const PlanNode& n, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += n.symbol;
  if (n.constraint.target) out += " target=" + *n.constraint.target;
  if (n.constraint.destination) out += " destination=" + *n.constraint.destination;
  out += '\n';
  for (const auto& c : n.children) write_node(c, depth + 1, out);
}

}  // namespace

std::vector<const PlanNode*> PlanTree::leaves() const {
  std::vector<const PlanNode*> out;
  for (const auto& c : root.children) collect_leaves(c, out);
  return out;
}

std::size_t PlanTree::leaf_count() const { return leaves().size(); }

bool PlanLibrary::is_terminal(std::string_view s) const {
  return std::find(terminals.begin(), terminals.end(), s) != terminals.end();
}

bool PlanLibrary::is_subgoal(std::string_view s) const {
  return std::find(subgoals.begin(), subgoals.end(), s) != subgoals.end();
}

const PlanTree* PlanLibrary::find(std::string_view goal) const {
  for (const auto& g : goals)
    if (g.goal() == goal) return &g;
  return nullptr;
}

std::vector<std::string> PlanLibrary::goal_names() const {
  std::vector<std::string> out;
  for (const auto& g : goals) out.push_back(g.goal());
  return out;
}

void PlanLibrary::validate() const {
  std::set<std::string_view> seen;
  for (const auto& t : terminals)
    if (!seen.insert(t).second) throw std::invalid_argument("duplicate symbol " + t);
  for (const auto& s : subgoals)
    if (!seen.insert(s).second) throw std::invalid_argument("symbol declared twice or in both sets: " + s);
  std::set<std::string_view> goal_seen;
  for (const auto& g : goals) {
    if (g.root.kind != NodeKind::Goal) throw std::invalid_argument("plan root is not a goal");
    if (seen.contains(g.goal())) throw std::invalid_argument("goal name clashes with a symbol: " + g.goal());
    if (!goal_seen.insert(g.goal()).second) throw std::invalid_argument("duplicate goal " + g.goal());
    if (g.root.children.empty()) throw std::invalid_argument("empty goal " + g.goal());
    for (const auto& c : g.root.children) check_node(*this, c, g.goal());
  }
}

PlanLibrary parse_plan_library(std::string_view doc) {
  PlanLibrary lib;
  // stack[d] is the open node at depth d (0 = goal root)
  std::vector<PlanNode*> stack;
  const auto ls = text::lines(doc);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const std::size_t no = i + 1;
    const auto raw = text::strip_comment(ls[i]);
    const auto tok = text::split_ws(raw);
    if (tok.empty()) continue;
    const std::size_t indent = raw.find_first_not_of(' ');
    if (raw.find('\t') != std::string_view::npos) throw ParseError("tabs are not allowed", no);

    if (indent == 0) {
      stack.clear();
      if (tok[0] == "terminals") {
        for (std::size_t k = 1; k < tok.size(); ++k) lib.terminals.emplace_back(tok[k]);
      } else if (tok[0] == "subgoals") {
        for (std::size_t k = 1; k < tok.size(); ++k) lib.subgoals.emplace_back(tok[k]);
      } else if (tok[0] == "goal") {
        if (tok.size() != 2) throw ParseError("expected: goal <name>", no);
        PlanTree t;
        t.root.symbol = std::string(tok[1]);
        t.root.kind = NodeKind::Goal;
        lib.goals.push_back(std::move(t));
        stack.push_back(&lib.goals.back().root);
      } else {
        throw ParseError("unknown directive " + std::string(tok[0]), no);
      }
      continue;
    }

    if (indent % 2 != 0) throw ParseError("indentation must be a multiple of two spaces", no);
    const std::size_t depth = indent / 2;
    if (stack.empty()) throw ParseError("plan node outside a goal", no);
    if (depth > stack.size()) throw ParseError("indentation jumps more than one level", no);
    stack.resize(depth);
    PlanNode* parent = stack.back();
    if (parent->kind == NodeKind::Action) throw ParseError("action " + parent->symbol + " cannot have children", no);

    PlanNode node;
    node.symbol = std::string(tok[0]);
    if (lib.is_subgoal(node.symbol)) node.kind = NodeKind::Subgoal;
    else if (lib.is_terminal(node.symbol)) node.kind = NodeKind::Action;
    else throw ParseError("symbol not declared as terminal or sub-goal: " + node.symbol, no);
    for (std::size_t k = 1; k < tok.size(); ++k) {
      const auto kv = text::split(tok[k], '=');
      if (kv.size() != 2 || kv[1].empty()) throw ParseError("expected key=value, got " + std::string(tok[k]), no);
      if (node.kind != NodeKind::Action) throw ParseError("constraints only apply to actions", no);
      if (kv[0] == "target") node.constraint.target = std::string(kv[1]);
      else if (kv[0] == "destination") node.constraint.destination = std::string(kv[1]);
      else throw ParseError("unknown constraint " + std::string(kv[0]), no);
    }
    parent->children.push_back(std::move(node));
    stack.push_back(&parent->children.back());
  }
  // Vector growth may have moved goals; the stack is not used past here.
  try {
    lib.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return lib;
}

PlanLibrary load_plan_library(const std::string& path) { return parse_plan_library(text::read_file(path)); }

std::string serialize(const PlanLibrary& lib) {
  std::string out = "terminals";
  for (const auto& t : lib.terminals) out += " " + t;
  out += "\nsubgoals";
  for (const auto& s : lib.subgoals) out += " " + s;
  out += "\n";
  for (const auto& g : lib.goals) {
    out += "\ngoal " + g.goal() + "\n";
    for (const auto& c : g.root.children) write_node(c, 1, out);
  }
  return out;
}

}  // namespace intent

#include "intent/knowledge_base.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "intent/text_util.hpp"

namespace intent {

namespace {

using Bindings = std::map<std::string, std::string>;

bool is_var(std::string_view s) { return !s.empty() && s.front() == '?'; }

bool unify(const Atom& pattern, const Atom& fact, Bindings& b) {
  if (pattern.predicate != fact.predicate || pattern.args.size() != fact.args.size()) return false;
  Bindings local = b;
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    const auto& p = pattern.args[i];
    if (!is_var(p)) {
      if (p != fact.args[i]) return false;
      continue;
    }
    auto it = local.find(p);
    if (it == local.end()) local.emplace(p, fact.args[i]);
    else if (it->second != fact.args[i]) return false;
  }
  b = std::move(local);
  return true;
}

bool any_match(const FactSet& facts, const Atom& pattern, const Bindings& b) {
  for (const auto& f : facts) {
    Bindings tmp = b;
    if (unify(pattern, f, tmp)) return true;
  }
  return false;
}

Atom ground(const Atom& a, const Bindings& b) {
  Atom out{a.predicate, {}};
  for (const auto& arg : a.args) {
    if (!is_var(arg)) {
      out.args.push_back(arg);
      continue;
    }
    auto it = b.find(arg);
    if (it == b.end()) throw std::invalid_argument("unbound variable " + arg + " in conclusion");
    out.args.push_back(it->second);
  }
  return out;
}

void solve(const FactSet& facts, const InferenceRule& rule, std::size_t k, Bindings& b,
           const std::function<void(const Bindings&)>& emit) {
  if (k == rule.conditions.size()) {
    for (const auto& c : rule.conditions)
      if (c.negated && any_match(facts, c.atom, b)) return;
    emit(b);
    return;
  }
  const auto& c = rule.conditions[k];
  if (c.negated) {
    solve(facts, rule, k + 1, b, emit);
    return;
  }
  for (const auto& f : facts) {
    Bindings next = b;
    if (unify(c.atom, f, next)) solve(facts, rule, k + 1, next, emit);
  }
}

bool has_slot(const FactSet& facts, const std::string& pred, const std::string& first) {
  auto it = facts.lower_bound(Atom{pred, {first}});
  return it != facts.end() && it->predicate == pred && !it->args.empty() && it->args[0] == first;
}

}  // namespace

RoleConstraint parse_role_constraint(std::string_view s) {
  RoleConstraint c;
  if (s == "*") return c;
  for (auto t : text::split(s, ',')) {
    t = text::trim(t);
    if (t.empty()) throw std::invalid_argument("empty constraint term");
    c.terms.emplace_back(t);
  }
  return c;
}

namespace {

const InferenceRule& builtin_isa_rule() {
  static const InferenceRule r = parse_rule("isa(?x, ?c) & subclass(?c, ?d) -> isa(?x, ?d)");
  return r;
}

}  // namespace

void forward_chain(FactSet& facts, std::span<const InferenceRule> rules, const std::set<std::string>& functional) {
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& rule : rules) {
      std::vector<Atom> fresh;
      Bindings b;
      solve(facts, rule, 0, b, [&](const Bindings& m) { fresh.push_back(ground(rule.conclusion, m)); });
      for (auto& a : fresh) {
        if (functional.contains(a.predicate) && !a.args.empty() && has_slot(facts, a.predicate, a.args[0])) continue;
        if (facts.insert(std::move(a)).second) changed = true;
      }
    }
  }
}

Atom parse_atom(std::string_view s, std::size_t line) {
  s = text::trim(s);
  const auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') throw ParseError("malformed atom: " + std::string(s), line);
  Atom a;
  a.predicate = std::string(text::trim(s.substr(0, open)));
  if (a.predicate.empty()) throw ParseError("atom without predicate", line);
  const auto inner = s.substr(open + 1, s.size() - open - 2);
  for (auto arg : text::split(inner, ',')) {
    arg = text::trim(arg);
    if (arg.empty()) throw ParseError("empty atom argument", line);
    a.args.emplace_back(arg);
  }
  return a;
}

InferenceRule parse_rule(std::string_view s, std::size_t line) {
  const auto arrow = s.find("->");
  if (arrow == std::string_view::npos) throw ParseError("rule without '->'", line);
  InferenceRule r;
  for (auto part : text::split(s.substr(0, arrow), '&')) {
    part = text::trim(part);
    InferenceRule::Condition c;
    if (!part.empty() && part.front() == '!') {
      c.negated = true;
      part.remove_prefix(1);
    }
    c.atom = parse_atom(part, line);
    r.conditions.push_back(std::move(c));
  }
  r.conclusion = parse_atom(s.substr(arrow + 2), line);
  std::set<std::string> bound;
  for (const auto& c : r.conditions)
    if (!c.negated)
      for (const auto& a : c.atom.args)
        if (is_var(a)) bound.insert(a);
  for (const auto& a : r.conclusion.args)
    if (is_var(a) && !bound.contains(a)) throw ParseError("conclusion variable " + a + " is not bound", line);
  if (std::none_of(r.conditions.begin(), r.conditions.end(), [](const auto& c) { return !c.negated; }))
    throw ParseError("rule needs a positive condition", line);
  return r;
}

std::string to_string(const Atom& a) {
  std::string out = a.predicate + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) out += (i ? ", " : "") + a.args[i];
  return out + ")";
}

KnowledgeBase KnowledgeBase::parse(std::string_view doc) {
  KnowledgeBase kb;
  std::string section;
  std::map<std::string, std::string> entity_class;
  bool header_seen = false;
  std::vector<std::pair<std::string, std::size_t>> pending_terms;  // term, line

  const auto ls = text::lines(doc);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const std::size_t no = i + 1;
    const auto line = text::trim(text::strip_comment(ls[i]));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("malformed section header", no);
      section = std::string(line.substr(1, line.size() - 2));
      static const std::set<std::string> known{"classes",      "entities",        "properties",
                                               "action-rules", "inference-rules", "capabilities"};
      if (!known.contains(section)) throw ParseError("unknown section " + section, no);
      continue;
    }
    if (section.empty()) throw ParseError("content before the first section", no);

    if (section == "classes") {
      // `Child < Parent` or a bare root
      const auto lt = line.find('<');
      std::string name(text::trim(line.substr(0, lt)));
      std::optional<std::string> parent;
      if (lt != std::string_view::npos) parent = std::string(text::trim(line.substr(lt + 1)));
      if (name.empty() || (parent && parent->empty())) throw ParseError("malformed class line", no);
      if (parent && !kb.classes_.contains(*parent)) throw ParseError("parent class declared later or unknown: " + *parent, no);
      if (!kb.classes_.emplace(name, parent).second) throw ParseError("duplicate class " + name, no);
    } else if (section == "entities") {
      const auto colon = line.find(':');
      if (colon == std::string_view::npos) throw ParseError("expected: entity : Class", no);
      std::string name(text::trim(line.substr(0, colon)));
      std::string cls(text::trim(line.substr(colon + 1)));
      if (!kb.classes_.contains(cls)) throw ParseError("unknown class " + cls, no);
      if (kb.classes_.contains(name)) throw ParseError("entity name clashes with a class: " + name, no);
      if (!entity_class.emplace(name, cls).second) throw ParseError("duplicate entity " + name, no);
      kb.entities_.push_back(name);
    } else if (section == "properties") {
      const auto tok = text::split_ws(line);
      if (!header_seen) {
        if (tok.empty() || tok[0] != "entity") throw ParseError("property table must start with an 'entity' header", no);
        for (std::size_t k = 1; k < tok.size(); ++k) kb.property_names_.emplace_back(tok[k]);
        header_seen = true;
        continue;
      }
      if (tok.size() != kb.property_names_.size() + 1) throw ParseError("property row width mismatch", no);
      const std::string ent(tok[0]);
      if (!entity_class.contains(ent)) throw ParseError("unknown entity " + ent, no);
      for (std::size_t k = 1; k < tok.size(); ++k) {
        if (tok[k] == "1" || tok[k] == "x") kb.facts_.insert({"has", {ent, kb.property_names_[k - 1]}});
        else if (tok[k] != "0" && tok[k] != "-") throw ParseError("property cell must be 1/x or 0/-", no);
      }
    } else if (section == "action-rules") {
      const auto tok = text::split_ws(line);
      ActionRule r;
      r.action = std::string(tok[0]);
      for (std::size_t k = 1; k < tok.size(); ++k) {
        const auto kv = text::split(tok[k], '=');
        if (kv.size() != 2) throw ParseError("expected role=constraint", no);
        RoleConstraint c;
        try {
          c = parse_role_constraint(kv[1]);
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what(), no);
        }
        for (const auto& t : c.terms) pending_terms.emplace_back(t, no);
        if (kv[0] == "actor") r.actor = c;
        else if (kv[0] == "target") r.target = c;
        else if (kv[0] == "destination") r.destination = c;
        else throw ParseError("unknown role " + std::string(kv[0]), no);
      }
      if (kb.rules_.contains(r.action)) throw ParseError("duplicate action rule " + r.action, no);
      kb.action_names_.push_back(r.action);
      kb.rules_.emplace(r.action, std::move(r));
    } else if (section == "inference-rules") {
      kb.inference_.push_back(parse_rule(line, no));
    } else if (section == "capabilities") {
      const auto tok = text::split_ws(line);
      const std::string cls(tok[0]);
      if (!kb.classes_.contains(cls)) throw ParseError("unknown robot class " + cls, no);
      auto& caps = kb.capabilities_[cls];
      for (std::size_t k = 1; k < tok.size(); ++k) {
        if (!kb.rules_.contains(tok[k])) throw ParseError("capability for unknown action " + std::string(tok[k]), no);
        caps.emplace(tok[k]);
      }
    }
  }

  for (const auto& [c, p] : kb.classes_)
    if (p) kb.facts_.insert({"subclass", {c, *p}});
  for (const auto& [e, c] : entity_class) kb.facts_.insert({"isa", {e, c}});
  for (const auto& [term, no] : pending_terms) {
    std::string_view t = term;
    if (!t.empty() && t.front() == '!') t.remove_prefix(1);
    const bool known = kb.classes_.contains(t) || entity_class.contains(std::string(t)) ||
                       std::find(kb.property_names_.begin(), kb.property_names_.end(), t) != kb.property_names_.end();
    if (!known) throw ParseError("constraint term is not a class, entity or property: " + term, no);
  }
  kb.close();
  return kb;
}

KnowledgeBase KnowledgeBase::load(const std::string& path) { return parse(text::read_file(path)); }

void KnowledgeBase::close() {
  const InferenceRule r = builtin_isa_rule();
  forward_chain(facts_, std::span(&r, 1), {});
}

bool KnowledgeBase::has_class(std::string_view c) const { return classes_.contains(c); }

bool KnowledgeBase::has_entity(std::string_view e) const {
  return std::find(entities_.begin(), entities_.end(), e) != entities_.end();
}

bool KnowledgeBase::has_action(std::string_view a) const { return rules_.contains(a); }

std::optional<std::string> KnowledgeBase::parent(std::string_view cls) const {
  auto it = classes_.find(cls);
  if (it == classes_.end()) throw std::invalid_argument("unknown class " + std::string(cls));
  return it->second;
}

bool KnowledgeBase::is_a(std::string_view entity, std::string_view cls) const {
  return facts_.contains(Atom{"isa", {std::string(entity), std::string(cls)}});
}

bool KnowledgeBase::has_property(std::string_view entity, std::string_view property) const {
  return facts_.contains(Atom{"has", {std::string(entity), std::string(property)}});
}

bool KnowledgeBase::satisfies_term(std::string_view entity, std::string_view term) const {
  if (term == "*") return true;
  if (!term.empty() && term.front() == '!') return !satisfies_term(entity, term.substr(1));
  if (std::find(property_names_.begin(), property_names_.end(), term) != property_names_.end())
    return has_property(entity, term);
  if (classes_.contains(term)) {
    if (classes_.contains(entity)) {
      // class used as a stand-in for an anonymous member
      for (std::optional<std::string> c = std::string(entity); c; c = classes_.find(*c)->second)
        if (*c == term) return true;
      return false;
    }
    return is_a(entity, term);
  }
  if (has_entity(term)) return entity == term;
  throw std::invalid_argument("unknown constraint term " + std::string(term));
}

bool KnowledgeBase::satisfies(std::string_view entity, const RoleConstraint& c) const {
  return std::all_of(c.terms.begin(), c.terms.end(), [&](const std::string& t) { return satisfies_term(entity, t); });
}

namespace {

std::string to_string(const RoleConstraint& c) {
  if (c.any()) return "*";
  std::string out;
  for (const auto& t : c.terms) out += (out.empty() ? "" : ",") + t;
  return out;
}

}  // namespace

Verdict KnowledgeBase::validate_action(std::string_view actor, std::string_view action, std::string_view target,
                                       std::optional<std::string_view> destination) const {
  auto rule = rules_.find(action);
  if (rule == rules_.end()) throw std::invalid_argument("unknown action " + std::string(action));
  if (!has_entity(actor) && !has_class(actor)) throw std::invalid_argument("unknown actor " + std::string(actor));
  if (!has_entity(target)) throw std::invalid_argument("unknown entity " + std::string(target));
  if (destination && !has_entity(*destination))
    throw std::invalid_argument("unknown entity " + std::string(*destination));

  FactSet f = facts_;
  const std::string s = "_stmt";
  f.insert({"action", {s, std::string(action)}});
  f.insert({"actor", {s, std::string(actor)}});
  f.insert({"target", {s, std::string(target)}});
  if (destination) f.insert({"destination", {s, std::string(*destination)}});
  forward_chain(f, inference_, {"action", "actor", "target", "destination"});

  Verdict v;
  auto it = f.lower_bound(Atom{"destination", {s}});
  if (it != f.end() && it->predicate == "destination" && it->args.size() == 2 && it->args[0] == s)
    v.destination = it->args[1];

  auto fail = [&](std::string why) {
    v.valid = false;
    v.reason = std::move(why);
    return v;
  };
  if (!satisfies(actor, rule->second.actor)) return fail(std::string(actor) + " cannot perform " + std::string(action));
  if (!satisfies(target, rule->second.target))
    return fail(std::string(target) + " is not a valid target of " + std::string(action) + " (needs " +
                to_string(rule->second.target) + ")");
  if (rule->second.destination) {
    if (!v.destination) return fail(std::string(action) + " needs a destination");
    if (!has_entity(*v.destination)) return fail("inferred destination " + *v.destination + " is unknown");
    if (!satisfies(*v.destination, *rule->second.destination))
      return fail(*v.destination + " is not a valid destination of " + std::string(action) + " (needs " +
                  to_string(*rule->second.destination) + ")");
  }
  return v;
}

Verdict KnowledgeBase::validate_explanation(const PlanLibrary& lib, const Explanation& e,
                                            std::span<const Binding> bindings) const {
  const auto leaves = lib.goals.at(e.goal).leaves();
  Verdict v;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (e.marks[i] != LeafStatus::Observed) continue;
    const int k = e.observation[i];
    if (k < 0 || static_cast<std::size_t>(k) >= bindings.size()) continue;
    const auto& b = bindings[static_cast<std::size_t>(k)];
    const auto& c = leaves[i]->constraint;
    if (c.target && (!has_entity(b.target) || !satisfies(b.target, parse_role_constraint(*c.target)))) {
      v.valid = false;
      v.reason = e.goal_name + ": " + leaves[i]->symbol + " on " + b.target + " violates target=" + *c.target;
      return v;
    }
    if (c.destination &&
        (!b.destination || !has_entity(*b.destination) || !satisfies(*b.destination, parse_role_constraint(*c.destination)))) {
      v.valid = false;
      v.reason = e.goal_name + ": " + leaves[i]->symbol + " violates destination=" + *c.destination;
      return v;
    }
  }
  return v;
}

bool KnowledgeBase::robot_capable(std::string_view action, std::string_view robot_class) const {
  auto it = capabilities_.find(robot_class);
  return it != capabilities_.end() && it->second.contains(std::string(action));
}

}  // namespace intent

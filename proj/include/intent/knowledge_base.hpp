#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "intent/plan_library.hpp"
#include "intent/reasoner.hpp"

namespace intent {

/// Ground fact or pattern: predicate followed by arguments. Pattern
/// arguments starting with '?' are variables.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct InferenceRule {
  struct Condition {
    Atom atom;
    bool negated = false;  // negation as failure, variables existential
  };
  std::vector<Condition> conditions;
  Atom conclusion;
};

using FactSet = std::set<Atom>;

/// Applies `rules` to fixpoint. Conclusions on a functional predicate are
/// only added when no fact with the same first argument exists yet.
void forward_chain(FactSet& facts, std::span<const InferenceRule> rules, const std::set<std::string>& functional);

Atom parse_atom(std::string_view s, std::size_t line = 0);
InferenceRule parse_rule(std::string_view s, std::size_t line = 0);
std::string to_string(const Atom& a);

/// Requirement on one role of an action: comma-separated conjunction of
/// class names, property names, entity names, `!x` negations, or `*`.
struct RoleConstraint {
  std::vector<std::string> terms;

  bool any() const { return terms.empty(); }
  friend bool operator==(const RoleConstraint&, const RoleConstraint&) = default;
};

/// `*` or `term,term,...`. Throws std::invalid_argument on empty terms.
RoleConstraint parse_role_constraint(std::string_view s);

struct ActionRule {
  std::string action;
  RoleConstraint actor;
  RoleConstraint target;
  std::optional<RoleConstraint> destination;  // absent: no destination needed
};

struct Verdict {
  bool valid = true;
  std::string reason;
  std::optional<std::string> destination;  // after inference

  explicit operator bool() const { return valid; }
};

/// Roles bound to an observed action, as knowledge-base entity names.
struct Binding {
  std::string target;
  std::optional<std::string> destination;
};

class KnowledgeBase {
public:
  /// Sections: [classes] [entities] [properties] [action-rules]
  /// [inference-rules] [capabilities].
  static KnowledgeBase parse(std::string_view text);
  static KnowledgeBase load(const std::string& path);

  bool has_class(std::string_view c) const;
  bool has_entity(std::string_view e) const;
  bool has_action(std::string_view a) const;
  std::optional<std::string> parent(std::string_view cls) const;
  /// Entity membership including inherited classes.
  bool is_a(std::string_view entity, std::string_view cls) const;
  bool has_property(std::string_view entity, std::string_view property) const;
  const std::vector<std::string>& property_names() const { return property_names_; }
  const std::vector<std::string>& entities() const { return entities_; }
  const std::vector<std::string>& actions() const { return action_names_; }

  /// Whether `entity` meets every term of `c`.
  bool satisfies(std::string_view entity, const RoleConstraint& c) const;
  bool satisfies_term(std::string_view entity, std::string_view term) const;

  /// `actor` may be an entity or a class name. Throws std::invalid_argument
  /// on an unknown action or entity.
  Verdict validate_action(std::string_view actor, std::string_view action, std::string_view target,
                          std::optional<std::string_view> destination) const;

  /// Checks each observed leaf's binding against the leaf's declared role
  /// constraints. `bindings` is indexed by observation number.
  Verdict validate_explanation(const PlanLibrary& lib, const Explanation& e, std::span<const Binding> bindings) const;

  bool robot_capable(std::string_view action, std::string_view robot_class = "Robot") const;

  const FactSet& facts() const { return facts_; }

private:
  void close();

  std::map<std::string, std::optional<std::string>, std::less<>> classes_;  // class -> parent
  std::vector<std::string> entities_;
  std::vector<std::string> property_names_;
  std::map<std::string, ActionRule, std::less<>> rules_;
  std::vector<std::string> action_names_;
  std::vector<InferenceRule> inference_;
  std::map<std::string, std::set<std::string>, std::less<>> capabilities_;
  FactSet facts_;  // closed base facts: subclass, isa, has
};

}  // namespace intent

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intent {

enum class NodeKind { Goal, Subgoal, Action };

/// Optional semantic requirements a leaf places on the OOIs bound to the
/// observed action (a class, property or entity name of the knowledge base).
struct LeafConstraint {
  std::optional<std::string> target;
  std::optional<std::string> destination;

  bool empty() const { return !target && !destination; }
  friend bool operator==(const LeafConstraint&, const LeafConstraint&) = default;
};

struct PlanNode {
  std::string symbol;
  NodeKind kind = NodeKind::Action;
  LeafConstraint constraint;    // leaves only
  std::vector<PlanNode> children;  // temporal order

  friend bool operator==(const PlanNode&, const PlanNode&) = default;
};

struct PlanTree {
  PlanNode root;  // kind == Goal

  const std::string& goal() const { return root.symbol; }
  /// Leaves in temporal order.
  std::vector<const PlanNode*> leaves() const;
  std::size_t leaf_count() const;

  friend bool operator==(const PlanTree&, const PlanTree&) = default;
};

struct PlanLibrary {
  std::vector<std::string> terminals;  // action symbols
  std::vector<std::string> subgoals;
  std::vector<PlanTree> goals;

  bool is_terminal(std::string_view s) const;
  bool is_subgoal(std::string_view s) const;
  const PlanTree* find(std::string_view goal) const;
  std::vector<std::string> goal_names() const;

  /// Throws std::invalid_argument on any structural violation.
  void validate() const;

  friend bool operator==(const PlanLibrary&, const PlanLibrary&) = default;
};

/// Indented text, two spaces per level:
///   terminals PickAndPlace Eat ...
///   subgoals Clean ...
///   goal Breakfast
///     Clean
///       PickAndPlace target=washable
///       Wash
PlanLibrary parse_plan_library(std::string_view text);
PlanLibrary load_plan_library(const std::string& path);
std::string serialize(const PlanLibrary& lib);

}  // namespace intent

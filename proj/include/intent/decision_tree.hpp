#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "intent/movement.hpp"

namespace intent {

struct TreeParams {
  std::size_t min_leaf = 1;   // minimum rows per child for a split to be admissible
  std::size_t max_depth = 0;  // 0 = unlimited
};

/// Multiway categorical decision tree over MovementFeatures, grown with
/// Gini impurity. Immutable once trained.
class DecisionTree {
public:
  struct Node {
    int feature = -1;               // -1 marks a leaf
    std::vector<int> children;      // indexed by feature value, -1 when unseen
    int default_child = -1;         // where unseen values are routed
    std::array<std::size_t, kMovementCount> counts{};
    Movement label = Movement::Still;

    bool leaf() const { return feature < 0; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  DecisionTree() = default;
  explicit DecisionTree(std::vector<Node> nodes);

  Movement classify(const MovementFeatures& f) const;
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t depth() const;
  /// Whether some root-to-leaf path tests `feature`.
  bool splits_on(std::size_t feature) const;

  std::string serialize() const;
  static DecisionTree parse(std::string_view text);

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

private:
  std::vector<Node> nodes_;  // nodes_[0] is the root
};

/// Throws std::invalid_argument on an empty dataset. A single-class dataset
/// yields a one-leaf tree.
DecisionTree train(std::span<const LabeledRow> rows, const TreeParams& params = {});

double accuracy(const DecisionTree& tree, std::span<const LabeledRow> rows);

struct CrossValidation {
  std::vector<int> groups;
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;     // average over folds
  double pooled_accuracy = 0.0;   // correct / total over all held-out rows
};

/// Leave-one-group-out: each distinct `group` is held out once.
CrossValidation grouped_cross_validation(std::span<const LabeledRow> rows, const TreeParams& params = {});

}  // namespace intent

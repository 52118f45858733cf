#include "intent/decision_tree.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "intent/text_util.hpp"

namespace intent {

namespace {

double gini(const std::array<std::size_t, kMovementCount>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

Movement majority(const std::array<std::size_t, kMovementCount>& counts) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i)
    if (counts[i] > counts[best]) best = i;
  return static_cast<Movement>(best);
}

class Builder {
public:
  Builder(std::span<const LabeledRow> rows, const TreeParams& params) : rows_(rows), params_(params) {}

  std::vector<DecisionTree::Node> run() {
    std::vector<std::size_t> all(rows_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    build(all, 0, 0);
    return std::move(nodes_);
  }

private:
  int build(const std::vector<std::size_t>& idx, unsigned used_mask, std::size_t depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::array<std::size_t, kMovementCount> counts{};
    for (auto i : idx) ++counts[static_cast<std::size_t>(rows_[i].label)];
    nodes_[id].counts = counts;
    nodes_[id].label = majority(counts);

    const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
    if (pure || (params_.max_depth && depth >= params_.max_depth)) return id;

    const double parent = gini(counts, idx.size());
    int best_feature = -1;
    double best_gain = -1.0;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      if (used_mask & (1u << f)) continue;
      std::vector<std::array<std::size_t, kMovementCount>> per_value(kFeatureArity[f]);
      std::vector<std::size_t> sizes(kFeatureArity[f], 0);
      for (auto i : idx) {
        const auto v = feature_value(rows_[i].features, f);
        ++per_value[v][static_cast<std::size_t>(rows_[i].label)];
        ++sizes[v];
      }
      const auto distinct = std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; });
      if (distinct < 2) continue;
      bool admissible = true;
      double weighted = 0.0;
      for (std::size_t v = 0; v < sizes.size(); ++v) {
        if (sizes[v] == 0) continue;
        if (sizes[v] < params_.min_leaf) admissible = false;
        weighted += static_cast<double>(sizes[v]) / static_cast<double>(idx.size()) * gini(per_value[v], sizes[v]);
      }
      if (!admissible) continue;
      const double gain = parent - weighted;
      if (gain > best_gain + 1e-12) {
        best_gain = gain;
        best_feature = static_cast<int>(f);
      }
    }
    if (best_feature < 0) return id;

    const auto f = static_cast<std::size_t>(best_feature);
    std::vector<std::vector<std::size_t>> parts(kFeatureArity[f]);
    for (auto i : idx) parts[feature_value(rows_[i].features, f)].push_back(i);

    std::vector<int> children(kFeatureArity[f], -1);
    int default_child = -1;
    std::size_t default_size = 0;
    for (std::size_t v = 0; v < parts.size(); ++v) {
      if (parts[v].empty()) continue;
      children[v] = build(parts[v], used_mask | (1u << f), depth + 1);
      if (parts[v].size() > default_size) {
        default_size = parts[v].size();
        default_child = children[v];
      }
    }
    nodes_[id].feature = best_feature;
    nodes_[id].children = std::move(children);
    nodes_[id].default_child = default_child;
    return id;
  }

  std::span<const LabeledRow> rows_;
  TreeParams params_;
  std::vector<DecisionTree::Node> nodes_;
};

std::string counts_string(const std::array<std::size_t, kMovementCount>& counts) {
  std::string s;
  for (std::size_t i = 0; i < counts.size(); ++i) s += (i ? "," : "") + std::to_string(counts[i]);
  return s;
}

}  // namespace

DecisionTree::DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("decision tree needs a root");
}

Movement DecisionTree::classify(const MovementFeatures& f) const {
  if (nodes_.empty()) throw std::logic_error("classify on an untrained tree");
  int n = 0;
  while (!nodes_[n].leaf()) {
    const auto& node = nodes_[n];
    const int child = node.children[feature_value(f, static_cast<std::size_t>(node.feature))];
    n = child >= 0 ? child : node.default_child;
  }
  return nodes_[n].label;
}

std::size_t DecisionTree::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [n, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    for (int c : nodes_[n].children)
      if (c >= 0) stack.emplace_back(c, d + 1);
  }
  return best;
}

bool DecisionTree::splits_on(std::size_t feature) const {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [&](const Node& n) { return !n.leaf() && static_cast<std::size_t>(n.feature) == feature; });
}

// Indented text, two spaces per level:
//   split feature=<name> label=<MOVEMENT> default=<value> counts=a,b,c,d,e
//     [<value>] leaf label=<MOVEMENT> counts=...
std::string DecisionTree::serialize() const {
  std::string out = "tree v1\n";
  struct Item {
    int node;
    std::size_t depth;
    std::string edge;
  };
  std::vector<Item> stack{{0, 0, ""}};
  while (!stack.empty()) {
    auto item = stack.back();
    stack.pop_back();
    const auto& n = nodes_[item.node];
    out += std::string(item.depth * 2, ' ');
    if (!item.edge.empty()) out += '[' + item.edge + "] ";
    if (n.leaf()) {
      out += "leaf label=" + std::string(to_string(n.label)) + " counts=" + counts_string(n.counts) + '\n';
      continue;
    }
    const auto f = static_cast<std::size_t>(n.feature);
    std::size_t default_value = 0;
    for (std::size_t v = 0; v < n.children.size(); ++v)
      if (n.children[v] == n.default_child) default_value = v;
    out += "split feature=" + std::string(kFeatureNames[f]) + " label=" + std::string(to_string(n.label)) + " default=" +
           std::string(feature_value_name(f, default_value)) + " counts=" + counts_string(n.counts) + '\n';
    for (std::size_t v = n.children.size(); v-- > 0;)
      if (n.children[v] >= 0) stack.push_back({n.children[v], item.depth + 1, std::string(feature_value_name(f, v))});
  }
  return out;
}

DecisionTree DecisionTree::parse(std::string_view content) {
  struct Pending {
    int node;
    std::size_t depth;
  };
  std::vector<Node> nodes;
  std::vector<Pending> open;  // ancestors awaiting children
  std::vector<std::string> default_names;
  std::size_t line_no = 0;
  bool header = false;

  for (auto raw : text::lines(content)) {
    ++line_no;
    if (text::trim(raw).empty()) continue;
    if (!header) {
      if (text::trim(raw) != "tree v1") throw ParseError("expected 'tree v1' header", line_no);
      header = true;
      continue;
    }
    std::size_t indent = 0;
    while (indent < raw.size() && raw[indent] == ' ') ++indent;
    if (indent % 2) throw ParseError("odd indentation", line_no);
    const std::size_t depth = indent / 2;
    auto body = text::trim(raw);

    std::string edge;
    if (body.front() == '[') {
      const auto close = body.find(']');
      if (close == std::string_view::npos) throw ParseError("unterminated edge label", line_no);
      edge = std::string(body.substr(1, close - 1));
      body = text::trim(body.substr(close + 1));
    }

    while (!open.empty() && open.back().depth >= depth) open.pop_back();
    if (depth == 0) {
      if (!nodes.empty()) throw ParseError("multiple roots", line_no);
      if (!edge.empty()) throw ParseError("root cannot carry an edge label", line_no);
    } else if (open.empty() || open.back().depth + 1 != depth || edge.empty()) {
      throw ParseError("child node without parent split", line_no);
    }

    Node n;
    const auto fields = text::split_ws(body);
    if (fields.empty()) throw ParseError("empty node", line_no);
    std::string default_name;
    bool labelled = false;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto eq = fields[i].find('=');
      if (eq == std::string_view::npos) throw ParseError("expected key=value", line_no);
      const auto key = fields[i].substr(0, eq);
      const auto val = fields[i].substr(eq + 1);
      try {
        if (key == "label") {
          n.label = parse_movement(val);
          labelled = true;
        } else if (key == "feature") {
          n.feature = static_cast<int>(feature_index(val));
        } else if (key == "default") {
          default_name = std::string(val);
        } else if (key == "counts") {
          const auto parts = text::split(val, ',');
          if (parts.size() != kMovementCount) throw ParseError("counts needs 5 entries", line_no);
          for (std::size_t c = 0; c < kMovementCount; ++c)
            n.counts[c] = static_cast<std::size_t>(text::to_int(parts[c], line_no));
        } else {
          throw ParseError("unknown key '" + std::string(key) + "'", line_no);
        }
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no);
      }
    }
    if (fields[0] == "leaf") {
      n.feature = -1;
    } else if (fields[0] == "split") {
      if (n.feature < 0) throw ParseError("split without feature", line_no);
      n.children.assign(kFeatureArity[static_cast<std::size_t>(n.feature)], -1);
      if (!labelled) n.label = majority(n.counts);
    } else {
      throw ParseError("unknown node kind '" + std::string(fields[0]) + "'", line_no);
    }

    const int id = static_cast<int>(nodes.size());
    nodes.push_back(std::move(n));
    default_names.push_back(default_name);
    if (depth > 0) {
      auto& parent = nodes[open.back().node];
      const auto pf = static_cast<std::size_t>(parent.feature);
      std::size_t v = 0;
      try {
        v = parse_feature_value(pf, edge);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no);
      }
      if (parent.children[v] >= 0) throw ParseError("duplicate edge '" + edge + "'", line_no);
      parent.children[v] = id;
      if (default_names[open.back().node] == edge) parent.default_child = id;
    }
    if (!nodes[id].leaf()) open.push_back({id, depth});
  }
  if (nodes.empty()) throw ParseError("empty tree");
  for (const auto& n : nodes)
    if (!n.leaf() && n.default_child < 0) throw ParseError("split without a valid default child");
  return DecisionTree(std::move(nodes));
}

DecisionTree train(std::span<const LabeledRow> rows, const TreeParams& params) {
  if (rows.empty()) throw std::invalid_argument("cannot train on an empty dataset");
  return DecisionTree(Builder(rows, params).run());
}

double accuracy(const DecisionTree& tree, std::span<const LabeledRow> rows) {
  if (rows.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& r : rows) correct += tree.classify(r.features) == r.label;
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

CrossValidation grouped_cross_validation(std::span<const LabeledRow> rows, const TreeParams& params) {
  CrossValidation cv;
  std::set<int> groups;
  for (const auto& r : rows) groups.insert(r.group);
  if (groups.size() < 2) throw std::invalid_argument("grouped cross-validation needs at least two groups");
  std::size_t correct = 0;
  for (int g : groups) {
    LabeledDataset train_rows;
    LabeledDataset test_rows;
    for (const auto& r : rows) (r.group == g ? test_rows : train_rows).push_back(r);
    const auto tree = train(train_rows, params);
    const double acc = accuracy(tree, test_rows);
    correct += static_cast<std::size_t>(acc * static_cast<double>(test_rows.size()) + 0.5);
    cv.groups.push_back(g);
    cv.fold_accuracy.push_back(acc);
  }
  double sum = 0.0;
  for (double a : cv.fold_accuracy) sum += a;
  cv.mean_accuracy = sum / static_cast<double>(cv.fold_accuracy.size());
  cv.pooled_accuracy = static_cast<double>(correct) / static_cast<double>(rows.size());
  return cv;
}

}  // namespace intent

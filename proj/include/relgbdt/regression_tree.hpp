#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "relgbdt/feature_column.hpp"
#include "relgbdt/rng.hpp"

namespace relgbdt {

struct TreeConfig {
  int max_depth = 6;
  int min_examples_leaf = 5;
  double feature_sampling_ratio = 0.2;  // per split node, ceil(ratio * #features)
};

struct TreeNode {
  // Leaf when feature < 0.
  int feature = -1;  // index into RegressionTree::feature_names
  double value = 0.0;
  double threshold = 0.0;               // numerical split: value <= threshold goes left
  std::vector<std::string> cats_left;   // categorical split: sorted tokens going left
  std::vector<std::string> cats_right;  // sorted tokens going right; unseen -> missing side
  bool categorical = false;
  bool missing_left = true;
  int left = -1, right = -1;

  bool is_leaf() const { return feature < 0; }
};

// Axis-aligned least-squares regression tree. Greedy CART: at each node a
// uniform sample of ceil(ratio * #features) candidate features is scanned,
// numerical candidates at midpoints between consecutive distinct values,
// categorical candidates over prefixes of the mean-target category order.
// Missing values go to the side that minimizes squared error and the winning
// direction is stored. Ties between equal-gain splits resolve to the lowest
// feature index, then the lowest threshold.
struct RegressionTree {
  std::vector<std::string> feature_names;
  std::vector<TreeNode> nodes;  // nodes[0] is the root; empty means "predict 0"
  int depth = 0;

  bool trivial_zero() const { return nodes.empty(); }
};

RegressionTree train_tree(std::span<const FeatureColumn> features,
                          std::span<const double> targets, std::span<const double> weights,
                          const TreeConfig& config, Rng& rng);

// Resolves tree feature names against a column set (by name). Throws if a
// used feature is absent entirely.
std::vector<int> bind_features(const RegressionTree& tree,
                               std::span<const FeatureColumn> columns);

double predict_tree_row(const RegressionTree& tree, std::span<const FeatureColumn> columns,
                        std::span<const int> binding, size_t row);

// Binds by name and predicts every row of the column set.
std::vector<double> predict_tree(const RegressionTree& tree,
                                 std::span<const FeatureColumn> columns);

// Map-based single example: numerical value, categorical token, or missing
// (std::nullopt entry or absent only if the tree never uses the feature).
using FeatureValue = std::optional<std::variant<double, std::string>>;
double predict_tree_example(const RegressionTree& tree,
                            const std::map<std::string, FeatureValue>& example);

// Minimal depth at which each feature first splits (root = 0). Features the
// tree never uses are absent from the map.
std::map<std::string, int> feature_min_depths(const RegressionTree& tree);

}  // namespace relgbdt

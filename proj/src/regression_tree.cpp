#include "relgbdt/regression_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace relgbdt {

FeatureColumn categorical_column(std::string name, std::span<const std::string> tokens) {
  FeatureColumn c;
  c.name = std::move(name);
  c.kind = AttrKind::categorical;
  auto dict = std::make_shared<std::vector<std::string>>();
  std::map<std::string, int32_t> index;
  c.cat.reserve(tokens.size());
  for (const std::string& t : tokens) {
    if (t.empty()) {
      c.cat.push_back(-1);
      continue;
    }
    auto it = index.find(t);
    if (it == index.end()) {
      it = index.emplace(t, static_cast<int32_t>(dict->size())).first;
      dict->push_back(t);
    }
    c.cat.push_back(it->second);
  }
  c.dict = std::move(dict);
  return c;
}

FeatureColumn categorical_column_with_dict(
    std::string name, std::span<const std::string> tokens,
    std::shared_ptr<const std::vector<std::string>> dict) {
  FeatureColumn c;
  c.name = std::move(name);
  c.kind = AttrKind::categorical;
  std::map<std::string, int32_t> index;
  for (size_t i = 0; i < dict->size(); ++i) index[(*dict)[i]] = static_cast<int32_t>(i);
  c.cat.reserve(tokens.size());
  for (const std::string& t : tokens) {
    auto it = index.find(t);
    c.cat.push_back(t.empty() || it == index.end() ? -1 : it->second);
  }
  c.dict = std::move(dict);
  return c;
}

namespace {

struct GroupStats {
  double weight = 0.0, sum = 0.0, sum_sq = 0.0;
  int count = 0;

  void add(double w, double t) {
    weight += w;
    sum += w * t;
    sum_sq += w * t * t;
    ++count;
  }
  void merge(const GroupStats& o) {
    weight += o.weight;
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
  }
  double sse() const { return weight > 0.0 ? sum_sq - sum * sum / weight : 0.0; }
  double mean() const { return weight > 0.0 ? sum / weight : 0.0; }
};

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  bool categorical = false;
  double threshold = 0.0;
  std::vector<int32_t> left_codes;   // categorical only, sorted
  std::vector<int32_t> right_codes;  // categorical only, sorted
  bool missing_left = true;

  bool valid() const { return feature >= 0; }
};

struct Builder {
  std::span<const FeatureColumn> features;
  std::span<const double> targets;
  std::span<const double> weights;
  const TreeConfig& config;
  Rng& rng;
  std::vector<int> order;  // example indices, partitioned in place per node
  std::vector<int> feature_pool;
  RegressionTree tree;

  double weight_of(int i) const { return weights.empty() ? 1.0 : weights[i]; }

  // Evaluates left/right against parent sse; prefers lower feature index, then
  // lower threshold / smaller left set (guaranteed by scan order + strict >),
  // then missing-left (evaluated first).
  static void consider(SplitCandidate& best, double parent_sse, const GroupStats& left,
                       const GroupStats& right, const GroupStats& missing, int min_leaf,
                       auto&& materialize) {
    for (int miss_left = 1; miss_left >= 0; --miss_left) {
      GroupStats l = left, r = right;
      (miss_left ? l : r).merge(missing);
      if (l.count < min_leaf || r.count < min_leaf) continue;
      double gain = parent_sse - (l.sse() + r.sse());
      if (gain > best.gain) {
        materialize(best);
        best.gain = gain;
        best.missing_left = miss_left != 0;
      }
    }
  }

  SplitCandidate best_numeric_split(int fi, int begin, int end, const GroupStats& parent) {
    const std::vector<double>& col = features[fi].num;
    std::vector<std::pair<double, int>> sorted;  // (value, example)
    sorted.reserve(end - begin);
    GroupStats missing;
    for (int k = begin; k < end; ++k) {
      int ex = order[k];
      double v = col[ex];
      if (std::isnan(v))
        missing.add(weight_of(ex), targets[ex]);
      else
        sorted.emplace_back(v, ex);
    }
    SplitCandidate best;
    if (sorted.size() < 2) return best;
    std::sort(sorted.begin(), sorted.end());

    double parent_sse = parent.sse();
    GroupStats left;
    GroupStats right;
    for (const auto& [v, ex] : sorted) right.add(weight_of(ex), targets[ex]);
    for (size_t k = 0; k + 1 < sorted.size(); ++k) {
      int ex = sorted[k].second;
      double w = weight_of(ex), t = targets[ex];
      left.add(w, t);
      right.weight -= w;
      right.sum -= w * t;
      right.sum_sq -= w * t * t;
      right.count -= 1;
      if (sorted[k].first == sorted[k + 1].first) continue;  // not a boundary
      // Midpoint, snapped back onto the lower value when rounding would cross
      // the boundary (adjacent representable doubles).
      double threshold = sorted[k].first + (sorted[k + 1].first - sorted[k].first) / 2;
      if (!(threshold < sorted[k + 1].first)) threshold = sorted[k].first;
      consider(best, parent_sse, left, right, missing, config.min_examples_leaf,
               [&](SplitCandidate& b) {
                 b.feature = fi;
                 b.categorical = false;
                 b.threshold = threshold;
               });
    }
    return best;
  }

  SplitCandidate best_categorical_split(int fi, int begin, int end, const GroupStats& parent) {
    const FeatureColumn& col = features[fi];
    std::map<int32_t, GroupStats> groups;
    GroupStats missing;
    for (int k = begin; k < end; ++k) {
      int ex = order[k];
      int32_t code = col.cat[ex];
      if (code < 0)
        missing.add(weight_of(ex), targets[ex]);
      else
        groups[code].add(weight_of(ex), targets[ex]);
    }
    SplitCandidate best;
    if (groups.size() < 2) return best;

    // Classic optimal one-dimensional ordering for squared error: scan
    // prefixes of categories sorted by mean target (token breaks ties).
    std::vector<std::pair<int32_t, GroupStats>> ordered(groups.begin(), groups.end());
    std::sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
      double ma = a.second.mean(), mb = b.second.mean();
      if (ma != mb) return ma < mb;
      return (*col.dict)[a.first] < (*col.dict)[b.first];
    });

    double parent_sse = parent.sse();
    GroupStats left;
    GroupStats right;
    for (const auto& g : ordered) right.merge(g.second);
    for (size_t k = 0; k + 1 < ordered.size(); ++k) {
      left.merge(ordered[k].second);
      right.weight -= ordered[k].second.weight;
      right.sum -= ordered[k].second.sum;
      right.sum_sq -= ordered[k].second.sum_sq;
      right.count -= ordered[k].second.count;
      consider(best, parent_sse, left, right, missing, config.min_examples_leaf,
               [&, k](SplitCandidate& b) {
                 b.feature = fi;
                 b.categorical = true;
                 b.left_codes.clear();
                 b.right_codes.clear();
                 for (size_t j = 0; j < ordered.size(); ++j)
                   (j <= k ? b.left_codes : b.right_codes).push_back(ordered[j].first);
               });
    }
    std::sort(best.left_codes.begin(), best.left_codes.end());
    std::sort(best.right_codes.begin(), best.right_codes.end());
    return best;
  }

  int build(int begin, int end, int depth) {
    GroupStats parent;
    for (int k = begin; k < end; ++k) parent.add(weight_of(order[k]), targets[order[k]]);

    int node_idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[node_idx].value = parent.mean();
    tree.depth = std::max(tree.depth, depth);
    if (depth >= config.max_depth || parent.count < 2 * config.min_examples_leaf ||
        parent.sse() <= 0.0 || features.empty())
      return node_idx;

    size_t n_candidates = static_cast<size_t>(
        std::ceil(config.feature_sampling_ratio * static_cast<double>(features.size())));
    n_candidates = std::clamp<size_t>(n_candidates, 1, features.size());
    rng.partial_shuffle(feature_pool, n_candidates);
    std::vector<int> candidates(feature_pool.begin(), feature_pool.begin() + n_candidates);
    std::sort(candidates.begin(), candidates.end());

    SplitCandidate best;
    for (int fi : candidates) {
      SplitCandidate c = features[fi].kind == AttrKind::numerical
                             ? best_numeric_split(fi, begin, end, parent)
                             : best_categorical_split(fi, begin, end, parent);
      if (c.valid() && c.gain > best.gain) best = std::move(c);
    }
    if (!best.valid()) return node_idx;

    // Partition examples; order within each side is irrelevant because split
    // scans re-sort by value deterministically.
    auto goes_left = [&](int ex) {
      const FeatureColumn& col = features[best.feature];
      if (best.categorical) {
        int32_t code = col.cat[ex];
        if (code < 0) return best.missing_left;
        return std::binary_search(best.left_codes.begin(), best.left_codes.end(), code);
      }
      double v = col.num[ex];
      if (std::isnan(v)) return best.missing_left;
      return v <= best.threshold;
    };
    auto mid_it = std::stable_partition(order.begin() + begin, order.begin() + end, goes_left);
    int mid = static_cast<int>(mid_it - order.begin());

    {
      TreeNode& node = tree.nodes[node_idx];
      node.feature = best.feature;
      node.categorical = best.categorical;
      node.threshold = best.threshold;
      node.missing_left = best.missing_left;
      if (best.categorical) {
        const auto& dict = *features[best.feature].dict;
        for (int32_t code : best.left_codes) node.cats_left.push_back(dict[code]);
        for (int32_t code : best.right_codes) node.cats_right.push_back(dict[code]);
        std::sort(node.cats_left.begin(), node.cats_left.end());
        std::sort(node.cats_right.begin(), node.cats_right.end());
      }
    }

    int left_idx = build(begin, mid, depth + 1);
    int right_idx = build(mid, end, depth + 1);
    tree.nodes[node_idx].left = left_idx;
    tree.nodes[node_idx].right = right_idx;
    return node_idx;
  }
};

}  // namespace

RegressionTree train_tree(std::span<const FeatureColumn> features,
                          std::span<const double> targets, std::span<const double> weights,
                          const TreeConfig& config, Rng& rng) {
  if (targets.empty()) throw std::runtime_error("train_tree: zero examples");
  if (config.max_depth < 1 || config.min_examples_leaf < 1)
    throw std::runtime_error("train_tree: invalid config");
  for (const FeatureColumn& f : features)
    if (f.size() != targets.size())
      throw std::runtime_error("train_tree: column '" + f.name + "' length mismatch");
  if (!weights.empty() && weights.size() != targets.size())
    throw std::runtime_error("train_tree: weights length mismatch");

  Builder b{features, targets, weights, config, rng, {}, {}, {}};
  b.order.resize(targets.size());
  std::iota(b.order.begin(), b.order.end(), 0);
  b.feature_pool.resize(features.size());
  std::iota(b.feature_pool.begin(), b.feature_pool.end(), 0);
  b.build(0, static_cast<int>(targets.size()), 0);

  // Keep only the features the tree actually uses.
  RegressionTree tree = std::move(b.tree);
  std::vector<int> remap(features.size(), -1);
  for (const TreeNode& n : tree.nodes) {
    if (n.is_leaf()) continue;
    if (remap[n.feature] < 0) {
      remap[n.feature] = static_cast<int>(tree.feature_names.size());
      tree.feature_names.push_back(features[n.feature].name);
    }
  }
  for (TreeNode& n : tree.nodes)
    if (!n.is_leaf()) n.feature = remap[n.feature];
  return tree;
}

std::vector<int> bind_features(const RegressionTree& tree,
                               std::span<const FeatureColumn> columns) {
  std::vector<int> binding(tree.feature_names.size(), -1);
  for (size_t i = 0; i < tree.feature_names.size(); ++i) {
    for (size_t c = 0; c < columns.size(); ++c)
      if (columns[c].name == tree.feature_names[i]) {
        binding[i] = static_cast<int>(c);
        break;
      }
    if (binding[i] < 0)
      throw std::runtime_error("predict: feature '" + tree.feature_names[i] + "' absent");
  }
  return binding;
}

double predict_tree_row(const RegressionTree& tree, std::span<const FeatureColumn> columns,
                        std::span<const int> binding, size_t row) {
  int idx = 0;
  for (;;) {
    const TreeNode& node = tree.nodes[idx];
    if (node.is_leaf()) return node.value;
    const FeatureColumn& col = columns[binding[node.feature]];
    bool left;
    if (node.categorical) {
      if (col.kind != AttrKind::categorical)
        throw std::runtime_error("predict: feature '" + tree.feature_names[node.feature] +
                                 "' kind mismatch");
      int32_t code = col.cat[row];
      if (code < 0) {
        left = node.missing_left;
      } else {
        const std::string& tok = col.token(row);
        if (std::binary_search(node.cats_left.begin(), node.cats_left.end(), tok))
          left = true;
        else if (std::binary_search(node.cats_right.begin(), node.cats_right.end(), tok))
          left = false;
        else
          left = node.missing_left;  // unseen category routes with missing
      }
    } else {
      if (col.kind != AttrKind::numerical)
        throw std::runtime_error("predict: feature '" + tree.feature_names[node.feature] +
                                 "' kind mismatch");
      double v = col.num[row];
      left = std::isnan(v) ? node.missing_left : v <= node.threshold;
    }
    idx = left ? node.left : node.right;
  }
}

std::vector<double> predict_tree(const RegressionTree& tree,
                                 std::span<const FeatureColumn> columns) {
  std::vector<int> binding = bind_features(tree, columns);
  size_t n = columns.empty() ? 0 : columns[0].size();
  if (tree.feature_names.empty() && !columns.empty()) n = columns[0].size();
  std::vector<double> out(n);
  for (size_t row = 0; row < n; ++row) out[row] = predict_tree_row(tree, columns, binding, row);
  return out;
}

double predict_tree_example(const RegressionTree& tree,
                            const std::map<std::string, FeatureValue>& example) {
  int idx = 0;
  for (;;) {
    const TreeNode& node = tree.nodes[idx];
    if (node.is_leaf()) return node.value;
    auto it = example.find(tree.feature_names[node.feature]);
    if (it == example.end())
      throw std::runtime_error("predict: feature '" + tree.feature_names[node.feature] +
                               "' absent from example");
    bool left;
    if (!it->second.has_value()) {
      left = node.missing_left;
    } else if (node.categorical) {
      const std::string& tok = std::get<std::string>(*it->second);
      if (std::binary_search(node.cats_left.begin(), node.cats_left.end(), tok))
        left = true;
      else if (std::binary_search(node.cats_right.begin(), node.cats_right.end(), tok))
        left = false;
      else
        left = node.missing_left;
    } else {
      left = std::get<double>(*it->second) <= node.threshold;
    }
    idx = left ? node.left : node.right;
  }
}

std::map<std::string, int> feature_min_depths(const RegressionTree& tree) {
  std::map<std::string, int> depths;
  if (tree.nodes.empty()) return depths;
  // (node, depth) walk
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [idx, depth] = stack.back();
    stack.pop_back();
    const TreeNode& node = tree.nodes[idx];
    if (node.is_leaf()) continue;
    const std::string& name = tree.feature_names[node.feature];
    auto it = depths.find(name);
    if (it == depths.end() || it->second > depth) depths[name] = depth;
    stack.push_back({node.left, depth + 1});
    stack.push_back({node.right, depth + 1});
  }
  return depths;
}

}  // namespace relgbdt

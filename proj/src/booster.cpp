#include "relgbdt/booster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "relgbdt/rng.hpp"

namespace relgbdt {

std::string TrainLog::to_csv() const {
  bool has_valid = false;
  for (const IterationLog& l : lines) has_valid |= l.valid_metric.has_value();
  std::string out = has_valid ? "iter,train_loss,valid_metric\n" : "iter,train_loss\n";
  for (const IterationLog& l : lines) {
    out += std::to_string(l.iteration);
    out.push_back(',');
    out += format_double(l.train_loss);
    if (has_valid) {
      out.push_back(',');
      if (l.valid_metric) out += format_double(*l.valid_metric);
    }
    out.push_back('\n');
  }
  return out;
}

namespace {

struct NodeState {
  std::vector<int32_t> covered;    // table rows, ascending
  std::vector<int32_t> cover_pos;  // table row -> covered position, -1 if not covered
  std::vector<FeatureColumn> prop_block;  // "prop:"-named columns over covered rows
};

struct CascadeContext {
  const Schema* schema = nullptr;
  const DatasetInstance* instance = nullptr;
  const Schedule* schedule = nullptr;
  std::vector<std::vector<FeatureColumn>> table_props;
  std::vector<NodeState> nodes;
};

// Coverage: the root node covers root_rows; every other node covers exactly
// the rows referenced from its parent's covered rows (restrict=true, used for
// training) or all table rows (restrict=false, used for inference).
CascadeContext build_context(const Schema& schema, const DatasetInstance& instance,
                             const Schedule& schedule, std::span<const int32_t> root_rows,
                             bool restrict_coverage) {
  CascadeContext ctx;
  ctx.schema = &schema;
  ctx.instance = &instance;
  ctx.schedule = &schedule;
  ctx.table_props.resize(schema.tables.size());
  for (size_t t = 0; t < schema.tables.size(); ++t)
    ctx.table_props[t] = table_prop_columns(schema, instance, static_cast<int>(t));

  ctx.nodes.resize(schedule.nodes.size());
  for (size_t ni = 0; ni < schedule.nodes.size(); ++ni) {
    const ScheduleNode& node = schedule.nodes[ni];
    NodeState& state = ctx.nodes[ni];
    size_t table_rows = instance.tables[node.table].row_count();
    if (node.parent < 0) {
      if (root_rows.empty()) {
        state.covered.resize(table_rows);
        std::iota(state.covered.begin(), state.covered.end(), 0);
      } else {
        state.covered.assign(root_rows.begin(), root_rows.end());
        std::sort(state.covered.begin(), state.covered.end());
        state.covered.erase(std::unique(state.covered.begin(), state.covered.end()),
                            state.covered.end());
      }
    } else if (!restrict_coverage) {
      state.covered.resize(table_rows);
      std::iota(state.covered.begin(), state.covered.end(), 0);
    } else {
      const NodeState& parent = ctx.nodes[node.parent];
      const auto& relation =
          instance.tables[schedule.nodes[node.parent].table].rels[node.parent_rel];
      std::vector<char> hit(table_rows, 0);
      for (int32_t row : parent.covered)
        for (int32_t child : relation[row]) hit[child] = 1;
      for (size_t r = 0; r < table_rows; ++r)
        if (hit[r]) state.covered.push_back(static_cast<int32_t>(r));
    }
    state.cover_pos.assign(table_rows, -1);
    for (size_t pos = 0; pos < state.covered.size(); ++pos)
      state.cover_pos[state.covered[pos]] = static_cast<int32_t>(pos);
    state.prop_block = compute_b_prop(ctx.table_props[node.table], state.covered);
  }
  return ctx;
}

RegressionTree zero_tree() {
  RegressionTree tree;
  tree.nodes.emplace_back();  // single leaf, value 0
  return tree;
}

std::vector<double> predict_over(const RegressionTree& tree,
                                 std::span<const FeatureColumn> cols, size_t rows) {
  std::vector<double> out(rows);
  std::vector<int> binding = bind_features(tree, cols);
  for (size_t i = 0; i < rows; ++i) out[i] = predict_tree_row(tree, cols, binding, i);
  return out;
}

FeatureBlock assemble_node_block(const CascadeContext& ctx, int ni,
                                 std::span<const FeatureBlock> blocks,
                                 std::span<const std::vector<double>> preds) {
  const ScheduleNode& node = ctx.schedule->nodes[ni];
  const NodeState& state = ctx.nodes[ni];
  std::vector<ArcInputs> arcs;
  arcs.reserve(node.children.size());
  for (int child : node.children) {
    const ScheduleNode& cn = ctx.schedule->nodes[child];
    ArcInputs arc;
    arc.rel_name = ctx.schema->tables[node.table].rels[cn.parent_rel].name;
    arc.relation = &ctx.instance->tables[node.table].rels[cn.parent_rel];
    arc.child_cover_pos = ctx.nodes[child].cover_pos;
    arc.child_preds = preds[child];
    for (int col : blocks[child].hard_chain) arc.hard_cols.push_back(&blocks[child].cols[col]);
    for (int col : blocks[child].soft_chain) arc.soft_cols.push_back(&blocks[child].cols[col]);
    arcs.push_back(std::move(arc));
  }
  return assemble_block(ctx.table_props[node.table], state.covered, arcs);
}

// One iteration's backward cascade with already-trained trees; returns root
// predictions over the root's covered rows.
std::vector<double> run_backward_cascade(const CascadeContext& ctx,
                                         const std::vector<std::vector<NodeTrees>>& node_trees,
                                         int klass, FeatureBlock* capture = nullptr,
                                         int capture_node = -1) {
  size_t n_nodes = ctx.schedule->nodes.size();
  std::vector<FeatureBlock> blocks(n_nodes);
  std::vector<std::vector<double>> preds(n_nodes);
  std::vector<int> order = inverse_topological_order(*ctx.schedule);
  for (int ni : order) {
    blocks[ni] = assemble_node_block(ctx, ni, blocks, preds);
    preds[ni] = predict_over(node_trees[ni][klass].backward, blocks[ni].cols,
                             ctx.nodes[ni].covered.size());
    if (capture && ni == capture_node) *capture = blocks[ni];
  }
  return preds[0];
}

}  // namespace

LabelData root_labels(const Schema& schema, const DatasetInstance& instance, const Loss& loss,
                      std::span<const int32_t> root_rows,
                      std::span<const std::string> class_names) {
  const TableData& root = instance.tables[schema.root_index()];
  std::vector<std::string> raw;
  if (root_rows.empty()) {
    raw = root.labels;
  } else {
    raw.reserve(root_rows.size());
    for (int32_t r : root_rows) raw.push_back(root.labels[r]);
  }
  for (const std::string& tok : raw)
    if (tok.empty()) throw std::runtime_error("missing label on a root row");
  return decode_labels(loss, raw, class_names);
}

StrongModel train(const Schema& schema, const DatasetInstance& instance,
                  const BoostParams& params, std::span<const int32_t> root_rows,
                  const DatasetInstance* valid, TrainLog* log) {
  if (params.shrinkage <= 0.0 || params.shrinkage > 1.0)
    throw std::runtime_error("shrinkage must be in (0, 1]");
  if (params.iterations < 0) throw std::runtime_error("iterations must be >= 0");
  if (params.tree.feature_sampling_ratio <= 0.0 || params.tree.feature_sampling_ratio > 1.0)
    throw std::runtime_error("feature sampling ratio must be in (0, 1]");
  check_schema(schema);
  const TableDef& root_def = schema.root();
  if (!root_def.label) throw std::runtime_error("root table has no label");

  StrongModel model;
  model.schema_fingerprint = schema_fingerprint(schema);
  model.schedule = build_schedule(schema, params.cover_count);
  model.shrinkage = params.shrinkage;
  model.iterations = params.iterations;
  model.tree_config = params.tree;
  model.seed = params.seed;

  if ((params.loss == LossKind::mse) != (root_def.label->task == TaskKind::regression))
    throw std::runtime_error("loss does not match the root label task");

  CascadeContext ctx = build_context(schema, instance, model.schedule, root_rows, true);
  const NodeState& root_state = ctx.nodes[0];
  size_t n = root_state.covered.size();
  if (n == 0) throw std::runtime_error("no labeled root rows to train on");

  // Labels over the (sorted, deduplicated) covered root rows; multiclass
  // discovers its classes here.
  LabelData labels =
      root_labels(schema, instance, Loss{params.loss, 1}, root_state.covered);
  model.loss = make_loss(params.loss, static_cast<int>(labels.class_names.size()));
  model.class_names = labels.class_names;
  int K = model.loss.classes;

  model.rho = initial_prediction(model.loss, labels);

  std::vector<double> scores(n * K);
  for (size_t i = 0; i < n; ++i)
    for (int k = 0; k < K; ++k) scores[i * K + k] = model.rho[k];

  // Validation state advances with the same trees, full coverage.
  CascadeContext valid_ctx;
  LabelData valid_labels;
  std::vector<double> valid_scores;
  size_t valid_n = 0;
  if (valid) {
    valid_ctx = build_context(schema, *valid, model.schedule, {}, false);
    valid_labels = root_labels(schema, *valid, model.loss, {}, model.class_names);
    valid_n = valid_ctx.nodes[0].covered.size();
    valid_scores.assign(valid_n * K, 0.0);
    for (size_t i = 0; i < valid_n; ++i)
      for (int k = 0; k < K; ++k) valid_scores[i * K + k] = model.rho[k];
  }

  if (log) {
    IterationLog line{0, mean_loss(model.loss, scores, labels), std::nullopt};
    if (valid) line.valid_metric = eval_metric(model.loss, valid_scores, valid_labels);
    log->lines.push_back(line);
  }

  size_t n_nodes = model.schedule.nodes.size();
  std::vector<int> topo = topological_order(model.schedule);
  std::vector<int> inverse_topo = inverse_topological_order(model.schedule);

  for (int iter = 1; iter <= params.iterations; ++iter) {
    model.trees.emplace_back(n_nodes, std::vector<NodeTrees>(K));
    auto& iter_trees = model.trees.back();

    for (int k = 0; k < K; ++k) {
      // Weak models fit the negative gradient so that hard/soft attention
      // weighs children by how strongly they support the current residual.
      std::vector<std::vector<double>> pseudo(n_nodes);
      pseudo[0].resize(n);
      std::vector<double> grad(K);
      for (size_t i = 0; i < n; ++i) {
        pseudo_response(model.loss, std::span(scores).subspan(i * K, K), labels, i, grad);
        pseudo[0][i] = -grad[k];
      }

      // Forward pass: props only, residuals flow to children.
      std::vector<std::vector<double>> fwd_pred(n_nodes);
      for (int ni : topo) {
        const ScheduleNode& node = model.schedule.nodes[ni];
        const NodeState& state = ctx.nodes[ni];
        if (ni != 0) {
          const NodeState& parent = ctx.nodes[node.parent];
          const auto& relation =
              instance.tables[model.schedule.nodes[node.parent].table].rels[node.parent_rel];
          std::vector<double> sums(state.covered.size(), 0.0);
          std::vector<int32_t> counts(state.covered.size(), 0);
          for (size_t pi = 0; pi < parent.covered.size(); ++pi) {
            double residual = pseudo[node.parent][pi] - fwd_pred[node.parent][pi];
            for (int32_t child_row : relation[parent.covered[pi]]) {
              int32_t pos = state.cover_pos[child_row];
              sums[pos] += residual;
              counts[pos] += 1;
            }
          }
          pseudo[ni].resize(state.covered.size());
          for (size_t pos = 0; pos < sums.size(); ++pos)
            pseudo[ni][pos] = sums[pos] / counts[pos];  // covered => count >= 1
        }
        if (state.covered.empty()) {
          iter_trees[ni][k].forward = zero_tree();
          fwd_pred[ni] = {};
        } else {
          Rng rng = derive_rng(params.seed, iter, ni, k, TrainPhase::forward);
          iter_trees[ni][k].forward =
              train_tree(state.prop_block, pseudo[ni], {}, params.tree, rng);
          fwd_pred[ni] =
              predict_over(iter_trees[ni][k].forward, state.prop_block, state.covered.size());
        }
      }

      // Backward pass: retrain bottom-up on the full blocks; children's
      // backward predictions feed the parent's attention columns.
      std::vector<FeatureBlock> blocks(n_nodes);
      std::vector<std::vector<double>> bwd_pred(n_nodes);
      for (int ni : inverse_topo) {
        const NodeState& state = ctx.nodes[ni];
        blocks[ni] = assemble_node_block(ctx, ni, blocks, bwd_pred);
        if (state.covered.empty()) {
          iter_trees[ni][k].backward = zero_tree();
          bwd_pred[ni] = {};
        } else {
          Rng rng = derive_rng(params.seed, iter, ni, k, TrainPhase::backward);
          iter_trees[ni][k].backward =
              train_tree(blocks[ni].cols, pseudo[ni], {}, params.tree, rng);
          bwd_pred[ni] =
              predict_over(iter_trees[ni][k].backward, blocks[ni].cols, state.covered.size());
        }
      }

      for (size_t i = 0; i < n; ++i) scores[i * K + k] += params.shrinkage * bwd_pred[0][i];
    }

    if (valid) {
      for (int k = 0; k < K; ++k) {
        std::vector<double> preds = run_backward_cascade(valid_ctx, iter_trees, k);
        for (size_t i = 0; i < valid_n; ++i)
          valid_scores[i * K + k] += params.shrinkage * preds[i];
      }
    }
    if (log) {
      IterationLog line{iter, mean_loss(model.loss, scores, labels), std::nullopt};
      if (valid) line.valid_metric = eval_metric(model.loss, valid_scores, valid_labels);
      log->lines.push_back(line);
    }
  }
  return model;
}

std::vector<double> predict_scores(const StrongModel& model, const Schema& schema,
                                   const DatasetInstance& instance,
                                   std::span<const int32_t> root_rows) {
  if (schema_fingerprint(schema) != model.schema_fingerprint)
    throw std::runtime_error("schema does not match the model fingerprint");
  CascadeContext ctx = build_context(schema, instance, model.schedule, root_rows, false);
  size_t n = ctx.nodes[0].covered.size();
  int K = model.loss.classes;
  std::vector<double> scores(n * K);
  for (size_t i = 0; i < n; ++i)
    for (int k = 0; k < K; ++k) scores[i * K + k] = model.rho[k];
  for (const auto& iter_trees : model.trees) {
    for (int k = 0; k < K; ++k) {
      std::vector<double> preds = run_backward_cascade(ctx, iter_trees, k);
      for (size_t i = 0; i < n; ++i) scores[i * K + k] += model.shrinkage * preds[i];
    }
  }
  return scores;
}

std::vector<double> predict_transformed(const StrongModel& model,
                                        std::span<const double> scores) {
  std::vector<double> out(scores.begin(), scores.end());
  if (model.loss.kind == LossKind::binary_logloss) {
    for (double& v : out) v = sigmoid(v);
  } else if (model.loss.kind == LossKind::multiclass_softmax) {
    int K = model.loss.classes;
    for (size_t i = 0; i + K <= out.size(); i += K) {
      double mx = out[i];
      for (int k = 1; k < K; ++k) mx = std::max(mx, out[i + k]);
      double sum = 0.0;
      for (int k = 0; k < K; ++k) sum += (out[i + k] = std::exp(out[i + k] - mx));
      for (int k = 0; k < K; ++k) out[i + k] /= sum;
    }
  }
  return out;
}

FeatureBlock inference_block(const StrongModel& model, const Schema& schema,
                             const DatasetInstance& instance, int node, int iteration,
                             int klass) {
  if (schema_fingerprint(schema) != model.schema_fingerprint)
    throw std::runtime_error("schema does not match the model fingerprint");
  if (iteration < 1 || iteration > static_cast<int>(model.trees.size()))
    throw std::runtime_error("iteration out of range");
  if (node < 0 || node >= static_cast<int>(model.schedule.nodes.size()))
    throw std::runtime_error("unknown schedule node");
  if (klass < 0 || klass >= model.loss.classes) throw std::runtime_error("class out of range");
  CascadeContext ctx = build_context(schema, instance, model.schedule, {}, false);
  FeatureBlock block;
  run_backward_cascade(ctx, model.trees[iteration - 1], klass, &block, node);
  return block;
}

}  // namespace relgbdt

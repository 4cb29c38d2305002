// relgbdt command line: train / evaluate / synth-gen / flatten / importance /
// inspect over schema.json + per-table CSV datasets.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "relgbdt/booster.hpp"
#include "relgbdt/flatten.hpp"
#include "relgbdt/importance.hpp"
#include "relgbdt/model_io.hpp"
#include "relgbdt/rng.hpp"
#include "relgbdt/synthetic.hpp"

namespace {

using namespace relgbdt;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

int max_threads() {
  if (const char* env = std::getenv("RELGBDT_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

LossKind parse_loss(const std::string& name) {
  if (name == "mse" || name == "regression") return LossKind::mse;
  if (name == "binary" || name == "binary_logloss") return LossKind::binary_logloss;
  if (name == "multiclass" || name == "multiclass_softmax")
    return LossKind::multiclass_softmax;
  throw std::runtime_error("unknown loss '" + name + "' (mse|binary|multiclass)");
}

LoadResult load_checked(const Schema& schema, const std::string& dir) {
  LoadResult loaded = load_instance_dir(schema, dir);
  for (const ValidationIssue& w : loaded.warnings)
    std::cerr << "warning: " << w.table << "/" << w.row << "/" << w.attribute << ": "
              << w.message << "\n";
  ValidationReport report = validate_instance(schema, loaded.instance);
  if (!report.ok()) {
    for (const ValidationIssue& e : report.errors)
      std::cerr << "error: " << e.table << "/" << e.row << "/" << e.attribute << ": "
                << e.message << "\n";
    throw std::runtime_error(dir + ": instance validation failed (" +
                             std::to_string(report.errors.size()) + " errors)");
  }
  return loaded;
}

struct TrainFlags {
  std::string schema_path, data_dir, loss_name = "binary", out_path, log_path, valid_dir;
  int iterations = 500;
  double shrinkage = 0.1;
  int max_depth = 6;
  int min_examples_leaf = 5;
  double feature_sampling = 0.2;
  int cover_count = 3;
  uint64_t seed = 0;

  BoostParams params() const {
    BoostParams p;
    p.loss = parse_loss(loss_name);
    p.shrinkage = shrinkage;
    p.iterations = iterations;
    p.tree.max_depth = max_depth;
    p.tree.min_examples_leaf = min_examples_leaf;
    p.tree.feature_sampling_ratio = feature_sampling;
    p.cover_count = cover_count;
    p.seed = seed;
    return p;
  }
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool require_out) {
  cmd->add_option("--schema", f.schema_path, "schema JSON file")->required();
  cmd->add_option("--data", f.data_dir, "directory with one <table>.csv per table")->required();
  cmd->add_option("--loss", f.loss_name, "mse|binary|multiclass");
  if (require_out)
    cmd->add_option("--out", f.out_path, "output model JSON path")->required();
  cmd->add_option("--iterations", f.iterations, "boosting iterations");
  cmd->add_option("--shrinkage", f.shrinkage, "shrinkage (learning rate)");
  cmd->add_option("--max-depth", f.max_depth, "tree depth limit");
  cmd->add_option("--min-examples-leaf", f.min_examples_leaf, "minimum examples per leaf");
  cmd->add_option("--feature-sampling", f.feature_sampling, "per-node feature sampling ratio");
  cmd->add_option("--cover-count", f.cover_count, "schedule circuit unroll bound");
  cmd->add_option("--seed", f.seed, "random seed");
}

int cmd_train(const TrainFlags& f) {
  Schema schema = parse_schema(read_file(f.schema_path));
  LoadResult loaded = load_checked(schema, f.data_dir);
  LoadResult valid;
  bool has_valid = !f.valid_dir.empty();
  if (has_valid) valid = load_checked(schema, f.valid_dir);

  TrainLog log;
  StrongModel model = train(schema, loaded.instance, f.params(), {},
                            has_valid ? &valid.instance : nullptr, &log);
  save_model(model, f.out_path);
  if (!f.log_path.empty()) write_file(f.log_path, log.to_csv());
  std::cout << "model written to " << f.out_path << " (" << model.iterations
            << " iterations, " << model.schedule.nodes.size() << " schedule nodes)\n";
  return 0;
}

int cmd_evaluate(const TrainFlags& f, const std::string& model_path, int folds) {
  Schema schema = parse_schema(read_file(f.schema_path));
  LoadResult loaded = load_checked(schema, f.data_dir);
  const DatasetInstance& instance = loaded.instance;

  if (folds <= 1) {
    if (model_path.empty())
      throw std::runtime_error("evaluate needs --model, or --folds for cross-validation");
    StrongModel model = load_model(model_path);
    std::vector<double> scores = predict_scores(model, schema, instance);
    LabelData labels = root_labels(schema, instance, model.loss, {}, model.class_names);
    double metric = eval_metric(model.loss, scores, labels);
    std::cout << metric_name(model.loss) << "=" << format_double(metric)
              << " n=" << labels.size() << "\n";
    return 0;
  }

  // k-fold cross-validation partitioning root rows only; non-root tables are
  // shared (held-out root structures simply go unused during training).
  size_t n = instance.tables[schema.root_index()].row_count();
  if (static_cast<size_t>(folds) > n) throw std::runtime_error("more folds than root rows");
  std::vector<int32_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = static_cast<int32_t>(i);
  Rng shuffle_rng(mix_u64(f.seed ^ 0xf01d5eedULL));
  shuffle_rng.partial_shuffle(perm, n);

  auto run_fold = [&](int fold) {
    std::vector<int32_t> train_rows, test_rows;
    for (size_t i = 0; i < n; ++i) {
      if (static_cast<int>(i % folds) == fold)
        test_rows.push_back(perm[i]);
      else
        train_rows.push_back(perm[i]);
    }
    BoostParams params = f.params();
    params.seed = mix_u64(f.seed ^ (0x5eedf01dULL + fold));
    StrongModel model = train(schema, instance, params, train_rows);
    std::sort(test_rows.begin(), test_rows.end());
    std::vector<double> scores = predict_scores(model, schema, instance, test_rows);
    LabelData labels = root_labels(schema, instance, model.loss, test_rows, model.class_names);
    return eval_metric(model.loss, scores, labels);
  };

  std::vector<double> metrics(folds);
  int workers = std::min(max_threads(), folds);
  if (workers <= 1) {
    for (int fold = 0; fold < folds; ++fold) metrics[fold] = run_fold(fold);
  } else {
    // Fold results are deterministic regardless of worker count: each fold
    // derives its own seed.
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int fold = next++; fold < folds; fold = next++) metrics[fold] = run_fold(fold);
      });
    for (std::thread& t : pool) t.join();
  }

  double mean = 0.0;
  for (int fold = 0; fold < folds; ++fold) {
    std::cout << "fold " << fold << ": " << format_double(metrics[fold]) << "\n";
    mean += metrics[fold];
  }
  mean /= folds;
  double var = 0.0;
  for (double m : metrics) var += (m - mean) * (m - mean);
  double stddev = folds > 1 ? std::sqrt(var / (folds - 1)) : 0.0;
  Loss loss = make_loss(parse_loss(f.loss_name), 2);
  std::cout << metric_name(loss) << " mean=" << format_double(mean)
            << " std=" << format_double(stddev) << " folds=" << folds << "\n";
  return 0;
}

int cmd_synth_gen(int n_a, uint64_t seed, const std::string& out_dir, bool regression) {
  SynthConfig config{n_a, seed, regression};
  Schema schema = synthetic_schema(regression);
  DatasetInstance instance = generate_synthetic(config);
  save_instance_dir(schema, instance, out_dir);
  size_t rows = 0;
  for (const TableData& t : instance.tables) rows += t.row_count();
  std::cout << "wrote " << out_dir << " (" << rows << " rows over "
            << schema.tables.size() << " tables)\n";
  return 0;
}

int cmd_flatten(const std::string& schema_path, const std::string& data_dir,
                const std::string& out_dir, int cover_count, const std::string& vocab_dir) {
  Schema schema = parse_schema(read_file(schema_path));
  LoadResult loaded = load_checked(schema, data_dir);
  Schedule schedule = build_schedule(schema, cover_count);
  LoadResult vocab;
  const DatasetInstance* vocab_ptr = nullptr;
  if (!vocab_dir.empty()) {
    vocab = load_checked(schema, vocab_dir);
    vocab_ptr = &vocab.instance;
  }
  FlatDataset flat = flatten(schema, loaded.instance, schedule, vocab_ptr);
  save_instance_dir(flat.schema, flat.instance, out_dir);
  std::cout << "wrote " << out_dir << " ("
            << flat.schema.tables[0].props.size() << " columns, "
            << flat.instance.tables[0].row_count() << " rows)\n";
  return 0;
}

int cmd_importance(const std::string& model_path, const std::string& out_path) {
  StrongModel model = load_model(model_path);
  std::string report = importance_report(model);
  if (out_path.empty())
    std::cout << report;
  else
    write_file(out_path, report);
  return 0;
}

int cmd_inspect(const std::string& schema_path, bool show_schedule, int cover_count,
                bool show_features, const std::string& model_path, const std::string& data_dir,
                const std::string& node_id, int iteration, const std::string& out_path) {
  Schema schema = parse_schema(read_file(schema_path));
  if (show_schedule) {
    Schedule schedule = build_schedule(schema, cover_count);
    std::cout << render_schedule(schema, schedule);
    return 0;
  }
  if (show_features) {
    if (model_path.empty() || data_dir.empty() || node_id.empty())
      throw std::runtime_error("inspect --features needs --model, --data and --node");
    StrongModel model = load_model(model_path);
    LoadResult loaded = load_checked(schema, data_dir);
    int node = model.schedule.node_index(node_id);
    if (node < 0) throw std::runtime_error("unknown schedule node '" + node_id + "'");
    int iter = iteration > 0 ? iteration : static_cast<int>(model.trees.size());
    FeatureBlock block = inference_block(model, schema, loaded.instance, node, iter);
    const TableData& table = loaded.instance.tables[model.schedule.nodes[node].table];
    std::vector<int32_t> rows(table.row_count());
    for (size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int32_t>(i);
    std::string csv = block_to_csv(block, table.row_ids, rows);
    if (out_path.empty())
      std::cout << csv;
    else
      write_file(out_path, csv);
    return 0;
  }
  throw std::runtime_error("inspect needs --schedule or --features");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradient boosted trees over multi-table relational data"};
  app.require_subcommand(1);

  TrainFlags tf;
  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  add_train_flags(train_cmd, tf, true);
  train_cmd->add_option("--log", tf.log_path, "training log CSV path");
  train_cmd->add_option("--valid", tf.valid_dir, "validation dataset directory");

  TrainFlags ef;
  std::string eval_model;
  int folds = 0;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "evaluate a model or cross-validate");
  add_train_flags(eval_cmd, ef, false);
  eval_cmd->add_option("--model", eval_model, "trained model JSON");
  eval_cmd->add_option("--folds", folds, "k-fold cross-validation over root rows");

  int n_a = 7168;
  uint64_t synth_seed = 0;
  std::string synth_out;
  bool regression = false;
  CLI::App* synth_cmd = app.add_subcommand("synth-gen", "generate the synthetic benchmark");
  synth_cmd->add_option("--n-a", n_a, "number of root rows");
  synth_cmd->add_option("--seed", synth_seed, "random seed");
  synth_cmd->add_option("--out,--out-dir", synth_out, "output directory")->required();
  synth_cmd->add_flag("--regression", regression, "emit the regression-label variant");

  std::string fl_schema, fl_data, fl_out, fl_vocab;
  int fl_cover = 3;
  CLI::App* flat_cmd = app.add_subcommand("flatten", "propositionalize into a single table");
  flat_cmd->add_option("--schema", fl_schema, "schema JSON file")->required();
  flat_cmd->add_option("--data", fl_data, "dataset directory")->required();
  flat_cmd->add_option("--out", fl_out, "output directory")->required();
  flat_cmd->add_option("--cover-count", fl_cover, "schedule circuit unroll bound");
  flat_cmd->add_option("--vocab-data", fl_vocab, "directory providing category vocabularies");

  std::string imp_model, imp_out;
  CLI::App* imp_cmd = app.add_subcommand("importance", "variable importance report");
  imp_cmd->add_option("--model", imp_model, "trained model JSON")->required();
  imp_cmd->add_option("--out", imp_out, "output CSV path (default stdout)");

  std::string in_schema, in_model, in_data, in_node, in_out;
  bool in_schedule = false, in_features = false;
  int in_cover = 3, in_iter = 0;
  CLI::App* inspect_cmd = app.add_subcommand("inspect", "inspect schedules and feature blocks");
  inspect_cmd->add_option("--schema", in_schema, "schema JSON file")->required();
  inspect_cmd->add_flag("--schedule", in_schedule, "print the schedule tree");
  inspect_cmd->add_option("--cover-count", in_cover, "schedule circuit unroll bound");
  inspect_cmd->add_flag("--features", in_features, "dump a node's assembled feature block");
  inspect_cmd->add_option("--model", in_model, "trained model JSON (--features)");
  inspect_cmd->add_option("--data", in_data, "dataset directory (--features)");
  inspect_cmd->add_option("--node", in_node, "schedule node id (--features)");
  inspect_cmd->add_option("--iteration", in_iter, "iteration to inspect (default: last)");
  inspect_cmd->add_option("--out", in_out, "output CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return cmd_train(tf);
    if (eval_cmd->parsed()) return cmd_evaluate(ef, eval_model, folds);
    if (synth_cmd->parsed()) return cmd_synth_gen(n_a, synth_seed, synth_out, regression);
    if (flat_cmd->parsed()) return cmd_flatten(fl_schema, fl_data, fl_out, fl_cover, fl_vocab);
    if (imp_cmd->parsed()) return cmd_importance(imp_model, imp_out);
    if (inspect_cmd->parsed())
      return cmd_inspect(in_schema, in_schedule, in_cover, in_features, in_model, in_data,
                         in_node, in_iter, in_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

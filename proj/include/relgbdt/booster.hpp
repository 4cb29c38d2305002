#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relgbdt/dataset.hpp"
#include "relgbdt/feature_blocks.hpp"
#include "relgbdt/loss.hpp"
#include "relgbdt/regression_tree.hpp"
#include "relgbdt/schedule.hpp"
#include "relgbdt/schema.hpp"

namespace relgbdt {

struct BoostParams {
  LossKind loss = LossKind::binary_logloss;
  double shrinkage = 0.1;
  int iterations = 500;
  TreeConfig tree;
  int cover_count = 3;
  uint64_t seed = 0;
};

struct NodeTrees {
  RegressionTree forward;
  RegressionTree backward;
};

// The trained ensemble. Prediction composes, per iteration, the backward
// trees bottom-up through the schedule (children feed the attention columns
// of their parents) and accumulates shrinkage * root prediction on top of the
// initial prediction rho. Forward trees do not participate in inference but
// are part of the model: they generated the residual cascade and are kept for
// inspection and exact reproducibility.
struct StrongModel {
  std::string schema_fingerprint;
  Schedule schedule;
  Loss loss;
  std::vector<std::string> class_names;  // classification only
  std::vector<double> rho;               // per class
  double shrinkage = 0.1;
  int iterations = 0;
  TreeConfig tree_config;
  uint64_t seed = 0;
  // trees[iteration][schedule node][class]
  std::vector<std::vector<std::vector<NodeTrees>>> trees;
};

struct IterationLog {
  int iteration = 0;
  double train_loss = 0.0;
  std::optional<double> valid_metric;
};

struct TrainLog {
  std::vector<IterationLog> lines;
  std::string to_csv() const;
};

// Trains per the two-pass schedule cascade. root_rows restricts which labeled
// root rows are fit (empty = all); non-root tables always participate fully
// reachable-from-covered-rows-wise. valid, when given, is scored after every
// iteration and logged (no early stopping).
StrongModel train(const Schema& schema, const DatasetInstance& instance,
                  const BoostParams& params, std::span<const int32_t> root_rows = {},
                  const DatasetInstance* valid = nullptr, TrainLog* log = nullptr);

// Raw scores, row-major n x classes (logits for classification, values for
// regression). root_rows is treated as a set: scores come back in ascending
// row order (empty = all rows). Throws on fingerprint mismatch with the
// supplied schema.
std::vector<double> predict_scores(const StrongModel& model, const Schema& schema,
                                   const DatasetInstance& instance,
                                   std::span<const int32_t> root_rows = {});

// Scores passed through the loss link: sigmoid probability for binary,
// softmax row for multiclass, identity for regression.
std::vector<double> predict_transformed(const StrongModel& model, std::span<const double> scores);

// Assembled feature block of one schedule node at one iteration (1-based; the
// blocks seen by that iteration's backward pass), over all table rows. For
// the inspect command and debugging.
FeatureBlock inference_block(const StrongModel& model, const Schema& schema,
                             const DatasetInstance& instance, int node, int iteration,
                             int klass = 0);

// Decodes the root-table label column for the rows given (empty = all rows).
LabelData root_labels(const Schema& schema, const DatasetInstance& instance, const Loss& loss,
                      std::span<const int32_t> root_rows = {},
                      std::span<const std::string> class_names = {});

}  // namespace relgbdt

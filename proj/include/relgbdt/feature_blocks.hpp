#pragma once

#include <span>
#include <string>
#include <vector>

#include "relgbdt/dataset.hpp"
#include "relgbdt/feature_column.hpp"
#include "relgbdt/schedule.hpp"

namespace relgbdt {

// Aggregators applied to child predictions, in fixed order (column naming
// depends on it).
inline constexpr const char* kAggregatorNames[3] = {"min", "max", "mean"};

// Inputs flowing through one schedule arc into a parent block computation.
// Child columns and predictions are indexed by "covered position": the child
// table row r maps to child_cover_pos[r] (-1 when the row is not covered).
struct ArcInputs {
  std::string rel_name;
  const std::vector<std::vector<int32_t>>* relation = nullptr;  // parent row -> child rows
  std::span<const int32_t> child_cover_pos;
  std::span<const double> child_preds;
  std::vector<const FeatureColumn*> hard_cols;  // child columns selectable by hard attention
  std::vector<const FeatureColumn*> soft_cols;  // numeric child columns for soft attention
};

// The weak-model input of one schedule node: props, aggregated child
// predictions, hard-attention selections, soft-attention weighted means,
// concatenated in that order. hard_chain/soft_chain list the columns a parent
// block may in turn select from (props plus this node's hard/soft sections),
// which is how attention composes across hops.
struct FeatureBlock {
  std::vector<FeatureColumn> cols;
  int prop_count = 0, score_count = 0, hard_count = 0, soft_count = 0;
  std::vector<int> hard_chain;
  std::vector<int> soft_chain;

  int width() const { return static_cast<int>(cols.size()); }
};

// Full-length propositional columns of a table; categorical dictionaries are
// built over all rows in row order.
std::vector<FeatureColumn> table_prop_columns(const Schema& schema,
                                              const DatasetInstance& instance, int table);

FeatureColumn subset_column(const FeatureColumn& col, std::span<const int32_t> rows);

// The four block sub-terms. `rows` are the parent-table rows to compute for.
// Empty relation sets always yield missing values, never an error.
std::vector<FeatureColumn> compute_b_prop(std::span<const FeatureColumn> full_props,
                                          std::span<const int32_t> rows);
std::vector<FeatureColumn> compute_b_score(std::span<const int32_t> rows,
                                           std::span<const ArcInputs> arcs);
std::vector<FeatureColumn> compute_b_hard(std::span<const int32_t> rows,
                                          std::span<const ArcInputs> arcs);
std::vector<FeatureColumn> compute_b_soft(std::span<const int32_t> rows,
                                          std::span<const ArcInputs> arcs);

FeatureBlock assemble_block(std::span<const FeatureColumn> full_props,
                            std::span<const int32_t> rows, std::span<const ArcInputs> arcs);

// Block rendered as CSV (same cell conventions as instance files), for the
// inspect command.
std::string block_to_csv(const FeatureBlock& block, std::span<const std::string> row_ids,
                         std::span<const int32_t> rows);

}  // namespace relgbdt

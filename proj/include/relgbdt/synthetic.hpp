#pragma once

#include <cstdint>

#include "relgbdt/dataset.hpp"
#include "relgbdt/schema.hpp"

namespace relgbdt {

struct SynthConfig {
  int n_a = 7168;  // root rows; ~6.25x that many rows in total
  uint64_t seed = 0;
  bool regression = false;  // emit max grandchild p'' - p instead of the binary label
};

// The four-table benchmark schema: root A (p, label) -> r -> B (p') -> r'' ->
// C (p'', r''' back to one A row), plus A -> r' -> D (p''').
Schema synthetic_schema(bool regression = false);

// Draws p, p', p'', p''' ~ U[0,1); |r|, |r'|, |r''| ~ U{0,1,2,3} with fresh
// child rows per parent; each C row's r''' points to one uniformly random A
// row. Labels come from label_rule. Same config -> byte-identical dataset.
DatasetInstance generate_synthetic(const SynthConfig& config);

// 1 iff some grandchild reached through r then r'' has p'' >= the row's p.
// Works on any instance conforming to the synthetic schema, so a re-reader
// over serialized files can cross-check generated labels.
int label_rule(const Schema& schema, const DatasetInstance& instance, int32_t row);

// The regression variant's target: max over grandchildren of p'' - p, or -p
// when there are no grandchildren.
double regression_target(const Schema& schema, const DatasetInstance& instance, int32_t row);

}  // namespace relgbdt

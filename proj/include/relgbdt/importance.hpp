#pragma once

#include <string>
#include <vector>

#include "relgbdt/booster.hpp"

namespace relgbdt {

struct ImportanceEntry {
  std::string column;
  double importance = 0.0;  // in [0, 1]; 0 = never used
};

// Minimal-depth importance over one node's backward trees: d_bar is the mean,
// across trees that use the column, of the shallowest depth it splits at
// (root = 0); importance = (D+1 - d_bar)/(D+1) with D the configured max
// depth. Columns no tree uses score exactly 0 and are omitted from the list.
// Sorted by importance descending, ties by column name.
std::vector<ImportanceEntry> variable_importance(const StrongModel& model, int node);
std::vector<ImportanceEntry> variable_importance(const StrongModel& model,
                                                 const std::string& node_id);

// CSV report `node,column,importance` across all schedule nodes.
std::string importance_report(const StrongModel& model);

}  // namespace relgbdt

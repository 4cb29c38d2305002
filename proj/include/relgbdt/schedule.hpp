#pragma once

#include <span>
#include <string>
#include <vector>

#include "relgbdt/dataset.hpp"
#include "relgbdt/schema.hpp"

namespace relgbdt {

struct ScheduleNode {
  std::string id;       // relation names from the root joined by '/', "." for the root
  int table = -1;       // index into Schema::tables
  int parent = -1;      // parent node index, -1 for the root
  int parent_rel = -1;  // relation index in the parent's table, -1 for the root
  std::vector<int> children;  // child node indices, in relation-declaration order
};

// Rooted tree over the schema topology along which information flows. Built by
// depth-first expansion from the root: each node gets one child per relational
// attribute of its table, unless the child's table already occurs cover_count
// times on the root path (that arc is pruned). An acyclic schema therefore
// maps one-to-one onto nodes; circuits unroll cover_count times.
struct Schedule {
  std::vector<ScheduleNode> nodes;  // depth-first preorder; nodes[0] is the root
  int cover_count = 3;

  int node_index(std::string_view id) const;  // -1 if absent
};

Schedule build_schedule(const Schema& schema, int cover_count = 3);

// Root first, every parent before all of its children (the stored preorder).
std::vector<int> topological_order(const Schedule& schedule);
// Reverse of topological_order; children before parents.
std::vector<int> inverse_topological_order(const Schedule& schedule);

// Rows reached from `row` through the arc into `node` (delegates to
// relation_rows on the parent table's relation).
std::span<const int32_t> instance_relation_rows(const Schedule& schedule, int node,
                                                const DatasetInstance& instance, int32_t row);

// Text tree `node_id : table (via relation)`, one line per node.
std::string render_schedule(const Schema& schema, const Schedule& schedule);

}  // namespace relgbdt

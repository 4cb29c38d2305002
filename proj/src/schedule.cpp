#include "relgbdt/schedule.hpp"

#include <stdexcept>

namespace relgbdt {

int Schedule::node_index(std::string_view id) const {
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<int>(i);
  return -1;
}

namespace {

void expand(const Schema& schema, Schedule& out, int node_idx,
            std::vector<int>& table_count_on_path, int cover_count) {
  int table = out.nodes[node_idx].table;
  table_count_on_path[table]++;
  const TableDef& def = schema.tables[table];
  for (size_t ri = 0; ri < def.rels.size(); ++ri) {
    int target = schema.table_index(def.rels[ri].target);
    if (table_count_on_path[target] >= cover_count) continue;  // arc pruned
    ScheduleNode child;
    const std::string& parent_id = out.nodes[node_idx].id;
    child.id = parent_id == "." ? def.rels[ri].name : parent_id + "/" + def.rels[ri].name;
    child.table = target;
    child.parent = node_idx;
    child.parent_rel = static_cast<int>(ri);
    int child_idx = static_cast<int>(out.nodes.size());
    out.nodes.push_back(std::move(child));
    out.nodes[node_idx].children.push_back(child_idx);
    expand(schema, out, child_idx, table_count_on_path, cover_count);
  }
  table_count_on_path[table]--;
}

}  // namespace

Schedule build_schedule(const Schema& schema, int cover_count) {
  if (cover_count < 1) throw std::runtime_error("cover_count must be >= 1");
  check_schema(schema);
  Schedule schedule;
  schedule.cover_count = cover_count;
  ScheduleNode root;
  root.id = ".";
  root.table = schema.root_index();
  schedule.nodes.push_back(std::move(root));
  std::vector<int> counts(schema.tables.size(), 0);
  expand(schema, schedule, 0, counts, cover_count);
  return schedule;
}

std::vector<int> topological_order(const Schedule& schedule) {
  // Depth-first preorder of a tree: parents always precede children.
  std::vector<int> order(schedule.nodes.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  return order;
}

std::vector<int> inverse_topological_order(const Schedule& schedule) {
  std::vector<int> order = topological_order(schedule);
  return {order.rbegin(), order.rend()};
}

std::span<const int32_t> instance_relation_rows(const Schedule& schedule, int node,
                                                const DatasetInstance& instance, int32_t row) {
  const ScheduleNode& n = schedule.nodes[node];
  if (n.parent < 0) throw std::runtime_error("root node has no incoming arc");
  return relation_rows(instance, schedule.nodes[n.parent].table, n.parent_rel, row);
}

std::string render_schedule(const Schema& schema, const Schedule& schedule) {
  std::string out;
  std::vector<int> depth(schedule.nodes.size(), 0);
  for (size_t i = 0; i < schedule.nodes.size(); ++i) {
    const ScheduleNode& n = schedule.nodes[i];
    if (n.parent >= 0) depth[i] = depth[n.parent] + 1;
    out.append(static_cast<size_t>(depth[i]) * 2, ' ');
    out += n.id;
    out += " : ";
    out += schema.tables[n.table].name;
    if (n.parent >= 0) {
      out += " (via ";
      out += schema.tables[schedule.nodes[n.parent].table].rels[n.parent_rel].name;
      out += ")";
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace relgbdt

#include "relgbdt/flatten.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace relgbdt {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct FlatColumn {
  std::string name;
  std::vector<double> values;  // full table length
};
}  // namespace

FlatDataset flatten(const Schema& schema, const DatasetInstance& instance,
                    const Schedule& schedule, const DatasetInstance* vocab_instance) {
  const DatasetInstance& vocab_src = vocab_instance ? *vocab_instance : instance;

  // Sorted vocabularies per (table, categorical prop).
  std::vector<std::vector<std::vector<std::string>>> vocabs(schema.tables.size());
  for (size_t t = 0; t < schema.tables.size(); ++t) {
    vocabs[t].resize(schema.tables[t].props.size());
    for (size_t pi = 0; pi < schema.tables[t].props.size(); ++pi) {
      if (schema.tables[t].props[pi].kind != AttrKind::categorical) continue;
      std::set<std::string> uniq;
      for (const std::string& tok : vocab_src.tables[t].cat_props[pi])
        if (!tok.empty()) uniq.insert(tok);
      vocabs[t][pi].assign(uniq.begin(), uniq.end());
    }
  }

  // Numeric columns accumulated per node: own numeric props plus everything
  // propagated up from descendants.
  std::vector<std::vector<FlatColumn>> propagated(schedule.nodes.size());
  for (int ni : inverse_topological_order(schedule)) {
    const ScheduleNode& node = schedule.nodes[ni];
    const TableDef& def = schema.tables[node.table];
    const TableData& data = instance.tables[node.table];

    for (int child_idx : node.children) {
      const ScheduleNode& child = schedule.nodes[child_idx];
      const TableDef& child_def = schema.tables[child.table];
      const TableData& child_data = instance.tables[child.table];
      const std::string& rel = def.rels[child.parent_rel].name;
      const auto& relation = data.rels[child.parent_rel];
      size_t n = data.row_count();

      auto mean_of = [&](const std::vector<double>& source, const std::string& name) {
        FlatColumn out{name, std::vector<double>(n, kNaN)};
        for (size_t row = 0; row < n; ++row) {
          double sum = 0.0;
          int cnt = 0;
          for (int32_t kid : relation[row]) {
            double v = source[kid];
            if (std::isnan(v)) continue;
            sum += v;
            ++cnt;
          }
          if (cnt > 0) out.values[row] = sum / cnt;
        }
        return out;
      };

      // Child's own props: numeric means, categorical value frequencies.
      for (size_t pi = 0; pi < child_def.props.size(); ++pi) {
        const PropAttr& prop = child_def.props[pi];
        if (prop.kind == AttrKind::numerical) {
          propagated[ni].push_back(
              mean_of(child_data.num_props[pi], rel + "/" + prop.name + ":mean"));
        } else {
          for (const std::string& value : vocabs[child.table][pi]) {
            FlatColumn out{rel + "/" + prop.name + ":freq=" + value,
                           std::vector<double>(n, 0.0)};
            for (size_t row = 0; row < n; ++row) {
              const auto& kids = relation[row];
              if (kids.empty()) continue;  // all-zero frequencies
              int hits = 0;
              for (int32_t kid : kids) hits += child_data.cat_props[pi][kid] == value;
              out.values[row] = static_cast<double>(hits) / static_cast<double>(kids.size());
            }
            propagated[ni].push_back(std::move(out));
          }
        }
      }
      // Columns the child already accumulated: plain means, path-prefixed.
      for (const FlatColumn& col : propagated[child_idx])
        propagated[ni].push_back(mean_of(col.values, rel + "/" + col.name));
    }
  }

  // Assemble the single-table dataset: root props verbatim, then the root
  // node's propagated columns, then the label.
  int root_table = schema.root_index();
  const TableDef& root_def = schema.tables[root_table];
  const TableData& root_data = instance.tables[root_table];

  FlatDataset flat;
  TableDef out_def;
  out_def.name = root_def.name;
  out_def.label = root_def.label;
  TableData out_data;
  out_data.row_ids = root_data.row_ids;
  out_data.id_index = root_data.id_index;
  out_data.labels = root_data.labels;

  for (size_t pi = 0; pi < root_def.props.size(); ++pi) {
    out_def.props.push_back(root_def.props[pi]);
    out_data.num_props.push_back(root_data.num_props[pi]);
    out_data.cat_props.push_back(root_data.cat_props[pi]);
  }
  for (FlatColumn& col : propagated[0]) {
    out_def.props.push_back({col.name, AttrKind::numerical});
    out_data.num_props.push_back(std::move(col.values));
    out_data.cat_props.emplace_back();
  }

  flat.schema.tables = {std::move(out_def)};
  flat.schema.root_table = root_def.name;
  flat.instance.tables = {std::move(out_data)};
  return flat;
}

}  // namespace relgbdt

#include "relgbdt/importance.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "relgbdt/csv.hpp"

namespace relgbdt {

std::vector<ImportanceEntry> variable_importance(const StrongModel& model, int node) {
  if (node < 0 || node >= static_cast<int>(model.schedule.nodes.size()))
    throw std::runtime_error("unknown schedule node");
  std::map<std::string, std::pair<long, long>> depth_sums;  // column -> (sum, trees using it)
  for (const auto& iter_trees : model.trees) {
    for (const auto& node_trees : iter_trees[node]) {
      for (const auto& [name, depth] : feature_min_depths(node_trees.backward)) {
        auto& [sum, count] = depth_sums[name];
        sum += depth;
        count += 1;
      }
    }
  }
  double denom = static_cast<double>(model.tree_config.max_depth) + 1.0;
  std::vector<ImportanceEntry> out;
  for (const auto& [name, sc] : depth_sums) {
    double mean_depth = static_cast<double>(sc.first) / static_cast<double>(sc.second);
    out.push_back({name, (denom - mean_depth) / denom});
  }
  std::sort(out.begin(), out.end(), [](const ImportanceEntry& a, const ImportanceEntry& b) {
    if (a.importance != b.importance) return a.importance > b.importance;
    return a.column < b.column;
  });
  return out;
}

std::vector<ImportanceEntry> variable_importance(const StrongModel& model,
                                                 const std::string& node_id) {
  int node = model.schedule.node_index(node_id);
  if (node < 0) throw std::runtime_error("unknown schedule node '" + node_id + "'");
  return variable_importance(model, node);
}

std::string importance_report(const StrongModel& model) {
  std::string out = "node,column,importance\n";
  for (size_t ni = 0; ni < model.schedule.nodes.size(); ++ni) {
    for (const ImportanceEntry& e : variable_importance(model, static_cast<int>(ni))) {
      std::vector<std::string> cells{model.schedule.nodes[ni].id, e.column,
                                     format_double(e.importance)};
      csv::write_row(out, cells);
    }
  }
  return out;
}

}  // namespace relgbdt

#include "relgbdt/feature_blocks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relgbdt/csv.hpp"

namespace relgbdt {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSoftDenominatorGuard = 1e-12;
}  // namespace

std::vector<FeatureColumn> table_prop_columns(const Schema& schema,
                                              const DatasetInstance& instance, int table) {
  const TableDef& def = schema.tables[table];
  const TableData& data = instance.tables[table];
  std::vector<FeatureColumn> cols;
  for (size_t pi = 0; pi < def.props.size(); ++pi) {
    if (def.props[pi].kind == AttrKind::numerical) {
      cols.push_back(numeric_column(def.props[pi].name, data.num_props[pi]));
    } else {
      cols.push_back(categorical_column(def.props[pi].name, data.cat_props[pi]));
    }
  }
  return cols;
}

FeatureColumn subset_column(const FeatureColumn& col, std::span<const int32_t> rows) {
  FeatureColumn out;
  out.name = col.name;
  out.kind = col.kind;
  out.dict = col.dict;
  if (col.kind == AttrKind::numerical) {
    out.num.reserve(rows.size());
    for (int32_t r : rows) out.num.push_back(col.num[r]);
  } else {
    out.cat.reserve(rows.size());
    for (int32_t r : rows) out.cat.push_back(col.cat[r]);
  }
  return out;
}

std::vector<FeatureColumn> compute_b_prop(std::span<const FeatureColumn> full_props,
                                          std::span<const int32_t> rows) {
  std::vector<FeatureColumn> cols;
  cols.reserve(full_props.size());
  for (const FeatureColumn& p : full_props) {
    FeatureColumn c = subset_column(p, rows);
    c.name = "prop:" + p.name;
    cols.push_back(std::move(c));
  }
  return cols;
}

std::vector<FeatureColumn> compute_b_score(std::span<const int32_t> rows,
                                           std::span<const ArcInputs> arcs) {
  std::vector<FeatureColumn> cols;
  for (const ArcInputs& arc : arcs) {
    FeatureColumn mn = numeric_column("score:" + arc.rel_name + ":min", {});
    FeatureColumn mx = numeric_column("score:" + arc.rel_name + ":max", {});
    FeatureColumn mean = numeric_column("score:" + arc.rel_name + ":mean", {});
    mn.num.reserve(rows.size());
    mx.num.reserve(rows.size());
    mean.num.reserve(rows.size());
    for (int32_t row : rows) {
      const std::vector<int32_t>& kids = (*arc.relation)[row];
      if (kids.empty()) {
        mn.num.push_back(kNaN);
        mx.num.push_back(kNaN);
        mean.num.push_back(kNaN);
        continue;
      }
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo, sum = 0.0;
      for (int32_t kid : kids) {
        double h = arc.child_preds[arc.child_cover_pos[kid]];
        lo = std::min(lo, h);
        hi = std::max(hi, h);
        sum += h;
      }
      mn.num.push_back(lo);
      mx.num.push_back(hi);
      mean.num.push_back(sum / static_cast<double>(kids.size()));
    }
    cols.push_back(std::move(mn));
    cols.push_back(std::move(mx));
    cols.push_back(std::move(mean));
  }
  return cols;
}

std::vector<FeatureColumn> compute_b_hard(std::span<const int32_t> rows,
                                          std::span<const ArcInputs> arcs) {
  std::vector<FeatureColumn> cols;
  for (const ArcInputs& arc : arcs) {
    // argmax per parent row; relation lists are sorted by child row, so a
    // strict comparison breaks prediction ties toward target-table row order.
    std::vector<int32_t> best_pos(rows.size(), -1);
    for (size_t i = 0; i < rows.size(); ++i) {
      const std::vector<int32_t>& kids = (*arc.relation)[rows[i]];
      double best = -std::numeric_limits<double>::infinity();
      for (int32_t kid : kids) {
        int32_t pos = arc.child_cover_pos[kid];
        double h = arc.child_preds[pos];
        if (h > best) {
          best = h;
          best_pos[i] = pos;
        }
      }
    }
    for (const FeatureColumn* src : arc.hard_cols) {
      FeatureColumn out;
      out.name = "hard:" + arc.rel_name + ":" + src->name;
      out.kind = src->kind;
      out.dict = src->dict;
      if (src->kind == AttrKind::numerical) {
        out.num.reserve(rows.size());
        for (size_t i = 0; i < rows.size(); ++i)
          out.num.push_back(best_pos[i] < 0 ? kNaN : src->num[best_pos[i]]);
      } else {
        out.cat.reserve(rows.size());
        for (size_t i = 0; i < rows.size(); ++i)
          out.cat.push_back(best_pos[i] < 0 ? -1 : src->cat[best_pos[i]]);
      }
      cols.push_back(std::move(out));
    }
  }
  return cols;
}

std::vector<FeatureColumn> compute_b_soft(std::span<const int32_t> rows,
                                          std::span<const ArcInputs> arcs) {
  std::vector<FeatureColumn> cols;
  for (const ArcInputs& arc : arcs) {
    for (const FeatureColumn* src : arc.soft_cols) {
      FeatureColumn out = numeric_column("soft:" + arc.rel_name + ":" + src->name, {});
      out.num.reserve(rows.size());
      for (int32_t row : rows) {
        const std::vector<int32_t>& kids = (*arc.relation)[row];
        double weighted = 0.0, weight_sum = 0.0, plain = 0.0;
        int present = 0;
        for (int32_t kid : kids) {
          int32_t pos = arc.child_cover_pos[kid];
          double v = src->num[pos];
          if (std::isnan(v)) continue;  // children without a value drop out of both sums
          double h = arc.child_preds[pos];
          weighted += v * h;
          weight_sum += h;
          plain += v;
          ++present;
        }
        if (present == 0)
          out.num.push_back(kNaN);
        else if (std::abs(weight_sum) < kSoftDenominatorGuard)
          out.num.push_back(plain / present);  // degenerate denominator: unweighted mean
        else
          out.num.push_back(weighted / weight_sum);
      }
      cols.push_back(std::move(out));
    }
  }
  return cols;
}

FeatureBlock assemble_block(std::span<const FeatureColumn> full_props,
                            std::span<const int32_t> rows, std::span<const ArcInputs> arcs) {
  FeatureBlock block;
  auto append = [&](std::vector<FeatureColumn>&& cols) {
    int n = static_cast<int>(cols.size());
    for (FeatureColumn& c : cols) block.cols.push_back(std::move(c));
    return n;
  };
  block.prop_count = append(compute_b_prop(full_props, rows));
  block.score_count = append(compute_b_score(rows, arcs));
  block.hard_count = append(compute_b_hard(rows, arcs));
  block.soft_count = append(compute_b_soft(rows, arcs));

  for (int i = 0; i < block.prop_count; ++i) block.hard_chain.push_back(i);
  int hard_begin = block.prop_count + block.score_count;
  for (int i = 0; i < block.hard_count; ++i) block.hard_chain.push_back(hard_begin + i);
  for (int i = 0; i < block.prop_count; ++i)
    if (block.cols[i].kind == AttrKind::numerical) block.soft_chain.push_back(i);
  int soft_begin = hard_begin + block.hard_count;
  for (int i = 0; i < block.soft_count; ++i) block.soft_chain.push_back(soft_begin + i);
  return block;
}

std::string block_to_csv(const FeatureBlock& block, std::span<const std::string> row_ids,
                         std::span<const int32_t> rows) {
  std::string out;
  std::vector<std::string> cells;
  cells.push_back("id");
  for (const FeatureColumn& c : block.cols) cells.push_back(c.name);
  csv::write_row(out, cells);
  for (size_t i = 0; i < rows.size(); ++i) {
    cells.clear();
    cells.push_back(row_ids[rows[i]]);
    for (const FeatureColumn& c : block.cols) {
      if (c.kind == AttrKind::numerical)
        cells.push_back(std::isnan(c.num[i]) ? "" : format_double(c.num[i]));
      else
        cells.push_back(c.cat[i] < 0 ? "" : c.token(i));
    }
    csv::write_row(out, cells);
  }
  return out;
}

}  // namespace relgbdt

#include "relgbdt/synthetic.hpp"

#include <algorithm>
#include <stdexcept>

#include "relgbdt/rng.hpp"

namespace relgbdt {

Schema synthetic_schema(bool regression) {
  Schema schema;
  TableDef a;
  a.name = "A";
  a.props = {{"p", AttrKind::numerical}};
  a.rels = {{"r", "B"}, {"r'", "D"}};
  a.label = LabelDef{"l", regression ? TaskKind::regression : TaskKind::binary};
  TableDef b;
  b.name = "B";
  b.props = {{"p'", AttrKind::numerical}};
  b.rels = {{"r''", "C"}};
  TableDef c;
  c.name = "C";
  c.props = {{"p''", AttrKind::numerical}};
  c.rels = {{"r'''", "A"}};
  TableDef d;
  d.name = "D";
  d.props = {{"p'''", AttrKind::numerical}};
  schema.tables = {a, b, c, d};
  schema.root_table = "A";
  return schema;
}

DatasetInstance generate_synthetic(const SynthConfig& config) {
  if (config.n_a < 1) throw std::runtime_error("n_a must be >= 1");
  Schema schema = synthetic_schema(config.regression);
  Rng rng(config.seed);
  int32_t n_a = config.n_a;

  DatasetInstance inst;
  inst.tables.resize(4);
  TableData& A = inst.tables[0];
  TableData& B = inst.tables[1];
  TableData& C = inst.tables[2];
  TableData& D = inst.tables[3];

  A.num_props.resize(1);
  A.rels.resize(2);
  B.num_props.resize(1);
  B.rels.resize(1);
  C.num_props.resize(1);
  C.rels.resize(1);
  D.num_props.resize(1);

  // All A rows first: r''' targets are drawn over the full root table.
  A.num_props[0].reserve(n_a);
  for (int32_t i = 0; i < n_a; ++i) A.num_props[0].push_back(rng.next_unit());
  A.rels[0].resize(n_a);
  A.rels[1].resize(n_a);
  A.labels.resize(n_a);

  for (int32_t i = 0; i < n_a; ++i) {
    int32_t n_children = static_cast<int32_t>(rng.next_below(4));
    for (int32_t bi = 0; bi < n_children; ++bi) {
      int32_t b_row = static_cast<int32_t>(B.num_props[0].size());
      B.num_props[0].push_back(rng.next_unit());
      B.rels[0].emplace_back();
      A.rels[0][i].push_back(b_row);
      int32_t n_grand = static_cast<int32_t>(rng.next_below(4));
      for (int32_t ci = 0; ci < n_grand; ++ci) {
        int32_t c_row = static_cast<int32_t>(C.num_props[0].size());
        C.num_props[0].push_back(rng.next_unit());
        C.rels[0].push_back({static_cast<int32_t>(rng.next_below(n_a))});
        B.rels[0][b_row].push_back(c_row);
      }
    }
    int32_t n_d = static_cast<int32_t>(rng.next_below(4));
    for (int32_t di = 0; di < n_d; ++di) {
      D.num_props[0].push_back(rng.next_unit());
      A.rels[1][i].push_back(static_cast<int32_t>(D.num_props[0].size()) - 1);
    }
  }

  auto fill_ids = [](TableData& t, char prefix, size_t n) {
    t.row_ids.reserve(n);
    for (size_t i = 0; i < n; ++i) t.row_ids.push_back(prefix + std::string("_") + std::to_string(i));
    t.id_index.reserve(n);
    for (size_t i = 0; i < n; ++i) t.id_index.emplace(t.row_ids[i], static_cast<int32_t>(i));
  };
  fill_ids(A, 'a', n_a);
  fill_ids(B, 'b', B.num_props[0].size());
  fill_ids(C, 'c', C.num_props[0].size());
  fill_ids(D, 'd', D.num_props[0].size());
  A.cat_props.resize(1);
  B.cat_props.resize(1);
  C.cat_props.resize(1);
  D.cat_props.resize(1);
  A.rel_dangling.assign(2, std::vector<std::vector<std::string>>(n_a));
  B.rel_dangling.assign(1, std::vector<std::vector<std::string>>(B.row_count()));
  C.rel_dangling.assign(1, std::vector<std::vector<std::string>>(C.row_count()));

  for (int32_t i = 0; i < n_a; ++i) {
    if (config.regression)
      A.labels[i] = format_double(regression_target(schema, inst, i));
    else
      A.labels[i] = label_rule(schema, inst, i) ? "1" : "0";
  }
  return inst;
}

int label_rule(const Schema& schema, const DatasetInstance& instance, int32_t row) {
  int a = schema.table_index("A");
  int b = schema.table_index("B");
  int c = schema.table_index("C");
  int r = schema.tables[a].rel_index("r");
  int rpp = schema.tables[b].rel_index("r''");
  int pa = schema.tables[a].prop_index("p");
  int pc = schema.tables[c].prop_index("p''");
  if (a < 0 || b < 0 || c < 0 || r < 0 || rpp < 0 || pa < 0 || pc < 0)
    throw std::runtime_error("instance does not conform to the synthetic schema");
  double p = instance.tables[a].num_props[pa][row];
  for (int32_t b_row : instance.tables[a].rels[r][row])
    for (int32_t c_row : instance.tables[b].rels[rpp][b_row])
      if (p <= instance.tables[c].num_props[pc][c_row]) return 1;
  return 0;
}

double regression_target(const Schema& schema, const DatasetInstance& instance, int32_t row) {
  int a = schema.table_index("A");
  int b = schema.table_index("B");
  int c = schema.table_index("C");
  int r = schema.tables[a].rel_index("r");
  int rpp = schema.tables[b].rel_index("r''");
  double p = instance.tables[a].num_props[0][row];
  double best = 0.0;  // no grandchildren: target is -p
  bool any = false;
  for (int32_t b_row : instance.tables[a].rels[r][row])
    for (int32_t c_row : instance.tables[b].rels[rpp][b_row]) {
      double v = instance.tables[c].num_props[0][c_row];
      if (!any || v > best) best = v;
      any = true;
    }
  return (any ? best : 0.0) - p;
}

}  // namespace relgbdt

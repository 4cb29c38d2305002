#include "relgbdt/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "relgbdt/csv.hpp"

namespace relgbdt {

namespace {
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

bool parse_double(std::string_view text, double& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

LoadResult load_instance(const Schema& schema,
                         const std::map<std::string, std::string>& table_sources) {
  LoadResult result;
  result.instance.tables.resize(schema.tables.size());

  // First pass: rows and ids, so relation cells can be resolved in pass two.
  std::vector<std::vector<std::vector<std::string>>> parsed(schema.tables.size());
  for (size_t ti = 0; ti < schema.tables.size(); ++ti) {
    const TableDef& def = schema.tables[ti];
    auto it = table_sources.find(def.name);
    if (it == table_sources.end())
      throw std::runtime_error("no data source for table '" + def.name + "'");
    parsed[ti] = csv::parse(it->second);
    if (parsed[ti].empty())
      throw std::runtime_error("table '" + def.name + "': missing header row");
    const auto& header = parsed[ti][0];
    if (header.empty() || header[0] != "id")
      throw std::runtime_error("table '" + def.name + "': first column must be 'id'");

    TableData& data = result.instance.tables[ti];
    data.row_ids.reserve(parsed[ti].size() - 1);
    for (size_t r = 1; r < parsed[ti].size(); ++r) {
      if (parsed[ti][r].size() != header.size())
        throw std::runtime_error("table '" + def.name + "': row " + std::to_string(r) +
                                 " has " + std::to_string(parsed[ti][r].size()) +
                                 " cells, header has " + std::to_string(header.size()));
      const std::string& id = parsed[ti][r][0];
      auto [pos, inserted] = data.id_index.emplace(id, static_cast<int32_t>(data.row_ids.size()));
      (void)pos;
      if (!inserted)
        result.warnings.push_back({def.name, id, "id", "duplicate row id"});
      data.row_ids.push_back(id);
    }
  }

  for (size_t ti = 0; ti < schema.tables.size(); ++ti) {
    const TableDef& def = schema.tables[ti];
    TableData& data = result.instance.tables[ti];
    const auto& rows = parsed[ti];
    const auto& header = rows[0];
    size_t n = data.row_ids.size();

    // Map header columns to schema attributes.
    struct ColRef {
      enum Kind { num, cat, rel, label } kind;
      int index;
    };
    std::vector<ColRef> col_refs;
    for (size_t c = 1; c < header.size(); ++c) {
      const std::string& name = header[c];
      if (int pi = def.prop_index(name); pi >= 0) {
        col_refs.push_back({def.props[pi].kind == AttrKind::numerical ? ColRef::num : ColRef::cat, pi});
      } else if (int ri = def.rel_index(name); ri >= 0) {
        col_refs.push_back({ColRef::rel, ri});
      } else if (def.label && def.label->name == name) {
        col_refs.push_back({ColRef::label, 0});
      } else {
        throw std::runtime_error("table '" + def.name + "': unknown column '" + name + "'");
      }
    }
    bool saw_label = false;
    for (size_t c = 1; c < header.size(); ++c)
      if (def.label && header[c] == def.label->name) saw_label = true;
    if (def.label && !saw_label)
      throw std::runtime_error("table '" + def.name + "': label column '" + def.label->name +
                               "' absent");
    for (const PropAttr& p : def.props)
      if (std::find(header.begin() + 1, header.end(), p.name) == header.end())
        throw std::runtime_error("table '" + def.name + "': column '" + p.name + "' absent");
    for (const RelAttr& r : def.rels)
      if (std::find(header.begin() + 1, header.end(), r.name) == header.end())
        throw std::runtime_error("table '" + def.name + "': column '" + r.name + "' absent");

    data.num_props.assign(def.props.size(), {});
    data.cat_props.assign(def.props.size(), {});
    for (size_t pi = 0; pi < def.props.size(); ++pi) {
      if (def.props[pi].kind == AttrKind::numerical)
        data.num_props[pi].assign(n, kMissing);
      else
        data.cat_props[pi].assign(n, "");
    }
    data.rels.assign(def.rels.size(), std::vector<std::vector<int32_t>>(n));
    data.rel_dangling.assign(def.rels.size(), std::vector<std::vector<std::string>>(n));
    if (def.label) data.labels.assign(n, "");

    for (size_t r = 1; r < rows.size(); ++r) {
      size_t row = r - 1;
      for (size_t c = 1; c < header.size(); ++c) {
        const std::string& cell = rows[r][c];
        const ColRef& ref = col_refs[c - 1];
        switch (ref.kind) {
          case ColRef::num: {
            if (cell.empty()) break;  // missing
            double v;
            if (parse_double(cell, v)) {
              data.num_props[ref.index][row] = v;
            } else {
              result.warnings.push_back({def.name, data.row_ids[row], def.props[ref.index].name,
                                         "unparseable numerical value '" + cell +
                                         "' loaded as missing"});
            }
            break;
          }
          case ColRef::cat:
            data.cat_props[ref.index][row] = cell;
            break;
          case ColRef::rel: {
            if (cell.empty()) break;  // empty set
            const TableData& target =
                result.instance.tables[schema.table_index(def.rels[ref.index].target)];
            std::vector<int32_t>& out = data.rels[ref.index][row];
            size_t start = 0;
            while (start <= cell.size()) {
              size_t end = cell.find(';', start);
              if (end == std::string::npos) end = cell.size();
              std::string id = cell.substr(start, end - start);
              if (id.empty())
                throw std::runtime_error("table '" + def.name + "': malformed row id list '" +
                                         cell + "' in column '" + def.rels[ref.index].name + "'");
              auto it = target.id_index.find(id);
              // Unresolvable ids stay out of the resolved set but are kept so
              // validate_instance can report them.
              if (it == target.id_index.end())
                data.rel_dangling[ref.index][row].push_back(id);
              else
                out.push_back(it->second);
              if (end == cell.size()) break;
              start = end + 1;
            }
            std::sort(out.begin(), out.end());
            size_t before = out.size();
            out.erase(std::unique(out.begin(), out.end()), out.end());
            if (out.size() != before)
              result.warnings.push_back({def.name, data.row_ids[row], def.rels[ref.index].name,
                                         "duplicate row ids in relation cell collapsed"});
            break;
          }
          case ColRef::label:
            data.labels[row] = cell;
            break;
        }
      }
    }
  }
  return result;
}

LoadResult load_instance_dir(const Schema& schema, const std::string& dir) {
  std::map<std::string, std::string> sources;
  for (const TableDef& t : schema.tables)
    sources[t.name] = read_file(dir + "/" + t.name + ".csv");
  return load_instance(schema, sources);
}

ValidationReport validate_instance(const Schema& schema, const DatasetInstance& instance) {
  ValidationReport report;
  for (size_t ti = 0; ti < schema.tables.size(); ++ti) {
    const TableDef& def = schema.tables[ti];
    const TableData& data = instance.tables[ti];
    // duplicate ids: id_index is deduplicated, so recount
    if (data.id_index.size() != data.row_ids.size()) {
      std::unordered_map<std::string, int> seen;
      for (const std::string& id : data.row_ids)
        if (++seen[id] == 2) report.errors.push_back({def.name, id, "id", "duplicate row id"});
    }
    for (size_t ri = 0; ri < def.rels.size(); ++ri) {
      const TableData& target = instance.tables[schema.table_index(def.rels[ri].target)];
      for (size_t row = 0; row < data.row_count(); ++row) {
        for (int32_t t : data.rels[ri][row])
          if (t < 0 || static_cast<size_t>(t) >= target.row_count())
            report.errors.push_back({def.name, data.row_ids[row], def.rels[ri].name,
                                     "dangling reference"});
        if (ri < data.rel_dangling.size())
          for (const std::string& id : data.rel_dangling[ri][row])
            report.errors.push_back({def.name, data.row_ids[row], def.rels[ri].name,
                                     "dangling reference '" + id + "'"});
      }
    }
    if (def.label) {
      for (size_t row = 0; row < data.row_count(); ++row)
        if (data.labels[row].empty())
          report.errors.push_back({def.name, data.row_ids[row], def.label->name,
                                   "missing label"});
    }
  }
  return report;
}

std::span<const int32_t> relation_rows(const DatasetInstance& instance, int table, int rel,
                                       int32_t row) {
  return instance.tables[table].rels[rel][row];
}

std::vector<std::string> relation_row_ids(const Schema& schema, const DatasetInstance& instance,
                                          std::string_view table, std::string_view rel,
                                          std::string_view row_id) {
  int ti = schema.table_index(table);
  if (ti < 0) throw std::runtime_error("unknown table '" + std::string(table) + "'");
  int ri = schema.tables[ti].rel_index(rel);
  if (ri < 0) throw std::runtime_error("unknown relation '" + std::string(rel) + "'");
  const TableData& data = instance.tables[ti];
  auto it = data.id_index.find(std::string(row_id));
  if (it == data.id_index.end())
    throw std::runtime_error("unknown row '" + std::string(row_id) + "' in table '" +
                             std::string(table) + "'");
  const TableData& target = instance.tables[schema.table_index(schema.tables[ti].rels[ri].target)];
  std::vector<std::string> out;
  for (int32_t t : data.rels[ri][it->second]) out.push_back(target.row_ids[t]);
  return out;
}

std::string table_to_csv(const Schema& schema, const DatasetInstance& instance, int table) {
  const TableDef& def = schema.tables[table];
  const TableData& data = instance.tables[table];
  std::string out;
  std::vector<std::string> cells;
  cells.push_back("id");
  for (const PropAttr& p : def.props) cells.push_back(p.name);
  for (const RelAttr& r : def.rels) cells.push_back(r.name);
  if (def.label) cells.push_back(def.label->name);
  csv::write_row(out, cells);

  for (size_t row = 0; row < data.row_count(); ++row) {
    cells.clear();
    cells.push_back(data.row_ids[row]);
    for (size_t pi = 0; pi < def.props.size(); ++pi) {
      if (def.props[pi].kind == AttrKind::numerical) {
        double v = data.num_props[pi][row];
        cells.push_back(std::isnan(v) ? "" : format_double(v));
      } else {
        cells.push_back(data.cat_props[pi][row]);
      }
    }
    for (size_t ri = 0; ri < def.rels.size(); ++ri) {
      const TableData& target =
          instance.tables[schema.table_index(def.rels[ri].target)];
      std::string cell;
      for (size_t k = 0; k < data.rels[ri][row].size(); ++k) {
        if (k) cell.push_back(';');
        cell += target.row_ids[data.rels[ri][row][k]];
      }
      cells.push_back(std::move(cell));
    }
    if (def.label) cells.push_back(data.labels[row]);
    csv::write_row(out, cells);
  }
  return out;
}

void save_instance_dir(const Schema& schema, const DatasetInstance& instance,
                       const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir + "/schema.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + dir + "/schema.json");
    out << serialize_schema(schema) << '\n';
  }
  for (size_t ti = 0; ti < schema.tables.size(); ++ti) {
    std::string path = dir + "/" + schema.tables[ti].name + ".csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << table_to_csv(schema, instance, static_cast<int>(ti));
  }
}

}  // namespace relgbdt

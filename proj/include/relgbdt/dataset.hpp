#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "relgbdt/schema.hpp"

namespace relgbdt {

// One issue found while loading or validating an instance.
struct ValidationIssue {
  std::string table;
  std::string row;       // row id, may be empty for table-level issues
  std::string attribute;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  bool ok() const { return errors.empty(); }
};

// Column-major storage for one table's rows. Missing cells are NaN for
// numerical props and "" for categorical props (the empty token is reserved
// for missing; the CSV format cannot distinguish them anyway).
struct TableData {
  std::vector<std::string> row_ids;
  std::unordered_map<std::string, int32_t> id_index;
  std::vector<std::vector<double>> num_props;        // [prop][row], NaN = missing
  std::vector<std::vector<std::string>> cat_props;   // [prop][row], "" = missing
  std::vector<std::vector<std::vector<int32_t>>> rels;  // [rel][row] -> sorted target rows
  std::vector<std::vector<std::vector<std::string>>> rel_dangling;  // unresolvable ids, kept for validation
  std::vector<std::string> labels;                   // raw tokens, root table only

  size_t row_count() const { return row_ids.size(); }
};

// Immutable after load; safe for concurrent reads.
struct DatasetInstance {
  std::vector<TableData> tables;  // aligned with Schema::tables
};

struct LoadResult {
  DatasetInstance instance;
  std::vector<ValidationIssue> warnings;  // e.g. duplicate ids inside a relation cell
};

// Parses one CSV text per table (keyed by table name). Header row required;
// first column must be `id`; relation cells are semicolon-separated row ids
// (empty cell = empty set); missing numerical cell = empty string. Numerical
// parse failures load as missing with a warning. Unknown columns, a missing
// label column on the root, or missing sources throw std::runtime_error.
LoadResult load_instance(const Schema& schema,
                         const std::map<std::string, std::string>& table_sources);

// Reads <dir>/<table>.csv for every schema table.
LoadResult load_instance_dir(const Schema& schema, const std::string& dir);

// Reports every dangling relation reference, duplicate row id, and missing
// root label. Never throws; problems are report content.
ValidationReport validate_instance(const Schema& schema, const DatasetInstance& instance);

// r[x] as row indices into the target table, in target-table row order.
std::span<const int32_t> relation_rows(const DatasetInstance& instance, int table,
                                       int rel, int32_t row);

// Same, by names and row id, returning row ids (the spec-level operation).
std::vector<std::string> relation_row_ids(const Schema& schema, const DatasetInstance& instance,
                                          std::string_view table, std::string_view rel,
                                          std::string_view row_id);

// Serializes back to the CSV convention above; used by synth-gen and flatten.
// Doubles are written with shortest round-trip formatting, so
// load(save(x)) == x bit-exactly and identical inputs give identical bytes.
std::string table_to_csv(const Schema& schema, const DatasetInstance& instance, int table);
void save_instance_dir(const Schema& schema, const DatasetInstance& instance,
                       const std::string& dir);

std::string format_double(double v);
// Locale-independent strict double parse; returns false on any trailing junk.
bool parse_double(std::string_view text, double& out);

}  // namespace relgbdt

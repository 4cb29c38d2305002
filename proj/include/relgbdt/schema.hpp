#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace relgbdt {

enum class AttrKind { numerical, categorical };
enum class TaskKind { binary, multiclass, regression };

std::string_view to_string(AttrKind k);
std::string_view to_string(TaskKind k);

struct PropAttr {
  std::string name;
  AttrKind kind = AttrKind::numerical;
};

struct RelAttr {
  std::string name;
  std::string target;  // target table name
};

struct LabelDef {
  std::string name;
  TaskKind task = TaskKind::binary;
};

struct TableDef {
  std::string name;
  std::vector<PropAttr> props;
  std::vector<RelAttr> rels;
  std::optional<LabelDef> label;  // only on the root table

  int prop_index(std::string_view name) const;  // -1 if absent
  int rel_index(std::string_view name) const;   // -1 if absent
};

// Tables, their attributes and relations, plus the designated root table.
// Invariants (enforced by parse_schema / check_schema): unique non-empty table
// names, unique attribute names within a table, every relation target exists,
// exactly the root table carries a label.
struct Schema {
  std::vector<TableDef> tables;
  std::string root_table;

  int table_index(std::string_view name) const;  // -1 if absent
  int root_index() const { return table_index(root_table); }
  const TableDef& root() const { return tables[root_index()]; }
};

// Parses the schema JSON document:
//   { "tables": [ { "name", "props": [{"name","kind"}], "rels": [{"name","target"}],
//                   "label": {"name","task"}? } ], "root": <name> }
// Throws std::runtime_error on syntax errors or invariant violations.
Schema parse_schema(std::string_view text);

// Canonical JSON serialization; parse_schema(serialize_schema(s)) == s.
std::string serialize_schema(const Schema& schema);

// Validates schema invariants; throws std::runtime_error on the first failure.
void check_schema(const Schema& schema);

// Stable content hash of the canonical serialization ("fnv1a64:<16 hex>").
std::string schema_fingerprint(const Schema& schema);

bool operator==(const PropAttr&, const PropAttr&);
bool operator==(const RelAttr&, const RelAttr&);
bool operator==(const LabelDef&, const LabelDef&);
bool operator==(const TableDef&, const TableDef&);
bool operator==(const Schema&, const Schema&);

}  // namespace relgbdt

#include "relgbdt/schema.hpp"

#include <set>
#include <stdexcept>

#include "json.hpp"

namespace relgbdt {

using nlohmann::json;

std::string_view to_string(AttrKind k) {
  return k == AttrKind::numerical ? "numerical" : "categorical";
}

std::string_view to_string(TaskKind k) {
  switch (k) {
    case TaskKind::binary: return "binary";
    case TaskKind::multiclass: return "multiclass";
    default: return "regression";
  }
}

int TableDef::prop_index(std::string_view n) const {
  for (size_t i = 0; i < props.size(); ++i)
    if (props[i].name == n) return static_cast<int>(i);
  return -1;
}

int TableDef::rel_index(std::string_view n) const {
  for (size_t i = 0; i < rels.size(); ++i)
    if (rels[i].name == n) return static_cast<int>(i);
  return -1;
}

int Schema::table_index(std::string_view n) const {
  for (size_t i = 0; i < tables.size(); ++i)
    if (tables[i].name == n) return static_cast<int>(i);
  return -1;
}

namespace {

AttrKind parse_attr_kind(const std::string& s) {
  if (s == "numerical") return AttrKind::numerical;
  if (s == "categorical") return AttrKind::categorical;
  throw std::runtime_error("schema: unknown attribute kind '" + s + "'");
}

TaskKind parse_task_kind(const std::string& s) {
  if (s == "binary") return TaskKind::binary;
  if (s == "multiclass") return TaskKind::multiclass;
  if (s == "regression") return TaskKind::regression;
  throw std::runtime_error("schema: unknown task kind '" + s + "'");
}

}  // namespace

void check_schema(const Schema& schema) {
  if (schema.tables.empty()) throw std::runtime_error("schema: no tables");
  std::set<std::string> names;
  for (const TableDef& t : schema.tables) {
    if (t.name.empty()) throw std::runtime_error("schema: empty table name");
    if (!names.insert(t.name).second)
      throw std::runtime_error("schema: duplicate table name '" + t.name + "'");
    std::set<std::string> attrs;
    for (const PropAttr& p : t.props)
      if (p.name.empty() || !attrs.insert(p.name).second)
        throw std::runtime_error("schema: duplicate or empty attribute '" + p.name +
                                 "' in table '" + t.name + "'");
    for (const RelAttr& r : t.rels) {
      if (r.name.empty() || !attrs.insert(r.name).second)
        throw std::runtime_error("schema: duplicate or empty attribute '" + r.name +
                                 "' in table '" + t.name + "'");
      if (schema.table_index(r.target) < 0)
        throw std::runtime_error("schema: relation '" + r.name + "' in table '" + t.name +
                                 "' targets unknown table '" + r.target + "'");
    }
    if (t.label && (t.label->name.empty() || attrs.count(t.label->name)))
      throw std::runtime_error("schema: label name collides with an attribute in table '" +
                               t.name + "'");
  }
  int root = schema.table_index(schema.root_table);
  if (root < 0)
    throw std::runtime_error("schema: root table '" + schema.root_table + "' not declared");
  for (const TableDef& t : schema.tables) {
    bool is_root = t.name == schema.root_table;
    if (is_root && !t.label)
      throw std::runtime_error("schema: root table '" + t.name + "' has no label");
    if (!is_root && t.label)
      throw std::runtime_error("schema: non-root table '" + t.name + "' declares a label");
  }
}

Schema parse_schema(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("schema: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("tables") || !doc.contains("root"))
    throw std::runtime_error("schema: document must have 'tables' and 'root'");

  Schema schema;
  schema.root_table = doc.at("root").get<std::string>();
  for (const json& jt : doc.at("tables")) {
    TableDef t;
    t.name = jt.at("name").get<std::string>();
    for (const json& jp : jt.value("props", json::array()))
      t.props.push_back({jp.at("name").get<std::string>(),
                         parse_attr_kind(jp.at("kind").get<std::string>())});
    for (const json& jr : jt.value("rels", json::array()))
      t.rels.push_back({jr.at("name").get<std::string>(), jr.at("target").get<std::string>()});
    if (jt.contains("label") && !jt.at("label").is_null()) {
      const json& jl = jt.at("label");
      t.label = LabelDef{jl.at("name").get<std::string>(),
                         parse_task_kind(jl.at("task").get<std::string>())};
    }
    schema.tables.push_back(std::move(t));
  }
  check_schema(schema);
  return schema;
}

std::string serialize_schema(const Schema& schema) {
  json doc;
  doc["root"] = schema.root_table;
  doc["tables"] = json::array();
  for (const TableDef& t : schema.tables) {
    json jt;
    jt["name"] = t.name;
    jt["props"] = json::array();
    for (const PropAttr& p : t.props)
      jt["props"].push_back({{"name", p.name}, {"kind", std::string(to_string(p.kind))}});
    jt["rels"] = json::array();
    for (const RelAttr& r : t.rels)
      jt["rels"].push_back({{"name", r.name}, {"target", r.target}});
    if (t.label)
      jt["label"] = {{"name", t.label->name}, {"task", std::string(to_string(t.label->task))}};
    doc["tables"].push_back(std::move(jt));
  }
  return doc.dump(2);
}

std::string schema_fingerprint(const Schema& schema) {
  std::string canon = serialize_schema(schema);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string("fnv1a64:") + buf;
}

bool operator==(const PropAttr& a, const PropAttr& b) {
  return a.name == b.name && a.kind == b.kind;
}
bool operator==(const RelAttr& a, const RelAttr& b) {
  return a.name == b.name && a.target == b.target;
}
bool operator==(const LabelDef& a, const LabelDef& b) {
  return a.name == b.name && a.task == b.task;
}
bool operator==(const TableDef& a, const TableDef& b) {
  return a.name == b.name && a.props == b.props && a.rels == b.rels && a.label == b.label;
}
bool operator==(const Schema& a, const Schema& b) {
  return a.tables == b.tables && a.root_table == b.root_table;
}

}  // namespace relgbdt

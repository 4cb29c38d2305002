#include "relgbdt/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace relgbdt {

using nlohmann::json;

namespace {

json tree_to_json(const RegressionTree& tree) {
  json jt;
  jt["features"] = tree.feature_names;
  jt["depth"] = tree.depth;
  json nodes = json::array();
  for (const TreeNode& n : tree.nodes) {
    json jn;
    if (n.is_leaf()) {
      jn["value"] = n.value;
    } else {
      jn["feature"] = n.feature;
      jn["value"] = n.value;
      jn["missing_left"] = n.missing_left;
      jn["left"] = n.left;
      jn["right"] = n.right;
      if (n.categorical) {
        jn["cats_left"] = n.cats_left;
        jn["cats_right"] = n.cats_right;
      } else {
        jn["threshold"] = n.threshold;
      }
    }
    nodes.push_back(std::move(jn));
  }
  jt["nodes"] = std::move(nodes);
  return jt;
}

RegressionTree tree_from_json(const json& jt) {
  RegressionTree tree;
  tree.feature_names = jt.at("features").get<std::vector<std::string>>();
  tree.depth = jt.at("depth").get<int>();
  for (const json& jn : jt.at("nodes")) {
    TreeNode n;
    n.value = jn.at("value").get<double>();
    if (jn.contains("feature")) {
      n.feature = jn.at("feature").get<int>();
      n.missing_left = jn.at("missing_left").get<bool>();
      n.left = jn.at("left").get<int>();
      n.right = jn.at("right").get<int>();
      if (jn.contains("cats_left")) {
        n.categorical = true;
        n.cats_left = jn.at("cats_left").get<std::vector<std::string>>();
        n.cats_right = jn.at("cats_right").get<std::vector<std::string>>();
      } else {
        n.threshold = jn.at("threshold").get<double>();
      }
    }
    tree.nodes.push_back(std::move(n));
  }
  return tree;
}

}  // namespace

std::string model_to_json(const StrongModel& model) {
  json doc;
  doc["format"] = "relgbdt-model";
  doc["version"] = 1;
  doc["schema_fingerprint"] = model.schema_fingerprint;
  doc["loss"] = {{"kind", std::string(to_string(model.loss.kind))},
                 {"classes", model.loss.classes}};
  doc["class_names"] = model.class_names;
  doc["rho"] = model.rho;
  doc["shrinkage"] = model.shrinkage;
  doc["iterations"] = model.iterations;
  doc["seed"] = model.seed;
  doc["tree_config"] = {{"max_depth", model.tree_config.max_depth},
                        {"min_examples_leaf", model.tree_config.min_examples_leaf},
                        {"feature_sampling_ratio", model.tree_config.feature_sampling_ratio}};
  json sched;
  sched["cover_count"] = model.schedule.cover_count;
  sched["nodes"] = json::array();
  for (const ScheduleNode& n : model.schedule.nodes) {
    sched["nodes"].push_back({{"id", n.id},
                              {"table", n.table},
                              {"parent", n.parent},
                              {"parent_rel", n.parent_rel},
                              {"children", n.children}});
  }
  doc["schedule"] = std::move(sched);

  json iters = json::array();
  for (const auto& iter_trees : model.trees) {
    json jnodes = json::array();
    for (const auto& node_trees : iter_trees) {
      json jclasses = json::array();
      for (const NodeTrees& nt : node_trees)
        jclasses.push_back({{"forward", tree_to_json(nt.forward)},
                            {"backward", tree_to_json(nt.backward)}});
      jnodes.push_back(std::move(jclasses));
    }
    iters.push_back(std::move(jnodes));
  }
  doc["trees"] = std::move(iters);
  return doc.dump();
}

StrongModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("model: ") + e.what());
  }
  if (doc.value("format", "") != "relgbdt-model")
    throw std::runtime_error("model: not a relgbdt model file");

  StrongModel model;
  model.schema_fingerprint = doc.at("schema_fingerprint").get<std::string>();
  std::string loss_kind = doc.at("loss").at("kind").get<std::string>();
  int classes = doc.at("loss").at("classes").get<int>();
  if (loss_kind == "mse")
    model.loss = Loss{LossKind::mse, 1};
  else if (loss_kind == "binary_logloss")
    model.loss = Loss{LossKind::binary_logloss, 1};
  else if (loss_kind == "multiclass_softmax")
    model.loss = Loss{LossKind::multiclass_softmax, classes};
  else
    throw std::runtime_error("model: unknown loss '" + loss_kind + "'");
  model.class_names = doc.at("class_names").get<std::vector<std::string>>();
  model.rho = doc.at("rho").get<std::vector<double>>();
  model.shrinkage = doc.at("shrinkage").get<double>();
  model.iterations = doc.at("iterations").get<int>();
  model.seed = doc.at("seed").get<uint64_t>();
  const json& tc = doc.at("tree_config");
  model.tree_config.max_depth = tc.at("max_depth").get<int>();
  model.tree_config.min_examples_leaf = tc.at("min_examples_leaf").get<int>();
  model.tree_config.feature_sampling_ratio = tc.at("feature_sampling_ratio").get<double>();

  const json& sched = doc.at("schedule");
  model.schedule.cover_count = sched.at("cover_count").get<int>();
  for (const json& jn : sched.at("nodes")) {
    ScheduleNode n;
    n.id = jn.at("id").get<std::string>();
    n.table = jn.at("table").get<int>();
    n.parent = jn.at("parent").get<int>();
    n.parent_rel = jn.at("parent_rel").get<int>();
    n.children = jn.at("children").get<std::vector<int>>();
    model.schedule.nodes.push_back(std::move(n));
  }

  for (const json& jnodes : doc.at("trees")) {
    std::vector<std::vector<NodeTrees>> iter_trees;
    for (const json& jclasses : jnodes) {
      std::vector<NodeTrees> node_trees;
      for (const json& jc : jclasses)
        node_trees.push_back(
            {tree_from_json(jc.at("forward")), tree_from_json(jc.at("backward"))});
      iter_trees.push_back(std::move(node_trees));
    }
    model.trees.push_back(std::move(iter_trees));
  }
  return model;
}

void save_model(const StrongModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << model_to_json(model) << '\n';
}

StrongModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace relgbdt

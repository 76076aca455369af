#include "ifdpg/io/json.hpp"

#include <stdexcept>

#include "ifdpg/error.hpp"

namespace ifdpg::io {

using nlohmann::json;

namespace {

std::string_view sign_code(Sign sign) { return sign == Sign::LE ? "LE" : "GT"; }

Label parse_label(const std::string& text) {
  if (text == "inlier") return Label::Inlier;
  if (text == "outlier") return Label::Outlier;
  throw InputError("unknown label '" + text + "'");
}

void check_schema(const json& j, std::string_view what) {
  if (!j.is_object() || !j.contains("schema_version"))
    throw InputError(std::string(what) + " document has no schema_version");
  if (j.at("schema_version").get<int>() != kSchemaVersion)
    throw InputError(std::string(what) + " document has unsupported schema_version " +
                     j.at("schema_version").dump());
}

json node_to_json(const IsolationTree& tree, std::size_t index) {
  if (const auto* internal = std::get_if<InternalNode>(&tree.node(index))) {
    return {{"feature", internal->feature},
            {"split_value", internal->split_value},
            {"left", node_to_json(tree, internal->left)},
            {"right", node_to_json(tree, internal->right)}};
  }
  const auto& leaf = std::get<LeafNode>(tree.node(index));
  return {{"size", leaf.size}, {"depth", leaf.depth}};
}

// Rebuilds the flat pre-order layout the trainer produces.
std::uint32_t node_from_json(const json& j, std::vector<TreeNode>& nodes) {
  const auto index = static_cast<std::uint32_t>(nodes.size());
  if (j.contains("split_value")) {
    nodes.emplace_back(InternalNode{j.at("feature").get<std::size_t>(), j.at("split_value").get<double>(), 0, 0});
    const std::uint32_t left = node_from_json(j.at("left"), nodes);
    const std::uint32_t right = node_from_json(j.at("right"), nodes);
    auto& internal = std::get<InternalNode>(nodes[index]);
    internal.left = left;
    internal.right = right;
  } else {
    nodes.emplace_back(LeafNode{j.at("size").get<std::uint32_t>(), j.at("depth").get<std::uint32_t>()});
  }
  return index;
}

template <typename Fn>
auto guarded(std::string_view what, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError&) {
    throw;
  } catch (const json::exception& e) {
    throw InputError("malformed " + std::string(what) + " document: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError("invalid " + std::string(what) + " document: " + e.what());
  }
}

json metadata_to_json(const GraphMetadata& m) {
  return {{"params", params_to_json(m.params)},
          {"label_rule", describe(m.params.label_rule)},
          {"n_train", m.n_train},
          {"n_features", m.n_features},
          {"subsample_size", m.subsample_size},
          {"max_depth", m.max_depth},
          {"total_traces", m.total_traces},
          {"pruned_outlier_traces", m.pruned_outlier_traces},
          {"feature_names", m.feature_names},
          {"named_features", m.named_features}};
}

GraphMetadata metadata_from_json(const json& j) {
  GraphMetadata m;
  m.params = params_from_json(j.at("params"));
  m.n_train = j.at("n_train").get<std::size_t>();
  m.n_features = j.at("n_features").get<std::size_t>();
  m.subsample_size = j.at("subsample_size").get<std::size_t>();
  m.max_depth = j.at("max_depth").get<int>();
  m.total_traces = j.at("total_traces").get<std::size_t>();
  m.pruned_outlier_traces = j.at("pruned_outlier_traces").get<std::size_t>();
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.named_features = j.at("named_features").get<bool>();
  return m;
}

}  // namespace

json params_to_json(const ForestParams& params) {
  json rule;
  if (const auto* threshold = std::get_if<ScoreThreshold>(&params.label_rule)) {
    rule = {{"kind", "threshold"}, {"threshold", threshold->threshold}};
  } else {
    rule = {{"kind", "contamination"}, {"fraction", std::get<Contamination>(params.label_rule).fraction}};
  }
  return {{"n_trees", params.n_trees},
          {"max_subsample", params.max_subsample},
          {"seed", params.seed},
          {"leaf_adjustment", params.leaf_adjustment},
          {"label_rule", rule}};
}

ForestParams params_from_json(const json& j) {
  return guarded("params", [&] {
    ForestParams params;
    params.n_trees = j.at("n_trees").get<std::size_t>();
    params.max_subsample = j.at("max_subsample").get<std::size_t>();
    params.seed = j.at("seed").get<std::uint64_t>();
    params.leaf_adjustment = j.at("leaf_adjustment").get<bool>();
    const json& rule = j.at("label_rule");
    const std::string kind = rule.at("kind").get<std::string>();
    if (kind == "threshold") {
      params.label_rule = ScoreThreshold{rule.at("threshold").get<double>()};
    } else if (kind == "contamination") {
      params.label_rule = Contamination{rule.at("fraction").get<double>()};
    } else {
      throw InputError("unknown label rule '" + kind + "'");
    }
    params.validate();
    return params;
  });
}

json model_to_json(const ForestModel& model) {
  json trees = json::array();
  for (const IsolationTree& tree : model.trees) trees.push_back(node_to_json(tree, 0));
  json labels = json::array();
  for (const Label label : model.labels) labels.push_back(to_string(label));
  return {{"schema_version", kSchemaVersion},
          {"params", params_to_json(model.params)},
          {"n_train", model.n_train},
          {"n_features", model.n_features},
          {"subsample_size", model.subsample_size},
          {"trees", trees},
          {"scores", model.scores},
          {"labels", labels}};
}

ForestModel model_from_json(const json& j) {
  return guarded("model", [&] {
    check_schema(j, "model");
    ForestModel model;
    model.params = params_from_json(j.at("params"));
    model.n_train = j.at("n_train").get<std::size_t>();
    model.n_features = j.at("n_features").get<std::size_t>();
    model.subsample_size = j.at("subsample_size").get<std::size_t>();
    for (const json& root : j.at("trees")) {
      std::vector<TreeNode> nodes;
      node_from_json(root, nodes);
      model.trees.emplace_back(std::move(nodes));
    }
    model.scores = j.at("scores").get<std::vector<double>>();
    for (const json& label : j.at("labels")) model.labels.push_back(parse_label(label.get<std::string>()));

    if (model.trees.size() != model.params.n_trees)
      throw InputError("model document has " + std::to_string(model.trees.size()) + " trees, params say " +
                       std::to_string(model.params.n_trees));
    if (model.scores.size() != model.n_train || model.labels.size() != model.n_train)
      throw InputError("model document scores/labels do not match n_train");
    for (const double s : model.scores) {
      if (!(s > 0.0 && s <= 1.0)) throw InputError("model document has a score outside (0, 1]");
    }
    return model;
  });
}

json graph_to_json(const DpGraph& graph, const IopReport& report) {
  json nodes = json::array();
  for (const GraphNode& node : graph.nodes()) {
    json entry = {{"id", node.id()}, {"kind", to_string(node.kind)}, {"feature", nullptr}, {"sign", nullptr},
                  {"iop", nullptr}};
    if (node.is_predicate()) {
      entry["feature"] = node.predicate.feature;
      entry["sign"] = sign_code(node.predicate.sign);
      if (const IopEntry* iop = report.find(node.predicate)) entry["iop"] = iop->iop;
    }
    nodes.push_back(entry);
  }
  json edges = json::array();
  for (const auto& [key, weight] : graph.edges())
    edges.push_back({{"src", key.first.id()}, {"dst", key.second.id()}, {"weight", weight}});
  const ClassWeights& w = graph.weights();
  return {{"schema_version", kSchemaVersion},
          {"nodes", nodes},
          {"edges", edges},
          {"weights", {{"w_o", w.w_o}, {"w_i", w.w_i}, {"n_o", w.n_o}, {"n_i", w.n_i}}},
          {"metadata", metadata_to_json(graph.metadata())}};
}

DpGraph graph_from_json(const json& j) {
  return guarded("graph", [&] {
    check_schema(j, "graph");
    EdgeMap edges;
    for (const json& e : j.at("edges")) {
      const EdgeKey key{parse_node_id(e.at("src").get<std::string>()), parse_node_id(e.at("dst").get<std::string>())};
      if (!edges.emplace(key, e.at("weight").get<double>()).second)
        throw InputError("duplicate edge " + key.first.id() + " -> " + key.second.id());
    }
    const json& w = j.at("weights");
    const ClassWeights weights{w.at("w_o").get<double>(), w.at("w_i").get<double>(), w.at("n_o").get<std::size_t>(),
                               w.at("n_i").get<std::size_t>()};
    return DpGraph(std::move(edges), weights, metadata_from_json(j.at("metadata")));
  });
}

json report_to_json(const IopReport& report, std::span<const std::string> feature_names) {
  json entries = json::array();
  for (const IopEntry& e : report.entries) {
    entries.push_back({{"predicate", predicate_label(e.predicate, feature_names)},
                       {"id", GraphNode::of(e.predicate).id()},
                       {"feature", e.predicate.feature},
                       {"sign", sign_code(e.predicate.sign)},
                       {"iop", e.iop},
                       {"f_i", e.f_i},
                       {"f_o", e.f_o},
                       {"f_in", e.f_in}});
  }
  return {{"schema_version", kSchemaVersion}, {"entries", entries}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace ifdpg::io

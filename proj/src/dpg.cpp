#include "ifdpg/dpg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "ifdpg/error.hpp"
#include "parallel.hpp"

namespace ifdpg {

std::string_view to_string(Sign sign) { return sign == Sign::LE ? "<=" : ">"; }

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Predicate: return "predicate";
    case NodeKind::Inlier: return "inlier";
    case NodeKind::Outlier: return "outlier";
    case NodeKind::Source: return "source";
  }
  return "unknown";
}

std::string predicate_label(Predicate predicate) {
  return "F" + std::to_string(predicate.feature) + " " + std::string(to_string(predicate.sign));
}

std::string predicate_label(Predicate predicate, std::span<const std::string> feature_names) {
  if (predicate.feature >= feature_names.size()) return predicate_label(predicate);
  return feature_names[predicate.feature] + " " + std::string(to_string(predicate.sign));
}

std::string GraphNode::id() const {
  switch (kind) {
    case NodeKind::Predicate:
      return "F" + std::to_string(predicate.feature) + (predicate.sign == Sign::LE ? "_LE" : "_GT");
    case NodeKind::Inlier: return "INLIER";
    case NodeKind::Outlier: return "OUTLIER";
    case NodeKind::Source: return "SOURCE";
  }
  return {};
}

GraphNode parse_node_id(std::string_view id) {
  if (id == "INLIER") return GraphNode::terminal(Label::Inlier);
  if (id == "OUTLIER") return GraphNode::terminal(Label::Outlier);
  if (id == "SOURCE") return GraphNode::source();
  const auto bad = [&] { return InputError("malformed node id '" + std::string(id) + "'"); };
  if (id.size() < 5 || id.front() != 'F') throw bad();
  const std::string_view suffix = id.substr(id.size() - 3);
  Sign sign;
  if (suffix == "_LE") {
    sign = Sign::LE;
  } else if (suffix == "_GT") {
    sign = Sign::GT;
  } else {
    throw bad();
  }
  const std::string_view digits = id.substr(1, id.size() - 4);
  std::size_t feature = 0;
  const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), feature);
  if (ec != std::errc{} || end != digits.data() + digits.size()) throw bad();
  return GraphNode::of({feature, sign});
}

DpGraph::DpGraph(EdgeMap edges, ClassWeights weights, GraphMetadata metadata)
    : edges_(std::move(edges)), weights_(weights), metadata_(std::move(metadata)) {
  std::vector<GraphNode> seen;
  for (const auto& [key, weight] : edges_) {
    const auto& [from, to] = key;
    if (!std::isfinite(weight) || weight < 0.0)
      throw std::invalid_argument("edge " + from.id() + " -> " + to.id() + " has an invalid weight");
    if (from.is_terminal()) throw std::invalid_argument("class terminal " + from.id() + " has an outgoing edge");
    if (to.kind == NodeKind::Source) throw std::invalid_argument("edge into the virtual source");
    seen.push_back(from);
    seen.push_back(to);
  }
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  nodes_ = std::move(seen);
}

bool DpGraph::contains(const GraphNode& node) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), node);
}

double DpGraph::edge_weight(const GraphNode& from, const GraphNode& to) const {
  const auto it = edges_.find({from, to});
  return it == edges_.end() ? 0.0 : it->second;
}

double DpGraph::in_weight(const GraphNode& node) const {
  double total = 0.0;
  for (const auto& [key, weight] : edges_) {
    if (key.second == node) total += weight;
  }
  return total;
}

double DpGraph::out_weight(const GraphNode& node) const {
  double total = 0.0;
  for (const auto& [key, weight] : edges_) {
    if (key.first == node) total += weight;
  }
  return total;
}

std::vector<PredicateTriple> trace_sample(const IsolationTree& tree, std::span<const double> sample) {
  std::vector<PredicateTriple> path;
  std::size_t index = 0;
  while (const auto* internal = std::get_if<InternalNode>(&tree.node(index))) {
    const bool left = sample[internal->feature] <= internal->split_value;
    path.push_back({internal->feature, left ? Sign::LE : Sign::GT, internal->split_value});
    index = left ? internal->left : internal->right;
  }
  return path;
}

namespace {

void check_compatible(const ForestModel& model, const Dataset& data) {
  if (data.n_features() != model.n_features)
    throw std::invalid_argument("dataset has " + std::to_string(data.n_features()) +
                                " features, model was trained on " + std::to_string(model.n_features));
  if (data.n_samples() != model.labels.size())
    throw std::invalid_argument("dataset has " + std::to_string(data.n_samples()) +
                                " samples, model labels " + std::to_string(model.labels.size()));
}

bool pruned(Label label, std::size_t length, int dmax) {
  return label == Label::Outlier && length >= static_cast<std::size_t>(dmax);
}

// Edge sums for one tree.
class PartialEdges {
 public:
  void add(const GraphNode& from, const GraphNode& to, double weight) {
    auto [it, inserted] = sums_.try_emplace(EdgeKey{from, to}, weight);
    if (!inserted) it->second += weight;
  }
  const EdgeMap& sums() const { return sums_; }

 private:
  EdgeMap sums_;
};

// Merges per-tree partials in ascending tree order.
EdgeMap merge_in_order(const std::vector<PartialEdges>& partials) {
  EdgeMap merged;
  for (const PartialEdges& partial : partials) {
    for (const auto& [key, weight] : partial.sums()) {
      auto [it, inserted] = merged.try_emplace(key, weight);
      if (!inserted) it->second += weight;
    }
  }
  return merged;
}

}  // namespace

std::vector<TraceList> traverse(const ForestModel& model, const Dataset& data) {
  check_compatible(model, data);
  std::vector<TraceList> traces;
  traces.reserve(model.trees.size() * data.n_samples());
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    for (std::size_t i = 0; i < data.n_samples(); ++i) {
      traces.push_back({i, t, trace_sample(model.trees[t], data.row(i)), model.labels[i]});
    }
  }
  return traces;
}

PruneResult prune_deep_outlier_traces(std::vector<TraceList> traces, int dmax) {
  PruneResult result;
  const auto removed_begin = std::stable_partition(traces.begin(), traces.end(), [&](const TraceList& trace) {
    return !pruned(trace.label, trace.predicates.size(), dmax);
  });
  result.removed = static_cast<std::size_t>(traces.end() - removed_begin);
  traces.erase(removed_begin, traces.end());
  result.traces = std::move(traces);
  return result;
}

std::vector<Predicate> collapse(std::span<const PredicateTriple> predicates) {
  std::vector<Predicate> out;
  out.reserve(predicates.size());
  for (const PredicateTriple& triple : predicates) out.push_back({triple.feature, triple.sign});
  return out;
}

std::vector<CollapsedTrace> collapse(std::span<const TraceList> traces) {
  std::vector<CollapsedTrace> out;
  out.reserve(traces.size());
  for (const TraceList& trace : traces)
    out.push_back({trace.sample_index, trace.tree_index, collapse(trace.predicates), trace.label});
  return out;
}

ClassWeights class_weights(std::size_t n_o, std::size_t n_i) {
  if (n_o == 0 || n_i == 0) throw PipelineError("single-class dataset; weighting undefined");
  const double total = static_cast<double>(n_o + n_i);
  return {total / static_cast<double>(n_o), total / static_cast<double>(n_i), n_o, n_i};
}

ClassWeights class_weights(std::span<const Label> labels) {
  const auto n_o = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::Outlier));
  return class_weights(n_o, labels.size() - n_o);
}

DpGraph build_graph(std::span<const CollapsedTrace> traces, const ClassWeights& weights,
                    GraphMetadata metadata) {
  if (traces.empty()) throw PipelineError("no traces to build a graph from");
  std::size_t n_trees = 0;
  for (const CollapsedTrace& trace : traces) n_trees = std::max(n_trees, trace.tree_index + 1);

  std::vector<PartialEdges> partials(n_trees);
  for (const CollapsedTrace& trace : traces) {
    PartialEdges& partial = partials[trace.tree_index];
    add_trace_flow(trace.predicates, trace.label, weights.weight_for(trace.label),
                   [&](const GraphNode& from, const GraphNode& to, double w) { partial.add(from, to, w); });
  }
  return DpGraph(merge_in_order(partials), weights, std::move(metadata));
}

DpGraph build_forest_graph(const ForestModel& model, const Dataset& data) {
  check_compatible(model, data);
  const ClassWeights weights = class_weights(model.labels);
  const int dmax = model.max_depth();

  std::vector<PartialEdges> partials(model.trees.size());
  std::vector<std::size_t> removed(model.trees.size(), 0);
  detail::parallel_for(model.trees.size(), [&](std::size_t t) {
    const IsolationTree& tree = model.trees[t];
    for (std::size_t i = 0; i < data.n_samples(); ++i) {
      const auto triples = trace_sample(tree, data.row(i));
      const Label label = model.labels[i];
      if (pruned(label, triples.size(), dmax)) {
        ++removed[t];
        continue;
      }
      add_trace_flow(collapse(triples), label, weights.weight_for(label),
                     [&](const GraphNode& from, const GraphNode& to, double w) { partials[t].add(from, to, w); });
    }
  });

  GraphMetadata metadata;
  metadata.params = model.params;
  metadata.n_train = model.n_train;
  metadata.n_features = model.n_features;
  metadata.subsample_size = model.subsample_size;
  metadata.max_depth = dmax;
  metadata.total_traces = model.trees.size() * data.n_samples();
  for (const std::size_t r : removed) metadata.pruned_outlier_traces += r;
  metadata.feature_names = data.feature_names();
  metadata.named_features = data.has_named_features();
  return DpGraph(merge_in_order(partials), weights, std::move(metadata));
}

}  // namespace ifdpg

#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ifdpg/dataset.hpp"
#include "ifdpg/forest.hpp"

namespace ifdpg {

enum class Sign : std::uint8_t { LE, GT };

std::string_view to_string(Sign sign);  // "<=" or ">"

struct PredicateTriple {
  std::size_t feature = 0;
  Sign sign = Sign::LE;
  double split_value = 0.0;

  bool operator==(const PredicateTriple&) const = default;
};

// A split condition with its threshold dropped. Ordered by feature, then LE
// before GT.
struct Predicate {
  std::size_t feature = 0;
  Sign sign = Sign::LE;

  auto operator<=>(const Predicate&) const = default;
};

// "F3 >" or, with names, "TSH >".
std::string predicate_label(Predicate predicate);
std::string predicate_label(Predicate predicate, std::span<const std::string> feature_names);

// Predicates satisfied by one sample on its way through one tree.
struct TraceList {
  std::size_t sample_index = 0;
  std::size_t tree_index = 0;
  std::vector<PredicateTriple> predicates;
  Label label = Label::Inlier;
};

struct CollapsedTrace {
  std::size_t sample_index = 0;
  std::size_t tree_index = 0;
  std::vector<Predicate> predicates;
  Label label = Label::Inlier;
};

struct ClassWeights {
  double w_o = 0.0;
  double w_i = 0.0;
  std::size_t n_o = 0;
  std::size_t n_i = 0;

  double weight_for(Label label) const { return label == Label::Outlier ? w_o : w_i; }
};

enum class NodeKind : std::uint8_t { Predicate, Inlier, Outlier, Source };

// Graph vertex. Predicate nodes sort first (by predicate), then the Inlier
// and Outlier terminals, then the virtual source.
struct GraphNode {
  NodeKind kind = NodeKind::Predicate;
  Predicate predicate{};

  static GraphNode of(Predicate p) { return {NodeKind::Predicate, p}; }
  static GraphNode terminal(Label label) {
    return {label == Label::Outlier ? NodeKind::Outlier : NodeKind::Inlier, {}};
  }
  static GraphNode source() { return {NodeKind::Source, {}}; }

  bool is_predicate() const { return kind == NodeKind::Predicate; }
  bool is_terminal() const { return kind == NodeKind::Inlier || kind == NodeKind::Outlier; }

  // Stable id: "F{i}_LE", "F{i}_GT", "INLIER", "OUTLIER", "SOURCE".
  std::string id() const;

  auto operator<=>(const GraphNode&) const = default;
};

// Parses an id produced by GraphNode::id(). Throws InputError.
GraphNode parse_node_id(std::string_view id);

std::string_view to_string(NodeKind kind);

struct GraphMetadata {
  ForestParams params;
  std::size_t n_train = 0;
  std::size_t n_features = 0;
  std::size_t subsample_size = 0;
  int max_depth = 0;
  std::size_t total_traces = 0;
  std::size_t pruned_outlier_traces = 0;
  std::vector<std::string> feature_names;
  bool named_features = false;
};

using EdgeKey = std::pair<GraphNode, GraphNode>;
using EdgeMap = std::map<EdgeKey, double>;

// Weighted predicate-transition graph. Edge weights are unnormalized sums of
// class weights.
class DpGraph {
 public:
  // Throws std::invalid_argument on negative or non-finite weights, edges
  // leaving a terminal, or edges entering the source.
  DpGraph(EdgeMap edges, ClassWeights weights, GraphMetadata metadata = {});

  // Every node touched by an edge, sorted.
  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const EdgeMap& edges() const { return edges_; }
  const ClassWeights& weights() const { return weights_; }
  const GraphMetadata& metadata() const { return metadata_; }

  bool contains(const GraphNode& node) const;
  // 0 when the edge is absent.
  double edge_weight(const GraphNode& from, const GraphNode& to) const;
  // Sums include self-loops.
  double in_weight(const GraphNode& node) const;
  double out_weight(const GraphNode& node) const;

 private:
  EdgeMap edges_;
  ClassWeights weights_;
  GraphMetadata metadata_;
  std::vector<GraphNode> nodes_;
};

// Predicates satisfied by `sample` walking down `tree`: (f, LE, v) when it
// goes left at split (f, v), (f, GT, v) when it goes right.
std::vector<PredicateTriple> trace_sample(const IsolationTree& tree, std::span<const double> sample);

// One trace per (tree, sample), ordered by tree index then sample index,
// labeled with the forest's label for the sample. Throws std::invalid_argument
// on a dimensionality or sample-count mismatch.
std::vector<TraceList> traverse(const ForestModel& model, const Dataset& data);

struct PruneResult {
  std::vector<TraceList> traces;
  std::size_t removed = 0;
};

// Drops Outlier traces whose length is >= dmax: a leaf at the depth limit was
// force-stopped, not isolated. Inlier traces are always kept.
PruneResult prune_deep_outlier_traces(std::vector<TraceList> traces, int dmax);

std::vector<Predicate> collapse(std::span<const PredicateTriple> predicates);
std::vector<CollapsedTrace> collapse(std::span<const TraceList> traces);

// (n_o + n_i) / n_o and (n_o + n_i) / n_i. Throws PipelineError when either
// class is empty.
ClassWeights class_weights(std::size_t n_o, std::size_t n_i);
ClassWeights class_weights(std::span<const Label> labels);

// Adds the weighted transitions of one trace:
// SOURCE -> p0 -> p1 -> ... -> pk -> terminal, or SOURCE -> terminal for an
// empty trace. This is the only place that decides how entry flow is counted.
template <typename AddEdge>
void add_trace_flow(std::span<const Predicate> predicates, Label label, double weight,
                    AddEdge&& add_edge) {
  GraphNode previous = GraphNode::source();
  for (const Predicate& p : predicates) {
    const GraphNode current = GraphNode::of(p);
    add_edge(previous, current, weight);
    previous = current;
  }
  add_edge(previous, GraphNode::terminal(label), weight);
}

// Aggregates traces into a graph. Traces are grouped by tree; each tree's
// partial edge sums accumulate in trace order and are then merged in
// ascending tree order, so the result is bit-reproducible. Throws
// PipelineError when `traces` is empty.
DpGraph build_graph(std::span<const CollapsedTrace> traces, const ClassWeights& weights,
                    GraphMetadata metadata = {});

// Full traverse -> prune -> collapse -> weight -> build chain without
// materializing every trace. Trees are processed concurrently; the result is
// bit-identical to the step-by-step chain.
DpGraph build_forest_graph(const ForestModel& model, const Dataset& data);

}  // namespace ifdpg

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ifdpg/dataset.hpp"

namespace ifdpg {

// c(1). A single-instance leaf needs no further isolation.
inline constexpr double kSingletonPathNormalizer = 0.0;

// Euler-Mascheroni constant at the precision used for the harmonic number
// estimate H(i) ~ ln(i) + 0.5772.
inline constexpr double kEulerGamma = 0.5772;

// ceil(log2(min(256, subsample_size))). Throws std::invalid_argument when
// subsample_size < 2.
int max_tree_depth(std::size_t subsample_size);

// c(n) = 2 H(n - 1) - 2 (n - 1) / n with H(i) ~ ln(i) + 0.5772: the average
// path length of an unsuccessful search in a binary search tree of n points.
// Throws std::invalid_argument when n < 2.
double average_path_normalizer(std::size_t n);

// Path length correction for a leaf holding `leaf_size` instances:
// c(leaf_size), with c(1) = 0.
double leaf_path_adjustment(std::size_t leaf_size);

// 2^(-mean_path / c(subsample_size)).
double anomaly_score(double mean_path, std::size_t subsample_size);

struct InternalNode {
  std::size_t feature = 0;
  double split_value = 0.0;
  // Indices into the owning tree's node array.
  std::uint32_t left = 0;
  std::uint32_t right = 0;
};

struct LeafNode {
  std::uint32_t size = 1;
  std::uint32_t depth = 0;
};

using TreeNode = std::variant<InternalNode, LeafNode>;

// Flat isolation tree; node 0 is the root. Samples with value <= split_value
// go left, the rest go right.
class IsolationTree {
 public:
  // Validates child indices (in range, pointing forward, each node reached
  // exactly once) and leaf depths. Throws std::invalid_argument.
  explicit IsolationTree(std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(std::size_t index) const { return nodes_[index]; }

  // Index of the leaf reached by `sample`.
  std::size_t leaf_for(std::span<const double> sample) const;

  // Deepest leaf depth.
  int depth() const { return depth_; }
  std::size_t n_internal() const;
  std::size_t n_leaves() const { return nodes_.size() - n_internal(); }

  friend bool operator==(const IsolationTree& a, const IsolationTree& b);

 private:
  std::vector<TreeNode> nodes_;
  int depth_ = 0;
};

bool operator==(const InternalNode& a, const InternalNode& b);
bool operator==(const LeafNode& a, const LeafNode& b);

struct ScoreThreshold {
  double threshold = 0.5;
};

// Fraction of samples to label as outliers, in (0, 0.5).
struct Contamination {
  double fraction = 0.1;
};

using LabelRule = std::variant<ScoreThreshold, Contamination>;

std::string describe(const LabelRule& rule);

struct ForestParams {
  std::size_t n_trees = 200;
  std::size_t max_subsample = 256;
  std::uint64_t seed = 0;
  bool leaf_adjustment = true;
  LabelRule label_rule = ScoreThreshold{};

  // Throws std::invalid_argument.
  void validate() const;
};

struct ForestModel {
  std::vector<IsolationTree> trees;
  ForestParams params;
  std::size_t n_train = 0;
  std::size_t n_features = 0;
  // min(max_subsample, n_train): the size every tree was grown on.
  std::size_t subsample_size = 0;
  std::vector<double> scores;
  std::vector<Label> labels;
  // Non-fatal diagnostics raised during fitting.
  std::vector<std::string> warnings;

  int max_depth() const { return max_tree_depth(subsample_size); }
};

// Number of edges from the root to the leaf reached by `sample`, plus
// c(leaf size) when leaf_adjustment is set.
double path_length(const IsolationTree& tree, std::span<const double> sample,
                   bool leaf_adjustment);

// Grows one isolation tree on the given rows of `data`.
IsolationTree grow_tree(const Dataset& data, std::span<const std::size_t> rows,
                        int max_depth, std::uint64_t seed);

// Trains the forest, scores the training samples and labels them. Tree t is
// grown from the stream seeded with params.seed + t, so the result does not
// depend on how many worker threads run.
ForestModel fit(const Dataset& data, const ForestParams& params);

// Anomaly score of every sample of `data` under `model`.
std::vector<double> score_samples(const ForestModel& model, const Dataset& data);

// Applies a labeling rule to scores. ScoreThreshold marks score >= t as
// Outlier. Contamination marks the ceil(fraction * n) highest scores as
// Outlier, ties going to the lower sample index. Throws PipelineError when
// the contamination rule selects no sample.
std::vector<Label> label_scores(std::span<const double> scores, const LabelRule& rule);

std::vector<Label> label_samples(const ForestModel& model);

}  // namespace ifdpg

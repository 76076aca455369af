#include "ifdpg/forest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "ifdpg/error.hpp"
#include "ifdpg/random.hpp"
#include "parallel.hpp"

namespace ifdpg {

int max_tree_depth(std::size_t subsample_size) {
  if (subsample_size < 2)
    throw std::invalid_argument("max_tree_depth: subsample size must be at least 2");
  const std::size_t capped = std::min<std::size_t>(256, subsample_size);
  // ceil(log2(m)) for m >= 2 is the bit width of m - 1.
  return static_cast<int>(std::bit_width(capped - 1));
}

double average_path_normalizer(std::size_t n) {
  if (n < 2) throw std::invalid_argument("average_path_normalizer: n must be at least 2");
  const double nd = static_cast<double>(n);
  const double harmonic = std::log(nd - 1.0) + kEulerGamma;
  return 2.0 * harmonic - 2.0 * (nd - 1.0) / nd;
}

double leaf_path_adjustment(std::size_t leaf_size) {
  return leaf_size <= 1 ? kSingletonPathNormalizer : average_path_normalizer(leaf_size);
}

double anomaly_score(double mean_path, std::size_t subsample_size) {
  if (!(mean_path >= 0.0) || !std::isfinite(mean_path))
    throw std::invalid_argument("anomaly_score: mean path length must be finite and >= 0");
  return std::exp2(-mean_path / average_path_normalizer(subsample_size));
}

bool operator==(const InternalNode& a, const InternalNode& b) {
  return a.feature == b.feature && a.split_value == b.split_value && a.left == b.left &&
         a.right == b.right;
}

bool operator==(const LeafNode& a, const LeafNode& b) {
  return a.size == b.size && a.depth == b.depth;
}

bool operator==(const IsolationTree& a, const IsolationTree& b) { return a.nodes_ == b.nodes_; }

IsolationTree::IsolationTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("isolation tree has no nodes");
  std::vector<int> depth_of(nodes_.size(), -1);
  depth_of[0] = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (depth_of[i] < 0) throw std::invalid_argument("tree node " + std::to_string(i) + " is unreachable");
    if (const auto* internal = std::get_if<InternalNode>(&nodes_[i])) {
      for (const std::uint32_t child : {internal->left, internal->right}) {
        if (child <= i || child >= nodes_.size())
          throw std::invalid_argument("tree node " + std::to_string(i) + " has an invalid child index");
        if (depth_of[child] >= 0)
          throw std::invalid_argument("tree node " + std::to_string(child) + " has two parents");
        depth_of[child] = depth_of[i] + 1;
      }
      if (!std::isfinite(internal->split_value))
        throw std::invalid_argument("tree node " + std::to_string(i) + " has a non-finite split");
    } else {
      const auto& leaf = std::get<LeafNode>(nodes_[i]);
      if (leaf.size < 1) throw std::invalid_argument("leaf " + std::to_string(i) + " is empty");
      if (static_cast<int>(leaf.depth) != depth_of[i])
        throw std::invalid_argument("leaf " + std::to_string(i) + " records the wrong depth");
      depth_ = std::max(depth_, depth_of[i]);
    }
  }
}

std::size_t IsolationTree::leaf_for(std::span<const double> sample) const {
  std::size_t index = 0;
  while (const auto* internal = std::get_if<InternalNode>(&nodes_[index])) {
    index = sample[internal->feature] <= internal->split_value ? internal->left : internal->right;
  }
  return index;
}

std::size_t IsolationTree::n_internal() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) {
    return std::holds_alternative<InternalNode>(n);
  }));
}

double path_length(const IsolationTree& tree, std::span<const double> sample, bool leaf_adjustment) {
  const auto& leaf = std::get<LeafNode>(tree.node(tree.leaf_for(sample)));
  const double edges = static_cast<double>(leaf.depth);
  return leaf_adjustment ? edges + leaf_path_adjustment(leaf.size) : edges;
}

namespace {

// Uniform on the open interval (lo, hi); lo itself when no double lies
// strictly between the two.
double draw_split(double lo, double hi, Rng& rng) {
  if (std::nextafter(lo, hi) == hi) return lo;
  const double span = hi - lo;
  for (;;) {
    const double u = rng.uniform_open();
    const double v = std::isfinite(span) ? lo + u * span : lo * (1.0 - u) + hi * u;
    if (v > lo && v < hi) return v;
  }
}

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, int max_depth, Rng& rng)
      : data_(data), max_depth_(max_depth), rng_(rng) {}

  std::vector<TreeNode> build(std::span<std::size_t> rows) {
    grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  struct Candidate {
    std::size_t feature;
    double lo;
    double hi;
  };

  std::uint32_t grow(std::span<std::size_t> rows, std::uint32_t depth) {
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back(LeafNode{static_cast<std::uint32_t>(rows.size()), depth});
    if (static_cast<int>(depth) >= max_depth_ || rows.size() <= 1) return index;

    // Features constant on this subset cannot split it; drawing uniformly
    // among the rest is the same as redrawing until a usable one comes up.
    std::vector<Candidate> candidates;
    for (std::size_t f = 0; f < data_.n_features(); ++f) {
      double lo = data_.at(rows[0], f);
      double hi = lo;
      for (const std::size_t r : rows.subspan(1)) {
        const double v = data_.at(r, f);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (lo < hi) candidates.push_back({f, lo, hi});
    }
    if (candidates.empty()) return index;

    const Candidate& chosen = candidates[rng_.index(candidates.size())];
    const double split = draw_split(chosen.lo, chosen.hi, rng_);
    const auto middle = std::partition(rows.begin(), rows.end(), [&](std::size_t r) {
      return data_.at(r, chosen.feature) <= split;
    });
    const auto n_left = static_cast<std::size_t>(middle - rows.begin());

    nodes_[index] = InternalNode{chosen.feature, split, 0, 0};
    const std::uint32_t left = grow(rows.first(n_left), depth + 1);
    const std::uint32_t right = grow(rows.subspan(n_left), depth + 1);
    auto& internal = std::get<InternalNode>(nodes_[index]);
    internal.left = left;
    internal.right = right;
    return index;
  }

  const Dataset& data_;
  int max_depth_;
  Rng& rng_;
  std::vector<TreeNode> nodes_;
};

IsolationTree grow_tree_with(const Dataset& data, std::span<const std::size_t> rows, int max_depth,
                             Rng& rng) {
  if (rows.empty()) throw std::invalid_argument("grow_tree: no rows");
  std::vector<std::size_t> work(rows.begin(), rows.end());
  for (const std::size_t r : work) {
    if (r >= data.n_samples()) throw std::invalid_argument("grow_tree: row index out of range");
  }
  TreeBuilder builder(data, max_depth, rng);
  return IsolationTree(builder.build(work));
}

bool all_rows_identical(const Dataset& data) {
  const auto first = data.row(0);
  for (std::size_t i = 1; i < data.n_samples(); ++i) {
    const auto row = data.row(i);
    if (!std::equal(first.begin(), first.end(), row.begin())) return false;
  }
  return true;
}

// Outlier count for a contamination fraction. Products that land within
// rounding of an integer (0.005 * 200) are taken as that integer.
std::size_t contamination_count(double fraction, std::size_t n) {
  const double raw = fraction * static_cast<double>(n);
  const double nearest = std::round(raw);
  if (std::abs(raw - nearest) <= 1e-9 * std::max(1.0, nearest)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(raw));
}

}  // namespace

IsolationTree grow_tree(const Dataset& data, std::span<const std::size_t> rows, int max_depth,
                        std::uint64_t seed) {
  Rng rng(seed);
  return grow_tree_with(data, rows, max_depth, rng);
}

std::string describe(const LabelRule& rule) {
  std::ostringstream out;
  if (const auto* threshold = std::get_if<ScoreThreshold>(&rule)) {
    out << "threshold(" << threshold->threshold << ")";
  } else {
    out << "contamination(" << std::get<Contamination>(rule).fraction << ")";
  }
  return out.str();
}

void ForestParams::validate() const {
  if (n_trees < 1) throw std::invalid_argument("n_trees must be at least 1");
  if (max_subsample < 2) throw std::invalid_argument("max_subsample must be at least 2");
  if (const auto* threshold = std::get_if<ScoreThreshold>(&label_rule)) {
    if (!std::isfinite(threshold->threshold))
      throw std::invalid_argument("score threshold must be finite");
  } else {
    const double fraction = std::get<Contamination>(label_rule).fraction;
    if (!(fraction > 0.0 && fraction < 0.5))
      throw std::invalid_argument("contamination must lie in (0, 0.5)");
  }
}

std::vector<double> score_samples(const ForestModel& model, const Dataset& data) {
  if (data.n_features() != model.n_features)
    throw std::invalid_argument("dataset has " + std::to_string(data.n_features()) +
                                " features, model expects " + std::to_string(model.n_features));
  std::vector<double> scores(data.n_samples());
  const double n_trees = static_cast<double>(model.trees.size());
  detail::parallel_for(data.n_samples(), [&](std::size_t i) {
    const auto sample = data.row(i);
    double total = 0.0;
    for (const IsolationTree& tree : model.trees)
      total += path_length(tree, sample, model.params.leaf_adjustment);
    scores[i] = anomaly_score(total / n_trees, model.subsample_size);
  });
  return scores;
}

std::vector<Label> label_scores(std::span<const double> scores, const LabelRule& rule) {
  std::vector<Label> labels(scores.size(), Label::Inlier);
  if (const auto* threshold = std::get_if<ScoreThreshold>(&rule)) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= threshold->threshold) labels[i] = Label::Outlier;
    }
    return labels;
  }
  const double fraction = std::get<Contamination>(rule).fraction;
  const std::size_t count = std::min(contamination_count(fraction, scores.size()), scores.size());
  if (count == 0) throw PipelineError("no outliers detected; DPG weighting undefined");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  for (std::size_t k = 0; k < count; ++k) labels[order[k]] = Label::Outlier;
  return labels;
}

std::vector<Label> label_samples(const ForestModel& model) {
  return label_scores(model.scores, model.params.label_rule);
}

ForestModel fit(const Dataset& data, const ForestParams& params) {
  params.validate();
  ForestModel model;
  model.params = params;
  model.n_train = data.n_samples();
  model.n_features = data.n_features();
  model.subsample_size = std::min(params.max_subsample, data.n_samples());
  const int max_depth = max_tree_depth(model.subsample_size);

  if (all_rows_identical(data))
    model.warnings.push_back("all instances are identical; every tree is a single leaf");

  std::vector<std::optional<IsolationTree>> grown(params.n_trees);
  detail::parallel_for(params.n_trees, [&](std::size_t t) {
    Rng rng(params.seed + t);
    const auto rows = rng.sample_without_replacement(data.n_samples(), model.subsample_size);
    grown[t] = grow_tree_with(data, rows, max_depth, rng);
  });
  model.trees.reserve(params.n_trees);
  for (auto& tree : grown) model.trees.push_back(std::move(*tree));

  model.scores = score_samples(model, data);
  model.labels = label_samples(model);
  return model;
}

}  // namespace ifdpg

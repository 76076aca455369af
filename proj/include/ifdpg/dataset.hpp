#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ifdpg {

enum class Label : std::uint8_t { Inlier, Outlier };

std::string_view to_string(Label label);

// Dense row-major sample matrix with feature names and optional ground-truth
// labels. Ground-truth labels are carried for evaluation only; the forest
// never looks at them.
class Dataset {
 public:
  // Throws std::invalid_argument when values.size() is not a multiple of
  // n_features, when there are fewer than two samples, on non-finite values,
  // or when feature_names has the wrong length. Empty feature_names yields
  // the default names "f0", "f1", ...
  Dataset(std::vector<double> values, std::size_t n_features,
          std::vector<std::string> feature_names = {},
          std::optional<std::vector<Label>> labels = std::nullopt);

  std::size_t n_samples() const { return n_samples_; }
  std::size_t n_features() const { return n_features_; }

  std::span<const double> row(std::size_t sample) const {
    return {values_.data() + sample * n_features_, n_features_};
  }
  double at(std::size_t sample, std::size_t feature) const {
    return values_[sample * n_features_ + feature];
  }
  std::span<const double> values() const { return values_; }

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  // True when the names were supplied (CSV header, caller) rather than
  // generated.
  bool has_named_features() const { return named_features_; }

  const std::optional<std::vector<Label>>& labels() const { return labels_; }

 private:
  std::vector<double> values_;
  std::size_t n_samples_ = 0;
  std::size_t n_features_ = 0;
  std::vector<std::string> feature_names_;
  bool named_features_ = false;
  std::optional<std::vector<Label>> labels_;
};

std::vector<std::string> default_feature_names(std::size_t n_features);

}  // namespace ifdpg

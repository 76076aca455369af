#include "ifdpg/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace ifdpg {

std::string_view to_string(Label label) {
  return label == Label::Outlier ? "outlier" : "inlier";
}

std::vector<std::string> default_feature_names(std::size_t n_features) {
  std::vector<std::string> names;
  names.reserve(n_features);
  for (std::size_t f = 0; f < n_features; ++f) names.push_back("f" + std::to_string(f));
  return names;
}

Dataset::Dataset(std::vector<double> values, std::size_t n_features,
                 std::vector<std::string> feature_names, std::optional<std::vector<Label>> labels)
    : values_(std::move(values)), n_features_(n_features), labels_(std::move(labels)) {
  if (n_features_ == 0) throw std::invalid_argument("dataset needs at least one feature");
  if (values_.size() % n_features_ != 0)
    throw std::invalid_argument("value count is not a multiple of the feature count");
  n_samples_ = values_.size() / n_features_;
  if (n_samples_ < 2) throw std::invalid_argument("dataset needs at least two samples");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw std::invalid_argument("non-finite value at sample " + std::to_string(i / n_features_) +
                                  ", feature " + std::to_string(i % n_features_));
  }
  if (feature_names.empty()) {
    feature_names_ = default_feature_names(n_features_);
  } else {
    if (feature_names.size() != n_features_)
      throw std::invalid_argument("feature name count does not match feature count");
    feature_names_ = std::move(feature_names);
    named_features_ = true;
  }
  if (labels_ && labels_->size() != n_samples_)
    throw std::invalid_argument("label count does not match sample count");
}

}  // namespace ifdpg

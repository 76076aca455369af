#include "ifdpg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "ifdpg/random.hpp"

namespace ifdpg {

namespace {

std::vector<double> or_fill(const std::vector<double>& values, std::size_t n, double fill) {
  return values.empty() ? std::vector<double>(n, fill) : values;
}

// Centre of the generated cluster, roughly where the reference experiments'
// clean samples sit.
const std::vector<double> kFixtureMeans = {-2.0, 9.0, 4.5, 2.5, -6.0, -7.0};

InjectionSpec injection(std::size_t sample, std::vector<std::pair<std::size_t, double>> shifts) {
  InjectionSpec spec;
  spec.sample = sample;
  for (const auto& [feature, signed_factor] : shifts) {
    spec.features.push_back(feature);
    spec.factors.push_back(std::abs(signed_factor));
    spec.directions.push_back(signed_factor < 0 ? Direction::Down : Direction::Up);
  }
  return spec;
}

}  // namespace

void SynthConfig::validate() const {
  if (n_samples < 2) throw std::invalid_argument("n_samples must be at least 2");
  if (n_features < 1) throw std::invalid_argument("n_features must be at least 1");
  if (!means.empty() && means.size() != n_features)
    throw std::invalid_argument("means must have one entry per feature");
  if (!stds.empty() && stds.size() != n_features)
    throw std::invalid_argument("stds must have one entry per feature");
  for (const double m : means) {
    if (!std::isfinite(m)) throw std::invalid_argument("means must be finite");
  }
  for (const double s : stds) {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("stds must be positive and finite");
  }
  if (injections.size() >= n_samples)
    throw std::invalid_argument("injection count must be smaller than n_samples");

  std::set<std::size_t> explicit_samples;
  for (std::size_t k = 0; k < injections.size(); ++k) {
    const InjectionSpec& spec = injections[k];
    const std::string where = "injection " + std::to_string(k) + ": ";
    if (spec.features.empty()) throw std::invalid_argument(where + "no features to alter");
    if (spec.factors.size() != spec.features.size() || spec.directions.size() != spec.features.size())
      throw std::invalid_argument(where + "features, factors and directions differ in length");
    std::set<std::size_t> distinct(spec.features.begin(), spec.features.end());
    if (distinct.size() != spec.features.size())
      throw std::invalid_argument(where + "altered features must be distinct");
    if (*distinct.rbegin() >= n_features) throw std::invalid_argument(where + "feature index out of range");
    for (const double factor : spec.factors) {
      if (!(factor > 0.0) || !std::isfinite(factor))
        throw std::invalid_argument(where + "factors must be positive");
    }
    if (const auto* index = std::get_if<std::size_t>(&spec.sample)) {
      if (*index >= n_samples) throw std::invalid_argument(where + "sample index out of range");
      if (!explicit_samples.insert(*index).second)
        throw std::invalid_argument(where + "sample " + std::to_string(*index) + " is injected twice");
    }
  }
}

SynthResult generate(const SynthConfig& config) {
  config.validate();
  const std::size_t n = config.n_samples;
  const std::size_t d = config.n_features;
  const auto means = or_fill(config.means, d, 0.0);
  const auto stds = or_fill(config.stds, d, 1.0);

  Rng rng(config.seed);
  std::vector<double> values(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < d; ++f) values[i * d + f] = means[f] + stds[f] * rng.normal();
  }

  std::vector<double> sigma(d, 0.0);
  for (std::size_t f = 0; f < d; ++f) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += values[i * d + f];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (values[i * d + f] - mean) * (values[i * d + f] - mean);
    sigma[f] = std::sqrt(ss / static_cast<double>(n));
  }

  // Explicit rows are reserved first so random picks never collide with them.
  std::vector<bool> taken(n, false);
  for (const InjectionSpec& spec : config.injections) {
    if (const auto* index = std::get_if<std::size_t>(&spec.sample)) taken[*index] = true;
  }

  std::vector<Label> labels(n, Label::Inlier);
  std::vector<InjectionRecord> log;
  for (const InjectionSpec& spec : config.injections) {
    std::size_t sample;
    if (const auto* index = std::get_if<std::size_t>(&spec.sample)) {
      sample = *index;
    } else {
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i]) free.push_back(i);
      }
      sample = free[rng.index(free.size())];
      taken[sample] = true;
    }
    labels[sample] = Label::Outlier;
    for (std::size_t k = 0; k < spec.features.size(); ++k) {
      const std::size_t f = spec.features[k];
      const double sign = spec.directions[k] == Direction::Up ? 1.0 : -1.0;
      double& cell = values[sample * d + f];
      InjectionRecord record;
      record.sample = sample;
      record.feature = f;
      record.initial = cell;
      cell += sign * spec.factors[k] * sigma[f];
      record.final_value = cell;
      record.alteration = record.final_value - record.initial;
      record.sigma = sigma[f];
      record.factor = spec.factors[k];
      log.push_back(record);
    }
  }

  std::vector<std::string> names;
  for (std::size_t f = 0; f < d; ++f) names.push_back("F" + std::to_string(f));
  return {Dataset(std::move(values), d, std::move(names), std::move(labels)), std::move(log),
          std::move(sigma)};
}

SynthConfig fixture_config_one(std::uint64_t seed) {
  SynthConfig config;
  config.means = kFixtureMeans;
  config.stds.assign(6, 1.0);
  config.seed = seed;
  config.injections = {injection(0, {{0, +5}, {3, -5}, {4, +5}, {5, +5}})};
  return config;
}

SynthConfig fixture_config_two(std::uint64_t seed) {
  SynthConfig config;
  config.means = kFixtureMeans;
  config.stds.assign(6, 1.0);
  config.seed = seed;
  config.injections = {
      injection(0, {{0, +4}, {1, +4}}),
      injection(1, {{0, +4}, {2, -4}}),
      injection(2, {{0, +5}, {3, -5}, {5, +5}, {4, +5}}),
      injection(3, {{1, +4}, {3, -4}}),
  };
  return config;
}

Dataset fixture_dataset_one() { return generate(fixture_config_one()).data; }
Dataset fixture_dataset_two() { return generate(fixture_config_two()).data; }

}  // namespace ifdpg

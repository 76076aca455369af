#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "ifdpg/dataset.hpp"

namespace ifdpg {

enum class Direction : std::uint8_t { Up, Down };

struct RandomSample {};

// Which sample receives an injection: a fixed row or one drawn uniformly from
// the rows not already injected.
using SampleChoice = std::variant<RandomSample, std::size_t>;

// Shifts the listed features of one sample by direction * factor * sigma_f.
struct InjectionSpec {
  SampleChoice sample = RandomSample{};
  std::vector<std::size_t> features;
  std::vector<double> factors;
  std::vector<Direction> directions;
};

struct SynthConfig {
  std::size_t n_samples = 200;
  std::size_t n_features = 6;
  // Empty means all-zero means / unit standard deviations.
  std::vector<double> means;
  std::vector<double> stds;
  std::vector<InjectionSpec> injections;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument.
  void validate() const;
};

struct InjectionRecord {
  std::size_t sample = 0;
  std::size_t feature = 0;
  double initial = 0.0;
  double final_value = 0.0;
  // final_value - initial, recomputed after the shift.
  double alteration = 0.0;
  double sigma = 0.0;
  double factor = 0.0;
};

struct SynthResult {
  // Ground-truth labels mark injected samples as Outlier.
  Dataset data;
  std::vector<InjectionRecord> log;
  // Population standard deviation of each feature before injection.
  std::vector<double> feature_stds;
};

// Axis-aligned Gaussian cluster, then additive shifts of +/- k sigma_f where
// sigma_f is measured on the clean data.
SynthResult generate(const SynthConfig& config);

// Fixture seeds are fixed so the base draw of each injected sample starts
// from the same relative positions as the reference experiments: the
// fixture-one outlier's F3 begins well above the cluster centre, so its
// downward shift leaves it close to the cluster.
inline constexpr std::uint64_t kFixtureOneSeed = 18;
inline constexpr std::uint64_t kFixtureTwoSeed = 17;

// One outlier, sample 0: F0 +5, F3 -5, F4 +5, F5 +5 (in sigma units).
SynthConfig fixture_config_one(std::uint64_t seed = kFixtureOneSeed);
// Four outliers, samples 0-3, with 2 to 4 altered features each.
SynthConfig fixture_config_two(std::uint64_t seed = kFixtureTwoSeed);

Dataset fixture_dataset_one();
Dataset fixture_dataset_two();

}  // namespace ifdpg

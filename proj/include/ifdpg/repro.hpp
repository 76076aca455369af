#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ifdpg/dataset.hpp"
#include "ifdpg/dpg.hpp"
#include "ifdpg/metrics.hpp"

namespace ifdpg {

// A multi-seed experiment: the dataset, the labeling, and the predicates the
// explanation is expected to single out as outlier-propagating. Only the
// forest seed varies between runs; the dataset is fixed.
struct Experiment {
  Experiment(std::string name, Dataset data) : name(std::move(name)), data(std::move(data)) {}

  std::string name;
  Dataset data;
  double contamination = 0.1;
  std::size_t n_trees = 200;

  // Samples that were made anomalous. With require_detection, every seed
  // must label exactly these samples as outliers; otherwise the detection
  // rate is only reported.
  std::vector<std::size_t> injected;
  bool require_detection = false;

  // The k lowest-IOP predicates (k = size) must be exactly this set and sit
  // strictly below every other predicate.
  std::set<Predicate> bottom_set;
  // Bottom-set members must additionally be negative (and below
  // min_iop_below when set) for the bottom check to hold.
  bool bottom_negative = false;
  std::optional<double> min_iop_below;
  double bottom_rate = 0.9;

  // Every member must be negative; with negative_exact, no other predicate
  // may be negative. Skipped when empty.
  std::set<Predicate> negative_set;
  bool negative_exact = false;
  double negative_rate = 0.95;
};

Experiment fixture_one_experiment();
Experiment fixture_two_experiment();
Experiment annthyroid_experiment(Dataset data);

struct SeedOutcome {
  std::uint64_t seed = 0;
  IopReport report;
  std::vector<std::size_t> detected;
  bool detection_ok = true;
  bool bottom_ok = false;
  bool negative_ok = true;
};

struct PredicateSummary {
  double mean = 0.0;
  double stddev = 0.0;
  double negative_rate = 0.0;
  std::size_t present = 0;
};

struct ReproResult {
  std::vector<SeedOutcome> seeds;
  std::map<Predicate, PredicateSummary> summary;
  double detection_rate = 0.0;
  double bottom_rate = 0.0;
  double negative_rate = 0.0;
  bool detection_pass = false;
  bool bottom_pass = false;
  bool negative_pass = false;

  bool pass() const { return detection_pass && bottom_pass && negative_pass; }
};

// The `count` lowest-IOP predicates of a report, lowest first.
std::vector<Predicate> most_negative(const IopReport& report, std::size_t count);

// Runs the experiment with forest seeds base_seed, base_seed + 1, ...
ReproResult run_repro(const Experiment& experiment, std::size_t n_seeds, std::uint64_t base_seed);

std::string format_repro(const Experiment& experiment, const ReproResult& result);

}  // namespace ifdpg

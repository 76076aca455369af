#include "ifdpg/repro.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string_view>

#include "ifdpg/pipeline.hpp"
#include "ifdpg/synth.hpp"

namespace ifdpg {

namespace {

constexpr Predicate gt(std::size_t feature) { return {feature, Sign::GT}; }
constexpr Predicate le(std::size_t feature) { return {feature, Sign::LE}; }

std::string percent(double rate) {
  char buffer[16];
  std::snprintf(buffer, sizeof buffer, "%.0f%%", 100.0 * rate);
  return buffer;
}

std::string set_label(const std::set<Predicate>& set, std::span<const std::string> names) {
  std::string out = "{";
  for (const Predicate& p : set) {
    if (out.size() > 1) out += ", ";
    out += predicate_label(p, names);
  }
  return out + "}";
}

bool bottom_holds(const Experiment& experiment, const IopReport& report) {
  const std::size_t k = experiment.bottom_set.size();
  if (k == 0) return true;
  if (report.entries.size() < k) return false;
  const auto bottom = most_negative(report, k);
  if (std::set<Predicate>(bottom.begin(), bottom.end()) != experiment.bottom_set) return false;
  // Entries are sorted descending, so the bottom k are the tail.
  const auto& entries = report.entries;
  const std::size_t first_bottom = entries.size() - k;
  if (first_bottom > 0 && !(entries[first_bottom].iop < entries[first_bottom - 1].iop)) return false;
  if (experiment.bottom_negative) {
    for (std::size_t i = first_bottom; i < entries.size(); ++i) {
      if (!(entries[i].iop < 0.0)) return false;
      if (experiment.min_iop_below && !(entries[i].iop < *experiment.min_iop_below)) return false;
    }
  }
  return true;
}

bool negatives_hold(const Experiment& experiment, const IopReport& report) {
  if (experiment.negative_set.empty()) return true;
  for (const Predicate& p : experiment.negative_set) {
    const IopEntry* entry = report.find(p);
    if (entry == nullptr || !(entry->iop < 0.0)) return false;
  }
  if (experiment.negative_exact) {
    for (const IopEntry& e : report.entries) {
      if (e.iop < 0.0 && !experiment.negative_set.contains(e.predicate)) return false;
    }
  }
  return true;
}

}  // namespace

Experiment fixture_one_experiment() {
  Experiment e("fixture-one", fixture_dataset_one());
  e.contamination = 1.0 / 200.0;
  e.injected = {0};
  e.require_detection = true;
  e.bottom_set = {gt(4), gt(5), gt(0)};
  e.bottom_rate = 0.90;
  e.negative_set = e.bottom_set;
  e.negative_rate = 0.95;
  return e;
}

Experiment fixture_two_experiment() {
  Experiment e("fixture-two", fixture_dataset_two());
  e.contamination = 4.0 / 200.0;
  e.injected = {0, 1, 2, 3};
  e.bottom_set = {gt(0), le(3), gt(1)};
  e.bottom_negative = true;
  e.bottom_rate = 0.80;
  return e;
}

Experiment annthyroid_experiment(Dataset data) {
  // Columns are located by name when the file has a header, otherwise the
  // usual order Age, TSH, T3, TT4, T4U, FTI is assumed.
  const auto column = [&](std::string_view wanted, std::size_t fallback) {
    if (!data.has_named_features()) return fallback;
    const auto& names = data.feature_names();
    for (std::size_t f = 0; f < names.size(); ++f) {
      if (std::ranges::equal(names[f], wanted, [](char a, char b) { return std::toupper(static_cast<unsigned char>(a)) == b; }))
        return f;
    }
    return fallback;
  };
  const std::size_t tsh = column("TSH", 1);
  const std::size_t t3 = column("T3", 2);
  Experiment e("annthyroid", std::move(data));
  e.contamination = 0.0361;
  e.bottom_set = {gt(tsh)};
  e.bottom_negative = true;
  e.min_iop_below = -0.15;
  e.bottom_rate = 1.0;
  e.negative_set = {gt(tsh), gt(t3)};
  e.negative_exact = true;
  e.negative_rate = 0.80;
  return e;
}

std::vector<Predicate> most_negative(const IopReport& report, std::size_t count) {
  std::vector<Predicate> out;
  for (auto it = report.entries.rbegin(); it != report.entries.rend() && out.size() < count; ++it)
    out.push_back(it->predicate);
  return out;
}

ReproResult run_repro(const Experiment& experiment, std::size_t n_seeds, std::uint64_t base_seed) {
  ReproResult result;
  std::map<Predicate, std::vector<double>> values;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    ForestParams params;
    params.n_trees = experiment.n_trees;
    params.seed = base_seed + s;
    params.label_rule = Contamination{experiment.contamination};
    Explanation run = explain(experiment.data, params);

    SeedOutcome outcome;
    outcome.seed = params.seed;
    for (std::size_t i = 0; i < run.model.labels.size(); ++i) {
      if (run.model.labels[i] == Label::Outlier) outcome.detected.push_back(i);
    }
    if (!experiment.injected.empty()) {
      auto injected = experiment.injected;
      std::sort(injected.begin(), injected.end());
      outcome.detection_ok = outcome.detected == injected;
    }
    outcome.bottom_ok = bottom_holds(experiment, run.report);
    outcome.negative_ok = negatives_hold(experiment, run.report);
    for (const IopEntry& e : run.report.entries) values[e.predicate].push_back(e.iop);
    outcome.report = std::move(run.report);
    result.seeds.push_back(std::move(outcome));
  }

  const double n = static_cast<double>(std::max<std::size_t>(n_seeds, 1));
  for (const auto& [predicate, iops] : values) {
    PredicateSummary summary;
    summary.present = iops.size();
    for (const double v : iops) summary.mean += v;
    summary.mean /= static_cast<double>(iops.size());
    double ss = 0.0;
    for (const double v : iops) ss += (v - summary.mean) * (v - summary.mean);
    summary.stddev = iops.size() > 1 ? std::sqrt(ss / static_cast<double>(iops.size() - 1)) : 0.0;
    summary.negative_rate =
        static_cast<double>(std::count_if(iops.begin(), iops.end(), [](double v) { return v < 0.0; })) / n;
    result.summary[predicate] = summary;
  }

  const auto rate = [&](auto member) {
    return static_cast<double>(std::count_if(result.seeds.begin(), result.seeds.end(),
                                             [&](const SeedOutcome& o) { return o.*member; })) /
           n;
  };
  result.detection_rate = rate(&SeedOutcome::detection_ok);
  result.bottom_rate = rate(&SeedOutcome::bottom_ok);
  result.negative_rate = rate(&SeedOutcome::negative_ok);
  result.detection_pass = !experiment.require_detection || result.detection_rate >= 1.0;
  result.bottom_pass = result.bottom_rate >= experiment.bottom_rate;
  result.negative_pass = experiment.negative_set.empty() || result.negative_rate >= experiment.negative_rate;
  return result;
}

std::string format_repro(const Experiment& experiment, const ReproResult& result) {
  const auto& names = experiment.data.feature_names();
  const std::span<const std::string> labels =
      experiment.data.has_named_features() ? std::span<const std::string>(names) : std::span<const std::string>();
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "experiment %s: %zu samples, %zu features, %zu trees, contamination %.4g, %zu seeds\n",
                experiment.name.c_str(), experiment.data.n_samples(), experiment.data.n_features(),
                experiment.n_trees, experiment.contamination, result.seeds.size());
  out << line;

  std::vector<std::pair<Predicate, PredicateSummary>> rows(result.summary.begin(), result.summary.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second.mean > b.second.mean; });
  std::size_t width = 9;
  for (const auto& row : rows) width = std::max(width, predicate_label(row.first, labels).size());
  std::snprintf(line, sizeof line, "%-*s | %9s | %7s | %8s\n", static_cast<int>(width), "Predicate",
                "mean IOP", "std", "negative");
  out << line;
  for (const auto& [predicate, s] : rows) {
    std::snprintf(line, sizeof line, "%-*s | %9.4f | %7.4f | %8s\n", static_cast<int>(width),
                  predicate_label(predicate, labels).c_str(), s.mean, s.stddev, percent(s.negative_rate).c_str());
    out << line;
  }

  const auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  if (!experiment.injected.empty()) {
    out << "injected samples labeled as the outliers: " << percent(result.detection_rate)
        << " of seeds"
        << (experiment.require_detection ? std::string(" (required 100%) ") + verdict(result.detection_pass) : "")
        << "\n";
  }
  if (!experiment.bottom_set.empty()) {
    out << "most negative predicates are " << set_label(experiment.bottom_set, labels)
        << (experiment.bottom_negative ? " (all negative" : "")
        << (experiment.min_iop_below ? ", below " + std::to_string(*experiment.min_iop_below).substr(0, 5) : "")
        << (experiment.bottom_negative ? ")" : "") << ": " << percent(result.bottom_rate)
        << " of seeds (required " << percent(experiment.bottom_rate) << ") " << verdict(result.bottom_pass) << "\n";
  }
  if (!experiment.negative_set.empty()) {
    out << (experiment.negative_exact ? "negative predicates are exactly " : "negative predicates include ")
        << set_label(experiment.negative_set, labels) << ": " << percent(result.negative_rate)
        << " of seeds (required " << percent(experiment.negative_rate) << ") " << verdict(result.negative_pass)
        << "\n";
  }
  out << "RESULT: " << verdict(result.pass()) << "\n";
  return out.str();
}

}  // namespace ifdpg

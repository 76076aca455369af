#pragma once

#include <span>
#include <string>
#include <vector>

#include "ifdpg/dpg.hpp"

namespace ifdpg {

struct IopEntry {
  Predicate predicate;
  double iop = 0.0;
  double f_i = 0.0;
  double f_o = 0.0;
  double f_in = 0.0;
};

// Sorted by descending IOP; ties go to the lower feature index, then LE.
struct IopReport {
  std::vector<IopEntry> entries;

  const IopEntry* find(Predicate predicate) const;
};

// (f_i - f_o) / f_in, clamped to [-1, 1] against rounding. Throws
// std::invalid_argument when f_in <= 0, on negative flows, or when
// f_i + f_o exceeds f_in by more than rounding slack.
double iop_score(double f_i, double f_o, double f_in);

// IOP of every predicate node. f_in counts every incoming edge, including
// the virtual source and self-loops.
IopReport score_graph(const DpGraph& graph);

void sort_report(std::vector<IopEntry>& entries);

enum class ReportFormat { Table, Json };

// Display form of a report; values rounded to 4 decimals. Names replace
// "F{i}" when given.
std::string rank_report(const IopReport& report, ReportFormat format,
                        std::span<const std::string> feature_names = {});

}  // namespace ifdpg

#pragma once

#include "ifdpg/dataset.hpp"
#include "ifdpg/dpg.hpp"
#include "ifdpg/forest.hpp"
#include "ifdpg/metrics.hpp"

namespace ifdpg {

struct Explanation {
  ForestModel model;
  DpGraph graph;
  IopReport report;
};

// fit -> label -> traverse -> prune -> collapse -> weight -> build -> score.
// Throws PipelineError when the labeling leaves a class empty.
Explanation explain(const Dataset& data, const ForestParams& params);

}  // namespace ifdpg

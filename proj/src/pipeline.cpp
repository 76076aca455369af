#include "ifdpg/pipeline.hpp"

namespace ifdpg {

Explanation explain(const Dataset& data, const ForestParams& params) {
  ForestModel model = fit(data, params);
  DpGraph graph = build_forest_graph(model, data);
  IopReport report = score_graph(graph);
  return {std::move(model), std::move(graph), std::move(report)};
}

}  // namespace ifdpg

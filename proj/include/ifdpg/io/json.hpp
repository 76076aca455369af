#pragma once

#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "ifdpg/dpg.hpp"
#include "ifdpg/forest.hpp"
#include "ifdpg/metrics.hpp"

namespace ifdpg::io {

inline constexpr int kSchemaVersion = 1;

nlohmann::json params_to_json(const ForestParams& params);
ForestParams params_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const ForestModel& model);
// Throws InputError on a schema mismatch or malformed document.
ForestModel model_from_json(const nlohmann::json& j);

// Nodes carry their IOP from `report` (null for terminals and the source).
nlohmann::json graph_to_json(const DpGraph& graph, const IopReport& report);
DpGraph graph_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const IopReport& report,
                              std::span<const std::string> feature_names = {});

// Pretty-printed with a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace ifdpg::io

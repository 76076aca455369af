#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ifdpg/dpg.hpp"
#include "ifdpg/forest.hpp"
#include "ifdpg/io/dot.hpp"
#include "ifdpg/metrics.hpp"

namespace ifdpg::io {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct BundleInfo {
  // Hex digest identifying the training input, e.g. sha256_hex of the CSV.
  std::string input_hash;
  std::string input_name;
  DotStyle style;
};

std::string sha256_hex(std::string_view bytes);
// Throws InputError when the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

// Writes model.json, graph.json, iop_report.json, graph.dot, iop_table.txt
// and manifest.json into `dir` (created if missing) and returns the
// manifest. Throws InputError naming the offending path on IO failure.
nlohmann::json write_explanation_bundle(const std::filesystem::path& dir, const ForestModel& model,
                                        const DpGraph& graph, const IopReport& report,
                                        const BundleInfo& info);

}  // namespace ifdpg::io

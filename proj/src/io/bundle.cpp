#include "ifdpg/io/bundle.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <sstream>

#include "ifdpg/error.hpp"
#include "ifdpg/io/json.hpp"

namespace ifdpg::io {

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

namespace {

void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + name + "' into directory '" + dir.string() + "'");
  out << text;
  out.flush();
  if (!out) throw InputError("write failed for '" + name + "' in directory '" + dir.string() + "'");
}

}  // namespace

nlohmann::json write_explanation_bundle(const std::filesystem::path& dir, const ForestModel& model,
                                        const DpGraph& graph, const IopReport& report, const BundleInfo& info) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw InputError("cannot create output directory '" + dir.string() + "'" + (ec ? ": " + ec.message() : ""));

  const auto& meta = graph.metadata();
  const std::span<const std::string> names =
      meta.named_features ? std::span<const std::string>(meta.feature_names) : std::span<const std::string>();

  const std::vector<std::pair<std::string, std::string>> files = {
      {"model.json", dump(model_to_json(model))},
      {"graph.json", dump(graph_to_json(graph, report))},
      {"iop_report.json", dump(report_to_json(report, names))},
      {"graph.dot", export_dot(graph, report, info.style)},
      {"iop_table.txt", rank_report(report, ReportFormat::Table, names)},
  };

  nlohmann::json file_hashes = nlohmann::json::object();
  for (const auto& [name, text] : files) {
    write_text(dir, name, text);
    file_hashes[name] = sha256_hex(text);
  }

  const ClassWeights& w = graph.weights();
  nlohmann::json manifest = {
      {"schema_version", kSchemaVersion},
      {"tool", "ifdpg"},
      {"version", kToolVersion},
      {"seed", model.params.seed},
      {"params", params_to_json(model.params)},
      {"label_rule", describe(model.params.label_rule)},
      {"input", {{"name", info.input_name}, {"sha256", info.input_hash}}},
      {"n_train", model.n_train},
      {"n_outliers", w.n_o},
      {"n_inliers", w.n_i},
      {"pruned_outlier_traces", meta.pruned_outlier_traces},
      {"files", file_hashes},
  };
  write_text(dir, "manifest.json", dump(manifest));
  return manifest;
}

}  // namespace ifdpg::io

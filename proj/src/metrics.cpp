#include "ifdpg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ifdpg/io/json.hpp"

namespace ifdpg {

const IopEntry* IopReport::find(Predicate predicate) const {
  const auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const IopEntry& e) { return e.predicate == predicate; });
  return it == entries.end() ? nullptr : &*it;
}

double iop_score(double f_i, double f_o, double f_in) {
  if (!(f_in > 0.0)) throw std::invalid_argument("iop_score: node has no incoming flow");
  if (f_i < 0.0 || f_o < 0.0) throw std::invalid_argument("iop_score: negative terminal flow");
  if (f_i + f_o > f_in * (1.0 + 1e-9))
    throw std::invalid_argument("iop_score: terminal flow exceeds incoming flow");
  return std::clamp((f_i - f_o) / f_in, -1.0, 1.0);
}

void sort_report(std::vector<IopEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const IopEntry& a, const IopEntry& b) {
    if (a.iop != b.iop) return a.iop > b.iop;
    return a.predicate < b.predicate;
  });
}

IopReport score_graph(const DpGraph& graph) {
  const GraphNode inlier = GraphNode::terminal(Label::Inlier);
  const GraphNode outlier = GraphNode::terminal(Label::Outlier);
  IopReport report;
  for (const GraphNode& node : graph.nodes()) {
    if (!node.is_predicate()) continue;
    IopEntry entry;
    entry.predicate = node.predicate;
    entry.f_i = graph.edge_weight(node, inlier);
    entry.f_o = graph.edge_weight(node, outlier);
    // Self-loops are ordinary incoming edges here.
    entry.f_in = graph.in_weight(node);
    entry.iop = iop_score(entry.f_i, entry.f_o, entry.f_in);
    report.entries.push_back(entry);
  }
  sort_report(report.entries);
  return report;
}

namespace {

double round4(double value) {
  const double rounded = std::round(value * 1e4) / 1e4;
  return rounded == 0.0 ? 0.0 : rounded;  // no "-0.0000"
}

std::string fixed4(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4f", round4(value));
  return buffer;
}

std::string pad(std::string text, std::size_t width) {
  if (text.size() < width) text.append(width - text.size(), ' ');
  return text;
}

}  // namespace

std::string rank_report(const IopReport& report, ReportFormat format,
                        std::span<const std::string> feature_names) {
  if (format == ReportFormat::Json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const IopEntry& e : report.entries) {
      rows.push_back({{"predicate", predicate_label(e.predicate, feature_names)},
                      {"feature", e.predicate.feature},
                      {"sign", to_string(e.predicate.sign)},
                      {"iop", round4(e.iop)},
                      {"f_i", round4(e.f_i)},
                      {"f_o", round4(e.f_o)},
                      {"f_in", round4(e.f_in)}});
    }
    return nlohmann::json{{"schema_version", io::kSchemaVersion}, {"entries", rows}}.dump(2) + "\n";
  }

  const std::string head_predicate = "Predicate";
  const std::string head_score = "IOP-Score";
  std::vector<std::pair<std::string, std::string>> rows;
  std::size_t left_width = head_predicate.size();
  std::size_t right_width = head_score.size();
  for (const IopEntry& e : report.entries) {
    rows.emplace_back(predicate_label(e.predicate, feature_names), fixed4(e.iop));
    left_width = std::max(left_width, rows.back().first.size());
    right_width = std::max(right_width, rows.back().second.size());
  }
  std::string out = pad(head_predicate, left_width) + " | " + head_score + "\n";
  out += std::string(left_width, '-') + "-+-" + std::string(right_width, '-') + "\n";
  for (const auto& [label, score] : rows) {
    out += pad(label, left_width) + " | " + std::string(right_width - score.size(), ' ') + score + "\n";
  }
  return out;
}

}  // namespace ifdpg

#include "ifdpg/io/dot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ifdpg::io {

namespace {

std::size_t palette_index(double iop) {
  const double clamped = std::clamp(iop, -1.0, 1.0);
  return static_cast<std::size_t>(std::lround((clamped + 1.0) / 2.0 * 10.0));
}

std::string escape(std::string_view text) {
  std::string out;
  for (const char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string fixed(double value, int digits) {
  char buffer[48];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
  return buffer;
}

std::string node_statement(const std::string& id, const std::string& label, std::string_view shape, double iop) {
  const std::size_t index = palette_index(iop);
  // Text on the three darkest steps at either end is white.
  const bool dark = index <= 2 || index >= 8;
  return "  \"" + id + "\" [label=\"" + escape(label) + "\", shape=" + std::string(shape) + ", fillcolor=\"" +
         std::string(kIopPalette[index]) + "\", fontcolor=\"" + (dark ? "white" : "black") + "\", tooltip=\"IOP " +
         fixed(iop, 4) + "\"];\n";
}

}  // namespace

std::string_view iop_color(double iop) { return kIopPalette[palette_index(iop)]; }

double pen_width(double weight, double min_weight, double max_weight, const DotStyle& style) {
  if (!(max_weight > min_weight)) return style.max_pen_width;
  const double t = std::clamp((weight - min_weight) / (max_weight - min_weight), 0.0, 1.0);
  return style.min_pen_width + t * (style.max_pen_width - style.min_pen_width);
}

std::string export_dot(const DpGraph& graph, const IopReport& report, const DotStyle& style) {
  const auto& meta = graph.metadata();
  const std::span<const std::string> names =
      meta.named_features ? std::span<const std::string>(meta.feature_names) : std::span<const std::string>();

  const auto visible = [&](const GraphNode& node) { return style.show_source || node.kind != NodeKind::Source; };

  std::string out = "digraph DPG {\n";
  out += "  rankdir=LR;\n";
  out += "  node [style=filled, fontname=\"Helvetica\"];\n";
  out += "  edge [fontname=\"Helvetica\", fontsize=9];\n";

  for (const GraphNode& node : graph.nodes()) {
    switch (node.kind) {
      case NodeKind::Predicate: {
        const IopEntry* entry = report.find(node.predicate);
        if (entry == nullptr)
          throw std::invalid_argument("report has no IOP for graph node " + node.id());
        out += node_statement(node.id(), predicate_label(node.predicate, names), "ellipse", entry->iop);
        break;
      }
      case NodeKind::Inlier:
        out += node_statement(node.id(), "Inlier", style.class_node_shape, 1.0);
        break;
      case NodeKind::Outlier:
        out += node_statement(node.id(), "Outlier", style.class_node_shape, -1.0);
        break;
      case NodeKind::Source:
        if (style.show_source) out += "  \"SOURCE\" [label=\"Source\", shape=point, width=0.15];\n";
        break;
    }
  }

  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (const auto& [key, weight] : graph.edges()) {
    if (!visible(key.first)) continue;
    lo = any ? std::min(lo, weight) : weight;
    hi = any ? std::max(hi, weight) : weight;
    any = true;
  }
  for (const auto& [key, weight] : graph.edges()) {
    if (!visible(key.first)) continue;
    out += "  \"" + key.first.id() + "\" -> \"" + key.second.id() + "\" [penwidth=" +
           fixed(pen_width(weight, lo, hi, style), 3) + ", label=\"" + fixed(weight, 2) + "\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace ifdpg::io

#pragma once

#include <array>
#include <string>
#include <string_view>

#include "ifdpg/dpg.hpp"
#include "ifdpg/metrics.hpp"

namespace ifdpg::io {

// 11-step red-white-blue diverging scale; index 0 is IOP = -1, index 10 is
// IOP = +1, index 5 (IOP = 0) is the neutral midpoint.
inline constexpr std::array<std::string_view, 11> kIopPalette = {
    "#67001f", "#b2182b", "#d6604d", "#f4a582", "#fddbc7", "#f7f7f7",
    "#d1e5f0", "#92c5de", "#4393c3", "#2166ac", "#053061"};

struct DotStyle {
  double min_pen_width = 0.5;
  double max_pen_width = 6.0;
  bool show_source = false;
  std::string class_node_shape = "box";
};

// Palette entry for an IOP value, nearest step after clamping to [-1, 1].
std::string_view iop_color(double iop);

// Affine map of `weight` from [min_weight, max_weight] onto the style's pen
// width range. A degenerate range maps to the maximum width.
double pen_width(double weight, double min_weight, double max_weight, const DotStyle& style);

// Graphviz digraph, one statement per line, LF endings. Throws
// std::invalid_argument when `report` lacks a predicate node of `graph`.
std::string export_dot(const DpGraph& graph, const IopReport& report, const DotStyle& style = {});

}  // namespace ifdpg::io

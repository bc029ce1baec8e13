#pragma once

#include "dsanneal/metrics.hpp"

#include <iosfwd>

namespace dsanneal {

struct SvgOptions {
  int width = 720;
  int height = 420;
  bool log_x = false;
  int max_points = 2000;  // per series, evenly thinned
};

/// Line chart of every non-k column of a plot table against k.
void write_svg_chart(std::ostream& out, const PlotTable& table, const SvgOptions& opts = {});

}  // namespace dsanneal

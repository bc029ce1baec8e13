#include "dsanneal/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace dsanneal {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

void write_svg_chart(std::ostream& out, const PlotTable& table, const SvgOptions& opts) {
  const double left = 70, right = 150, top = 40, bottom = 50;
  const double pw = opts.width - left - right, ph = opts.height - top - bottom;
  const std::size_t series = table.columns.size() > 1 ? table.columns.size() - 1 : 0;
  const std::size_t stride = std::max<std::size_t>(1, table.rows.size() / std::max(opts.max_points, 1));

  auto xval = [&](double k) { return opts.log_x ? std::log10(std::max(k, 1.0)) : k; };
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& row : table.rows) {
    xlo = std::min(xlo, xval(row[0]));
    xhi = std::max(xhi, xval(row[0]));
    for (std::size_t c = 1; c < row.size(); ++c)
      if (std::isfinite(row[c])) {
        ylo = std::min(ylo, row[c]);
        yhi = std::max(yhi, row[c]);
      }
  }
  if (!(xhi > xlo)) xhi = xlo + 1;
  if (!std::isfinite(ylo)) ylo = 0, yhi = 1;
  if (!(yhi > ylo)) yhi = ylo + 1;
  auto px = [&](double x) { return left + (xval(x) - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - ylo) / (yhi - ylo)) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\"" << opts.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << escape(table.title) << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = xlo + (xhi - xlo) * t / 4, fy = ylo + (yhi - ylo) * t / 4;
    const double sx = left + pw * t / 4, sy = top + ph * (1 - t / 4.0);
    out << "<text x=\"" << sx << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << fmt(opts.log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << opts.height - 10 << "\" text-anchor=\"middle\">"
      << escape(table.columns.empty() ? "k" : table.columns[0]) << "</text>\n";

  for (std::size_t s = 0; s < series; ++s) {
    const char* color = kPalette[s % (sizeof kPalette / sizeof *kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    for (std::size_t r = 0; r < table.rows.size(); r += stride) {
      const double y = table.rows[r][s + 1];
      if (std::isfinite(y)) out << px(table.rows[r][0]) << ',' << py(y) << ' ';
    }
    out << "\"/>\n";
    const double ly = top + 14 * s + 8;
    out << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 30 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\"/>\n";
    out << "<text x=\"" << left + pw + 34 << "\" y=\"" << ly + 4 << "\">" << escape(table.columns[s + 1])
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace dsanneal

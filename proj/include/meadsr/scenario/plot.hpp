#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "meadsr/scenario/runner.hpp"

namespace meadsr {

namespace detail {

inline std::string svg_num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v)
{
  char buf[32];
  if (v != 0.0 && (std::fabs(v) < 0.01 || std::fabs(v) >= 1e5)) std::snprintf(buf, sizeof buf, "%.2e", v);
  else std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline const char* series_colour(std::size_t i)
{
  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  return colours[i % 5];
}

inline const char* metric_title(Metric m)
{
  switch (m) {
    case Metric::nro: return "NRO";
    case Metric::pdf: return "PDF";
    case Metric::cep: return "CEP (J/packet)";
    case Metric::sdcen: return "SDCEN (J)";
    case Metric::mrer: return "MRER";
  }
  return "?";
}

}  // namespace detail

// Line chart of one figure panel: mean per protocol with +-stddev bars
// (bars are left out when a point has a single sample).
inline std::string render_svg(const FigureData& f)
{
  using detail::svg_num;
  const double W = 640, H = 420, left = 70, right = 150, top = 40, bottom = 55;
  const double pw = W - left - right, ph = H - top - bottom;

  double ylo = INFINITY, yhi = -INFINITY;
  for (const auto& col : f.values) {
    for (const auto& s : col) {
      if (!s.samples) continue;
      const double e = s.samples > 1 ? s.stddev : 0.0;
      ylo = std::min(ylo, s.mean - e);
      yhi = std::max(yhi, s.mean + e);
    }
  }
  if (!std::isfinite(ylo)) ylo = 0, yhi = 1;
  ylo = std::min(ylo, 0.0);
  if (yhi <= ylo) yhi = ylo + 1.0;
  yhi += (yhi - ylo) * 0.05;
  const double xlo = f.xs.empty() ? 0.0 : f.xs.front();
  double xhi = f.xs.empty() ? 1.0 : f.xs.back();
  if (xhi <= xlo) xhi = xlo + 1.0;

  auto px = [&](double x) { return left + (x - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double y) { return top + ph - (y - ylo) / (yhi - ylo) * ph; };

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_num(W) + "\" height=\"" + svg_num(H) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::string title = std::string(detail::metric_title(f.metric)) + " vs " +
                      axis_quantity(parse_axis(f.axis).value_or(SweepAxis::mobility));
  if (f.series != "all") title += " (" + f.series + " speed)";
  o += "<text x=\"" + svg_num(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";

  // axes and grid
  o += "<rect x=\"" + svg_num(left) + "\" y=\"" + svg_num(top) + "\" width=\"" + svg_num(pw) + "\" height=\"" +
       svg_num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = ylo + (yhi - ylo) * i / 5.0;
    const double y = py(v);
    o += "<line x1=\"" + svg_num(left) + "\" x2=\"" + svg_num(left + pw) + "\" y1=\"" + svg_num(y) + "\" y2=\"" +
         svg_num(y) + "\" stroke=\"#ddd\"/>\n";
    o += "<text x=\"" + svg_num(left - 6) + "\" y=\"" + svg_num(y + 4) + "\" text-anchor=\"end\">" +
         detail::tick_label(v) + "</text>\n";
  }
  for (double x : f.xs) {
    o += "<text x=\"" + svg_num(px(x)) + "\" y=\"" + svg_num(top + ph + 18) + "\" text-anchor=\"middle\">" +
         detail::tick_label(x) + "</text>\n";
  }
  o += "<text x=\"" + svg_num(left + pw / 2) + "\" y=\"" + svg_num(H - 12) + "\" text-anchor=\"middle\">" +
       axis_quantity(parse_axis(f.axis).value_or(SweepAxis::mobility)) + "</text>\n";

  for (std::size_t p = 0; p < f.protocols.size(); ++p) {
    const char* colour = detail::series_colour(p);
    std::string points;
    for (std::size_t i = 0; i < f.xs.size(); ++i) {
      const auto& s = f.values[p][i];
      if (!s.samples) continue;
      const double x = px(f.xs[i]), y = py(s.mean);
      points += svg_num(x) + "," + svg_num(y) + " ";
      o += "<circle cx=\"" + svg_num(x) + "\" cy=\"" + svg_num(y) + "\" r=\"3\" fill=\"" + colour + "\"/>\n";
      if (s.samples > 1 && s.stddev > 0) {
        o += "<line x1=\"" + svg_num(x) + "\" x2=\"" + svg_num(x) + "\" y1=\"" + svg_num(py(s.mean - s.stddev)) +
             "\" y2=\"" + svg_num(py(s.mean + s.stddev)) + "\" stroke=\"" + colour + "\"/>\n";
      }
    }
    o += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"2\" points=\"" + points +
         "\"/>\n";
    const double ly = top + 20 + 20.0 * static_cast<double>(p);
    o += "<line x1=\"" + svg_num(left + pw + 15) + "\" x2=\"" + svg_num(left + pw + 40) + "\" y1=\"" + svg_num(ly) +
         "\" y2=\"" + svg_num(ly) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + svg_num(left + pw + 46) + "\" y=\"" + svg_num(ly + 4) + "\">" + f.protocols[p] + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

// Writes charts/<metric>-<axis>[-<series>].svg for every panel in
// dir/results.csv. Returns the number of charts written.
inline std::size_t emit_plots(const std::filesystem::path& dir)
{
  const auto rows = read_results_csv(dir / "results.csv");
  if (rows.empty()) throw std::runtime_error("plot: " + (dir / "results.csv").string() + " has no runs");
  std::filesystem::create_directories(dir / "charts");
  std::size_t n = 0;
  for (const auto& f : figure_data(rows)) {
    std::ofstream out(dir / "charts" / (figure_stem(f) + ".svg"), std::ios::binary);
    out << render_svg(f);
    ++n;
  }
  return n;
}

}  // namespace meadsr

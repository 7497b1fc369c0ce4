#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "shm/aggregation.hpp"

namespace shm {

namespace svg_detail {

inline constexpr double kWidth = 640.0;
inline constexpr double kHeight = 360.0;
inline constexpr double kMarginLeft = 60.0;
inline constexpr double kMarginRight = 20.0;
inline constexpr double kMarginTop = 30.0;
inline constexpr double kMarginBottom = 50.0;

inline double plot_w() { return kWidth - kMarginLeft - kMarginRight; }
inline double plot_h() { return kHeight - kMarginTop - kMarginBottom; }

// Two decimals, locale independent.
inline std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return {buf, r.ptr};
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string open(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + ' ' + num(kHeight) + "\">\n" +
         "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" fill=\"white\"/>\n" + "<text class=\"title\" x=\"" + num(kWidth / 2) +
         "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n";
}

inline std::string axes(const std::string& x_label, const std::string& y_label) {
  const double x0 = kMarginLeft;
  const double y0 = kMarginTop + plot_h();
  std::string out;
  out += "<line class=\"axis\" x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" +
         num(x0 + plot_w()) + "\" y2=\"" + num(y0) + "\" stroke=\"black\"/>\n";
  out += "<line class=\"axis\" x1=\"" + num(x0) + "\" y1=\"" + num(kMarginTop) + "\" x2=\"" +
         num(x0) + "\" y2=\"" + num(y0) + "\" stroke=\"black\"/>\n";
  out += "<text class=\"label\" x=\"" + num(x0 + plot_w() / 2) + "\" y=\"" + num(kHeight - 10) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + escape(x_label) + "</text>\n";
  out += "<text class=\"label\" x=\"14\" y=\"" + num(kMarginTop + plot_h() / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 " +
         num(kMarginTop + plot_h() / 2) + ")\">" + escape(y_label) + "</text>\n";
  return out;
}

inline std::string tick(double x, const std::string& label) {
  const double y0 = kMarginTop + plot_h();
  return "<line class=\"tick\" x1=\"" + num(x) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x) +
         "\" y2=\"" + num(y0 + 5) + "\" stroke=\"black\"/>\n" + "<text class=\"tick-label\" x=\"" +
         num(x) + "\" y=\"" + num(y0 + 18) + "\" text-anchor=\"middle\" font-size=\"10\">" + label +
         "</text>\n";
}

inline std::string pow10_label(double e) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, e, std::chars_format::general);
  return "1e" + std::string(buf, r.ptr);
}

}  // namespace svg_detail

/// Bar chart on a log-x axis, one `<rect class="bar">` per bin. An
/// histogram with no samples renders axes only.
inline std::string plot_histogram_svg(const HazardHistogram& h) {
  using namespace svg_detail;
  std::string out = open(std::string("Hazard histogram (") + std::string(to_string(h.measure())) + ")");
  out += axes(std::string(to_string(h.measure())) + " [m/s^2]", "count");

  const auto& edges = h.edges();
  const double lo = std::log10(edges.front());
  const double hi = std::log10(edges.back());
  auto to_x = [&](double edge) { return kMarginLeft + (std::log10(edge) - lo) / (hi - lo) * plot_w(); };

  for (double e = std::ceil(lo); e <= hi; e += 1.0) out += tick(to_x(std::pow(10.0, e)), pow10_label(e));

  if (h.total_samples() > 0) {
    std::uint64_t peak = 1;
    for (auto c : h.counts()) peak = std::max(peak, c);
    const double base = kMarginTop + plot_h();
    for (std::size_t i = 0; i < h.bin_count(); ++i) {
      const double x = to_x(edges[i]);
      const double w = to_x(edges[i + 1]) - x;
      const double bh = plot_h() * static_cast<double>(h.counts()[i]) / static_cast<double>(peak);
      out += "<rect class=\"bar\" x=\"" + num(x) + "\" y=\"" + num(base - bh) + "\" width=\"" + num(w) +
             "\" height=\"" + num(bh) + "\" fill=\"steelblue\" stroke=\"white\"/>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

/// One polyline per object: hazard value over time on a log-y axis.
/// Non-positive values are clamped to the bottom of the axis.
inline std::string plot_series_svg(const std::vector<PairSeries>& series,
                                   HistogramMeasure measure = HistogramMeasure::m3) {
  using namespace svg_detail;
  static constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                             "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::string out = open(std::string("Hazard over time (") + std::string(to_string(measure)) + ")");
  out += axes("t [s]", std::string("log10 ") + std::string(to_string(measure)) + " [m/s^2]");

  double t_min = 0.0, t_max = 1.0, v_max = 1.0;
  bool any = false;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      const double v = measure == HistogramMeasure::m2 ? p.m2 : p.m3;
      if (!any) t_min = t_max = p.t;
      t_min = std::min(t_min, p.t);
      t_max = std::max(t_max, p.t);
      v_max = std::max(v_max, v);
      any = true;
    }
  }
  if (t_max <= t_min) t_max = t_min + 1.0;
  const double log_lo = -2.0;
  const double log_hi = std::max(std::ceil(std::log10(v_max)), log_lo + 1.0);
  auto to_x = [&](double t) { return kMarginLeft + (t - t_min) / (t_max - t_min) * plot_w(); };
  auto to_y = [&](double v) {
    const double l = v > 0.0 ? std::clamp(std::log10(v), log_lo, log_hi) : log_lo;
    return kMarginTop + plot_h() * (1.0 - (l - log_lo) / (log_hi - log_lo));
  };

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    if (s.points.empty()) continue;
    out += "<polyline class=\"series\" data-object=\"" + escape(s.object_id) + "\" fill=\"none\" stroke=\"" +
           kPalette[i % std::size(kPalette)] + "\" points=\"";
    for (std::size_t k = 0; k < s.points.size(); ++k) {
      const auto& p = s.points[k];
      if (k > 0) out += ' ';
      out += num(to_x(p.t)) + ',' + num(to_y(measure == HistogramMeasure::m2 ? p.m2 : p.m3));
    }
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace shm

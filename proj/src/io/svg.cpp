#include "fraclab/io/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace fraclab::io {

namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 72, kRight = 24, kTop = 40, kBottom = 56;

// Fixed-format numbers keep the output byte-stable.
std::string f3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}
std::string g4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

std::string comment_safe(const std::string& s) {
  std::string out = s;
  for (std::size_t p = out.find("--"); p != std::string::npos; p = out.find("--")) out.replace(p, 2, "- -");
  return out;
}

std::string header(const PlotMeta& meta, double w = kWidth, double h = kHeight) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f3(w) + "\" height=\"" + f3(h) +
         "\" viewBox=\"0 0 " + f3(w) + " " + f3(h) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<!-- config-hash: " + comment_safe(meta.config_hash) + " -->\n";
  out += "<!-- title: " + comment_safe(meta.title) + " -->\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + f3(w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(meta.title) +
         "</text>\n";
  return out;
}

struct Frame {
  double x0, x1, y0, y1;  // data ranges (already log10 where relevant)
  [[nodiscard]] double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  [[nodiscard]] double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

std::string line(double x1, double y1, double x2, double y2, const std::string& style) {
  return "<line x1=\"" + f3(x1) + "\" y1=\"" + f3(y1) + "\" x2=\"" + f3(x2) + "\" y2=\"" + f3(y2) + "\" " + style +
         "/>\n";
}
std::string text(double x, double y, const std::string& s, const char* anchor = "middle") {
  return "<text x=\"" + f3(x) + "\" y=\"" + f3(y) + "\" text-anchor=\"" + anchor + "\">" + escape(s) + "</text>\n";
}

// Box, ticks and labels.  `logx`/`logy` label ticks as powers of ten.
std::string axes(const Frame& fr, bool logx, bool logy, const std::string& xlabel, const std::string& ylabel) {
  std::string out;
  const double L = kLeft, R = kWidth - kRight, T = kTop, B = kHeight - kBottom;
  out += "<rect x=\"" + f3(L) + "\" y=\"" + f3(T) + "\" width=\"" + f3(R - L) + "\" height=\"" + f3(B - T) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  auto ticks = [](double lo, double hi, bool log) {
    std::vector<double> t;
    if (log) {
      const double step = std::max(1.0, std::ceil((hi - lo) / 8.0));
      for (double v = std::ceil(lo); v <= hi + 1e-9; v += step) t.push_back(v);
    } else {
      const double raw = (hi - lo) / 6.0;
      const double mag = std::pow(10.0, std::floor(std::log10(raw)));
      double step = mag;
      for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) { step = m * mag; break; }
      for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(v);
    }
    return t;
  };
  auto label = [](double v, bool log) { return log ? "1e" + std::to_string(static_cast<int>(std::lround(v))) : g4(std::abs(v) < 1e-12 ? 0.0 : v); };
  for (double v : ticks(fr.x0, fr.x1, logx)) {
    const double x = fr.px(v);
    out += line(x, B, x, B + 5, "stroke=\"black\"");
    out += text(x, B + 18, label(v, logx));
  }
  for (double v : ticks(fr.y0, fr.y1, logy)) {
    const double y = fr.py(v);
    out += line(L - 5, y, L, y, "stroke=\"black\"");
    out += text(L - 8, y + 4, label(v, logy), "end");
  }
  out += text((L + R) / 2, kHeight - 14, xlabel);
  out += "<text x=\"16\" y=\"" + f3((T + B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         f3((T + B) / 2) + ")\">" + escape(ylabel) + "</text>\n";
  return out;
}

std::string no_data(const PlotMeta& meta, const std::string& xl, const std::string& yl) {
  std::string out = header(meta);
  out += axes({0, 1, 0, 1}, false, false, xl, yl);
  out += text(kWidth / 2, kHeight / 2, "no data");
  return out + "</svg>\n";
}

void widen(double& lo, double& hi, double pad) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double d = (hi - lo) * pad;
  lo -= d;
  hi += d;
}

// Piecewise-linear approximation of a perceptually ordered palette.
std::string colour(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140},
                                                                {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0) * (stops.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  const double u = t - static_cast<double>(i);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[i][0] + u * (stops[i + 1][0] - stops[i][0]))),
                static_cast<int>(std::lround(stops[i][1] + u * (stops[i + 1][1] - stops[i][1]))),
                static_cast<int>(std::lround(stops[i][2] + u * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

const std::array<const char*, 6> kSeriesColours{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string decay_svg(const DecayReport& report, double reference_slope, const PlotMeta& meta) {
  std::vector<std::pair<double, double>> pts;  // log10 r, log10 E
  std::vector<bool> used;
  for (const auto& l : report.levels)
    if (l.r > 0 && l.error > 0 && std::isfinite(l.error)) {
      pts.emplace_back(std::log10(l.r), std::log10(l.error));
      used.push_back(l.used);
    }
  if (pts.empty()) return no_data(meta, "r", "sup error E(r)");

  Frame fr{pts[0].first, pts[0].first, pts[0].second, pts[0].second};
  for (auto [x, y] : pts) {
    fr.x0 = std::min(fr.x0, x), fr.x1 = std::max(fr.x1, x);
    fr.y0 = std::min(fr.y0, y), fr.y1 = std::max(fr.y1, y);
  }
  widen(fr.x0, fr.x1, 0.05);
  widen(fr.y0, fr.y1, 0.08);

  std::string out = header(meta);
  out += axes(fr, true, true, "r", "sup error E(r)");
  // Reference slope through the last used level (or the last level).
  std::size_t anchor = pts.size() - 1;
  for (std::size_t i = pts.size(); i-- > 0;)
    if (used[i]) { anchor = i; break; }
  auto ref = [&](double x) { return pts[anchor].second + reference_slope * (x - pts[anchor].first); };
  double xa = fr.x0, xb = fr.x1;
  // Clip the line to the frame in y.
  auto clip = [&](double& x, double target) {
    if (reference_slope != 0.0) x = pts[anchor].first + (target - pts[anchor].second) / reference_slope;
  };
  if (ref(xa) < fr.y0) clip(xa, fr.y0);
  if (ref(xa) > fr.y1) clip(xa, fr.y1);
  if (ref(xb) < fr.y0) clip(xb, fr.y0);
  if (ref(xb) > fr.y1) clip(xb, fr.y1);
  out += line(fr.px(xa), fr.py(ref(xa)), fr.px(xb), fr.py(ref(xb)), "stroke=\"#888888\" stroke-dasharray=\"6 4\"");
  if (report.used >= 2) {
    double xs = 1e300, xe = -1e300;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (used[i]) xs = std::min(xs, pts[i].first), xe = std::max(xe, pts[i].first);
    auto fit = [&](double x) { return std::log10(report.prefactor) + report.exponent * x; };
    if (report.prefactor > 0)
      out += line(fr.px(xs), fr.py(fit(xs)), fr.px(xe), fr.py(fit(xe)), "stroke=\"#d62728\"");
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double x = fr.px(pts[i].first), y = fr.py(pts[i].second);
    out += "<circle cx=\"" + f3(x) + "\" cy=\"" + f3(y) + "\" r=\"3.5\" " +
           (used[i] ? "fill=\"#1f77b4\"" : "fill=\"none\" stroke=\"#1f77b4\"") + "/>\n";
  }
  const double lx = kLeft + 12, ly = kTop + 16;
  out += line(lx, ly, lx + 24, ly, "stroke=\"#888888\" stroke-dasharray=\"6 4\"");
  out += text(lx + 30, ly + 4, "reference slope " + g4(reference_slope), "start");
  if (report.used >= 2) {
    out += line(lx, ly + 18, lx + 24, ly + 18, "stroke=\"#d62728\"");
    out += text(lx + 30, ly + 22, "fitted slope " + g4(report.exponent), "start");
  }
  out += text(lx + 30, ly + 40, "open: outside the fit window", "start");
  return out + "</svg>\n";
}

std::string sweep_svg(const std::vector<SweepSeries>& series, const PlotMeta& meta) {
  std::size_t n = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values)
      if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  }
  if (n == 0 || !std::isfinite(lo)) return no_data(meta, "fixture", "quotient Q");
  lo = std::min(lo, 1.0);
  Frame fr{-0.5, static_cast<double>(n) - 0.5, lo, hi};
  widen(fr.y0, fr.y1, 0.08);
  std::string out = header(meta);
  out += axes(fr, false, false, "fixture", "quotient Q");
  out += line(fr.px(fr.x0), fr.py(1.0), fr.px(fr.x1), fr.py(1.0), "stroke=\"#888888\" stroke-dasharray=\"6 4\"");
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* c = kSeriesColours[k % kSeriesColours.size()];
    std::string path;
    for (std::size_t i = 0; i < series[k].values.size(); ++i) {
      const double v = series[k].values[i];
      if (!std::isfinite(v)) continue;
      path += (path.empty() ? "M" : " L") + f3(fr.px(static_cast<double>(i))) + " " + f3(fr.py(v));
      out += "<circle cx=\"" + f3(fr.px(static_cast<double>(i))) + "\" cy=\"" + f3(fr.py(v)) + "\" r=\"3\" fill=\"" +
             c + "\"/>\n";
    }
    if (!path.empty()) out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + c + "\" stroke-width=\"1\"/>\n";
    const double ly = kTop + 16 + 18 * static_cast<double>(k);
    out += line(kWidth - kRight - 150, ly, kWidth - kRight - 126, ly, std::string("stroke=\"") + c + "\"");
    out += text(kWidth - kRight - 120, ly + 4, series[k].label, "start");
  }
  return out + "</svg>\n";
}

std::string heatmap_svg(const ExtensionState& state, const PlotMeta& meta) {
  if (state.x.dim() != 1) throw std::invalid_argument("heatmap_svg: one lateral dimension only");
  const Axis& X = state.x.axis(0);
  const std::size_t j0 = state.zero_row(), nz = state.nz();
  if (X.size() < 2 || nz - j0 < 2 || state.U.empty()) return no_data(meta, "x", "z");
  // Resampled on a fixed raster: graded meshes would otherwise emit one
  // rectangle per node, most of them far below a pixel.
  constexpr std::size_t kCols = 160, kRows = 100;
  Frame fr{X.front(), X.back(), state.z[j0], state.z.back()};
  std::vector<double> raster(kCols * kRows);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t r = 0; r < kRows; ++r)
    for (std::size_t c = 0; c < kCols; ++c) {
      const double x = fr.x0 + (fr.x1 - fr.x0) * (static_cast<double>(c) + 0.5) / kCols;
      const double z = fr.y0 + (fr.y1 - fr.y0) * (static_cast<double>(r) + 0.5) / kRows;
      const double v = state.interpolate(x, 0.0, z);
      raster[r * kCols + c] = v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  const double span = hi > lo ? hi - lo : 1.0;

  // Plot area leaves room for the colour bar on the right.
  const double W = kWidth + 120;
  const double cw = (kWidth - kLeft - kRight) / kCols, ch = (kHeight - kTop - kBottom) / kRows;
  std::string out = header(meta, W, kHeight);
  out += "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t r = 0; r < kRows; ++r)
    for (std::size_t c = 0; c < kCols;) {
      // One rectangle per run of equal colour.
      const std::string fill = colour((raster[r * kCols + c] - lo) / span);
      std::size_t e = c + 1;
      while (e < kCols && colour((raster[r * kCols + e] - lo) / span) == fill) ++e;
      const double x = kLeft + cw * static_cast<double>(c), y = kHeight - kBottom - ch * static_cast<double>(r + 1);
      out += "<rect x=\"" + f3(x) + "\" y=\"" + f3(y) + "\" width=\"" + f3(cw * static_cast<double>(e - c) + 0.05) +
             "\" height=\"" + f3(ch + 0.05) + "\" fill=\"" + fill + "\"/>\n";
      c = e;
    }
  out += "</g>\n";
  out += axes(fr, false, false, "x", "z");
  // Colour bar.
  const double bx = kWidth + 10, bw = 18, bt = kTop, bb = kHeight - kBottom;
  constexpr int kSteps = 64;
  for (int k = 0; k < kSteps; ++k) {
    const double y0 = bb - (bb - bt) * (k + 1) / kSteps, h = (bb - bt) / kSteps;
    out += "<rect x=\"" + f3(bx) + "\" y=\"" + f3(y0) + "\" width=\"" + f3(bw) + "\" height=\"" + f3(h + 0.5) +
           "\" fill=\"" + colour((k + 0.5) / kSteps) + "\"/>\n";
  }
  out += "<rect x=\"" + f3(bx) + "\" y=\"" + f3(bt) + "\" width=\"" + f3(bw) + "\" height=\"" + f3(bb - bt) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = bb - (bb - bt) * k / 4.0;
    out += line(bx + bw, y, bx + bw + 4, y, "stroke=\"black\"");
    out += text(bx + bw + 6, y + 4, g4(lo + span * k / 4.0), "start");
  }
  out += text(bx + bw / 2, bt - 8, "U");
  return out + "</svg>\n";
}

std::size_t emit_plot(const std::string& path, const std::string& svg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_plot: cannot write " + path);
  out << svg;
  if (!out) throw std::runtime_error("emit_plot: write failed for " + path);
  return svg.size();
}

}  // namespace fraclab::io

#include "axnn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "axnn/errors.hpp"

namespace axnn::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range range_of(std::span<const double> v) {
  Range r{0.0, 0.0};
  bool first = true;
  for (double x : v) {
    if (!std::isfinite(x)) continue;
    if (first) {
      r = {x, x};
      first = false;
    }
    r.lo = std::min(r.lo, x);
    r.hi = std::max(r.hi, x);
  }
  if (r.hi - r.lo < 1e-12) {
    r.lo -= 0.5;
    r.hi += 0.5;
  }
  return r;
}

std::string header(std::string_view title) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{3}</text>\n",
      kWidth, kHeight, kWidth / 2, escape(title));
}

std::string axes(const Range& xr, const Range& yr, std::string_view x_label, std::string_view y_label) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  std::string out = fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{3}\" stroke=\"black\"/>\n",
      x0, y0, x1, y1);
  for (int t = 0; t <= 4; ++t) {
    const double f = t / 4.0;
    const double px = x0 + f * (x1 - x0);
    const double py = y0 - f * (y0 - y1);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.3g}</text>\n", px,
                       y0 + 15, xr.lo + f * (xr.hi - xr.lo));
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n", x0 - 5,
                       py + 4, yr.lo + f * (yr.hi - yr.lo));
  }
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                     (x0 + x1) / 2, kHeight - 12, escape(x_label));
  out += fmt::format(
      "<text x=\"14\" y=\"{0:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {0:.1f})\">{1}</text>\n",
      (y0 + y1) / 2, escape(y_label));
  return out;
}

double map(double v, const Range& r, double a, double b) {
  return a + (v - r.lo) / (r.hi - r.lo) * (b - a);
}

// Blue below zero, red above, white at zero.
std::string diverging(double v, double scale) {
  const double t = scale > 0.0 ? std::clamp(v / scale, -1.0, 1.0) : 0.0;
  const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(t))));
  return t >= 0.0 ? fmt::format("rgb(255,{0},{0})", fade) : fmt::format("rgb({0},{0},255)", fade);
}

}  // namespace

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string bar_chart(std::string_view title, std::span<const std::string> labels,
                      std::span<const double> values) {
  if (labels.size() != values.size()) {
    throw ShapeError(fmt::format("bar chart has {} labels for {} values", labels.size(), values.size()));
  }
  const double left = 150.0;
  const double row = 22.0;
  const double height = kTop + row * static_cast<double>(values.size()) + 30.0;
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, std::abs(v));
  if (vmax == 0.0) vmax = 1.0;
  std::string out = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{3}</text>\n",
      kWidth, height, kWidth / 2, escape(title));
  const double span = kWidth - left - 80.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double y = kTop + row * static_cast<double>(i);
    const double w = std::abs(values[i]) / vmax * span;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", left - 6,
                       y + 14, escape(labels[i]));
    out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.2f}\" height=\"{:.1f}\" fill=\"steelblue\"/>\n",
                       left, y + 3, w, row - 6);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{:.4g}</text>\n", left + w + 4, y + 14, values[i]);
  }
  out += "</svg>\n";
  return out;
}

std::string line_chart(std::string_view title, std::string_view x_label, std::string_view y_label,
                       std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw ShapeError(fmt::format("line chart has {} x values and {} y values", xs.size(), ys.size()));
  }
  const Range xr = range_of(xs), yr = range_of(ys);
  std::string out = header(title) + axes(xr, yr, x_label, y_label);
  out += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ' ';
    out += fmt::format("{:.2f},{:.2f}", map(xs[i], xr, kLeft, kWidth - kRight),
                       map(ys[i], yr, kHeight - kBottom, kTop));
  }
  out += "\"/>\n</svg>\n";
  return out;
}

std::string heatmap(std::string_view title, std::string_view x_label, std::string_view y_label,
                    std::span<const double> grid_x, std::span<const double> grid_y, const Matrix& z) {
  if (z.rows() != grid_y.size() || z.cols() != grid_x.size()) {
    throw ShapeError(fmt::format("heatmap values are {} for a {}x{} grid", shape_string(z),
                                 grid_y.size(), grid_x.size()));
  }
  const Range xr = range_of(grid_x), yr = range_of(grid_y);
  double scale = 0.0;
  for (double v : z.values())
    if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
  std::string out = header(title) + axes(xr, yr, x_label, y_label);
  const double cw = (kWidth - kRight - kLeft) / static_cast<double>(std::max<std::size_t>(grid_x.size(), 1));
  const double ch = (kHeight - kBottom - kTop) / static_cast<double>(std::max<std::size_t>(grid_y.size(), 1));
  for (std::size_t iy = 0; iy < z.rows(); ++iy) {
    for (std::size_t ix = 0; ix < z.cols(); ++ix) {
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                         kLeft + cw * static_cast<double>(ix),
                         kHeight - kBottom - ch * static_cast<double>(iy + 1), cw + 0.3, ch + 0.3,
                         diverging(z(iy, ix), scale));
    }
  }
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">range +/-{:.3g}</text>\n",
                     kWidth - kRight, kTop - 6, scale);
  out += "</svg>\n";
  return out;
}

std::string histogram(std::string_view title, std::string_view x_label, std::span<const double> values,
                      std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(hi > lo)) throw InvalidArgumentError("histogram needs bins > 0 and hi > lo");
  std::vector<double> counts(bins, 0.0);
  for (double v : values) {
    if (!std::isfinite(v) || v < lo || v > hi) continue;
    auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    counts[std::min(b, bins - 1)] += 1.0;
  }
  double cmax = 1.0;
  for (double c : counts) cmax = std::max(cmax, c);
  const Range xr{lo, hi}, yr{0.0, cmax};
  std::string out = header(title) + axes(xr, yr, x_label, "count");
  const double bw = (kWidth - kRight - kLeft) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double top = map(counts[b], yr, kHeight - kBottom, kTop);
    out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"steelblue\" stroke=\"white\"/>\n",
                       kLeft + bw * static_cast<double>(b), top, bw, kHeight - kBottom - top);
  }
  out += "</svg>\n";
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << content;
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace axnn::svg

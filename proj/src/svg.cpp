#include "softclik/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "softclik/errors.hpp"

namespace softclik {

namespace {

constexpr int kWidth = 640, kHeight = 420;
constexpr int kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void widen(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

// Round tick spacing to 1/2/5 times a power of ten.
std::vector<double> ticks(const Range& r, int target = 5) {
  const double raw = (r.hi - r.lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0})
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  std::vector<double> out;
  for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 0.5 * step; v += step)
    out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return out;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

}  // namespace

void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series) {
  Range rx, ry;
  for (const auto& s : series) {
    for (double v : s.x) rx.widen(v);
    for (double v : s.y) ry.widen(v);
  }
  rx.pad();
  ry.pad();
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - rx.lo) / (rx.hi - rx.lo) * plot_w; };
  auto py = [&](double v) { return kTop + (ry.hi - v) / (ry.hi - ry.lo) * plot_h; };

  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='"
      << kHeight << "' viewBox='0 0 " << kWidth << " " << kHeight << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << kWidth / 2 << "' y='22' text-anchor='middle' font-size='15' "
         "font-family='sans-serif'>"
      << title << "</text>\n";

  for (double t : ticks(rx)) {
    const double x = px(t);
    out << "<line x1='" << x << "' y1='" << kTop << "' x2='" << x << "' y2='"
        << kHeight - kBottom << "' stroke='#dddddd'/>\n"
        << "<text x='" << x << "' y='" << kHeight - kBottom + 18
        << "' text-anchor='middle' font-size='11' font-family='sans-serif'>" << num(t)
        << "</text>\n";
  }
  for (double t : ticks(ry)) {
    const double y = py(t);
    out << "<line x1='" << kLeft << "' y1='" << y << "' x2='" << kWidth - kRight
        << "' y2='" << y << "' stroke='#dddddd'/>\n"
        << "<text x='" << kLeft - 6 << "' y='" << y + 4
        << "' text-anchor='end' font-size='11' font-family='sans-serif'>" << num(t)
        << "</text>\n";
  }
  out << "<rect x='" << kLeft << "' y='" << kTop << "' width='" << plot_w << "' height='"
      << plot_h << "' fill='none' stroke='black'/>\n"
      << "<text x='" << kLeft + plot_w / 2 << "' y='" << kHeight - 12
      << "' text-anchor='middle' font-size='12' font-family='sans-serif'>" << xlabel
      << "</text>\n"
      << "<text x='16' y='" << kTop + plot_h / 2
      << "' text-anchor='middle' font-size='12' font-family='sans-serif' transform='rotate(-90 "
         "16 "
      << kTop + plot_h / 2 << ")'>" << ylabel << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k)
      if (std::isfinite(s.x[k]) && std::isfinite(s.y[k]))
        out << px(s.x[k]) << "," << py(s.y[k]) << " ";
    out << "'/>\n";
    if (!s.label.empty())
      out << "<text x='" << kWidth - kRight - 8 << "' y='" << kTop + 16 + 16 * i
          << "' text-anchor='end' font-size='11' font-family='sans-serif' fill='" << color
          << "'>" << s.label << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw Error("write failed: " + path);
}

}  // namespace softclik

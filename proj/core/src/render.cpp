#include "lifespec/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace lifespec::render {

std::string render_map(const ClassMap& map, const Palette& palette, int scale) {
  if (scale < 1) throw std::invalid_argument("render scale must be at least 1");
  const auto w = map.sectors_x * scale;
  const auto h = map.sectors_y * scale;
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  const auto header = out.size();
  out.resize(header + static_cast<std::size_t>(w * h));
  char* px = out.data() + header;
  for (std::int64_t sy = 0; sy < map.sectors_y; ++sy) {
    for (int r = 0; r < scale; ++r) {
      for (std::int64_t sx = 0; sx < map.sectors_x; ++sx) {
        const auto value = static_cast<char>(palette[map.at(sx, sy)]);
        px = std::fill_n(px, scale, value);
      }
    }
  }
  return out;
}

namespace {

constexpr double kWidth = 800, kHeight = 600;
constexpr double kLeft = 90, kRight = 770, kTop = 40, kBottom = 540;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct Axes {
  bool linear_x;
  double x_lo, x_hi;  // log10 f, or f when linear
  double y_lo, y_hi;  // log10 S

  double px(double f) const {
    const double v = linear_x ? f : std::log10(f);
    return kLeft + (v - x_lo) / (x_hi - x_lo) * (kRight - kLeft);
  }
  double py(double log10_s) const { return kBottom - (log10_s - y_lo) / (y_hi - y_lo) * (kBottom - kTop); }
};

}  // namespace

std::string render_spectrum(const spectral::SectorSpectrum& s, const std::optional<spectral::PowerLawFit>& fit,
                            const PlotOptions& options) {
  if (s.size() == 0) throw EmptySpectrum("spectrum has no frequency bins");

  double f_max = 1;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  double dc = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto f = s.frequency(i);
    if (f == 0) {
      dc = s.at(i);
      continue;
    }
    f_max = std::max<double>(f_max, f);
    if (s.at(i) > 0) {
      lo = std::min(lo, std::log10(s.at(i)));
      hi = std::max(hi, std::log10(s.at(i)));
    }
  }
  f_max = std::max(f_max, 2.0);
  const double fit_hi = std::min<double>(options.fit_upper, f_max);
  const auto fit_log10 = [&](double f) { return (fit->alpha + fit->beta * std::log(f)) / std::log(10.0); };
  if (fit) {
    for (double f : {1.0, fit_hi}) {
      lo = std::min(lo, fit_log10(f));
      hi = std::max(hi, fit_log10(f));
    }
  }
  if (!std::isfinite(lo)) {
    lo = -12;
    hi = 0;
  }
  Axes ax{options.linear_x, options.linear_x ? 1.0 : 0.0, options.linear_x ? f_max : std::log10(f_max),
          std::floor(lo), std::ceil(hi)};
  if (ax.y_hi <= ax.y_lo) ax.y_hi = ax.y_lo + 1;

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) + "\" fill=\"white\"/>\n";
  svg += "<rect id=\"frame\" x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kRight - kLeft) +
         "\" height=\"" + num(kBottom - kTop) + "\" fill=\"none\" stroke=\"black\"/>\n";

  // Decade ticks on the power axis; decade or linear ticks on frequency.
  svg += "<g id=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double d = ax.y_lo; d <= ax.y_hi; d += 1) {
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(ax.py(d) + 4) + "\" text-anchor=\"end\">1e" +
           std::to_string(static_cast<long>(d)) + "</text>\n";
  }
  if (options.linear_x) {
    for (int k = 0; k <= 4; ++k) {
      const double f = 1 + (f_max - 1) * k / 4;
      svg += "<text x=\"" + num(ax.px(f)) + "\" y=\"" + num(kBottom + 16) + "\" text-anchor=\"middle\">" +
             std::to_string(std::lround(f)) + "</text>\n";
    }
  } else {
    for (double f = 1; f <= f_max; f *= 10) {
      svg += "<text x=\"" + num(ax.px(f)) + "\" y=\"" + num(kBottom + 16) + "\" text-anchor=\"middle\">" +
             std::to_string(std::lround(f)) + "</text>\n";
    }
  }
  svg += "</g>\n";
  svg += "<text x=\"" + num((kLeft + kRight) / 2) + "\" y=\"" + num(kHeight - 20) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">f</text>\n";
  svg += "<text x=\"20\" y=\"" + num((kTop + kBottom) / 2) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">S(f)</text>\n";
  svg += "<text id=\"dc\" x=\"" + num(kRight - 4) + "\" y=\"" + num(kTop + 16) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">S(0) = " + sci(dc) + "</text>\n";

  svg += "<polyline id=\"spectrum\" fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
  bool first = true;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto f = s.frequency(i);
    if (f == 0 || !(s.at(i) > 0)) continue;
    if (!first) svg += ' ';
    first = false;
    svg += num(ax.px(f)) + "," + num(ax.py(std::log10(s.at(i))));
  }
  svg += "\"/>\n";

  if (fit) {
    svg += "<polyline id=\"fit\" fill=\"none\" stroke=\"red\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\" points=\"";
    if (options.linear_x) {
      for (double f = 1; f <= fit_hi; f += 1) {
        if (f > 1) svg += ' ';
        svg += num(ax.px(f)) + "," + num(ax.py(fit_log10(f)));
      }
    } else {
      svg += num(ax.px(1)) + "," + num(ax.py(fit_log10(1))) + " " + num(ax.px(fit_hi)) + "," +
             num(ax.py(fit_log10(fit_hi)));
    }
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace lifespec::render

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <regex>

#include "golden_fixtures.hpp"
#include "lifespec/render.hpp"
#include "support.hpp"

using namespace lifespec;
using namespace lifespec::render;

namespace {

ClassMap map_of(std::int64_t w, std::int64_t h, std::vector<SectorClass> classes) {
  ClassMap m;
  m.sectors_x = w;
  m.sectors_y = h;
  for (auto c : classes) {
    Verdict v;
    v.cls = c;
    m.verdicts.push_back(v);
    ++m.counts[static_cast<std::size_t>(c)];
  }
  return m;
}

// Compares against tests/golden/<name>; LIFESPEC_UPDATE_GOLDEN=1 rewrites it.
void check_golden(const std::string& name, const std::string& bytes) {
  const auto path = testsupport::golden_dir() / name;
  if (std::getenv("LIFESPEC_UPDATE_GOLDEN")) write_file(path, bytes);
  REQUIRE(std::filesystem::exists(path));
  CHECK(read_file(path) == bytes);
}

std::vector<std::pair<double, double>> polyline(const std::string& svg, const std::string& id) {
  const std::regex re("id=\"" + id + "\"[^>]*points=\"([^\"]*)\"");
  std::smatch m;
  if (!std::regex_search(svg, m, re)) return {};
  std::vector<std::pair<double, double>> pts;
  std::istringstream in(m[1].str());
  std::string tok;
  while (in >> tok) {
    const auto comma = tok.find(',');
    pts.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
  }
  return pts;
}

}  // namespace

TEST_CASE("map pixels follow the palette") {
  const auto one = render_map(map_of(1, 1, {SectorClass::PowerLaw}));
  CHECK(one == std::string("P5\n1 1\n255\n") + '\0');

  const auto two = render_map(map_of(2, 1, {SectorClass::Null, SectorClass::WhiteNoise}));
  CHECK(two == "P5\n2 1\n255\n\xE6\xFF");

  const auto dc = map_of(1, 1, {SectorClass::DcOnly});
  CHECK(render_map(dc).back() == '\xE6');
  CHECK(render_map(dc, Palette::distinct_dc()).back() == '\xC8');
  CHECK_THROWS(render_map(dc, {}, 0));
}

TEST_CASE("map size and raster positions") {
  const auto m = goldens::class_map();
  for (int scale : {1, 3, 8}) {
    const auto img = render_map(m, {}, scale);
    const std::string header = "P5\n" + std::to_string(m.sectors_x * scale) + " " +
                               std::to_string(m.sectors_y * scale) + "\n255\n";
    REQUIRE(img.size() == header.size() + static_cast<std::size_t>(m.sectors_x * scale * m.sectors_y * scale));
    CHECK(img.rfind(header, 0) == 0);
    const auto width = m.sectors_x * scale;
    for (std::int64_t sy = 0; sy < m.sectors_y; ++sy)
      for (std::int64_t sx = 0; sx < m.sectors_x; ++sx)
        for (int k : {0, scale - 1}) {
          const auto px = header.size() + static_cast<std::size_t>((sy * scale + k) * width + sx * scale + k);
          CHECK(static_cast<std::uint8_t>(img[px]) == Palette::standard()[m.at(sx, sy)]);
        }
  }
}

TEST_CASE("map goldens") {
  const auto m = goldens::class_map();
  check_golden("class_map_x1.pgm", render_map(m));
  check_golden("class_map_x4.pgm", render_map(m, {}, 4));
  check_golden("class_map_distinct_dc_x4.pgm", render_map(m, Palette::distinct_dc(), 4));
}

TEST_CASE("power-law plot: data and fit coincide on a straight line") {
  const auto s = goldens::power_law_spectrum();
  const auto fit = spectral::fit_power_law(s, 1, 100);
  const auto svg = render_spectrum(s, fit);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("version=\"1.1\"") != std::string::npos);
  CHECK(svg.find("width=\"800\" height=\"600\"") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);

  const auto data = polyline(svg, "spectrum");
  const auto line = polyline(svg, "fit");
  REQUIRE(data.size() == s.size() - 1);
  REQUIRE(line.size() == 2);
  // Every data point lies on the segment through the fit's end points.
  const auto [x0, y0] = line[0];
  const auto [x1, y1] = line[1];
  for (const auto& [x, y] : data) {
    if (x > x1 + 0.01) continue;
    CHECK(std::abs(y0 + (y1 - y0) * (x - x0) / (x1 - x0) - y) < 0.02);
  }
  check_golden("power_law.svg", svg);

  PlotOptions linear;
  linear.linear_x = true;
  const auto lin = render_spectrum(s, fit, linear);
  CHECK(polyline(lin, "fit").size() == 100);
  check_golden("power_law_linear.svg", lin);
}

TEST_CASE("dc-only plot has an annotation and an empty polyline") {
  const auto s = goldens::dc_only_spectrum();
  const auto svg = render_spectrum(s, std::nullopt);
  CHECK(svg.find("id=\"dc\"") != std::string::npos);
  CHECK(svg.find("S(0) = 1.000e-04") != std::string::npos);
  CHECK(svg.find("id=\"spectrum\" fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"\"") != std::string::npos);
  CHECK(svg.find("id=\"fit\"") == std::string::npos);
  check_golden("dc_only.svg", svg);

  spectral::SectorSpectrum empty;
  CHECK_THROWS_AS(render_spectrum(empty, std::nullopt), EmptySpectrum);
}

TEST_CASE("tallest plotted sample is the spectrum's strongest bin") {
  const auto s = goldens::power_law_spectrum();
  auto bumped = s;
  bumped.power[37] = 10;
  const auto pts = polyline(render_spectrum(bumped, std::nullopt), "spectrum");
  // SVG y grows downward; point k is bin k + 1.
  const auto top = std::min_element(pts.begin(), pts.end(), [](auto a, auto b) { return a.second < b.second; });
  CHECK(top - pts.begin() + 1 == 37);
}

TEST_CASE("rendering is deterministic") {
  const auto s = goldens::power_law_spectrum();
  const auto fit = spectral::fit_power_law(s, 1, 100);
  CHECK(render_spectrum(s, fit) == render_spectrum(s, fit));
  CHECK(render_map(goldens::class_map(), {}, 2) == render_map(goldens::class_map(), {}, 2));
}

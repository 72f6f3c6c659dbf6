#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace geoagent;
using test_support::collection_of;
using test_support::fresh_dir;
using test_support::square;

namespace {

FeatureCollection classed_polygons(int classes) {
  FeatureCollection fc;
  for (int i = 0; i < classes; ++i) {
    Feature f;
    f.geometry = Geometry::polygon(square(i * 2.0, 0, i * 2.0 + 1.5, 1.5));
    f.attributes["class"] = static_cast<double>(i);
    fc.features.push_back(std::move(f));
  }
  normalize(fc);
  return fc;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++n;
    pos += needle.size();
  }
  return n;
}

}  // namespace

TEST_CASE("a five-class map carries five legend entries and the fixed elements") {
  auto m = render_map(classed_polygons(5), MapStyle{});
  REQUIRE(count_occurrences(m.svg, "class=\"legend-entry\"") == 5);
  REQUIRE(m.svg.find("id=\"legend\"") != std::string::npos);
  REQUIRE(m.svg.find("id=\"north-arrow\"") != std::string::npos);
  REQUIRE(m.svg.find("id=\"scale-bar\"") != std::string::npos);
  REQUIRE(m.svg.find("id=\"graticule\"") == std::string::npos);  // off by default
}

TEST_CASE("disabled toggles leave no trace in the document") {
  MapStyle style;
  style.legend = false;
  style.north_arrow = false;
  style.scale_bar = false;
  style.grid = false;
  auto m = render_map(classed_polygons(2), style);
  REQUIRE(m.svg.find("id=\"legend\"") == std::string::npos);
  REQUIRE(m.svg.find("id=\"north-arrow\"") == std::string::npos);
  REQUIRE(m.svg.find("id=\"scale-bar\"") == std::string::npos);
  REQUIRE(m.svg.find("id=\"graticule\"") == std::string::npos);
}

TEST_CASE("graticule appears when requested") {
  MapStyle style;
  style.grid = true;
  auto m = render_map(classed_polygons(2), style);
  REQUIRE(m.svg.find("id=\"graticule\"") != std::string::npos);
}

TEST_CASE("rendering is deterministic") {
  auto a = render_map(classed_polygons(4), MapStyle{});
  auto b = render_map(classed_polygons(4), MapStyle{});
  REQUIRE(a.svg == b.svg);
  REQUIRE(a.rgba == b.rgba);
}

TEST_CASE("the scale bar label and pixel span agree with the fitted scale") {
  auto fc = classed_polygons(3);
  auto m = render_map(fc, MapStyle{});
  auto grab = [&](const std::string& attr) {
    std::size_t p = m.svg.find(attr + "=\"");
    REQUIRE(p != std::string::npos);
    p += attr.size() + 2;
    std::size_t q = m.svg.find('"', p);
    return std::stod(m.svg.substr(p, q - p));
  };
  double units = grab("data-units");
  double px = grab("data-px");
  // recompute the fit: margin 5%, aspect preserved
  Box b = bounds(fc);
  MapStyle style;
  double scale = std::min((style.width * 0.9) / b.width(), (style.height * 0.9) / b.height());
  REQUIRE(px / units == Catch::Approx(scale).margin(0.01));
  // 1/2/5 ladder
  double mag = std::pow(10.0, std::floor(std::log10(units)));
  double mantissa = units / mag;
  bool round = std::abs(mantissa - 1) < 1e-9 || std::abs(mantissa - 2) < 1e-9 ||
               std::abs(mantissa - 5) < 1e-9;
  REQUIRE(round);
}

TEST_CASE("point features project inside the margin box") {
  FeatureCollection fc;
  for (double x : {0.0, 3.0, 10.0})
    fc.features.push_back({Geometry::point({x, x * 0.5}), {}});
  normalize(fc);
  MapStyle style;
  auto m = render_map(fc, style);
  std::size_t pos = 0;
  int found = 0;
  while ((pos = m.svg.find("<circle cx=\"", pos)) != std::string::npos) {
    pos += 12;
    std::size_t q = m.svg.find('"', pos);
    double cx = std::stod(m.svg.substr(pos, q - pos));
    std::size_t cy_pos = m.svg.find("cy=\"", q) + 4;
    std::size_t cy_end = m.svg.find('"', cy_pos);
    double cy = std::stod(m.svg.substr(cy_pos, cy_end - cy_pos));
    REQUIRE(cx >= style.width * 0.05 - 1e-6);
    REQUIRE(cx <= style.width * 0.95 + 1e-6);
    REQUIRE(cy >= style.height * 0.05 - 1e-6);
    REQUIRE(cy <= style.height * 0.95 + 1e-6);
    ++found;
  }
  REQUIRE(found == 3);
}

TEST_CASE("palette colors cycle when classes exceed the palette") {
  auto m = render_map(classed_polygons(14), MapStyle{});
  REQUIRE(count_occurrences(m.svg, "class=\"legend-entry\"") == 14);
  MapStyle style;
  // class 12 wraps onto palette entry 0
  REQUIRE(count_occurrences(m.svg, style.palette[0]) >= 2);
}

TEST_CASE("features without the class attribute share one default class") {
  FeatureCollection fc;
  fc.features.push_back({Geometry::polygon(square(0, 0, 1, 1)), {}});
  fc.features.push_back({Geometry::polygon(square(2, 0, 3, 1)), {}});
  normalize(fc);
  auto m = render_map(fc, MapStyle{});
  REQUIRE(count_occurrences(m.svg, "class=\"legend-entry\"") == 1);
}

TEST_CASE("empty input and tiny canvases are rejected") {
  FeatureCollection empty;
  REQUIRE_THROWS_AS(render_map(empty, MapStyle{}), EmptyInput);
  MapStyle tiny;
  tiny.width = 32;
  REQUIRE_THROWS_AS(render_map(classed_polygons(1), tiny), ConfigError);
}

TEST_CASE("write_map produces an SVG and a decodable PNG pair") {
  std::string dir = fresh_dir("map");
  auto artifacts = write_map(classed_polygons(3), MapStyle{}, dir + "/visual_map.png");
  REQUIRE(artifacts.size() == 2);
  REQUIRE(std::filesystem::exists(dir + "/visual_map.svg"));
  REQUIRE(std::filesystem::exists(dir + "/visual_map.png"));
  std::string png = io_detail::slurp(dir + "/visual_map.png");
  REQUIRE(png.size() > 100);
  REQUIRE(png.compare(0, 8, "\x89PNG\r\n\x1a\n") == 0);
  REQUIRE(detect_kind(dir + "/visual_map.png") == Kind::Image);
  REQUIRE(detect_kind(dir + "/visual_map.svg") == Kind::Image);
}

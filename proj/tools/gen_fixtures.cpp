// Regenerates the bundled datasets under data_use/: the per-case analysis
// layers (planar meters), the raster scene, and the provider fixtures
// (POI table, road lines, gazetteer). Run from the repository root:
//
//   gen_fixtures [root=data_use]
//
// Output is deterministic; rerunning produces byte-identical files.

#include <cstdio>
#include <string>
#include <vector>

#include "geoagent/geoagent.hpp"

using namespace geoagent;

namespace {

FeatureCollection points(const std::vector<std::pair<Vec2, std::string>>& pts) {
  FeatureCollection fc;
  for (const auto& [p, name] : pts) {
    Feature f;
    f.geometry = Geometry::point(p);
    if (!name.empty()) f.attributes["name"] = name;
    fc.features.push_back(std::move(f));
  }
  normalize(fc);
  return fc;
}

FeatureCollection polygon_fc(const Ring& outer) {
  Polygon p;
  p.outer = outer;
  FeatureCollection fc;
  fc.features.push_back({Geometry::polygon(p), {}});
  normalize(fc);
  return fc;
}

// five diagonal landcover stripes with slight per-pixel variation
RasterGrid make_scene(int n, double cell, Vec2 origin) {
  const double base[5][3] = {{20, 40, 30},
                             {90, 110, 100},
                             {160, 170, 150},
                             {210, 200, 190},
                             {250, 240, 235}};
  RasterGrid g;
  g.width = n;
  g.height = n;
  g.cell_size = cell;
  g.origin = origin;
  g.nodata = -9999;
  g.bands.assign(3, std::vector<double>(static_cast<std::size_t>(n) * n));
  int stripe_w = (2 * n + 4) / 5;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      int zone = std::min((r + c) / stripe_w, 4);
      double jitter = static_cast<double>((r * 31 + c * 17) % 5) - 2.0;
      for (int b = 0; b < 3; ++b)
        g.bands[b][static_cast<std::size_t>(r) * n + c] = base[zone][b] + jitter;
    }
  }
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  std::string root = argc > 1 ? argv[1] : "data_use";

  // case2: facility siting layers (planar meters)
  write_vector(points({{{4200, 5100}, "Chuxiong Rd"},
                       {{4900, 4600}, "Lakefront"},
                       {{5500, 5200}, "Central"},
                       {{6100, 4500}, "East Gate"},
                       {{6800, 5300}, "University"},
                       {{5200, 6100}, "North Cross"},
                       {{4500, 6700}, "Canal"},
                       {{7200, 6200}, "Terminal"}}),
               root + "/case2/subway_station.shp");
  write_vector(points({{{4350, 5000}, "Merchant A"},
                       {{5050, 4750}, "Merchant B"},
                       {{5600, 5550}, "Merchant C"},
                       {{6250, 4700}, "Merchant D"},
                       {{6650, 5150}, "Merchant E"},
                       {{5300, 5900}, "Merchant F"},
                       {{4700, 6500}, "Merchant G"},
                       {{7000, 6000}, "Merchant H"},
                       {{3600, 3900}, "Merchant I"},
                       {{8200, 7400}, "Merchant J"}}),
               root + "/case2/supermarket.shp");
  write_vector(points({{{14500, 15200}, "Steelworks"},
                       {{15800, 14100}, "Chemical"},
                       {{16500, 16800}, "Cement"}}),
               root + "/case2/factory.shp");

  // case3: spatial-query layers (same frame, hotel layer added)
  write_vector(points({{{4200, 5100}, "Chuxiong Rd"},
                       {{4900, 4600}, "Lakefront"},
                       {{5500, 5200}, "Central"},
                       {{6100, 4500}, "East Gate"},
                       {{6800, 5300}, "University"},
                       {{5200, 6100}, "North Cross"},
                       {{4500, 6700}, "Canal"},
                       {{7200, 6200}, "Terminal"}}),
               root + "/case3/subway_station.shp");
  write_vector(points({{{4350, 5000}, "Merchant A"},
                       {{5050, 4750}, "Merchant B"},
                       {{5600, 5550}, "Merchant C"},
                       {{6250, 4700}, "Merchant D"},
                       {{6650, 5150}, "Merchant E"},
                       {{5300, 5900}, "Merchant F"},
                       {{4700, 6500}, "Merchant G"},
                       {{7000, 6000}, "Merchant H"},
                       {{3600, 3900}, "Merchant I"},
                       {{8200, 7400}, "Merchant J"}}),
               root + "/case3/supermarket.shp");
  write_vector(points({{{4300, 5050}, "Hotel Jianghan"},
                       {{4980, 4700}, "Hotel Lakeside"},
                       {{5450, 5300}, "Hotel Centre"},
                       {{6150, 4620}, "Hotel Eastern"},
                       {{6750, 5250}, "Hotel Campus"},
                       {{5150, 6050}, "Hotel Northern"},
                       {{4600, 6600}, "Hotel Canalview"},
                       {{7150, 6100}, "Hotel Terminus"},
                       {{6300, 4900}, "Hotel Garden"},
                       {{3200, 8800}, "Hotel Remote"},
                       {{9100, 2300}, "Hotel Southbank"},
                       {{12600, 12900}, "Hotel Industrial"}}),
               root + "/case3/hotel.shp");

  // case4: raster scene and the urban boundary used to crop it
  write_raster(make_scene(60, 30.0, {0, 1800}), root + "/case4/data.tif");
  write_vector(polygon_fc({{150, 180},
                           {1620, 150},
                           {1680, 900},
                           {1500, 1650},
                           {300, 1620},
                           {120, 840},
                           {150, 180}}),
               root + "/case4/WuhanMainCountry.shp");

  // provider fixtures
  PoiTable poi = {
      {"Quanjude Roast Duck", "restaurants", 116.310, 39.880, "Beijing"},
      {"Donglaishun", "restaurants", 116.410, 39.910, "Beijing"},
      {"Bianyifang", "restaurants", 116.430, 39.890, "Beijing"},
      {"Noodle House 9", "restaurants", 116.270, 39.830, "Beijing"},
      {"Grand Hyatt", "hotels", 116.400, 39.900, "Beijing"},
      {"Peninsula", "hotels", 116.440, 39.940, "Beijing"},
      {"Red Lantern Inn", "hotels", 116.330, 39.970, "Beijing"},
      {"West Hills Lodge", "hotels", 116.180, 39.990, "Beijing"},
      {"Summer Palace Teahouse", "parks", 116.270, 39.999, "Beijing"},
      {"Yellow Crane Cafe", "restaurants", 114.300, 30.550, "Wuhan"},
      {"East Lake Hotel", "hotels", 114.360, 30.560, "Wuhan"},
      {"Optics Valley Mall", "shopping", 114.400, 30.500, "Wuhan"},
  };
  write_poi_csv(poi, root + "/providers/poi.csv");

  // road lines around the Porto bounding box used by the download case
  FeatureCollection roads;
  auto add_road = [&](std::vector<Vec2> pts, const std::string& name) {
    Feature f;
    f.geometry = Geometry::line_string(std::move(pts));
    f.attributes["name"] = name;
    roads.features.push_back(std::move(f));
  };
  add_road({{-8.72, 41.14}, {-8.61, 41.15}, {-8.50, 41.16}}, "A28");
  add_road({{-8.65, 41.05}, {-8.64, 41.12}, {-8.62, 41.20}}, "N13");
  add_road({{-8.68, 41.10}, {-8.60, 41.09}, {-8.53, 41.07}}, "VCI");
  add_road({{-8.59, 41.12}, {-8.55, 41.17}}, "Rua Central");
  add_road({{-8.30, 41.30}, {-8.20, 41.35}}, "Braga Rd");
  normalize(roads);
  write_vector(roads, root + "/providers/roads.shp");

  write_raster(make_scene(24, 30.0, {0, 720}), root + "/providers/rs_scene.tif");

  std::string gaz;
  gaz += "# name<TAB>x<TAB>y — analysis entries share the planar frame of the case layers\n";
  gaz += "Hubei University\t6200\t4800\n";
  gaz += "Subway Stations\t5500\t5200\n";
  gaz += "Wuhan\t114.305\t30.593\n";
  gaz += "Beijing\t116.407\t39.904\n";
  io_detail::spit(root + "/providers/gazetteer.tsv", gaz);

  std::printf("fixtures written under %s\n", root.c_str());
  return 0;
}

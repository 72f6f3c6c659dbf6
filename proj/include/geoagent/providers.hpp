#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "geoagent/geometry.hpp"
#include "geoagent/raster.hpp"
#include "geoagent/vector_io.hpp"

// Data-collection services behind the download tools. Each contract has a
// fixture-backed mock (the test default, fully deterministic) and a live
// HTTP implementation speaking GET + JSON against a configured base URL.

namespace geoagent {

struct PoiProvider {
  virtual ~PoiProvider() = default;
  virtual PoiTable by_keywords(const std::string& city,
                               const std::vector<std::string>& categories) = 0;
  virtual PoiTable by_polygon(const Ring& lonlat_ring) = 0;
};

struct RoadResult {
  FeatureCollection roads;
  double elapsed_seconds = 0;
};

struct RoadProvider {
  virtual ~RoadProvider() = default;
  virtual RoadResult in_bbox(double x1, double x2, double y1, double y2) = 0;
};

struct RasterScene {
  std::string name;
  RasterGrid grid;
};

struct RsProvider {
  virtual ~RsProvider() = default;
  virtual std::vector<RasterScene> fetch(const std::string& province,
                                         const std::string& city,
                                         const std::string& start,
                                         const std::string& end) = 0;
};

struct Geocoder {
  virtual ~Geocoder() = default;
  virtual std::optional<Vec2> lookup(const std::string& name) = 0;  // lon, lat
};

struct ProviderBinding {
  std::shared_ptr<PoiProvider> poi;
  std::shared_ptr<RoadProvider> roads;
  std::shared_ptr<RsProvider> rs;
  std::shared_ptr<Geocoder> geocoder;
};

// ---------------------------------------------------------------------------
// fixture-backed mocks

namespace provider_detail {

inline std::string lower(const std::string& s) {
  std::string out;
  for (unsigned char c : s) out += static_cast<char>(std::tolower(c));
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace provider_detail

class MockPoiProvider : public PoiProvider {
 public:
  explicit MockPoiProvider(PoiTable fixture) : all_(std::move(fixture)) {}

  PoiTable by_keywords(const std::string& city,
                       const std::vector<std::string>& categories) override {
    PoiTable out;
    std::string want_city = provider_detail::lower(provider_detail::trim(city));
    for (const auto& r : all_) {
      if (provider_detail::lower(r.city) != want_city) continue;
      if (!categories.empty()) {
        bool match = false;
        for (const auto& c : categories)
          if (provider_detail::lower(provider_detail::trim(c)) ==
              provider_detail::lower(r.category))
            match = true;
        if (!match) continue;
      }
      out.push_back(r);
    }
    return out;
  }

  PoiTable by_polygon(const Ring& lonlat_ring) override {
    Polygon poly;
    poly.outer = lonlat_ring;
    normalize(poly);
    PoiTable out;
    for (const auto& r : all_)
      if (point_in_polygon({r.lon, r.lat}, poly)) out.push_back(r);
    return out;
  }

 private:
  PoiTable all_;
};

class MockRoadProvider : public RoadProvider {
 public:
  // The reported elapsed time is part of the fixture so scripted runs stay
  // byte-for-byte reproducible.
  explicit MockRoadProvider(FeatureCollection roads,
                            double fixed_elapsed = 34.473637342453)
      : roads_(std::move(roads)), elapsed_(fixed_elapsed) {}

  RoadResult in_bbox(double x1, double x2, double y1, double y2) override {
    FeatureCollection out;
    for (const auto& f : roads_.features) {
      std::vector<std::vector<Vec2>> kept;
      for (const auto& line : f.geometry.lines) {
        std::vector<Vec2> run;
        for (std::size_t i = 0; i + 1 < line.size(); ++i) {
          auto clipped = clip_segment(line[i], line[i + 1], x1, x2, y1, y2);
          if (!clipped) {
            if (run.size() >= 2) kept.push_back(run);
            run.clear();
            continue;
          }
          auto [a, b] = *clipped;
          if (run.empty() || !(run.back() == a)) {
            if (run.size() >= 2) kept.push_back(run);
            run = {a};
          }
          run.push_back(b);
        }
        if (run.size() >= 2) kept.push_back(run);
      }
      if (kept.empty()) continue;
      Feature nf;
      nf.geometry = kept.size() == 1 ? Geometry::line_string(std::move(kept[0]))
                                     : Geometry::multi_line_string(std::move(kept));
      nf.attributes = f.attributes;
      out.features.push_back(std::move(nf));
    }
    out.recompute_dimension();
    return {std::move(out), elapsed_};
  }

 private:
  // Liang-Barsky segment/box clip
  static std::optional<std::pair<Vec2, Vec2>> clip_segment(Vec2 a, Vec2 b, double x1,
                                                           double x2, double y1,
                                                           double y2) {
    double t0 = 0, t1 = 1;
    double dx = b.x - a.x, dy = b.y - a.y;
    auto pass = [&](double p, double q) {
      if (p == 0) return q >= 0;
      double r = q / p;
      if (p < 0) {
        if (r > t1) return false;
        if (r > t0) t0 = r;
      } else {
        if (r < t0) return false;
        if (r < t1) t1 = r;
      }
      return true;
    };
    if (!pass(-dx, a.x - x1)) return std::nullopt;
    if (!pass(dx, x2 - a.x)) return std::nullopt;
    if (!pass(-dy, a.y - y1)) return std::nullopt;
    if (!pass(dy, y2 - a.y)) return std::nullopt;
    if (t0 > t1) return std::nullopt;
    return std::pair<Vec2, Vec2>{{a.x + t0 * dx, a.y + t0 * dy},
                                 {a.x + t1 * dx, a.y + t1 * dy}};
  }

  FeatureCollection roads_;
  double elapsed_;
};

class MockRsProvider : public RsProvider {
 public:
  explicit MockRsProvider(RasterGrid scene) : scene_(std::move(scene)) {}

  std::vector<RasterScene> fetch(const std::string&, const std::string& city,
                                 const std::string& start,
                                 const std::string& end) override {
    return {{city + "_" + start + "_" + end + ".tif", scene_}};
  }

 private:
  RasterGrid scene_;
};

// Gazetteer file: one "name<TAB>lon<TAB>lat" entry per line, '#' comments;
// duplicate names resolve to the first occurrence.
class FileGazetteer : public Geocoder {
 public:
  explicit FileGazetteer(const std::string& path) {
    std::istringstream in(io_detail::slurp(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::size_t t1 = line.find('\t');
      std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
      if (t2 == std::string::npos)
        throw FormatError("gazetteer line " + std::to_string(lineno) +
                          ": expected name<TAB>lon<TAB>lat");
      std::string name = line.substr(0, t1);
      double lon = io_detail::parse_strict_double(line.substr(t1 + 1, t2 - t1 - 1),
                                                  "lon", lineno);
      double lat = io_detail::parse_strict_double(line.substr(t2 + 1), "lat", lineno);
      entries_.emplace_back(name, Vec2{lon, lat});
    }
  }

  std::optional<Vec2> lookup(const std::string& name) override {
    for (const auto& [n, v] : entries_)
      if (n == name) return v;
    std::string want = provider_detail::lower(name);
    for (const auto& [n, v] : entries_)
      if (provider_detail::lower(n) == want) return v;
    return std::nullopt;
  }

 private:
  std::vector<std::pair<std::string, Vec2>> entries_;
};

// The test-default binding: every provider backed by fixture files under
// {data_use_root}/providers/.
inline ProviderBinding make_mock_providers(const std::string& data_use_root) {
  auto require = [&](const std::string& rel, const char* name) {
    std::string p = data_use_root + "/providers/" + rel;
    if (!std::filesystem::exists(p)) throw MissingFixture(name);
    return p;
  };
  ProviderBinding b;
  b.poi = std::make_shared<MockPoiProvider>(read_poi_csv(require("poi.csv", "poi")));
  b.roads = std::make_shared<MockRoadProvider>(
      read_vector(require("roads.shp", "road_network")));
  b.rs = std::make_shared<MockRsProvider>(
      read_raster(require("rs_scene.tif", "rs_scene")));
  b.geocoder = std::make_shared<FileGazetteer>(require("gazetteer.tsv", "gazetteer"));
  return b;
}

// ---------------------------------------------------------------------------
// live HTTP implementations

namespace provider_detail {

inline nlohmann::json http_get_json(const std::string& base_url,
                                    const std::string& path,
                                    const httplib::Params& params) {
  httplib::Client client(base_url);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);
  auto res = client.Get(path, params, httplib::Headers{});
  if (!res) throw ProviderError("request to " + base_url + path + " failed");
  if (res->status != 200)
    throw ProviderError("request to " + base_url + path + " returned " +
                        std::to_string(res->status));
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProviderError(std::string("bad provider response: ") + e.what());
  }
}

}  // namespace provider_detail

class HttpPoiProvider : public PoiProvider {
 public:
  explicit HttpPoiProvider(std::string base_url) : base_(std::move(base_url)) {}

  PoiTable by_keywords(const std::string& city,
                       const std::vector<std::string>& categories) override {
    std::string kw;
    for (std::size_t i = 0; i < categories.size(); ++i) {
      if (i) kw += ',';
      kw += categories[i];
    }
    auto doc = provider_detail::http_get_json(base_, "/poi",
                                              {{"city", city}, {"keywords", kw}});
    return parse_rows(doc);
  }

  PoiTable by_polygon(const Ring& ring) override {
    std::string poly;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      if (i) poly += '|';
      poly += io_detail::fmt_coord(ring[i].y) + "," + io_detail::fmt_coord(ring[i].x);
    }
    auto doc = provider_detail::http_get_json(base_, "/poi_polygon", {{"polygon", poly}});
    return parse_rows(doc);
  }

 private:
  static PoiTable parse_rows(const nlohmann::json& doc) {
    if (!doc.is_array()) throw ProviderError("expected a JSON array of POI records");
    PoiTable out;
    for (const auto& r : doc) {
      PoiRow row;
      row.name = r.value("name", "");
      row.category = r.value("category", "");
      row.lon = r.value("lon", 0.0);
      row.lat = r.value("lat", 0.0);
      row.city = r.value("city", "");
      out.push_back(std::move(row));
    }
    return out;
  }

  std::string base_;
};

class HttpRoadProvider : public RoadProvider {
 public:
  explicit HttpRoadProvider(std::string base_url) : base_(std::move(base_url)) {}

  RoadResult in_bbox(double x1, double x2, double y1, double y2) override {
    auto t0 = std::chrono::steady_clock::now();
    auto doc = provider_detail::http_get_json(
        base_, "/roads",
        {{"bbox", io_detail::fmt_coord(x1) + "," + io_detail::fmt_coord(x2) + "," +
                      io_detail::fmt_coord(y1) + "," + io_detail::fmt_coord(y2)}});
    if (!doc.is_array()) throw ProviderError("expected a JSON array of line records");
    FeatureCollection fc;
    for (const auto& rec : doc) {
      if (!rec.contains("coordinates") || !rec["coordinates"].is_array()) continue;
      std::vector<Vec2> pts;
      for (const auto& c : rec["coordinates"])
        pts.push_back({c[0].get<double>(), c[1].get<double>()});
      if (pts.size() < 2) continue;
      Feature f;
      f.geometry = Geometry::line_string(std::move(pts));
      if (rec.contains("name") && rec["name"].is_string())
        f.attributes["name"] = rec["name"].get<std::string>();
      fc.features.push_back(std::move(f));
    }
    fc.recompute_dimension();
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(fc), dt};
  }

 private:
  std::string base_;
};

class HttpRsProvider : public RsProvider {
 public:
  explicit HttpRsProvider(std::string base_url) : base_(std::move(base_url)) {}

  std::vector<RasterScene> fetch(const std::string& province, const std::string& city,
                                 const std::string& start,
                                 const std::string& end) override {
    auto doc = provider_detail::http_get_json(base_, "/rs_image",
                                              {{"province", province},
                                               {"city", city},
                                               {"start", start},
                                               {"end", end}});
    if (!doc.is_array()) throw ProviderError("expected a JSON array of scenes");
    std::vector<RasterScene> out;
    httplib::Client client(base_);
    for (const auto& rec : doc) {
      std::string name = rec.value("name", "scene.tif");
      std::string href = rec.value("href", "");
      auto res = client.Get(href);
      if (!res || res->status != 200)
        throw ProviderError("scene download failed: " + href);
      out.push_back({name, raster_detail::parse_band(res->body, href)});
    }
    return out;
  }

 private:
  std::string base_;
};

class HttpGeocoder : public Geocoder {
 public:
  explicit HttpGeocoder(std::string base_url) : base_(std::move(base_url)) {}

  std::optional<Vec2> lookup(const std::string& name) override {
    auto doc = provider_detail::http_get_json(base_, "/geocode", {{"name", name}});
    if (!doc.is_object() || !doc.contains("lon") || !doc.contains("lat"))
      return std::nullopt;
    return Vec2{doc["lon"].get<double>(), doc["lat"].get<double>()};
  }

 private:
  std::string base_;
};

}  // namespace geoagent

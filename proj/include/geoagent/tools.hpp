#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoagent/map_render.hpp"
#include "geoagent/ops.hpp"
#include "geoagent/providers.hpp"
#include "geoagent/raster_ops.hpp"
#include "geoagent/vector_io.hpp"

// The GIS tool pool. Tools are string-in / observation-out; dispatch is
// total: unknown names and every tool failure come back as canonical
// observation strings, never as exceptions. The exception wording keeps the
// original oddities ("or and whether", "is exists") unless the corrected
// flag is set, because the agent reasons over these exact strings.

namespace geoagent {

struct Observation {
  std::string text;
  std::vector<DatasetPath> artifacts;
  bool ok = false;
};

namespace templates {

inline constexpr const char* kGenericVerbatim =
    "An exception occurred using this tool, I need to check whether the input "
    "file exists, or whether the input contains excessive content, or whether "
    "the input format is correct, or whether the input file order is correct, "
    "or and whether I have selected the wrong tool";

inline constexpr const char* kGenericCorrected =
    "An exception occurred using this tool, I need to check whether the input "
    "file exists, whether the input contains excessive content, whether the "
    "input format is correct, whether the input file order is correct, and "
    "whether I have selected the wrong tool";

inline constexpr const char* kMappingVerbatim =
    "An exception occurred using this tool, I need to check whether the input "
    "file is a vector file, whether the input file is exists, and whether I "
    "have selected the wrong tool";

inline constexpr const char* kMappingCorrected =
    "An exception occurred using this tool, I need to check whether the input "
    "file is a vector file, whether the input file exists, and whether I have "
    "selected the wrong tool";

inline std::string invalid_tool(const std::string& name) {
  return name + " is not a valid tool, try another one.";
}

}  // namespace templates

enum class FailureTemplate { Generic, Mapping };

struct RegistryOptions {
  std::string output_root = "./data_output";
  std::string data_use_root = "./data_use";
  bool verbatim_templates = true;
  bool include_extras = false;   // adds Union and Composite_Bands
  bool auto_close_poi_ring = false;
  int buffer_segments = kDefaultCircleSegments;
  ClassificationParams classify;
  // loader dataset locations relative to data_use_root; replay fixtures
  // override these per case
  std::map<std::string, std::string> loader_paths = {
      {"subway", "case2/subway_station.shp"},
      {"hotel", "case3/hotel.shp"},
      {"factory", "case2/factory.shp"},
      {"supermarket", "case2/supermarket.shp"},
      {"rs_image", "case4/data.tif"},
      {"wuhan_main_urban", "case4/WuhanMainCountry.shp"},
  };
};

class ToolRegistry;

struct ToolContext {
  RegistryOptions opts;
  ProviderBinding providers;

  std::string failure_text(FailureTemplate t) const {
    if (t == FailureTemplate::Mapping)
      return opts.verbatim_templates ? templates::kMappingVerbatim
                                     : templates::kMappingCorrected;
    return opts.verbatim_templates ? templates::kGenericVerbatim
                                   : templates::kGenericCorrected;
  }

  // Map the conventional "./data_use" / "./data_output" prefixes onto the
  // configured roots so trace-literal inputs work against any layout.
  std::string resolve_path(const std::string& raw) const {
    auto swap_prefix = [&](const std::string& prefix,
                           const std::string& root) -> std::optional<std::string> {
      if (raw.rfind(prefix + "/", 0) == 0)
        return root + raw.substr(prefix.size());
      if (raw == prefix) return root;
      return std::nullopt;
    };
    if (auto p = swap_prefix("./data_use", opts.data_use_root)) return *p;
    if (auto p = swap_prefix("data_use", opts.data_use_root)) return *p;
    if (auto p = swap_prefix("./data_output", opts.output_root)) return *p;
    if (auto p = swap_prefix("data_output", opts.output_root)) return *p;
    return raw;
  }

  std::string out_path(const std::string& rel) const {
    return opts.output_root + "/" + rel;
  }

  std::string loader_path(const std::string& key) const {
    return opts.data_use_root + "/" + opts.loader_paths.at(key);
  }
};

struct ToolSpec {
  std::string name;
  std::string description;
  FailureTemplate failure = FailureTemplate::Generic;
  std::function<Observation(const std::string&, const ToolContext&)> handler;
};

namespace tool_detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

inline std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline double parse_number(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);  // throws on garbage
  if (pos != s.size()) throw FormatError("trailing characters in number: " + s);
  return v;
}

inline std::string one_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

inline std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

// Collision rule: overwrite, archiving whatever was there under a
// timestamp suffix.
inline void archive_existing(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return;
  auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();
  std::filesystem::rename(path, path + "." + std::to_string(ns) + ".bak", ec);
}

inline DatasetPath emit_vector(const FeatureCollection& fc, const std::string& path) {
  archive_existing(path);
  DatasetPath dp = write_vector(fc, path);
  record_in_manifest(path, Kind::Vector);
  return dp;
}

inline DatasetPath emit_raster(const RasterGrid& g, const std::string& path) {
  archive_existing(path);
  DatasetPath dp = write_raster(g, path);
  record_in_manifest(path, Kind::Raster);
  return dp;
}

inline FeatureCollection load_vector(const ToolContext& ctx, const std::string& raw) {
  std::string path = ctx.resolve_path(raw);
  if (detect_kind(path) != Kind::Vector)
    throw NotVector(path + " is not a vector dataset");
  return read_vector(path);
}

inline bool valid_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  int month = (s[5] - '0') * 10 + (s[6] - '0');
  int day = (s[8] - '0') * 10 + (s[9] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

}  // namespace tool_detail

// ---------------------------------------------------------------------------

class ToolRegistry {
 public:
  ToolRegistry(ToolContext ctx) : ctx_(std::move(ctx)) {}

  void add(ToolSpec spec) {
    index_[spec.name] = tools_.size();
    tools_.push_back(std::move(spec));
  }

  const std::vector<ToolSpec>& tools() const { return tools_; }
  const ToolContext& context() const { return ctx_; }

  const ToolSpec* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &tools_[it->second];
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& t : tools_) out.push_back(t.name);
    return out;
  }

 private:
  ToolContext ctx_;
  std::vector<ToolSpec> tools_;
  std::map<std::string, std::size_t> index_;
};

// Protection mechanism: every string pair maps to an observation.
inline Observation dispatch(const ToolRegistry& registry, const std::string& action,
                            const std::string& action_input) {
  const ToolSpec* tool = registry.find(tool_detail::trim(action));
  if (!tool) {
    return {templates::invalid_tool(tool_detail::trim(action)), {}, false};
  }
  std::string input = tool_detail::strip_quotes(tool_detail::trim(action_input));
  try {
    return tool->handler(input, registry.context());
  } catch (...) {
    return {registry.context().failure_text(tool->failure), {}, false};
  }
}

// Pre-judgment for Clip: the boundary dataset must have geometric dimension
// at least the global dataset's, and be at least a line.
inline void validate_clip_input(const std::string& global_path,
                                const std::string& boundary_path) {
  FeatureCollection a = read_vector(global_path);
  FeatureCollection b = read_vector(boundary_path);
  if (b.dimension < 1 || b.dimension < a.dimension)
    throw DimensionRuleViolation("clip boundary dimension " +
                                 std::to_string(b.dimension) +
                                 " below global dataset dimension " +
                                 std::to_string(a.dimension));
}

// ---------------------------------------------------------------------------
// registry construction

namespace tool_detail {

inline ToolSpec make_loader(const std::string& name, const std::string& key,
                            const std::string& label,
                            const std::string& return_label) {
  ToolSpec t;
  t.name = name;
  t.description = "Load the dataset of " + label + ", return the file path of " +
                  return_label + ".";
  t.handler = [key, label](const std::string&, const ToolContext& ctx) -> Observation {
    std::string path = ctx.loader_path(key);
    if (!std::filesystem::exists(path))
      throw FileNotFound("loader fixture missing: " + path);
    Kind kind = detect_kind(path);
    return {"I obtain the dataset of " + label + ", it is stored in " + path,
            {{path, kind}},
            true};
  };
  return t;
}

}  // namespace tool_detail

inline ToolRegistry register_default_pool(ProviderBinding providers,
                                          RegistryOptions opts = {}) {
  ToolContext ctx{std::move(opts), std::move(providers)};
  for (const auto& [key, rel] : ctx.opts.loader_paths) {
    std::string path = ctx.opts.data_use_root + "/" + rel;
    if (!std::filesystem::exists(path)) throw MissingFixture(key);
  }
  if (!ctx.providers.poi || !ctx.providers.roads || !ctx.providers.rs ||
      !ctx.providers.geocoder)
    throw ConfigError("all four providers must be bound");

  ToolRegistry reg(std::move(ctx));
  using tool_detail::split_commas;
  using tool_detail::trim;

  // -- data collection ------------------------------------------------------

  reg.add({"Get_POI_By_Keywords",
           "Use this tool when you need to get POI data for a Chinese city by "
           "POI keywords. The input of this tool must at least provide the city "
           "name, after which the user can provide multiple POI categories or "
           "none. City names and each POI category are separated by commas.",
           FailureTemplate::Generic,
           [](const std::string& input, const ToolContext& ctx) -> Observation {
             auto parts = split_commas(input);
             if (parts.empty() || parts[0].empty())
               throw FormatError("city name required");
             std::string city = parts[0];
             std::vector<std::string> categories(parts.begin() + 1, parts.end());
             categories.erase(
                 std::remove_if(categories.begin(), categories.end(),
                                [](const std::string& s) { return s.empty(); }),
                 categories.end());
             PoiTable rows = ctx.providers.poi->by_keywords(city, categories);
             std::string path = ctx.out_path("POI/POI.csv");
             tool_detail::archive_existing(path);
             DatasetPath dp = write_poi_csv(rows, path);
             record_in_manifest(path, Kind::Table);
             return {"In this step I obtain POIs that meet the requirements, it "
                     "is stored at " + path,
                     {dp},
                     true};
           }});

  reg.add({"Get_POI_By_Polygon",
           "Use this tool when you need to get POI data within a polygonal "
           "area. Input a longitude-latitude coordinate pair representing the "
           "area of the polygon. Longitude and latitude are separated by \",\", "
           "and the coordinate pairs are separated by \"|\". The first and last "
           "coordinate pairs need to be the same.",
           FailureTemplate::Generic,
           [](const std::string& input, const ToolContext& ctx) -> Observation {
             std::vector<std::pair<double, double>> pairs;  // lat, lon
             std::string cur;
             std::vector<std::string> chunks;
             for (char c : input) {
               if (c == '|') {
                 chunks.push_back(cur);
                 cur.clear();
               } else {
                 cur += c;
               }
             }
             chunks.push_back(cur);
             for (const auto& chunk : chunks) {
               auto nums = split_commas(chunk);
               if (nums.size() != 2) throw FormatError("coordinate pair must be lat,lon");
               pairs.emplace_back(tool_detail::parse_number(nums[0]),
                                  tool_detail::parse_number(nums[1]));
             }
             if (pairs.size() < 4) throw FormatError("polygon needs at least 4 pairs");
             if (pairs.front() != pairs.back()) {
               if (ctx.opts.auto_close_poi_ring)
                 pairs.push_back(pairs.front());
               else
                 throw FormatError("first and last coordinate pairs must match");
             }
             Ring ring;
             for (auto [lat, lon] : pairs) ring.push_back({lon, lat});
             PoiTable rows = ctx.providers.poi->by_polygon(ring);
             std::string path = ctx.out_path("POI/POI.csv");
             tool_detail::archive_existing(path);
             DatasetPath dp = write_poi_csv(rows, path);
             record_in_manifest(path, Kind::Table);
             return {"In this step I obtain POIs that meet the requirements, it "
                     "is stored at " + path,
                     {dp},
                     true};
           }});

  reg.add({"Get_Road_Network_By_Rectangle",
           "Use this tool when you need to get road network data within a "
           "rectangular area. Input a comma-separated string of four-tuples, "
           "representing two longitude ranges x1, x2 enclosed in a rectangle, "
           "and two latitude ranges y1, y2 enclosed in a rectangle.",
           FailureTemplate::Generic,
           [](const std::string& input, const ToolContext& ctx) -> Observation {
             auto parts = split_commas(input);
             if (parts.size() != 4) throw FormatError("expected x1,x2,y1,y2");
             double x1 = tool_detail::parse_number(parts[0]);
             double x2 = tool_detail::parse_number(parts[1]);
             double y1 = tool_detail::parse_number(parts[2]);
             double y2 = tool_detail::parse_number(parts[3]);
             if (x1 >= x2 || y1 >= y2) throw FormatError("ranges must be ascending");
             RoadResult result = ctx.providers.roads->in_bbox(x1, x2, y1, y2);
             std::string path = ctx.out_path("road_network");
             DatasetPath dp = tool_detail::emit_vector(result.roads, path);
             char tbuf[64];
             std::snprintf(tbuf, sizeof tbuf, "%.12f", result.elapsed_seconds);
             return {"Spend time: " + std::string(tbuf) +
                     " seconds. In this step I obtain Road Networks that meet "
                     "the requirements, it is stored at " + path,
                     {dp},
                     true};
           }});

  reg.add({"Get_Remote_Sensing_Image",
           "Input parameters, in order of province, city, start time and end "
           "time, in comma-separated strings",
           FailureTemplate::Generic,
           [](const std::string& input, const ToolContext& ctx) -> Observation {
             auto parts = split_commas(input);
             if (parts.size() != 4)
               throw FormatError("expected province, city, start, end");
             const std::string& start = parts[2];
             const std::string& end = parts[3];
             if (!tool_detail::valid_iso_date(start) || !tool_detail::valid_iso_date(end))
               throw FormatError("dates must be YYYY-MM-DD");
             if (end < start) throw FormatError("start must not be after end");
             auto scenes = ctx.providers.rs->fetch(parts[0], parts[1], start, end);
             std::string dir = ctx.out_path("rs_image");
             std::vector<DatasetPath> artifacts;
             for (const auto& scene : scenes)
               artifacts.push_back(
                   tool_detail::emit_raster(scene.grid, dir + "/" + scene.name));
             return {"Remote sensing data has been downloaded and saved in " + dir +
                     ". My work is done!",
                     artifacts,
                     true};
           }});

  // -- data loaders ---------------------------------------------------------

  reg.add(tool_detail::make_loader("Load_Subway_Data", "subway", "subway stations",
                                   "subway stations"));
  reg.add(tool_detail::make_loader("Load_Hotel_Data", "hotel", "hotels", "hotels"));
  reg.add(tool_detail::make_loader("Load_Factory_Data", "factory", "factories",
                                   "factories"));
  reg.add(tool_detail::make_loader("Load_Supermarket_Data", "supermarket",
                                   "supermarkets", "supermarkets"));
  reg.add(tool_detail::make_loader("Load_Remote_Sensing_Image_Data", "rs_image",
                                   "remote sensing image", "RS image"));
  reg.add(tool_detail::make_loader("Load_Wuhan_Main_Urban_Data", "wuhan_main_urban",
                                   "Wuhan main urban", "Wuhan main urban"));

  // -- spatial analysis -----------------------------------------------------

  reg.add({"Obtain location",
           "Input a place name, return its location. Use it when you need to "
           "find unknown locations.",
           FailureTemplate::Generic,
           [](const std::string& input, const ToolContext& ctx) -> Observation {
             std::string name = trim(input);
             if (name.empty()) throw FormatError("place name required");
             auto loc = ctx.providers.geocoder->lookup(name);
             if (!loc) throw FileNotFound("unknown place: " + name);
             FeatureCollection fc;
             Feature f;
             f.geometry = Geometry::point(*loc);
             f.attributes["name"] = name;
             fc.features.push_back(std::move(f));
             fc.recompute_dimension();
             std::string path = ctx.out_path(name + ".shp");
             DatasetPath dp = tool_detail::emit_vector(fc, path);
             return {"I obtain the location of " + name + ", it is stored in " + path,
                     {dp},
                     true};
           }});

  reg.add({"Buffer",
           "Input \"shapefile, number\", return the neighboring range around "
           "this shapefile.",
           FailureTemplate::Generic,
           [](const std::string& input, const ToolContext& ctx) -> Observation {
             std::size_t comma = input.rfind(',');
             if (comma == std::string::npos)
               throw FormatError("expected \"shapefile, number\"");
             std::string raw_path = trim(input.substr(0, comma));
             std::string dist_text = trim(input.substr(comma + 1));
             double distance = tool_detail::parse_number(dist_text);
             std::string path = ctx.resolve_path(raw_path);
             FeatureCollection fc = tool_detail::load_vector(ctx, raw_path);
             if (distance <= 0) throw NonPositiveDistance("distance must be positive");
             FeatureCollection buffered =
                 buffer(fc, distance, ctx.opts.buffer_segments);
             std::string rendered = tool_detail::one_decimal(distance);
             std::string out = ctx.out_path(tool_detail::stem_of(path) +
                                            "_neighborhood_" + rendered + ".shp");
             DatasetPath dp = tool_detail::emit_vector(buffered, out);
             return {"I obtain the neighboring area with a distance of " + rendered +
                     " for " + path + ", it is stored in " + out,
                     {dp},
                     true};
           }});

  reg.add({"Intersect",
           "Input two shapefiles, retain objects meanwhile within (inside) both "
           "shapefiles.",
           FailureTemplate::Generic,
           [](const std::string& input, const ToolContext& ctx) -> Observation {
             auto parts = split_commas(input);
             if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
               throw FormatError("expected two shapefile paths");
             std::string pa = ctx.resolve_path(parts[0]);
             std::string pb = ctx.resolve_path(parts[1]);
             FeatureCollection a = tool_detail::load_vector(ctx, parts[0]);
             FeatureCollection b = tool_detail::load_vector(ctx, parts[1]);
             FeatureCollection result = intersect(a, b);
             std::string out = ctx.out_path("intersect.shp");
             DatasetPath dp = tool_detail::emit_vector(result, out);
             return {"In this step I obtain objects that meanwhile locate within " +
                     pb + "," + pa + ", it is stored in " + out,
                     {dp},
                     true};
           }});

  reg.add({"Clip",
           "Input two shapefiles \"A, B\", return (keep) objects of A only "
           "within (inside) the range of B.",
           FailureTemplate::Generic,
           [](const std::string& input, const ToolContext& ctx) -> Observation {
             auto parts = split_commas(input);
             if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
               throw FormatError("expected two shapefile paths");
             std::string pa = ctx.resolve_path(parts[0]);
             std::string pb = ctx.resolve_path(parts[1]);
             validate_clip_input(pa, pb);
             FeatureCollection a = tool_detail::load_vector(ctx, parts[0]);
             FeatureCollection b = tool_detail::load_vector(ctx, parts[1]);
             FeatureCollection result = clip(a, b);
             std::string out = ctx.out_path("clip.shp");
             DatasetPath dp = tool_detail::emit_vector(result, out);
             return {"In this step I obtain objects of " + pa + " within " + pb +
                     ", it is stored in " + out,
                     {dp},
                     true};
           }});

  reg.add({"Erase",
           "Input two shapefiles \"A, B\", remove (erase) objects of A only "
           "within (inside) the range of B.",
           FailureTemplate::Generic,
           [](const std::string& input, const ToolContext& ctx) -> Observation {
             auto parts = split_commas(input);
             if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
               throw FormatError("expected two shapefile paths");
             std::string pa = ctx.resolve_path(parts[0]);
             std::string pb = ctx.resolve_path(parts[1]);
             FeatureCollection a = tool_detail::load_vector(ctx, parts[0]);
             FeatureCollection b = tool_detail::load_vector(ctx, parts[1]);
             FeatureCollection result = erase(a, b);
             std::string out = ctx.out_path("erase.shp");
             DatasetPath dp = tool_detail::emit_vector(result, out);
             return {"In this step I obtain objects that locate within " + pa +
                     " but not in " + pb + ", it is stored in " + out,
                     {dp},
                     true};
           }});

  // -- RS image processing --------------------------------------------------

  reg.add({"Crop_Remote_Sensing_Image",
           "Use this tool when you need to crop an image of Remote Sensing. "
           "Input a tif file storing remote sensing and a shapefile storing the "
           "cropping area, which are separated by a comma.",
           FailureTemplate::Generic,
           [](const std::string& input, const ToolContext& ctx) -> Observation {
             auto parts = split_commas(input);
             if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
               throw FormatError("expected raster path, mask path");
             std::string praster = ctx.resolve_path(parts[0]);
             if (detect_kind(praster) != Kind::Raster)
               throw FormatError(praster + " is not a raster dataset");
             RasterGrid grid = read_raster(praster);
             FeatureCollection mask = tool_detail::load_vector(ctx, parts[1]);
             RasterGrid cropped = crop_raster(grid, mask);
             std::string out = ctx.out_path("RS_crop.tif");
             DatasetPath dp = tool_detail::emit_raster(cropped, out);
             return {"In this step I obtain cropped RS image that meet the "
                     "requirements, it is stored at " + out,
                     {dp},
                     true};
           }});

  reg.add({"LandUse_Classification",
           "Use this tool when you need to perform land use classification on "
           "remote sensing imagery in a tif file. Input a tif file storing "
           "remote sensing image, and output a raster file (tif format) after "
           "land use classification.",
           FailureTemplate::Generic,
           [](const std::string& input, const ToolContext& ctx) -> Observation {
             std::string path = ctx.resolve_path(trim(input));
             if (detect_kind(path) != Kind::Raster)
               throw FormatError(path + " is not a raster dataset");
             RasterGrid grid = read_raster(path);
             RasterGrid labels = classify_landuse(grid, ctx.opts.classify);
             std::string out = ctx.out_path("lucc.tif");
             DatasetPath dp = tool_detail::emit_raster(labels, out);
             return {"In this step I obtain RS image after land use "
                     "classification, it is stored in a raster file at " + out,
                     {dp},
                     true};
           }});

  reg.add({"Raster_to_Vector",
           "Use this tool when you need to convert raster files (e.g., tif "
           "format) to vector files. Input a raster file, and output the "
           "storage path of the converted vector file.",
           FailureTemplate::Generic,
           [](const std::string& input, const ToolContext& ctx) -> Observation {
             std::string path = ctx.resolve_path(trim(input));
             if (detect_kind(path) != Kind::Raster)
               throw FormatError(path + " is not a raster dataset");
             RasterGrid grid = read_raster(path);
             FeatureCollection vec = raster_to_vector(grid);
             std::string out = ctx.out_path("polyone.shp");
             DatasetPath dp = tool_detail::emit_vector(vec, out);
             return {"In this step I obtain the converted vector file (shapefile "
                     "format) based on the raster file, it is stored at " + out,
                     {dp},
                     true};
           }});

  // -- cartography ----------------------------------------------------------

  reg.add({"Mapping",
           "Use this tool when you need to draw a map using geographic data "
           "stored in vector files (e.g., shapefiles). The input must be a "
           "vector file that needs to draw a map. The tool outputs the storage "
           "path of the drawn map.",
           FailureTemplate::Mapping,
           [](const std::string& input, const ToolContext& ctx) -> Observation {
             std::string path = ctx.resolve_path(trim(input));
             if (detect_kind(path) != Kind::Vector)
               throw NotVector(path + " is not a vector dataset");
             FeatureCollection fc = read_vector(path);
             std::string out = ctx.out_path("visual_map.png");
             tool_detail::archive_existing(out);
             MapStyle style;
             auto artifacts = write_map(fc, style, out);
             for (const auto& a : artifacts) record_in_manifest(a.path, a.kind);
             return {"In this step I obtain the visual map that meet the "
                     "requirements, it is stored at " + out,
                     artifacts,
                     true};
           }});

  // -- optional extras ------------------------------------------------------

  if (reg.context().opts.include_extras) {
    reg.add({"Union",
             "Input two shapefiles \"A, B\", merge (union) the ranges of both "
             "shapefiles into one.",
             FailureTemplate::Generic,
             [](const std::string& input, const ToolContext& ctx) -> Observation {
               auto parts = split_commas(input);
               if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
                 throw FormatError("expected two shapefile paths");
               std::string pa = ctx.resolve_path(parts[0]);
               std::string pb = ctx.resolve_path(parts[1]);
               FeatureCollection a = tool_detail::load_vector(ctx, parts[0]);
               FeatureCollection b = tool_detail::load_vector(ctx, parts[1]);
               FeatureCollection result = union_op(a, b);
               std::string out = ctx.out_path("union.shp");
               DatasetPath dp = tool_detail::emit_vector(result, out);
               return {"In this step I obtain objects that locate within " + pa +
                       " or " + pb + ", it is stored in " + out,
                       {dp},
                       true};
             }});

    reg.add({"Composite_Bands",
             "Input multiple raster files separated by commas, stack all of "
             "their bands into one raster file.",
             FailureTemplate::Generic,
             [](const std::string& input, const ToolContext& ctx) -> Observation {
               auto parts = split_commas(input);
               std::vector<RasterGrid> grids;
               for (const auto& p : parts) {
                 if (p.empty()) throw FormatError("empty raster path");
                 grids.push_back(read_raster(ctx.resolve_path(p)));
               }
               RasterGrid stacked = composite_bands(grids);
               std::string out = ctx.out_path("composite.tif");
               DatasetPath dp = tool_detail::emit_raster(stacked, out);
               return {"In this step I obtain the composite raster, it is stored "
                       "at " + out,
                       {dp},
                       true};
             }});
  }

  return reg;
}

}  // namespace geoagent

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoagent/geometry.hpp"

// On-disk formats. Vector datasets are a GeoJSON-compatible subset (RFC 7946
// FeatureCollection with the six standard geometry types; foreign members
// rejected). Writers are byte-deterministic: fixed key order, coordinates at
// nine decimal digits. File kind is inferred from content, never from the
// extension — trace paths keep their ".shp"/".tif" spellings while holding
// these formats, and a manifest.json per directory records the kind of each
// file written there.

namespace geoagent {

enum class Kind { Vector, Raster, Table, Image };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Vector: return "Vector";
    case Kind::Raster: return "Raster";
    case Kind::Table: return "Table";
    case Kind::Image: return "Image";
  }
  return "Vector";
}

struct DatasetPath {
  std::string path;
  Kind kind = Kind::Vector;
};

struct PoiRow {
  std::string name;
  std::string category;
  double lon = 0;
  double lat = 0;
  std::string city;
};

using PoiTable = std::vector<PoiRow>;

inline constexpr const char* kPoiHeader = "name,category,lon,lat,city";

// ---------------------------------------------------------------------------
// number / string formatting shared by all writers

namespace io_detail {

inline std::string fmt_coord(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

// attribute numbers: integers print bare, everything else at 9 digits
inline std::string fmt_number(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    return buf;
  }
  return fmt_coord(v);
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

inline std::string slurp(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec) || std::filesystem::is_directory(path, ec))
    throw FileNotFound("no such file: " + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::string& path, const std::string& data) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << data;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// vector writer

namespace io_detail {

inline void write_positions(std::string& out, const std::vector<Vec2>& pts) {
  out += '[';
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ',';
    out += '[';
    out += fmt_coord(pts[i].x);
    out += ',';
    out += fmt_coord(pts[i].y);
    out += ']';
  }
  out += ']';
}

inline void write_polygon_coords(std::string& out, const Polygon& p) {
  out += '[';
  write_positions(out, p.outer);
  for (const auto& h : p.holes) {
    out += ',';
    write_positions(out, h);
  }
  out += ']';
}

inline void write_geometry(std::string& out, const Geometry& g) {
  out += "{\"type\":\"";
  out += geometry_type_name(g.type);
  out += "\",\"coordinates\":";
  switch (g.type) {
    case Geometry::Type::Point:
      out += '[';
      out += fmt_coord(g.points[0].x);
      out += ',';
      out += fmt_coord(g.points[0].y);
      out += ']';
      break;
    case Geometry::Type::MultiPoint:
      write_positions(out, g.points);
      break;
    case Geometry::Type::LineString:
      write_positions(out, g.lines[0]);
      break;
    case Geometry::Type::MultiLineString:
      out += '[';
      for (std::size_t i = 0; i < g.lines.size(); ++i) {
        if (i) out += ',';
        write_positions(out, g.lines[i]);
      }
      out += ']';
      break;
    case Geometry::Type::Polygon:
      write_polygon_coords(out, g.polygons[0]);
      break;
    case Geometry::Type::MultiPolygon:
      out += '[';
      for (std::size_t i = 0; i < g.polygons.size(); ++i) {
        if (i) out += ',';
        write_polygon_coords(out, g.polygons[i]);
      }
      out += ']';
      break;
  }
  out += '}';
}

}  // namespace io_detail

inline std::string serialize_vector(const FeatureCollection& fc) {
  std::string out = "{\"type\":\"FeatureCollection\",\"features\":[";
  if (fc.features.empty()) {
    out += "]}\n";
    return out;
  }
  out += '\n';
  for (std::size_t i = 0; i < fc.features.size(); ++i) {
    const Feature& f = fc.features[i];
    out += "{\"type\":\"Feature\",\"geometry\":";
    io_detail::write_geometry(out, f.geometry);
    out += ",\"properties\":{";
    bool first = true;
    for (const auto& [k, v] : f.attributes) {  // std::map: keys sorted
      if (!first) out += ',';
      first = false;
      out += '"';
      out += io_detail::json_escape(k);
      out += "\":";
      if (std::holds_alternative<std::string>(v)) {
        out += '"';
        out += io_detail::json_escape(std::get<std::string>(v));
        out += '"';
      } else {
        out += io_detail::fmt_number(std::get<double>(v));
      }
    }
    out += "}}";
    if (i + 1 < fc.features.size()) out += ',';
    out += '\n';
  }
  out += "]}\n";
  return out;
}

inline DatasetPath write_vector(const FeatureCollection& fc, const std::string& path) {
  io_detail::spit(path, serialize_vector(fc));
  return {path, Kind::Vector};
}

// ---------------------------------------------------------------------------
// vector reader

namespace io_detail {

using json = nlohmann::json;

inline void require_keys(const json& obj, std::initializer_list<const char*> keys,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys)
      if (it.key() == k) known = true;
    if (!known)
      throw FormatError(where + ": foreign member \"" + it.key() + "\"");
  }
  for (const char* k : keys)
    if (!obj.contains(k)) throw FormatError(where + ": missing member \"" + k + "\"");
}

inline Vec2 parse_position(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() < 2 || !j[0].is_number() || !j[1].is_number())
    throw FormatError(where + ": position must be [x,y]");
  if (j.size() > 2) throw FormatError(where + ": only planar coordinates supported");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<Vec2> parse_positions(const json& j, const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": expected coordinate array");
  std::vector<Vec2> out;
  for (const auto& e : j) out.push_back(parse_position(e, where));
  return out;
}

inline Polygon parse_polygon_coords(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw FormatError(where + ": polygon needs at least one ring");
  Polygon p;
  p.outer = parse_positions(j[0], where);
  for (std::size_t i = 1; i < j.size(); ++i)
    p.holes.push_back(parse_positions(j[i], where));
  return p;
}

inline Geometry parse_geometry(const json& j, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": geometry must be an object");
  require_keys(j, {"type", "coordinates"}, where);
  std::string type = j["type"].get<std::string>();
  const json& c = j["coordinates"];
  if (type == "Point") return Geometry::point(parse_position(c, where));
  if (type == "MultiPoint") return Geometry::multi_point(parse_positions(c, where));
  if (type == "LineString") return Geometry::line_string(parse_positions(c, where));
  if (type == "MultiLineString") {
    if (!c.is_array()) throw FormatError(where + ": expected array of lines");
    std::vector<std::vector<Vec2>> lines;
    for (const auto& e : c) lines.push_back(parse_positions(e, where));
    return Geometry::multi_line_string(std::move(lines));
  }
  if (type == "Polygon") return Geometry::polygon(parse_polygon_coords(c, where));
  if (type == "MultiPolygon") {
    if (!c.is_array()) throw FormatError(where + ": expected array of polygons");
    std::vector<Polygon> polys;
    for (const auto& e : c) polys.push_back(parse_polygon_coords(e, where));
    return Geometry::multi_polygon(std::move(polys));
  }
  throw FormatError(where + ": unsupported geometry type \"" + type + "\"");
}

}  // namespace io_detail

inline FeatureCollection parse_vector(const std::string& text) {
  io_detail::json doc;
  try {
    doc = io_detail::json::parse(text);
  } catch (const io_detail::json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw FormatError("top level must be an object");
  io_detail::require_keys(doc, {"type", "features"}, "collection");
  if (doc["type"] != "FeatureCollection")
    throw FormatError("type must be \"FeatureCollection\"");
  if (!doc["features"].is_array()) throw FormatError("features must be an array");

  FeatureCollection fc;
  std::size_t idx = 0;
  for (const auto& fj : doc["features"]) {
    std::string where = "feature " + std::to_string(idx++);
    if (!fj.is_object()) throw FormatError(where + ": must be an object");
    io_detail::require_keys(fj, {"type", "geometry", "properties"}, where);
    if (fj["type"] != "Feature") throw FormatError(where + ": type must be \"Feature\"");
    Feature f;
    f.geometry = io_detail::parse_geometry(fj["geometry"], where);
    const auto& props = fj["properties"];
    if (!props.is_object()) throw FormatError(where + ": properties must be an object");
    for (auto it = props.begin(); it != props.end(); ++it) {
      if (it->is_string())
        f.attributes[it.key()] = it->get<std::string>();
      else if (it->is_number())
        f.attributes[it.key()] = it->get<double>();
      else
        throw FormatError(where + ": property \"" + it.key() +
                          "\" must be a string or number");
    }
    fc.features.push_back(std::move(f));
  }
  try {
    normalize(fc);
  } catch (const GeometryError& e) {
    throw FormatError(std::string("invalid geometry: ") + e.what());
  }
  return fc;
}

inline FeatureCollection read_vector(const std::string& path) {
  return parse_vector(io_detail::slurp(path));
}

// ---------------------------------------------------------------------------
// POI table CSV

namespace io_detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::vector<std::string> csv_split(const std::string& line, std::size_t lineno) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw FormatError("line " + std::to_string(lineno) + ": unterminated quote");
  out.push_back(cur);
  return out;
}

inline double parse_strict_double(const std::string& s, const std::string& what,
                                  std::size_t lineno) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("line " + std::to_string(lineno) + ": " + what +
                      " is not numeric: \"" + s + "\"");
  }
}

}  // namespace io_detail

inline std::string serialize_poi_csv(const PoiTable& rows) {
  std::string out = kPoiHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += io_detail::csv_field(r.name);
    out += ',';
    out += io_detail::csv_field(r.category);
    out += ',';
    out += io_detail::fmt_coord(r.lon);
    out += ',';
    out += io_detail::fmt_coord(r.lat);
    out += ',';
    out += io_detail::csv_field(r.city);
    out += '\n';
  }
  return out;
}

inline void check_poi_row(const PoiRow& r) {
  if (r.lon < -180 || r.lon > 180)
    throw FormatError("lon out of range: " + io_detail::fmt_coord(r.lon));
  if (r.lat < -90 || r.lat > 90)
    throw FormatError("lat out of range: " + io_detail::fmt_coord(r.lat));
}

inline DatasetPath write_poi_csv(const PoiTable& rows, const std::string& path) {
  for (const auto& r : rows) check_poi_row(r);
  io_detail::spit(path, serialize_poi_csv(rows));
  return {path, Kind::Table};
}

inline PoiTable parse_poi_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kPoiHeader)
    throw FormatError("bad header: expected \"" + std::string(kPoiHeader) +
                      "\", got \"" + line + "\"");
  PoiTable rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = io_detail::csv_split(line, lineno);
    if (fields.size() != 5)
      throw FormatError("line " + std::to_string(lineno) + ": expected 5 fields, got " +
                        std::to_string(fields.size()));
    PoiRow r;
    r.name = fields[0];
    r.category = fields[1];
    r.lon = io_detail::parse_strict_double(fields[2], "lon", lineno);
    r.lat = io_detail::parse_strict_double(fields[3], "lat", lineno);
    r.city = fields[4];
    check_poi_row(r);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline PoiTable read_poi_csv(const std::string& path) {
  return parse_poi_csv(io_detail::slurp(path));
}

// ---------------------------------------------------------------------------
// kind detection

inline Kind detect_kind(const std::string& path) {
  std::string head = io_detail::slurp(path).substr(0, 4096);
  std::size_t i = head.find_first_not_of(" \t\r\n");
  if (i == std::string::npos) throw FormatError("empty file: " + path);
  if (head.compare(i, 4, "\x89PNG") == 0) return Kind::Image;
  if (head.compare(i, 4, "<svg") == 0 || head.compare(i, 5, "<?xml") == 0)
    return Kind::Image;
  if (head[i] == '{') {
    if (head.find("\"FeatureCollection\"") != std::string::npos) return Kind::Vector;
    if (head.find("\"raster-stack\"") != std::string::npos) return Kind::Raster;
    throw FormatError("unrecognized JSON document: " + path);
  }
  if (head.compare(i, 5, "ncols") == 0) return Kind::Raster;
  if (head.compare(i, std::string(kPoiHeader).size(), kPoiHeader) == 0)
    return Kind::Table;
  throw FormatError("unrecognized file content: " + path);
}

// ---------------------------------------------------------------------------
// per-directory manifest of written datasets

namespace io_detail {

inline std::mutex& manifest_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace io_detail

inline std::map<std::string, std::string> load_manifest(const std::string& dir) {
  std::map<std::string, std::string> out;
  std::string path = (std::filesystem::path(dir) / "manifest.json").string();
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return out;
  io_detail::json doc;
  try {
    doc = io_detail::json::parse(io_detail::slurp(path));
  } catch (const io_detail::json::parse_error& e) {
    throw FormatError(std::string("invalid manifest: ") + e.what(), e.byte);
  }
  for (auto it = doc.begin(); it != doc.end(); ++it)
    out[it.key()] = it->get<std::string>();
  return out;
}

inline void record_in_manifest(const std::string& file_path, Kind kind) {
  std::lock_guard<std::mutex> lock(io_detail::manifest_mutex());
  std::filesystem::path p(file_path);
  std::string dir = p.has_parent_path() ? p.parent_path().string() : ".";
  auto entries = load_manifest(dir);
  entries[p.filename().string()] = kind_name(kind);
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : entries) {
    if (!first) out += ',';
    first = false;
    out += '\n';
    out += "\"" + io_detail::json_escape(k) + "\": \"" + v + "\"";
  }
  out += "\n}\n";
  std::filesystem::path dirp = p.has_parent_path() ? p.parent_path() : ".";
  io_detail::spit((dirp / "manifest.json").string(), out);
}

}  // namespace geoagent

#pragma once

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoagent/geometry.hpp"
#include "geoagent/vector_io.hpp"

// Georeferenced numeric grid. Bands are row-major with row 0 at the top;
// `origin` is the upper-left corner. On disk a single band is an ESRI ASCII
// grid; multi-band grids are a raster-stack manifest next to one ASCII grid
// per band.

namespace geoagent {

struct RasterGrid {
  int width = 0;
  int height = 0;
  Vec2 origin;           // upper-left corner
  double cell_size = 1;
  std::vector<std::vector<double>> bands;
  double nodata = -9999;

  double at(std::size_t band, int row, int col) const {
    return bands[band][static_cast<std::size_t>(row) * width + col];
  }
  double& at(std::size_t band, int row, int col) {
    return bands[band][static_cast<std::size_t>(row) * width + col];
  }
  Vec2 cell_center(int row, int col) const {
    return {origin.x + (col + 0.5) * cell_size, origin.y - (row + 0.5) * cell_size};
  }
  Box extent() const {
    Box b;
    b.expand(Vec2{origin.x, origin.y - height * cell_size});
    b.expand(Vec2{origin.x + width * cell_size, origin.y});
    return b;
  }
  void check() const {
    if (width < 1 || height < 1) throw GridError("grid must be at least 1x1");
    if (cell_size <= 0) throw GridError("cell size must be positive");
    if (bands.empty()) throw GridError("grid needs at least one band");
    for (const auto& b : bands)
      if (b.size() != static_cast<std::size_t>(width) * height)
        throw GridError("band size does not match grid dimensions");
  }
};

namespace raster_detail {

inline std::string serialize_band(const RasterGrid& g, std::size_t band) {
  std::string out;
  out += "ncols " + std::to_string(g.width) + "\n";
  out += "nrows " + std::to_string(g.height) + "\n";
  out += "xllcorner " + io_detail::fmt_coord(g.origin.x) + "\n";
  out += "yllcorner " + io_detail::fmt_coord(g.origin.y - g.height * g.cell_size) + "\n";
  out += "cellsize " + io_detail::fmt_coord(g.cell_size) + "\n";
  out += "NODATA_value " + io_detail::fmt_number(g.nodata) + "\n";
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      if (c) out += ' ';
      out += io_detail::fmt_number(g.at(band, r, c));
    }
    out += '\n';
  }
  return out;
}

inline RasterGrid parse_band(const std::string& text, const std::string& where) {
  std::istringstream in(text);
  RasterGrid g;
  double xll = 0, yll = 0;
  bool saw_dims = false;
  while (true) {
    auto pos = in.tellg();
    std::string key;
    if (!(in >> key)) break;
    std::string low;
    for (char c : key) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (low == "ncols") {
      if (!(in >> g.width)) throw FormatError(where + ": bad ncols");
    } else if (low == "nrows") {
      if (!(in >> g.height)) throw FormatError(where + ": bad nrows");
      saw_dims = true;
    } else if (low == "xllcorner") {
      if (!(in >> xll)) throw FormatError(where + ": bad xllcorner");
    } else if (low == "yllcorner") {
      if (!(in >> yll)) throw FormatError(where + ": bad yllcorner");
    } else if (low == "cellsize") {
      if (!(in >> g.cell_size)) throw FormatError(where + ": bad cellsize");
    } else if (low == "nodata_value") {
      if (!(in >> g.nodata)) throw FormatError(where + ": bad NODATA_value");
    } else {
      // first cell value reached
      in.clear();
      in.seekg(pos);
      break;
    }
  }
  if (!saw_dims || g.width < 1 || g.height < 1 || g.cell_size <= 0)
    throw FormatError(where + ": incomplete or invalid header");
  g.origin = {xll, yll + g.height * g.cell_size};
  g.bands.resize(1);
  auto& band = g.bands[0];
  band.resize(static_cast<std::size_t>(g.width) * g.height);
  for (std::size_t i = 0; i < band.size(); ++i) {
    if (!(in >> band[i]))
      throw FormatError(where + ": expected " + std::to_string(band.size()) +
                        " cell values, got " + std::to_string(i));
  }
  double extra;
  if (in >> extra) throw FormatError(where + ": trailing cell values");
  return g;
}

}  // namespace raster_detail

inline DatasetPath write_raster(const RasterGrid& g, const std::string& path) {
  g.check();
  if (g.bands.size() == 1) {
    io_detail::spit(path, raster_detail::serialize_band(g, 0));
    return {path, Kind::Raster};
  }
  std::filesystem::path p(path);
  std::string stem = p.filename().string();
  std::string manifest = "{\"format\":\"raster-stack\",\"version\":1,\"bands\":[";
  for (std::size_t b = 0; b < g.bands.size(); ++b) {
    std::string band_name = stem + ".b" + std::to_string(b) + ".asc";
    std::filesystem::path band_path =
        p.has_parent_path() ? p.parent_path() / band_name : std::filesystem::path(band_name);
    io_detail::spit(band_path.string(), raster_detail::serialize_band(g, b));
    if (b) manifest += ',';
    manifest += '"' + io_detail::json_escape(band_name) + '"';
  }
  manifest += "]}\n";
  io_detail::spit(path, manifest);
  return {path, Kind::Raster};
}

inline RasterGrid read_raster(const std::string& path) {
  std::string text = io_detail::slurp(path);
  std::size_t i = text.find_first_not_of(" \t\r\n");
  if (i == std::string::npos) throw FormatError("empty raster file: " + path);
  if (text[i] != '{') return raster_detail::parse_band(text, path);

  // raster-stack manifest
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("invalid raster manifest: ") + e.what(), e.byte);
  }
  if (!doc.is_object() || doc.value("format", "") != "raster-stack" ||
      !doc.contains("bands") || !doc["bands"].is_array() || doc["bands"].empty())
    throw FormatError(path + ": not a raster-stack manifest");
  std::filesystem::path base(path);
  std::filesystem::path dir = base.has_parent_path() ? base.parent_path() : ".";
  RasterGrid g;
  bool first = true;
  for (const auto& bj : doc["bands"]) {
    std::string band_path = (dir / bj.get<std::string>()).string();
    RasterGrid band = raster_detail::parse_band(io_detail::slurp(band_path), band_path);
    if (first) {
      g = band;
      first = false;
    } else {
      if (band.width != g.width || band.height != g.height ||
          band.cell_size != g.cell_size || !(band.origin == g.origin) ||
          band.nodata != g.nodata)
        throw FormatError(path + ": band grids do not match");
      g.bands.push_back(std::move(band.bands[0]));
    }
  }
  return g;
}

}  // namespace geoagent

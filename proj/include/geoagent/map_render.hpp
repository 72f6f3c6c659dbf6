#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <zlib.h>

#include "geoagent/geometry.hpp"
#include "geoagent/vector_io.hpp"

// Thematic map rendering. The canonical output is an SVG document with
// stable element ids ("legend", "north-arrow", "scale-bar", "graticule") so
// tests can assert on structure; a PNG raster of the same scene is produced
// alongside it by a small scanline rasterizer. Identical inputs give
// byte-identical output.

namespace geoagent {

struct MapStyle {
  int width = 800;
  int height = 600;
  std::vector<std::string> palette = {
      // 12-color categorical palette chosen for colorblind safety
      "#0072b2", "#e69f00", "#009e73", "#cc79a7", "#56b4e9", "#d55e00",
      "#f0e442", "#7b4173", "#637939", "#8c6d31", "#843c39", "#7f7f7f"};
  bool legend = true;
  bool north_arrow = true;
  bool scale_bar = true;
  bool grid = false;
  std::string class_attr = "class";
};

namespace map_detail {

inline std::string fmt_px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Transform {
  double scale = 1;
  double tx = 0, ty = 0;
  int canvas_h = 0;
  Vec2 apply(Vec2 p) const {
    return {p.x * scale + tx, canvas_h - (p.y * scale + ty)};
  }
};

inline Transform fit_transform(const Box& b, int w, int h) {
  Transform t;
  t.canvas_h = h;
  double mx = w * 0.05, my = h * 0.05;
  double avail_w = w - 2 * mx, avail_h = h - 2 * my;
  double bw = b.width(), bh = b.height();
  if (bw <= 0 && bh <= 0) {
    t.scale = 1;
  } else {
    double sx = bw > 0 ? avail_w / bw : std::numeric_limits<double>::infinity();
    double sy = bh > 0 ? avail_h / bh : std::numeric_limits<double>::infinity();
    t.scale = std::min(sx, sy);
  }
  // center the data box on the canvas
  t.tx = mx + (avail_w - bw * t.scale) / 2 - b.minx * t.scale;
  t.ty = my + (avail_h - bh * t.scale) / 2 - b.miny * t.scale;
  return t;
}

// largest 1/2/5 * 10^n not exceeding the target
inline double round_down_125(double target) {
  if (target <= 0) return 1;
  double mag = std::pow(10.0, std::floor(std::log10(target)));
  for (double m : {5.0, 2.0, 1.0})
    if (m * mag <= target) return m * mag;
  return mag / 2;
}

inline std::string class_label(const AttrValue& v) {
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  return io_detail::fmt_number(std::get<double>(v));
}

struct ClassKey {
  bool is_str;
  double num;
  std::string str;
  friend bool operator<(const ClassKey& a, const ClassKey& b) {
    if (a.is_str != b.is_str) return !a.is_str;  // numbers sort first
    if (a.is_str) return a.str < b.str;
    return a.num < b.num;
  }
  friend bool operator==(const ClassKey& a, const ClassKey& b) {
    return a.is_str == b.is_str && (a.is_str ? a.str == b.str : a.num == b.num);
  }
};

inline ClassKey class_key(const AttrValue& v) {
  if (std::holds_alternative<std::string>(v))
    return {true, 0, std::get<std::string>(v)};
  return {false, std::get<double>(v), {}};
}

inline constexpr const char* kDefaultClass = "(unclassified)";

}  // namespace map_detail

struct RenderedMap {
  std::string svg;
  std::vector<std::uint8_t> rgba;  // width*height*4
  int width = 0;
  int height = 0;
};

// ---------------------------------------------------------------------------
// rasterizer for the PNG twin

namespace map_detail {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

inline Rgb parse_color(const std::string& hex) {
  Rgb c;
  if (hex.size() == 7 && hex[0] == '#') {
    auto nib = [](char ch) -> int {
      if (ch >= '0' && ch <= '9') return ch - '0';
      if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
      if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
      return 0;
    };
    c.r = static_cast<std::uint8_t>(nib(hex[1]) * 16 + nib(hex[2]));
    c.g = static_cast<std::uint8_t>(nib(hex[3]) * 16 + nib(hex[4]));
    c.b = static_cast<std::uint8_t>(nib(hex[5]) * 16 + nib(hex[6]));
  }
  return c;
}

class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h * 4, 255) {}

  void set(int x, int y, Rgb c) {
    if (x < 0 || x >= w_ || y < 0 || y >= h_) return;
    std::size_t i = (static_cast<std::size_t>(y) * w_ + x) * 4;
    px_[i] = c.r;
    px_[i + 1] = c.g;
    px_[i + 2] = c.b;
    px_[i + 3] = 255;
  }

  // even-odd scanline fill over pixel centers
  void fill_polygon(const std::vector<std::vector<Vec2>>& rings, Rgb c) {
    double ymin = 1e18, ymax = -1e18;
    for (const auto& r : rings)
      for (auto p : r) {
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
      }
    int y0 = std::max(0, static_cast<int>(std::floor(ymin)));
    int y1 = std::min(h_ - 1, static_cast<int>(std::ceil(ymax)));
    for (int y = y0; y <= y1; ++y) {
      double py = y + 0.5;
      std::vector<double> xs;
      for (const auto& r : rings) {
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
          Vec2 a = r[i], b = r[i + 1];
          if ((a.y > py) == (b.y > py)) continue;
          xs.push_back(a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y));
        }
      }
      std::sort(xs.begin(), xs.end());
      for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
        int x0 = static_cast<int>(std::ceil(xs[i] - 0.5));
        int x1 = static_cast<int>(std::floor(xs[i + 1] - 0.5));
        for (int x = x0; x <= x1; ++x) set(x, y, c);
      }
    }
  }

  void draw_line(Vec2 a, Vec2 b, Rgb c) {
    double len = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
    int steps = std::max(1, static_cast<int>(std::ceil(len)));
    for (int i = 0; i <= steps; ++i) {
      double t = static_cast<double>(i) / steps;
      set(static_cast<int>(std::lround(a.x + (b.x - a.x) * t)),
          static_cast<int>(std::lround(a.y + (b.y - a.y) * t)), c);
    }
  }

  void fill_disc(Vec2 ctr, double rad, Rgb c) {
    for (int y = static_cast<int>(ctr.y - rad); y <= static_cast<int>(ctr.y + rad); ++y)
      for (int x = static_cast<int>(ctr.x - rad); x <= static_cast<int>(ctr.x + rad); ++x)
        if ((x - ctr.x) * (x - ctr.x) + (y - ctr.y) * (y - ctr.y) <= rad * rad)
          set(x, y, c);
  }

  const std::vector<std::uint8_t>& pixels() const { return px_; }

 private:
  int w_, h_;
  std::vector<std::uint8_t> px_;
};

// minimal PNG encoder (8-bit RGBA, single IDAT, zlib-compressed)
inline std::string encode_png(const std::vector<std::uint8_t>& rgba, int w, int h) {
  auto be32 = [](std::string& s, std::uint32_t v) {
    s += static_cast<char>((v >> 24) & 0xff);
    s += static_cast<char>((v >> 16) & 0xff);
    s += static_cast<char>((v >> 8) & 0xff);
    s += static_cast<char>(v & 0xff);
  };
  auto chunk = [&](std::string& s, const char* tag, const std::string& data) {
    be32(s, static_cast<std::uint32_t>(data.size()));
    std::string body = std::string(tag, 4) + data;
    s += body;
    std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0, reinterpret_cast<const Bytef*>(body.data()),
              static_cast<uInt>(body.size())));
    be32(s, crc);
  };

  std::string raw;
  raw.reserve(static_cast<std::size_t>(h) * (1 + static_cast<std::size_t>(w) * 4));
  for (int y = 0; y < h; ++y) {
    raw += '\0';  // filter type 0
    raw.append(reinterpret_cast<const char*>(&rgba[static_cast<std::size_t>(y) * w * 4]),
               static_cast<std::size_t>(w) * 4);
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::string compressed(bound, '\0');
  if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw IoError("png compression failed");
  compressed.resize(bound);

  std::string png = "\x89PNG\r\n\x1a\n";
  std::string ihdr;
  be32(ihdr, static_cast<std::uint32_t>(w));
  be32(ihdr, static_cast<std::uint32_t>(h));
  ihdr += '\x08';  // bit depth
  ihdr += '\x06';  // color type RGBA
  ihdr += '\0';
  ihdr += '\0';
  ihdr += '\0';
  chunk(png, "IHDR", ihdr);
  chunk(png, "IDAT", compressed);
  chunk(png, "IEND", "");
  return png;
}

}  // namespace map_detail

// ---------------------------------------------------------------------------

inline RenderedMap render_map(const FeatureCollection& fc, const MapStyle& style) {
  if (fc.empty()) throw EmptyInput("nothing to draw");
  if (style.width < 64 || style.height < 64)
    throw ConfigError("canvas must be at least 64x64");
  if (style.palette.empty()) throw ConfigError("palette must not be empty");

  using namespace map_detail;
  Box data = bounds(fc);
  Transform tf = fit_transform(data, style.width, style.height);

  // classes in deterministic order: numeric ascending, then strings
  std::map<ClassKey, std::string> classes;  // key -> color (filled below)
  for (const auto& f : fc.features) {
    auto it = f.attributes.find(style.class_attr);
    AttrValue v = it == f.attributes.end() ? AttrValue{std::string(kDefaultClass)}
                                           : it->second;
    classes.emplace(class_key(v), "");
  }
  {
    std::size_t i = 0;
    for (auto& [k, color] : classes) {
      color = style.palette[i % style.palette.size()];
      ++i;
    }
  }
  auto color_of = [&](const Feature& f) {
    auto it = f.attributes.find(style.class_attr);
    AttrValue v = it == f.attributes.end() ? AttrValue{std::string(kDefaultClass)}
                                           : it->second;
    return classes.at(class_key(v));
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(style.width) + "\" height=\"" + std::to_string(style.height) +
         "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
         std::to_string(style.height) + "\">\n";
  svg += "<rect width=\"" + std::to_string(style.width) + "\" height=\"" +
         std::to_string(style.height) + "\" fill=\"#ffffff\"/>\n";

  Canvas canvas(style.width, style.height);

  if (style.grid) {
    svg += "<g id=\"graticule\" stroke=\"#c8c8c8\" stroke-width=\"0.5\">\n";
    Rgb grey = parse_color("#c8c8c8");
    double step = round_down_125(std::max(data.width(), data.height()) / 5);
    if (step > 0 && data.valid()) {
      for (double gx = std::ceil(data.minx / step) * step; gx <= data.maxx; gx += step) {
        Vec2 a = tf.apply({gx, data.miny}), b = tf.apply({gx, data.maxy});
        svg += "<line x1=\"" + fmt_px(a.x) + "\" y1=\"" + fmt_px(a.y) + "\" x2=\"" +
               fmt_px(b.x) + "\" y2=\"" + fmt_px(b.y) + "\"/>\n";
        canvas.draw_line(a, b, grey);
      }
      for (double gy = std::ceil(data.miny / step) * step; gy <= data.maxy; gy += step) {
        Vec2 a = tf.apply({data.minx, gy}), b = tf.apply({data.maxx, gy});
        svg += "<line x1=\"" + fmt_px(a.x) + "\" y1=\"" + fmt_px(a.y) + "\" x2=\"" +
               fmt_px(b.x) + "\" y2=\"" + fmt_px(b.y) + "\"/>\n";
        canvas.draw_line(a, b, grey);
      }
    }
    svg += "</g>\n";
  }

  svg += "<g id=\"features\">\n";
  for (const auto& f : fc.features) {
    std::string color = color_of(f);
    Rgb rgb = parse_color(color);
    const Geometry& g = f.geometry;
    for (const auto& poly : g.polygons) {
      std::string d;
      std::vector<std::vector<Vec2>> px_rings;
      auto ring_path = [&](const Ring& r) {
        std::vector<Vec2> px;
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
          Vec2 p = tf.apply(r[i]);
          d += (i == 0 ? "M" : "L");
          d += fmt_px(p.x) + " " + fmt_px(p.y);
          px.push_back(p);
        }
        d += "Z";
        px.push_back(px.front());
        px_rings.push_back(std::move(px));
      };
      ring_path(poly.outer);
      for (const auto& h : poly.holes) ring_path(h);
      svg += "<path d=\"" + d + "\" fill=\"" + color +
             "\" fill-rule=\"evenodd\" stroke=\"#333333\" stroke-width=\"0.5\"/>\n";
      canvas.fill_polygon(px_rings, rgb);
    }
    for (const auto& line : g.lines) {
      std::string pts;
      for (std::size_t i = 0; i < line.size(); ++i) {
        Vec2 p = tf.apply(line[i]);
        if (i) pts += ' ';
        pts += fmt_px(p.x) + "," + fmt_px(p.y);
        if (i + 1 < line.size())
          canvas.draw_line(tf.apply(line[i]), tf.apply(line[i + 1]), rgb);
      }
      svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.5\"/>\n";
    }
    for (auto p : g.points) {
      Vec2 c = tf.apply(p);
      svg += "<circle cx=\"" + fmt_px(c.x) + "\" cy=\"" + fmt_px(c.y) +
             "\" r=\"3\" fill=\"" + color + "\"/>\n";
      canvas.fill_disc(c, 3, rgb);
    }
  }
  svg += "</g>\n";

  if (style.legend) {
    svg += "<g id=\"legend\">\n";
    double lx = style.width - 150.0, ly = 20.0;
    Rgb black = parse_color("#000000");
    for (const auto& [key, color] : classes) {
      std::string label = key.is_str ? key.str : io_detail::fmt_number(key.num);
      svg += "<rect class=\"legend-entry\" x=\"" + fmt_px(lx) + "\" y=\"" + fmt_px(ly) +
             "\" width=\"14\" height=\"14\" fill=\"" + color + "\"/>\n";
      svg += "<text x=\"" + fmt_px(lx + 20) + "\" y=\"" + fmt_px(ly + 11) +
             "\" font-size=\"12\" font-family=\"sans-serif\">" +
             io_detail::json_escape(label) + "</text>\n";
      canvas.fill_polygon({{{lx, ly}, {lx + 14, ly}, {lx + 14, ly + 14},
                            {lx, ly + 14}, {lx, ly}}},
                          parse_color(color));
      canvas.draw_line({lx + 20, ly + 12}, {lx + 30, ly + 12}, black);
      ly += 20;
    }
    svg += "</g>\n";
  }

  if (style.north_arrow) {
    double ax = style.width - 30.0, ay = 18.0;
    svg += "<g id=\"north-arrow\">\n";
    svg += "<polygon points=\"" + fmt_px(ax) + "," + fmt_px(ay) + " " +
           fmt_px(ax - 7) + "," + fmt_px(ay + 22) + " " + fmt_px(ax + 7) + "," +
           fmt_px(ay + 22) + "\" fill=\"#333333\"/>\n";
    svg += "<text x=\"" + fmt_px(ax - 4) + "\" y=\"" + fmt_px(ay + 36) +
           "\" font-size=\"12\" font-family=\"sans-serif\">N</text>\n";
    svg += "</g>\n";
    canvas.fill_polygon({{{ax, ay}, {ax - 7, ay + 22}, {ax + 7, ay + 22}, {ax, ay}}},
                        parse_color("#333333"));
  }

  if (style.scale_bar && tf.scale > 0 && data.valid() && data.width() > 0) {
    // labeled length is a round number of data units; pixel span follows the
    // fitted scale exactly
    double target_units = (style.width * 0.25) / tf.scale;
    double len_units = round_down_125(target_units);
    double len_px = len_units * tf.scale;
    double sx = 20.0, sy = style.height - 20.0;
    svg += "<g id=\"scale-bar\" data-units=\"" + io_detail::fmt_number(len_units) +
           "\" data-px=\"" + fmt_px(len_px) + "\">\n";
    svg += "<line x1=\"" + fmt_px(sx) + "\" y1=\"" + fmt_px(sy) + "\" x2=\"" +
           fmt_px(sx + len_px) + "\" y2=\"" + fmt_px(sy) +
           "\" stroke=\"#333333\" stroke-width=\"2\"/>\n";
    svg += "<line x1=\"" + fmt_px(sx) + "\" y1=\"" + fmt_px(sy - 4) + "\" x2=\"" +
           fmt_px(sx) + "\" y2=\"" + fmt_px(sy + 4) +
           "\" stroke=\"#333333\" stroke-width=\"2\"/>\n";
    svg += "<line x1=\"" + fmt_px(sx + len_px) + "\" y1=\"" + fmt_px(sy - 4) +
           "\" x2=\"" + fmt_px(sx + len_px) + "\" y2=\"" + fmt_px(sy + 4) +
           "\" stroke=\"#333333\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt_px(sx) + "\" y=\"" + fmt_px(sy - 8) +
           "\" font-size=\"12\" font-family=\"sans-serif\">" +
           io_detail::fmt_number(len_units) + "</text>\n";
    svg += "</g>\n";
    Rgb black = parse_color("#333333");
    canvas.draw_line({sx, sy}, {sx + len_px, sy}, black);
    canvas.draw_line({sx, sy - 4}, {sx, sy + 4}, black);
    canvas.draw_line({sx + len_px, sy - 4}, {sx + len_px, sy + 4}, black);
  }

  svg += "</svg>\n";

  RenderedMap out;
  out.svg = std::move(svg);
  out.rgba = canvas.pixels();
  out.width = style.width;
  out.height = style.height;
  return out;
}

// Writes "{stem}.svg" and "{stem}.png" next to each other; `png_path` keeps
// whatever spelling the caller asked for.
inline std::vector<DatasetPath> write_map(const FeatureCollection& fc,
                                          const MapStyle& style,
                                          const std::string& png_path) {
  RenderedMap m = render_map(fc, style);
  std::filesystem::path p(png_path);
  std::filesystem::path svg_path = p;
  svg_path.replace_extension(".svg");
  io_detail::spit(svg_path.string(), m.svg);
  io_detail::spit(png_path, map_detail::encode_png(m.rgba, m.width, m.height));
  return {{svg_path.string(), Kind::Image}, {png_path, Kind::Image}};
}

}  // namespace geoagent

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "geoagent/errors.hpp"

namespace geoagent {

// All coordinates are snapped to a fixed 1e-9 grid before any geometric
// predicate runs; the same value doubles as the boundary-classification
// tolerance. Keeps results identical across runs and platforms.
inline constexpr double kSnapGrid = 1e-9;
inline constexpr double kEps = 1e-9;

// Coordinates beyond this magnitude lose grid precision; reject outright.
inline constexpr double kMaxCoord = 1e8;

inline double snap_coord(double v) {
  if (!std::isfinite(v)) throw GeometryError("non-finite coordinate");
  if (std::abs(v) > kMaxCoord)
    throw GeometryError("coordinate magnitude exceeds supported range");
  return static_cast<double>(std::llround(v * 1e9)) / 1e9;
}

struct Vec2 {
  double x = 0;
  double y = 0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(Vec2 a, Vec2 b) { return !(a == b); }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

struct Box {
  double minx = std::numeric_limits<double>::infinity();
  double miny = std::numeric_limits<double>::infinity();
  double maxx = -std::numeric_limits<double>::infinity();
  double maxy = -std::numeric_limits<double>::infinity();

  bool valid() const { return minx <= maxx && miny <= maxy; }
  void expand(Vec2 p) {
    minx = std::min(minx, p.x);
    miny = std::min(miny, p.y);
    maxx = std::max(maxx, p.x);
    maxy = std::max(maxy, p.y);
  }
  void expand(const Box& o) {
    minx = std::min(minx, o.minx);
    miny = std::min(miny, o.miny);
    maxx = std::max(maxx, o.maxx);
    maxy = std::max(maxy, o.maxy);
  }
  bool overlaps(const Box& o) const {
    return valid() && o.valid() && minx <= o.maxx && o.minx <= maxx &&
           miny <= o.maxy && o.miny <= maxy;
  }
  double width() const { return maxx - minx; }
  double height() const { return maxy - miny; }
};

// A ring is stored closed: front() == back(), at least 4 entries.
using Ring = std::vector<Vec2>;

struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

struct Geometry {
  enum class Type {
    Point,
    MultiPoint,
    LineString,
    MultiLineString,
    Polygon,
    MultiPolygon,
  };

  Type type = Type::Point;
  std::vector<Vec2> points;                 // Point / MultiPoint payload
  std::vector<std::vector<Vec2>> lines;     // LineString / MultiLineString
  std::vector<Polygon> polygons;            // Polygon / MultiPolygon

  static Geometry point(Vec2 p) {
    Geometry g;
    g.type = Type::Point;
    g.points = {p};
    return g;
  }
  static Geometry multi_point(std::vector<Vec2> ps) {
    Geometry g;
    g.type = Type::MultiPoint;
    g.points = std::move(ps);
    return g;
  }
  static Geometry line_string(std::vector<Vec2> pts) {
    Geometry g;
    g.type = Type::LineString;
    g.lines = {std::move(pts)};
    return g;
  }
  static Geometry multi_line_string(std::vector<std::vector<Vec2>> ls) {
    Geometry g;
    g.type = Type::MultiLineString;
    g.lines = std::move(ls);
    return g;
  }
  static Geometry polygon(Polygon p) {
    Geometry g;
    g.type = Type::Polygon;
    g.polygons = {std::move(p)};
    return g;
  }
  static Geometry multi_polygon(std::vector<Polygon> ps) {
    Geometry g;
    g.type = Type::MultiPolygon;
    g.polygons = std::move(ps);
    return g;
  }
};

inline int dimension(const Geometry& g) {
  switch (g.type) {
    case Geometry::Type::Point:
    case Geometry::Type::MultiPoint:
      return 0;
    case Geometry::Type::LineString:
    case Geometry::Type::MultiLineString:
      return 1;
    case Geometry::Type::Polygon:
    case Geometry::Type::MultiPolygon:
      return 2;
  }
  return 0;
}

inline const char* geometry_type_name(Geometry::Type t) {
  switch (t) {
    case Geometry::Type::Point: return "Point";
    case Geometry::Type::MultiPoint: return "MultiPoint";
    case Geometry::Type::LineString: return "LineString";
    case Geometry::Type::MultiLineString: return "MultiLineString";
    case Geometry::Type::Polygon: return "Polygon";
    case Geometry::Type::MultiPolygon: return "MultiPolygon";
  }
  return "Point";
}

using AttrValue = std::variant<std::string, double>;

struct Feature {
  Geometry geometry;
  std::map<std::string, AttrValue> attributes;
};

struct FeatureCollection {
  std::vector<Feature> features;
  // Max geometric dimension present; -1 when the collection is empty.
  int dimension = -1;

  bool empty() const { return features.empty(); }

  void recompute_dimension() {
    dimension = -1;
    for (const auto& f : features)
      dimension = std::max(dimension, geoagent::dimension(f.geometry));
  }
};

// ---------------------------------------------------------------------------
// Areas and boxes

inline double signed_ring_area(const Ring& r) {
  double acc = 0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i)
    acc += cross(r[i], r[i + 1]);
  return acc / 2.0;
}

// Normalized polygons carry a CCW outer and CW holes, so the plain signed
// sum over rings is the enclosed area.
inline double area(const Polygon& p) {
  double acc = signed_ring_area(p.outer);
  for (const auto& h : p.holes) acc += signed_ring_area(h);
  return acc;
}

inline double area(const Geometry& g) {
  double acc = 0;
  for (const auto& p : g.polygons) acc += area(p);
  return acc;
}

inline double area(const FeatureCollection& fc) {
  double acc = 0;
  for (const auto& f : fc.features) acc += area(f.geometry);
  return acc;
}

inline Box bounds(const Geometry& g) {
  Box b;
  for (const auto& p : g.points) b.expand(p);
  for (const auto& l : g.lines)
    for (const auto& p : l) b.expand(p);
  for (const auto& poly : g.polygons) {
    for (const auto& p : poly.outer) b.expand(p);
    for (const auto& h : poly.holes)
      for (const auto& p : h) b.expand(p);
  }
  return b;
}

inline Box bounds(const FeatureCollection& fc) {
  Box b;
  for (const auto& f : fc.features) b.expand(bounds(f.geometry));
  return b;
}

// ---------------------------------------------------------------------------
// Normalization

namespace detail {

inline void snap_points(std::vector<Vec2>& pts) {
  for (auto& p : pts) {
    p.x = snap_coord(p.x);
    p.y = snap_coord(p.y);
  }
}

inline void dedup_consecutive(std::vector<Vec2>& pts) {
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

}  // namespace detail

// Snap, drop repeated vertices, close the ring, and orient it. Construction
// is lenient about open rings; anything with fewer than 3 distinct vertices
// is rejected.
inline void normalize_ring(Ring& r, bool want_ccw) {
  detail::snap_points(r);
  detail::dedup_consecutive(r);
  if (r.size() >= 2 && r.front() == r.back()) r.pop_back();
  if (r.size() < 3) throw GeometryError("ring has fewer than 3 distinct vertices");
  r.push_back(r.front());
  double a = signed_ring_area(r);
  if (a == 0) throw GeometryError("ring encloses zero area");
  if ((a > 0) != want_ccw) std::reverse(r.begin(), r.end());
}

inline void normalize(Polygon& p) {
  normalize_ring(p.outer, /*want_ccw=*/true);
  for (auto& h : p.holes) normalize_ring(h, /*want_ccw=*/false);
}

inline void normalize(Geometry& g) {
  switch (g.type) {
    case Geometry::Type::Point:
      if (g.points.size() != 1) throw GeometryError("Point needs one coordinate");
      detail::snap_points(g.points);
      break;
    case Geometry::Type::MultiPoint:
      detail::snap_points(g.points);
      break;
    case Geometry::Type::LineString:
    case Geometry::Type::MultiLineString:
      for (auto& l : g.lines) {
        detail::snap_points(l);
        detail::dedup_consecutive(l);
        if (l.size() < 2) throw GeometryError("line needs 2 distinct vertices");
      }
      if (g.type == Geometry::Type::LineString && g.lines.size() != 1)
        throw GeometryError("LineString needs exactly one part");
      break;
    case Geometry::Type::Polygon:
      if (g.polygons.size() != 1) throw GeometryError("Polygon needs exactly one part");
      normalize(g.polygons[0]);
      break;
    case Geometry::Type::MultiPolygon:
      for (auto& p : g.polygons) normalize(p);
      break;
  }
}

inline void normalize(FeatureCollection& fc) {
  for (auto& f : fc.features) normalize(f.geometry);
  fc.recompute_dimension();
}

// ---------------------------------------------------------------------------
// Point / segment predicates

inline double dist_point_segment(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 == 0) return norm(p - a);
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

inline bool point_on_ring(Vec2 p, const Ring& r, double eps) {
  for (std::size_t i = 0; i + 1 < r.size(); ++i)
    if (dist_point_segment(p, r[i], r[i + 1]) <= eps) return true;
  return false;
}

namespace detail {

// Even-odd crossing count for the +x ray from p; half-open on vertex hits.
inline int ray_crossings(Vec2 p, const Ring& r) {
  int hits = 0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    Vec2 a = r[i], b = r[i + 1];
    if ((a.y > p.y) == (b.y > p.y)) continue;
    double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
    if (xc > p.x) ++hits;
  }
  return hits;
}

}  // namespace detail

// Even-odd rule over outer + holes; points within eps of any ring edge count
// as inside (boundary convention used everywhere, including clip and crop).
inline bool point_in_polygon(Vec2 p, const Polygon& poly, double eps = kEps) {
  if (point_on_ring(p, poly.outer, eps)) return true;
  for (const auto& h : poly.holes)
    if (point_on_ring(p, h, eps)) return true;
  int hits = detail::ray_crossings(p, poly.outer);
  for (const auto& h : poly.holes) hits += detail::ray_crossings(p, h);
  return (hits % 2) == 1;
}

// Union-of-features semantics: inside any polygon of the set.
inline bool point_in_region(Vec2 p, const std::vector<Polygon>& region,
                            double eps = kEps) {
  for (const auto& poly : region)
    if (point_in_polygon(p, poly, eps)) return true;
  return false;
}

// Every polygon found in the collection (Polygon or MultiPolygon parts).
inline std::vector<Polygon> collect_polygons(const FeatureCollection& fc) {
  std::vector<Polygon> out;
  for (const auto& f : fc.features)
    for (const auto& p : f.geometry.polygons) out.push_back(p);
  return out;
}

inline bool point_in_collection(Vec2 p, const FeatureCollection& fc,
                                double eps = kEps) {
  for (const auto& f : fc.features)
    for (const auto& poly : f.geometry.polygons)
      if (point_in_polygon(p, poly, eps)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
    double v = cross(q - p, r - p);
    return (v > 0) - (v < 0);
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

inline void check_ring_simple(const Ring& r, const std::string& where,
                              std::vector<std::string>& out) {
  std::size_t n = r.size() - 1;  // closed storage
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_cross(r[i], r[i + 1], r[j], r[j + 1]))
        out.push_back(where + ": ring self-intersects");
    }
  }
}

inline void check_ring(const Ring& r, bool want_ccw, const std::string& where,
                       std::vector<std::string>& out) {
  if (r.size() < 4) {
    out.push_back(where + ": ring has fewer than 4 vertices");
    return;
  }
  if (!(r.front() == r.back())) out.push_back(where + ": ring not closed");
  double a = signed_ring_area(r);
  if ((a > 0) != want_ccw)
    out.push_back(where + (want_ccw ? ": outer ring not counterclockwise"
                                    : ": hole ring not clockwise"));
  check_ring_simple(r, where, out);
}

}  // namespace detail

// Structural check used by tests: returns human-readable violations, empty
// when the collection satisfies all model invariants.
inline std::vector<std::string> validate(const FeatureCollection& fc) {
  std::vector<std::string> out;
  int max_dim = -1;
  for (std::size_t i = 0; i < fc.features.size(); ++i) {
    const Geometry& g = fc.features[i].geometry;
    std::string where = "feature " + std::to_string(i);
    max_dim = std::max(max_dim, dimension(g));
    for (const auto& p : g.points) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        out.push_back(where + ": non-finite coordinate");
    }
    for (const auto& l : g.lines)
      if (l.size() < 2) out.push_back(where + ": degenerate line");
    for (std::size_t pi = 0; pi < g.polygons.size(); ++pi) {
      const auto& poly = g.polygons[pi];
      std::string pwhere = where + " polygon " + std::to_string(pi);
      detail::check_ring(poly.outer, true, pwhere + " outer", out);
      for (std::size_t hi = 0; hi < poly.holes.size(); ++hi)
        detail::check_ring(poly.holes[hi], false,
                           pwhere + " hole " + std::to_string(hi), out);
    }
  }
  if (fc.dimension != max_dim)
    out.push_back("dimension field " + std::to_string(fc.dimension) +
                  " does not match contents " + std::to_string(max_dim));
  return out;
}

}  // namespace geoagent

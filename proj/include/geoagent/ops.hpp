#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "geoagent/geometry.hpp"
#include "geoagent/overlay.hpp"

// Spatial-analysis operations over feature collections: buffer, intersect,
// erase, union, clip. Overlay outputs are geometry-only: a single feature
// holding the dissolved multipolygon with a synthetic id attribute. Clip is
// the exception; it works feature by feature and preserves attributes.

namespace geoagent {

inline constexpr int kDefaultCircleSegments = 32;

namespace ops_detail {

inline FeatureCollection region_to_collection(std::vector<Polygon> region) {
  FeatureCollection fc;
  if (!region.empty()) {
    Feature f;
    f.geometry = region.size() == 1 ? Geometry::polygon(std::move(region[0]))
                                    : Geometry::multi_polygon(std::move(region));
    f.attributes["id"] = 1.0;
    fc.features.push_back(std::move(f));
  }
  fc.recompute_dimension();
  return fc;
}

inline Polygon disc(Vec2 c, double r, int segments) {
  Ring ring;
  ring.reserve(segments + 1);
  for (int k = 0; k < segments; ++k) {
    double a = 2.0 * M_PI * k / segments;
    ring.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  ring.push_back(ring.front());
  Polygon p;
  p.outer = std::move(ring);
  normalize(p);
  return p;
}

// Rectangle swept perpendicular to a segment; end caps come from the
// vertex discs that always accompany it.
inline bool segment_rect(Vec2 a, Vec2 b, double r, Polygon& out) {
  Vec2 d = b - a;
  double len = norm(d);
  if (len == 0) return false;
  Vec2 n{-d.y / len * r, d.x / len * r};
  Polygon p;
  p.outer = {a - n, b - n, b + n, a + n, a - n};
  normalize(p);
  out = std::move(p);
  return true;
}

inline void dilate_chain(const std::vector<Vec2>& pts, double r, int segments,
                         std::vector<Polygon>& pieces) {
  for (auto v : pts) pieces.push_back(disc(v, r, segments));
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    Polygon rect;
    if (segment_rect(pts[i], pts[i + 1], r, rect)) pieces.push_back(std::move(rect));
  }
}

}  // namespace ops_detail

// Region within `distance` of the input features. Points dilate to regular
// inscribed polygons (`segments` per full circle), lines to capsule chains,
// polygons to the polygon plus edge capsules and vertex discs. Overlaps are
// dissolved into one output feature.
inline FeatureCollection buffer(const FeatureCollection& input, double distance,
                                int segments = kDefaultCircleSegments) {
  if (distance <= 0) throw NonPositiveDistance("buffer distance must be positive");
  if (input.empty()) throw EmptyInput("buffer input is empty");
  if (segments < 3) throw GeometryError("buffer needs at least 3 segments");

  std::vector<Polygon> pieces;
  for (const auto& f : input.features) {
    const Geometry& g = f.geometry;
    for (auto p : g.points) pieces.push_back(ops_detail::disc(p, distance, segments));
    for (const auto& line : g.lines)
      ops_detail::dilate_chain(line, distance, segments, pieces);
    for (const auto& poly : g.polygons) {
      pieces.push_back(poly);
      ops_detail::dilate_chain(poly.outer, distance, segments, pieces);
      for (const auto& h : poly.holes)
        ops_detail::dilate_chain(h, distance, segments, pieces);
    }
  }
  return ops_detail::region_to_collection(region_dissolve(pieces));
}

inline FeatureCollection intersect(const FeatureCollection& a,
                                   const FeatureCollection& b) {
  if (a.dimension != 2 || b.dimension != 2)
    throw DimensionMismatch("intersect requires two polygon collections");
  return ops_detail::region_to_collection(
      region_overlay(collect_polygons(a), collect_polygons(b), BoolOp::Intersection));
}

inline FeatureCollection erase(const FeatureCollection& a,
                               const FeatureCollection& b) {
  if (a.dimension != 2 || b.dimension != 2)
    throw DimensionMismatch("erase requires two polygon collections");
  return ops_detail::region_to_collection(
      region_overlay(collect_polygons(a), collect_polygons(b), BoolOp::Difference));
}

inline FeatureCollection union_op(const FeatureCollection& a,
                                  const FeatureCollection& b) {
  if (a.dimension != 2 || b.dimension != 2)
    throw DimensionMismatch("union requires two polygon collections");
  return ops_detail::region_to_collection(
      region_overlay(collect_polygons(a), collect_polygons(b), BoolOp::Union));
}

namespace ops_detail {

// Pieces of one polyline inside the region; boundary-touching runs count as
// inside, matching the point-in-polygon convention.
inline std::vector<std::vector<Vec2>> trim_line_to_region(
    const std::vector<Vec2>& line, const std::vector<Polygon>& region) {
  std::vector<std::vector<Vec2>> kept;
  std::vector<Vec2> cur;
  auto flush = [&] {
    if (cur.size() >= 2) kept.push_back(cur);
    cur.clear();
  };
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    Vec2 a = line[i], b = line[i + 1];
    std::vector<double> ts{0.0, 1.0};
    for (const auto& poly : region) {
      auto edge_hits = [&](const Ring& ring) {
        for (std::size_t j = 0; j + 1 < ring.size(); ++j) {
          Vec2 c = ring[j], d = ring[j + 1];
          double den = cross(b - a, d - c);
          if (den == 0) continue;
          double t = cross(c - a, d - c) / den;
          double s = cross(c - a, b - a) / den;
          if (t > 0 && t < 1 && s >= 0 && s <= 1) ts.push_back(t);
        }
      };
      edge_hits(poly.outer);
      for (const auto& h : poly.holes) edge_hits(h);
    }
    std::sort(ts.begin(), ts.end());
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      double t0 = ts[k], t1 = ts[k + 1];
      if (t1 - t0 < 1e-12) continue;
      Vec2 p0 = a + (b - a) * t0;
      Vec2 p1 = a + (b - a) * t1;
      Vec2 mid = a + (b - a) * ((t0 + t1) / 2);
      if (point_in_region(mid, region)) {
        if (cur.empty()) {
          cur.push_back(p0);
        } else if (!(cur.back() == p0)) {
          flush();
          cur.push_back(p0);
        }
        cur.push_back(p1);
      } else {
        flush();
      }
    }
  }
  flush();
  return kept;
}

}  // namespace ops_detail

// Restrict features of `a` to the extent of `b`. Pre-judgment rule: the
// boundary's dimension must be at least the global dataset's, and at least a
// line. Points are kept or dropped whole; lines and polygons are trimmed.
inline FeatureCollection clip(const FeatureCollection& a,
                              const FeatureCollection& b) {
  if (a.empty()) throw EmptyInput("clip input is empty");
  int da = a.dimension, db = b.dimension;
  if (db < 1 || db < da)
    throw DimensionRuleViolation(
        "clip boundary must have dimension >= the global dataset and be at "
        "least a line");

  FeatureCollection out;
  if (db == 2) {
    std::vector<Polygon> region = collect_polygons(b);
    for (const auto& f : a.features) {
      const Geometry& g = f.geometry;
      if (dimension(g) == 0) {
        std::vector<Vec2> kept;
        for (auto p : g.points)
          if (point_in_region(p, region)) kept.push_back(p);
        if (kept.empty()) continue;
        Feature nf;
        nf.geometry = (g.type == Geometry::Type::Point)
                          ? Geometry::point(kept[0])
                          : Geometry::multi_point(std::move(kept));
        nf.attributes = f.attributes;
        out.features.push_back(std::move(nf));
      } else if (dimension(g) == 1) {
        std::vector<std::vector<Vec2>> parts;
        for (const auto& line : g.lines) {
          auto kept = ops_detail::trim_line_to_region(line, region);
          parts.insert(parts.end(), kept.begin(), kept.end());
        }
        if (parts.empty()) continue;
        Feature nf;
        nf.geometry = parts.size() == 1 ? Geometry::line_string(std::move(parts[0]))
                                        : Geometry::multi_line_string(std::move(parts));
        nf.attributes = f.attributes;
        out.features.push_back(std::move(nf));
      } else {
        auto piece = region_overlay(g.polygons, region, BoolOp::Intersection);
        if (piece.empty()) continue;
        Feature nf;
        nf.geometry = piece.size() == 1 ? Geometry::polygon(std::move(piece[0]))
                                        : Geometry::multi_polygon(std::move(piece));
        nf.attributes = f.attributes;
        out.features.push_back(std::move(nf));
      }
    }
  } else {
    // line boundary: keep content within the snap tolerance of the lines
    auto near_lines = [&](Vec2 p) {
      for (const auto& f : b.features)
        for (const auto& line : f.geometry.lines)
          for (std::size_t i = 0; i + 1 < line.size(); ++i)
            if (dist_point_segment(p, line[i], line[i + 1]) <= kEps) return true;
      return false;
    };
    for (const auto& f : a.features) {
      const Geometry& g = f.geometry;
      if (dimension(g) == 0) {
        std::vector<Vec2> kept;
        for (auto p : g.points)
          if (near_lines(p)) kept.push_back(p);
        if (kept.empty()) continue;
        Feature nf;
        nf.geometry = (g.type == Geometry::Type::Point)
                          ? Geometry::point(kept[0])
                          : Geometry::multi_point(std::move(kept));
        nf.attributes = f.attributes;
        out.features.push_back(std::move(nf));
      } else {
        std::vector<std::vector<Vec2>> parts;
        for (const auto& line : g.lines) {
          std::vector<Vec2> run;
          for (std::size_t i = 0; i + 1 < line.size(); ++i) {
            Vec2 mid = (line[i] + line[i + 1]) * 0.5;
            bool in = near_lines(line[i]) && near_lines(line[i + 1]) && near_lines(mid);
            if (in) {
              if (run.empty()) run.push_back(line[i]);
              run.push_back(line[i + 1]);
            } else if (!run.empty()) {
              parts.push_back(run);
              run.clear();
            }
          }
          if (!run.empty()) parts.push_back(run);
        }
        if (parts.empty()) continue;
        Feature nf;
        nf.geometry = parts.size() == 1 ? Geometry::line_string(std::move(parts[0]))
                                        : Geometry::multi_line_string(std::move(parts));
        nf.attributes = f.attributes;
        out.features.push_back(std::move(nf));
      }
    }
  }
  out.recompute_dimension();
  return out;
}

}  // namespace geoagent

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <random>
#include <unordered_map>
#include <vector>

#include "geoagent/geometry.hpp"
#include "geoagent/overlay.hpp"
#include "geoagent/raster.hpp"

// Remote-sensing style grid operations: crop by polygon mask, unsupervised
// land-use classification, raster-to-vector conversion, band compositing.
// Everything is a pure function and bitwise deterministic: k-means uses a
// seeded generator with a fixed reduction order, polygonization traces exact
// cell-edge boundaries.

namespace geoagent {

struct ClassificationParams {
  int k = 5;
  std::uint32_t seed = 42;
  int max_iters = 100;
};

// Trim to the mask bounding box (grid-aligned) and blank out cells whose
// centers fall outside the mask polygons.
inline RasterGrid crop_raster(const RasterGrid& r, const FeatureCollection& mask) {
  r.check();
  if (mask.dimension != 2) throw DimensionMismatch("crop mask must be polygonal");
  Box mb = bounds(mask);
  Box ext = r.extent();
  if (!mb.overlaps(ext)) throw EmptyOverlap("mask does not overlap the raster extent");

  int c0 = std::max(0, static_cast<int>(std::floor((mb.minx - r.origin.x) / r.cell_size)));
  int c1 = std::min(r.width, static_cast<int>(std::ceil((mb.maxx - r.origin.x) / r.cell_size)));
  int r0 = std::max(0, static_cast<int>(std::floor((r.origin.y - mb.maxy) / r.cell_size)));
  int r1 = std::min(r.height, static_cast<int>(std::ceil((r.origin.y - mb.miny) / r.cell_size)));
  if (c0 >= c1 || r0 >= r1) throw EmptyOverlap("mask window contains no cells");

  std::vector<Polygon> region = collect_polygons(mask);
  RasterGrid out;
  out.width = c1 - c0;
  out.height = r1 - r0;
  out.origin = {r.origin.x + c0 * r.cell_size, r.origin.y - r0 * r.cell_size};
  out.cell_size = r.cell_size;
  out.nodata = r.nodata;
  out.bands.assign(r.bands.size(),
                   std::vector<double>(static_cast<std::size_t>(out.width) * out.height));
  for (int row = r0; row < r1; ++row) {
    for (int col = c0; col < c1; ++col) {
      bool inside = point_in_region(r.cell_center(row, col), region);
      for (std::size_t b = 0; b < r.bands.size(); ++b)
        out.at(b, row - r0, col - c0) = inside ? r.at(b, row, col) : r.nodata;
    }
  }
  return out;
}

namespace raster_detail {

inline bool pixel_is_nodata(const RasterGrid& r, int row, int col) {
  for (std::size_t b = 0; b < r.bands.size(); ++b)
    if (r.at(b, row, col) == r.nodata) return true;
  return false;
}

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// uniform double in [0,1) from raw engine output; avoids the
// implementation-defined std distributions
inline double unit_draw(std::mt19937& rng) { return rng() / 4294967296.0; }

}  // namespace raster_detail

// Single-band label raster from k-means over per-pixel band vectors.
// k-means++ seeding, Lloyd iterations until assignments are stable, labels
// renumbered by ascending centroid norm so reruns are identical.
inline RasterGrid classify_landuse(const RasterGrid& r, const ClassificationParams& p) {
  r.check();
  if (p.k < 2) throw GridError("class count must be at least 2");
  if (p.max_iters < 1) throw GridError("max_iters must be at least 1");

  const std::size_t nb = r.bands.size();
  std::vector<std::vector<double>> pixels;
  std::vector<std::size_t> pixel_cell;
  for (int row = 0; row < r.height; ++row) {
    for (int col = 0; col < r.width; ++col) {
      if (raster_detail::pixel_is_nodata(r, row, col)) continue;
      std::vector<double> v(nb);
      for (std::size_t b = 0; b < nb; ++b) v[b] = r.at(b, row, col);
      pixels.push_back(std::move(v));
      pixel_cell.push_back(static_cast<std::size_t>(row) * r.width + col);
    }
  }
  {
    auto distinct = pixels;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (static_cast<int>(distinct.size()) < p.k)
      throw TooFewDistinctPixels("need at least " + std::to_string(p.k) +
                                 " distinct pixel vectors, have " +
                                 std::to_string(distinct.size()));
  }

  std::mt19937 rng(p.seed);
  const std::size_t n = pixels.size();
  std::vector<std::vector<double>> centroids;
  centroids.push_back(pixels[rng() % n]);
  std::vector<double> d2(n);
  while (static_cast<int>(centroids.size()) < p.k) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = raster_detail::sq_dist(pixels[i], centroids[0]);
      for (std::size_t c = 1; c < centroids.size(); ++c)
        best = std::min(best, raster_detail::sq_dist(pixels[i], centroids[c]));
      d2[i] = best;
      total += best;
    }
    double target = raster_detail::unit_draw(rng) * total;
    std::size_t pick = n - 1;
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc >= target && d2[i] > 0) {
        pick = i;
        break;
      }
    }
    centroids.push_back(pixels[pick]);
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < p.max_iters; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bd = raster_detail::sq_dist(pixels[i], centroids[0]);
      for (int c = 1; c < p.k; ++c) {
        double d = raster_detail::sq_dist(pixels[i], centroids[c]);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<std::vector<double>> sums(p.k, std::vector<double>(nb, 0.0));
    std::vector<std::size_t> counts(p.k, 0);
    for (std::size_t i = 0; i < n; ++i) {  // fixed order: pixel scan order
      for (std::size_t b = 0; b < nb; ++b) sums[assign[i]][b] += pixels[i][b];
      ++counts[assign[i]];
    }
    for (int c = 0; c < p.k; ++c) {
      if (counts[c] == 0) continue;  // keep previous centroid
      for (std::size_t b = 0; b < nb; ++b) centroids[c][b] = sums[c][b] / counts[c];
    }
  }

  // deterministic label ids: ascending centroid norm, ties lexicographic
  std::vector<int> order(p.k);
  for (int c = 0; c < p.k; ++c) order[c] = c;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double na = 0, nbv = 0;
    for (std::size_t i = 0; i < nb; ++i) {
      na += centroids[a][i] * centroids[a][i];
      nbv += centroids[b][i] * centroids[b][i];
    }
    if (na != nbv) return na < nbv;
    return centroids[a] < centroids[b];
  });
  std::vector<int> relabel(p.k);
  for (int rank = 0; rank < p.k; ++rank) relabel[order[rank]] = rank;

  RasterGrid out;
  out.width = r.width;
  out.height = r.height;
  out.origin = r.origin;
  out.cell_size = r.cell_size;
  out.nodata = r.nodata;
  out.bands.assign(1, std::vector<double>(static_cast<std::size_t>(r.width) * r.height,
                                          r.nodata));
  for (std::size_t i = 0; i < n; ++i)
    out.bands[0][pixel_cell[i]] = relabel[assign[i]];
  return out;
}

// ---------------------------------------------------------------------------
// polygonization

namespace raster_detail {

struct GridPt {
  int x = 0, y = 0;  // grid corner, y measured upward from the lower edge
  friend bool operator==(GridPt a, GridPt b) { return a.x == b.x && a.y == b.y; }
};
struct GridPtHash {
  std::size_t operator()(GridPt p) const {
    return static_cast<std::size_t>(p.x) * 73856093u ^
           static_cast<std::size_t>(p.y) * 19349663u;
  }
};

struct DirEdge {
  GridPt a, b;
};

// Assemble directed unit edges (component interior on the left) into simple
// rings: across-interior pairing at pinch corners, split on revisits.
inline std::vector<std::vector<GridPt>> assemble_grid_rings(std::vector<DirEdge> edges) {
  struct End {
    int edge;
    bool outgoing;
    int dx, dy;
  };
  std::unordered_map<GridPt, std::vector<End>, GridPtHash> nodes;
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    const DirEdge& e = edges[i];
    nodes[e.a].push_back({i, true, e.b.x - e.a.x, e.b.y - e.a.y});
    nodes[e.b].push_back({i, false, e.a.x - e.b.x, e.a.y - e.b.y});
  }
  auto angle_less = [](const End& p, const End& q) {
    auto half = [](int dx, int dy) { return (dy < 0 || (dy == 0 && dx < 0)) ? 1 : 0; };
    int h1 = half(p.dx, p.dy), h2 = half(q.dx, q.dy);
    if (h1 != h2) return h1 < h2;
    return p.dx * q.dy - p.dy * q.dx > 0;
  };
  std::vector<int> succ(edges.size(), -1);
  for (auto& [pt, ends] : nodes) {
    (void)pt;
    std::sort(ends.begin(), ends.end(), angle_less);
    int n = static_cast<int>(ends.size());
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
      if (ends[i].outgoing) continue;
      for (int step = 1; step <= n; ++step) {
        int j = (i - step % n + n) % n;
        if (ends[j].outgoing && !used[j]) {
          used[j] = true;
          succ[ends[i].edge] = ends[j].edge;
          break;
        }
      }
    }
  }
  std::vector<std::vector<GridPt>> rings;
  std::vector<bool> visited(edges.size(), false);
  for (int start = 0; start < static_cast<int>(edges.size()); ++start) {
    if (visited[start]) continue;
    std::vector<GridPt> path;
    int cur = start;
    bool closed = false;
    while (cur >= 0 && !visited[cur]) {
      visited[cur] = true;
      path.push_back(edges[cur].a);
      cur = succ[cur];
      if (cur == start) {
        closed = true;
        break;
      }
    }
    if (!closed) continue;
    // drop collinear midpoints, then split revisited vertices into rings
    std::vector<GridPt> slim;
    int n = static_cast<int>(path.size());
    for (int i = 0; i < n; ++i) {
      GridPt prev = path[(i + n - 1) % n], cur2 = path[i], next = path[(i + 1) % n];
      int cx = (cur2.x - prev.x) * (next.y - cur2.y) - (cur2.y - prev.y) * (next.x - cur2.x);
      if (cx != 0) slim.push_back(cur2);
    }
    std::vector<GridPt> stack;
    std::unordered_map<GridPt, int, GridPtHash> where;
    auto emit = [&](std::vector<GridPt> ring) {
      if (ring.size() >= 3) rings.push_back(std::move(ring));
    };
    for (GridPt p : slim) {
      auto it = where.find(p);
      if (it != where.end()) {
        std::vector<GridPt> ring(stack.begin() + it->second, stack.end());
        for (std::size_t k2 = it->second; k2 < stack.size(); ++k2)
          if (!(stack[k2] == p)) where.erase(stack[k2]);
        stack.resize(it->second);
        emit(std::move(ring));
      }
      where[p] = static_cast<int>(stack.size());
      stack.push_back(p);
    }
    emit(std::move(stack));
  }
  return rings;
}

inline long ring_area2(const std::vector<GridPt>& r) {
  long a = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    GridPt p = r[i], q = r[(i + 1) % r.size()];
    a += static_cast<long>(p.x) * q.y - static_cast<long>(p.y) * q.x;
  }
  return a;
}

inline bool grid_point_in_ring(GridPt q, const std::vector<GridPt>& ring) {
  int hits = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    GridPt a = ring[i], b = ring[(i + 1) % ring.size()];
    long o = static_cast<long>(b.x - a.x) * (q.y - a.y) -
             static_cast<long>(b.y - a.y) * (q.x - a.x);
    bool span = std::min(a.x, b.x) <= q.x && q.x <= std::max(a.x, b.x) &&
                std::min(a.y, b.y) <= q.y && q.y <= std::max(a.y, b.y);
    if (o == 0 && span) return true;
    if ((a.y > q.y) == (b.y > q.y)) continue;
    if (b.y > a.y ? o > 0 : o < 0) ++hits;
  }
  return (hits % 2) == 1;
}

}  // namespace raster_detail

// One polygon feature per 4-connected component of equal labels, geometry
// following the exact cell edges, attribute "class" carrying the label.
inline FeatureCollection raster_to_vector(const RasterGrid& r) {
  r.check();
  if (r.bands.size() != 1)
    throw NotLabelRaster("raster has " + std::to_string(r.bands.size()) + " bands");
  for (double v : r.bands[0])
    if (v != r.nodata && (v != std::floor(v) || std::abs(v) > 1e9))
      throw NotLabelRaster("raster values are not integer class labels");

  const int w = r.width, h = r.height;
  std::vector<int> comp(static_cast<std::size_t>(w) * h, -1);
  struct CompInfo {
    double label;
    std::vector<int> cells;
  };
  std::vector<CompInfo> comps;
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      int idx = row * w + col;
      if (comp[idx] >= 0 || r.bands[0][idx] == r.nodata) continue;
      int id = static_cast<int>(comps.size());
      comps.push_back({r.bands[0][idx], {}});
      std::queue<int> q;
      q.push(idx);
      comp[idx] = id;
      while (!q.empty()) {
        int cur = q.front();
        q.pop();
        comps[id].cells.push_back(cur);
        int cr = cur / w, cc = cur % w;
        const int dr[4] = {-1, 1, 0, 0};
        const int dc[4] = {0, 0, -1, 1};
        for (int d = 0; d < 4; ++d) {
          int nr = cr + dr[d], nc = cc + dc[d];
          if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
          int nidx = nr * w + nc;
          if (comp[nidx] >= 0 || r.bands[0][nidx] != comps[id].label) continue;
          comp[nidx] = id;
          q.push(nidx);
        }
      }
    }
  }

  double x0 = r.origin.x;
  double y0 = r.origin.y - h * r.cell_size;  // lower-left corner
  FeatureCollection out;
  for (const auto& ci : comps) {
    // boundary edges with the component on the left, in y-up grid coords
    std::vector<raster_detail::DirEdge> edges;
    auto in_comp = [&](int row, int col) {
      if (row < 0 || row >= h || col < 0 || col >= w) return false;
      int idx = row * w + col;
      return comp[idx] >= 0 && &comps[comp[idx]] == &ci;
    };
    for (int cell : ci.cells) {
      int row = cell / w, col = cell % w;
      int gx = col, gy = h - row - 1;  // lower-left corner of the cell, y-up
      if (!in_comp(row + 1, col))  // south
        edges.push_back({{gx, gy}, {gx + 1, gy}});
      if (!in_comp(row, col + 1))  // east
        edges.push_back({{gx + 1, gy}, {gx + 1, gy + 1}});
      if (!in_comp(row - 1, col))  // north
        edges.push_back({{gx + 1, gy + 1}, {gx, gy + 1}});
      if (!in_comp(row, col - 1))  // west
        edges.push_back({{gx, gy + 1}, {gx, gy}});
    }
    auto rings = raster_detail::assemble_grid_rings(std::move(edges));
    std::vector<int> outers, holes;
    for (int i = 0; i < static_cast<int>(rings.size()); ++i)
      (raster_detail::ring_area2(rings[i]) > 0 ? outers : holes).push_back(i);
    auto to_ring = [&](const std::vector<raster_detail::GridPt>& g) {
      Ring ring;
      for (auto p : g) ring.push_back({x0 + p.x * r.cell_size, y0 + p.y * r.cell_size});
      ring.push_back(ring.front());
      return ring;
    };
    std::vector<Polygon> polys;
    std::vector<int> hole_home(holes.size(), -1);
    for (std::size_t oi = 0; oi < outers.size(); ++oi) {
      Polygon poly;
      poly.outer = to_ring(rings[outers[oi]]);
      polys.push_back(std::move(poly));
    }
    for (std::size_t hi = 0; hi < holes.size(); ++hi) {
      long best_area = 0;
      for (std::size_t oi = 0; oi < outers.size(); ++oi) {
        long oa = raster_detail::ring_area2(rings[outers[oi]]);
        if (oa < -raster_detail::ring_area2(rings[holes[hi]])) continue;
        if (raster_detail::grid_point_in_ring(rings[holes[hi]][0], rings[outers[oi]])) {
          if (hole_home[hi] < 0 || oa < best_area) {
            hole_home[hi] = static_cast<int>(oi);
            best_area = oa;
          }
        }
      }
      if (hole_home[hi] >= 0)
        polys[hole_home[hi]].holes.push_back(to_ring(rings[holes[hi]]));
    }
    Feature f;
    f.geometry = polys.size() == 1 ? Geometry::polygon(std::move(polys[0]))
                                   : Geometry::multi_polygon(std::move(polys));
    f.attributes["class"] = ci.label;
    out.features.push_back(std::move(f));
  }
  normalize(out);
  return out;
}

// Stack the bands of several identically-georeferenced grids.
inline RasterGrid composite_bands(const std::vector<RasterGrid>& grids) {
  if (grids.size() < 2) throw GridMismatch("composite needs at least 2 rasters");
  for (const auto& g : grids) g.check();
  const RasterGrid& first = grids[0];
  RasterGrid out = first;
  for (std::size_t i = 1; i < grids.size(); ++i) {
    const RasterGrid& g = grids[i];
    if (g.width != first.width || g.height != first.height ||
        g.cell_size != first.cell_size || !(g.origin == first.origin) ||
        g.nodata != first.nodata)
      throw GridMismatch("raster " + std::to_string(i) + " does not match the first grid");
    for (const auto& b : g.bands) out.bands.push_back(b);
  }
  return out;
}

}  // namespace geoagent

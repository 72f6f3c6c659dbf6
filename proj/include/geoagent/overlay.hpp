#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "geoagent/geometry.hpp"

// Boundary-tracing overlay for polygon sets. The pipeline:
//
//   1. recenter + snap every vertex onto the 1e-9 integer grid,
//   2. split all edges at pairwise intersections (proper crossings,
//      endpoint touches, collinear overlaps), so no fragment interior
//      meets any other geometry,
//   3. group geometrically coincident fragments and classify each group
//      once by winding numbers sampled just left/right of its midpoint,
//   4. keep the groups where the boolean predicate flips across the
//      segment, oriented with the result interior on the left,
//   5. re-link fragments into rings, resolving pinch vertices by the
//      across-interior turn rule and splitting rings that revisit a vertex,
//   6. nest clockwise rings as holes of the smallest enclosing outer.
//
// Coincident-edge degeneracies (a ∩ a, shared borders, duplicated inputs)
// reduce to the per-group decision, which is what makes the scheme stable.

namespace geoagent {

enum class BoolOp { Union, Intersection, Difference };

namespace overlay_detail {

using i64 = std::int64_t;
using i128 = __int128;

struct IPt {
  i64 x = 0;
  i64 y = 0;
  friend bool operator==(IPt a, IPt b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(IPt a, IPt b) { return !(a == b); }
  friend bool operator<(IPt a, IPt b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  }
};

struct IPtHash {
  std::size_t operator()(IPt p) const {
    std::uint64_t h = static_cast<std::uint64_t>(p.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(p.y) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

inline i128 orient(IPt a, IPt b, IPt c) {
  return i128(b.x - a.x) * i128(c.y - a.y) - i128(b.y - a.y) * i128(c.x - a.x);
}

inline int sgn(i128 v) { return (v > 0) - (v < 0); }

inline bool in_span(IPt a, IPt b, IPt p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

struct Edge {
  IPt a, b;
  int set = 0;  // 0 = first operand, 1 = second
  std::vector<IPt> cuts;
};

struct Frag {
  IPt a, b;
  int set = 0;
  int group = -1;
};

struct SegKey {
  IPt lo, hi;
  friend bool operator==(const SegKey& x, const SegKey& y) {
    return x.lo == y.lo && x.hi == y.hi;
  }
};

struct SegKeyHash {
  std::size_t operator()(const SegKey& k) const {
    IPtHash h;
    return h(k.lo) * 1315423911u ^ h(k.hi);
  }
};

// Angular order of integer direction vectors without transcendentals:
// split at the -x axis, then compare by exact cross product.
inline bool angle_less(IPt d1, IPt d2) {
  auto half = [](IPt d) { return (d.y < 0 || (d.y == 0 && d.x < 0)) ? 1 : 0; };
  int h1 = half(d1), h2 = half(d2);
  if (h1 != h2) return h1 < h2;
  return i128(d1.x) * i128(d2.y) - i128(d1.y) * i128(d2.x) > 0;
}

class Engine {
 public:
  Engine(const std::vector<Polygon>& a, const std::vector<Polygon>& b) {
    Box box;
    auto touch = [&](const Polygon& p) {
      for (auto v : p.outer) box.expand(v);
      for (const auto& h : p.holes)
        for (auto v : h) box.expand(v);
    };
    for (const auto& p : a) touch(p);
    for (const auto& p : b) touch(p);
    if (!box.valid()) {
      cx_ = cy_ = 0;
    } else {
      if (box.width() > 4e6 || box.height() > 4e6)
        throw GeometryError("overlay extent exceeds supported range");
      cx_ = snap_coord((box.minx + box.maxx) / 2);
      cy_ = snap_coord((box.miny + box.maxy) / 2);
    }
    for (const auto& p : a) add_polygon(p, 0);
    for (const auto& p : b) add_polygon(p, 1);
  }

  std::vector<Polygon> run(BoolOp op) {
    split_edges();
    build_fragments();
    classify_groups(op);
    link_rings();
    return assemble();
  }

 private:
  double cx_ = 0, cy_ = 0;
  std::vector<Edge> edges_;
  std::vector<Frag> frags_;
  std::vector<Frag> kept_;

  // Group of coincident fragments: shared geometry, decided once.
  struct Group {
    IPt lo, hi;
    std::vector<int> members;
  };
  std::vector<Group> groups_;

  // y-strip index over all fragments for winding queries.
  double strip_y0_ = 0, strip_h_ = 1;
  int nstrips_ = 1;
  std::vector<std::vector<int>> strips_;

  // coarse 2d grid for clearance queries.
  double cell_ = 1;
  double gx0_ = 0, gy0_ = 0;
  int gw_ = 1, gh_ = 1;
  std::unordered_map<i64, std::vector<int>> cells_;

  IPt to_grid(Vec2 p) const {
    return {static_cast<i64>(std::llround((p.x - cx_) * 1e9)),
            static_cast<i64>(std::llround((p.y - cy_) * 1e9))};
  }
  Vec2 from_grid(IPt p) const {
    return {snap_coord(static_cast<double>(p.x) / 1e9 + cx_),
            snap_coord(static_cast<double>(p.y) / 1e9 + cy_)};
  }

  void add_ring(const Ring& r, int set) {
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      IPt a = to_grid(r[i]), b = to_grid(r[i + 1]);
      if (a == b) continue;
      edges_.push_back({a, b, set, {}});
    }
  }
  void add_polygon(const Polygon& p, int set) {
    add_ring(p.outer, set);
    for (const auto& h : p.holes) add_ring(h, set);
  }

  static void intersect_pair(Edge& e, Edge& f) {
    i64 minx = std::max(std::min(e.a.x, e.b.x), std::min(f.a.x, f.b.x));
    i64 maxx = std::min(std::max(e.a.x, e.b.x), std::max(f.a.x, f.b.x));
    i64 miny = std::max(std::min(e.a.y, e.b.y), std::min(f.a.y, f.b.y));
    i64 maxy = std::min(std::max(e.a.y, e.b.y), std::max(f.a.y, f.b.y));
    if (minx > maxx || miny > maxy) return;

    i128 o1 = orient(e.a, e.b, f.a);
    i128 o2 = orient(e.a, e.b, f.b);
    i128 o3 = orient(f.a, f.b, e.a);
    i128 o4 = orient(f.a, f.b, e.b);

    if (o1 == 0 && o2 == 0) {
      // collinear: cut each at the other's endpoints inside its span
      if (in_span(e.a, e.b, f.a)) e.cuts.push_back(f.a);
      if (in_span(e.a, e.b, f.b)) e.cuts.push_back(f.b);
      if (in_span(f.a, f.b, e.a)) f.cuts.push_back(e.a);
      if (in_span(f.a, f.b, e.b)) f.cuts.push_back(e.b);
      return;
    }
    if (o1 == 0 && in_span(e.a, e.b, f.a)) e.cuts.push_back(f.a);
    if (o2 == 0 && in_span(e.a, e.b, f.b)) e.cuts.push_back(f.b);
    if (o3 == 0 && in_span(f.a, f.b, e.a)) f.cuts.push_back(e.a);
    if (o4 == 0 && in_span(f.a, f.b, e.b)) f.cuts.push_back(e.b);

    if (sgn(o1) * sgn(o2) < 0 && sgn(o3) * sgn(o4) < 0) {
      // proper crossing; o3/(o3-o4) parameterizes along e
      long double t = static_cast<long double>(o3) /
                      (static_cast<long double>(o3) - static_cast<long double>(o4));
      IPt p{static_cast<i64>(std::llround(
                static_cast<long double>(e.a.x) + t * (e.b.x - e.a.x))),
            static_cast<i64>(std::llround(
                static_cast<long double>(e.a.y) + t * (e.b.y - e.a.y)))};
      e.cuts.push_back(p);
      f.cuts.push_back(p);
    }
  }

  void split_edges() {
    // bucket edges into a uniform grid; intersect within shared cells
    Box b;
    for (const auto& e : edges_) {
      b.expand(Vec2{static_cast<double>(e.a.x), static_cast<double>(e.a.y)});
      b.expand(Vec2{static_cast<double>(e.b.x), static_cast<double>(e.b.y)});
    }
    if (!b.valid()) return;
    double diag = std::max(b.width(), b.height());
    double cell = std::max(diag / 256.0, 1.0);
    auto cell_of = [&](double x, double y) {
      return std::pair<i64, i64>{static_cast<i64>(std::floor((x - b.minx) / cell)),
                                 static_cast<i64>(std::floor((y - b.miny) / cell))};
    };
    std::unordered_map<i64, std::vector<int>> buckets;
    auto key = [](i64 gx, i64 gy) { return gx * 1000003 + gy; };
    for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
      auto [x0, y0] = cell_of(std::min(edges_[i].a.x, edges_[i].b.x),
                              std::min(edges_[i].a.y, edges_[i].b.y));
      auto [x1, y1] = cell_of(std::max(edges_[i].a.x, edges_[i].b.x),
                              std::max(edges_[i].a.y, edges_[i].b.y));
      for (i64 gx = x0; gx <= x1; ++gx)
        for (i64 gy = y0; gy <= y1; ++gy) buckets[key(gx, gy)].push_back(i);
    }
    std::unordered_set<std::uint64_t> seen;
    for (auto& [k, list] : buckets) {
      (void)k;
      for (std::size_t i = 0; i < list.size(); ++i) {
        for (std::size_t j = i + 1; j < list.size(); ++j) {
          int ei = list[i], ej = list[j];
          std::uint64_t pk = (static_cast<std::uint64_t>(std::min(ei, ej)) << 32) |
                             static_cast<std::uint32_t>(std::max(ei, ej));
          if (!seen.insert(pk).second) continue;
          intersect_pair(edges_[ei], edges_[ej]);
        }
      }
    }
  }

  void build_fragments() {
    std::unordered_map<SegKey, int, SegKeyHash> group_of;
    for (auto& e : edges_) {
      auto& cuts = e.cuts;
      // order cuts along the edge by exact projection onto (b - a)
      IPt a = e.a, b = e.b;
      auto proj = [&](IPt p) {
        return i128(p.x - a.x) * i128(b.x - a.x) + i128(p.y - a.y) * i128(b.y - a.y);
      };
      std::sort(cuts.begin(), cuts.end(),
                [&](IPt u, IPt v) { return proj(u) < proj(v); });
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      std::vector<IPt> chain;
      chain.push_back(a);
      i128 lo = 0, hi = proj(b);
      for (IPt c : cuts) {
        i128 t = proj(c);
        if (t <= lo || t >= hi) continue;
        chain.push_back(c);
      }
      chain.push_back(b);
      for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        if (chain[i] == chain[i + 1]) continue;
        Frag f{chain[i], chain[i + 1], e.set, -1};
        SegKey k = f.a < f.b ? SegKey{f.a, f.b} : SegKey{f.b, f.a};
        auto it = group_of.find(k);
        if (it == group_of.end()) {
          it = group_of.emplace(k, static_cast<int>(groups_.size())).first;
          groups_.push_back({k.lo, k.hi, {}});
        }
        f.group = it->second;
        groups_[f.group].members.push_back(static_cast<int>(frags_.size()));
        frags_.push_back(f);
      }
    }
    build_indices();
  }

  void build_indices() {
    Box b;
    for (const auto& f : frags_) {
      b.expand(Vec2{static_cast<double>(f.a.x), static_cast<double>(f.a.y)});
      b.expand(Vec2{static_cast<double>(f.b.x), static_cast<double>(f.b.y)});
    }
    if (!b.valid()) return;

    nstrips_ = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(frags_.size()))) * 2,
                          16, 2048);
    strip_y0_ = b.miny;
    strip_h_ = std::max((b.maxy - b.miny) / nstrips_, 1.0);
    strips_.assign(nstrips_, {});
    for (int i = 0; i < static_cast<int>(frags_.size()); ++i) {
      double y0 = static_cast<double>(std::min(frags_[i].a.y, frags_[i].b.y));
      double y1 = static_cast<double>(std::max(frags_[i].a.y, frags_[i].b.y));
      int s0 = strip_index(y0), s1 = strip_index(y1);
      for (int s = s0; s <= s1; ++s) strips_[s].push_back(i);
    }

    cell_ = std::max(std::max(b.width(), b.height()) / 256.0, 8.0);
    gx0_ = b.minx;
    gy0_ = b.miny;
    cells_.clear();
    for (int i = 0; i < static_cast<int>(frags_.size()); ++i) {
      i64 x0 = static_cast<i64>(std::floor((std::min(frags_[i].a.x, frags_[i].b.x) - gx0_) / cell_));
      i64 x1 = static_cast<i64>(std::floor((std::max(frags_[i].a.x, frags_[i].b.x) - gx0_) / cell_));
      i64 y0 = static_cast<i64>(std::floor((std::min(frags_[i].a.y, frags_[i].b.y) - gy0_) / cell_));
      i64 y1 = static_cast<i64>(std::floor((std::max(frags_[i].a.y, frags_[i].b.y) - gy0_) / cell_));
      for (i64 gx = x0; gx <= x1; ++gx)
        for (i64 gy = y0; gy <= y1; ++gy)
          cells_[gx * 1000003 + gy].push_back(i);
    }
  }

  int strip_index(double y) const {
    int s = static_cast<int>((y - strip_y0_) / strip_h_);
    return std::clamp(s, 0, nstrips_ - 1);
  }

  // winding numbers of both operand regions at q (never on any fragment)
  void winding(double qx, double qy, int& wa, int& wb) const {
    wa = wb = 0;
    if (strips_.empty()) return;
    for (int fi : strips_[strip_index(qy)]) {
      const Frag& f = frags_[fi];
      double y1 = static_cast<double>(f.a.y), y2 = static_cast<double>(f.b.y);
      if ((y1 > qy) == (y2 > qy)) continue;
      double x1 = static_cast<double>(f.a.x), x2 = static_cast<double>(f.b.x);
      double xc = x1 + (qy - y1) * (x2 - x1) / (y2 - y1);
      if (xc > qx) (f.set == 0 ? wa : wb) += (y2 > y1) ? 1 : -1;
    }
  }

  double clearance(double mx, double my, int gid) const {
    double best = cell_;
    i64 gx = static_cast<i64>(std::floor((mx - gx0_) / cell_));
    i64 gy = static_cast<i64>(std::floor((my - gy0_) / cell_));
    for (i64 dx = -1; dx <= 1; ++dx) {
      for (i64 dy = -1; dy <= 1; ++dy) {
        auto it = cells_.find((gx + dx) * 1000003 + (gy + dy));
        if (it == cells_.end()) continue;
        for (int fi : it->second) {
          if (frags_[fi].group == gid) continue;
          double d = dist_point_segment(
              {mx, my},
              {static_cast<double>(frags_[fi].a.x), static_cast<double>(frags_[fi].a.y)},
              {static_cast<double>(frags_[fi].b.x), static_cast<double>(frags_[fi].b.y)});
          best = std::min(best, d);
        }
      }
    }
    return best;
  }

  void classify_groups(BoolOp op) {
    auto pred = [op](bool ia, bool ib) {
      switch (op) {
        case BoolOp::Union: return ia || ib;
        case BoolOp::Intersection: return ia && ib;
        case BoolOp::Difference: return ia && !ib;
      }
      return false;
    };
    for (int gi = 0; gi < static_cast<int>(groups_.size()); ++gi) {
      const Group& g = groups_[gi];
      double ax = static_cast<double>(g.lo.x), ay = static_cast<double>(g.lo.y);
      double bx = static_cast<double>(g.hi.x), by = static_cast<double>(g.hi.y);
      double mx = (ax + bx) / 2, my = (ay + by) / 2;
      double len = std::hypot(bx - ax, by - ay);
      double delta = std::min(clearance(mx, my, gi) / 4.0, len / 4.0);
      delta = std::max(delta, 0.125);
      double nx = -(by - ay) / len, ny = (bx - ax) / len;  // left of lo->hi
      int wal, wbl, war, wbr;
      winding(mx + delta * nx, my + delta * ny, wal, wbl);
      winding(mx - delta * nx, my - delta * ny, war, wbr);
      bool rl = pred(wal != 0, wbl != 0);
      bool rr = pred(war != 0, wbr != 0);
      if (rl == rr) continue;
      Frag kf;
      kf.set = 0;
      kf.group = gi;
      if (rl) {  // interior on the left of lo->hi
        kf.a = g.lo;
        kf.b = g.hi;
      } else {
        kf.a = g.hi;
        kf.b = g.lo;
      }
      kept_.push_back(kf);
    }
  }

  std::vector<std::vector<IPt>> rings_;

  void link_rings() {
    struct End {
      int frag;
      bool outgoing;
      IPt dir;  // ray direction seen from the node
    };
    std::unordered_map<IPt, std::vector<End>, IPtHash> nodes;
    for (int i = 0; i < static_cast<int>(kept_.size()); ++i) {
      const Frag& f = kept_[i];
      nodes[f.a].push_back({i, true, {f.b.x - f.a.x, f.b.y - f.a.y}});
      nodes[f.b].push_back({i, false, {f.a.x - f.b.x, f.a.y - f.b.y}});
    }
    std::vector<int> succ(kept_.size(), -1);
    for (auto& [pt, ends] : nodes) {
      (void)pt;
      std::sort(ends.begin(), ends.end(),
                [](const End& a, const End& b) { return angle_less(a.dir, b.dir); });
      int n = static_cast<int>(ends.size());
      std::vector<bool> used(n, false);
      for (int i = 0; i < n; ++i) {
        if (ends[i].outgoing) continue;
        // across-interior rule: the next outgoing clockwise from the arrival ray
        for (int step = 1; step <= n; ++step) {
          int j = (i - step % n + n) % n;
          if (ends[j].outgoing && !used[j]) {
            used[j] = true;
            succ[ends[i].frag] = ends[j].frag;
            break;
          }
        }
      }
    }
    std::vector<bool> visited(kept_.size(), false);
    for (int start = 0; start < static_cast<int>(kept_.size()); ++start) {
      if (visited[start]) continue;
      std::vector<IPt> path;
      int cur = start;
      bool closed = false;
      while (cur >= 0 && !visited[cur]) {
        visited[cur] = true;
        path.push_back(kept_[cur].a);
        cur = succ[cur];
        if (cur == start) {
          closed = true;
          break;
        }
      }
      if (!closed) continue;  // drop defective chains rather than crash
      split_ring(path);
    }
  }

  // extract simple rings out of a closed walk that may revisit vertices
  void split_ring(const std::vector<IPt>& path) {
    std::vector<IPt> stack;
    std::unordered_map<IPt, int, IPtHash> where;
    for (IPt p : path) {
      auto it = where.find(p);
      if (it != where.end()) {
        std::vector<IPt> ring(stack.begin() + it->second, stack.end());
        for (std::size_t k = it->second; k < stack.size(); ++k)
          if (!(stack[k] == p)) where.erase(stack[k]);
        stack.resize(it->second);
        emit_ring(ring);
      }
      where[p] = static_cast<int>(stack.size());
      stack.push_back(p);
    }
    emit_ring(stack);
  }

  void emit_ring(std::vector<IPt> ring) {
    if (ring.size() < 3) return;
    i128 a2 = 0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      IPt p = ring[i], q = ring[(i + 1) % ring.size()];
      a2 += i128(p.x) * i128(q.y) - i128(p.y) * i128(q.x);
    }
    if (a2 == 0) return;
    rings_.push_back(std::move(ring));
  }

  static bool point_in_iring(IPt q, const std::vector<IPt>& ring) {
    int hits = 0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      IPt a = ring[i], b = ring[(i + 1) % ring.size()];
      i128 o = orient(a, b, q);
      if (o == 0 && in_span(a, b, q)) return true;  // boundary counts inside
      if ((a.y > q.y) == (b.y > q.y)) continue;
      if (b.y > a.y ? o > 0 : o < 0) ++hits;
    }
    return (hits % 2) == 1;
  }

  std::vector<Polygon> assemble() {
    struct RingInfo {
      std::vector<IPt>* pts;
      i128 area2;
      bool ccw;
    };
    std::vector<RingInfo> infos;
    for (auto& r : rings_) {
      i128 a2 = 0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        IPt p = r[i], q = r[(i + 1) % r.size()];
        a2 += i128(p.x) * i128(q.y) - i128(p.y) * i128(q.x);
      }
      infos.push_back({&r, a2 < 0 ? -a2 : a2, a2 > 0});
    }
    std::vector<int> outers, holes;
    for (int i = 0; i < static_cast<int>(infos.size()); ++i)
      (infos[i].ccw ? outers : holes).push_back(i);
    // deterministic order: larger outers first, then first-vertex order
    std::sort(outers.begin(), outers.end(), [&](int a, int b) {
      if (infos[a].area2 != infos[b].area2) return infos[a].area2 > infos[b].area2;
      return (*infos[a].pts)[0] < (*infos[b].pts)[0];
    });
    std::vector<Polygon> result(outers.size());
    std::vector<std::vector<int>> hole_sets(outers.size());
    for (int hi : holes) {
      IPt rep = (*infos[hi].pts)[0];
      int best = -1;
      for (std::size_t oi = 0; oi < outers.size(); ++oi) {
        const RingInfo& o = infos[outers[oi]];
        if (o.area2 < infos[hi].area2) continue;
        if (point_in_iring(rep, *o.pts)) {
          if (best < 0 || infos[outers[best]].area2 > o.area2)
            best = static_cast<int>(oi);
        }
      }
      if (best >= 0) hole_sets[best].push_back(hi);
    }
    std::vector<Polygon> out;
    for (std::size_t oi = 0; oi < outers.size(); ++oi) {
      Polygon poly;
      poly.outer = to_ring(*infos[outers[oi]].pts);
      for (int hi : hole_sets[oi]) poly.holes.push_back(to_ring(*infos[hi].pts));
      out.push_back(std::move(poly));
    }
    return out;
  }

  Ring to_ring(const std::vector<IPt>& pts) const {
    Ring r;
    r.reserve(pts.size() + 1);
    for (IPt p : pts) r.push_back(from_grid(p));
    r.push_back(r.front());
    return r;
  }
};

}  // namespace overlay_detail

// Boolean combination of two polygon sets. Each operand is treated as the
// union of its (possibly overlapping) members; the result is a normalized
// multipolygon with CCW outers and CW holes.
inline std::vector<Polygon> region_overlay(const std::vector<Polygon>& a,
                                           const std::vector<Polygon>& b,
                                           BoolOp op) {
  overlay_detail::Engine engine(a, b);
  return engine.run(op);
}

// Self-union: dissolve overlaps within one set.
inline std::vector<Polygon> region_dissolve(const std::vector<Polygon>& a) {
  return region_overlay(a, {}, BoolOp::Union);
}

}  // namespace geoagent

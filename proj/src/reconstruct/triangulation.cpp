#include <chiprobe/errors.hpp>
#include <chiprobe/reconstruct/triangulation.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace chiprobe::reconstruct {

namespace {

// Coordinates are snapped to a 2^28 lattice across the bounding box so both
// predicates evaluate exactly in 64/128-bit integers.
constexpr int kLatticeBits = 28;

struct IPoint {
  std::int64_t x = 0;
  std::int64_t y = 0;
};

using Wide = __int128;

int sign(Wide v) { return (v > 0) - (v < 0); }

int orient_exact(IPoint a, IPoint b, IPoint c) {
  return sign(Wide(b.x - a.x) * (c.y - a.y) - Wide(b.y - a.y) * (c.x - a.x));
}

// > 0 when d lies strictly inside the circumcircle of counter-clockwise (a, b, c).
int incircle_exact(IPoint a, IPoint b, IPoint c, IPoint d) {
  const Wide ax = a.x - d.x, ay = a.y - d.y;
  const Wide bx = b.x - d.x, by = b.y - d.y;
  const Wide cx = c.x - d.x, cy = c.y - d.y;
  const Wide a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  return sign(ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx));
}

// p strictly inside the segment (a, b), given the three are collinear.
bool strictly_between(IPoint a, IPoint b, IPoint p) {
  if (a.x != b.x) return p.x > std::min(a.x, b.x) && p.x < std::max(a.x, b.x);
  return p.y > std::min(a.y, b.y) && p.y < std::max(a.y, b.y);
}

long double orient_l(Point a, Point b, Point c) {
  using Real = long double;
  return (Real(b.x) - a.x) * (Real(c.y) - a.y) - (Real(b.y) - a.y) * (Real(c.x) - a.x);
}

std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y, int order) {
  std::uint64_t d = 0;
  for (std::uint32_t s = 1u << (order - 1); s > 0; s >>= 1) {
    const std::uint32_t rx = (x & s) ? 1 : 0;
    const std::uint32_t ry = (y & s) ? 1 : 0;
    d += std::uint64_t(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = s - 1 - x;
        y = s - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

// Counter-clockwise; n[k] lies across the edge opposite v[k]. A ghost triangle
// (u, v, inf) closes each hull edge from outside, the exterior lying to the
// left of u -> v.
struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> n;
  bool alive = true;
};

class Builder {
 public:
  Builder(std::vector<IPoint> pts, int inf) : pts_(std::move(pts)), inf_(inf) {}

  /// False when every point is collinear.
  bool run(const std::vector<int>& order) {
    if (order.size() < 3) return false;
    const int a = order[0];
    int b = order[1];
    std::size_t third = order.size();
    for (std::size_t i = 2; i < order.size(); ++i)
      if (orient_exact(pts_[std::size_t(a)], pts_[std::size_t(b)], pts_[std::size_t(order[i])]) != 0) {
        third = i;
        break;
      }
    if (third == order.size()) return false;
    int c = order[third];
    if (orient_exact(pts_[std::size_t(a)], pts_[std::size_t(b)], pts_[std::size_t(c)]) < 0) std::swap(b, c);
    tris_.push_back({{a, b, c}, {-1, -1, -1}, true});
    tris_.push_back({{b, a, inf_}, {-1, -1, -1}, true});
    tris_.push_back({{c, b, inf_}, {-1, -1, -1}, true});
    tris_.push_back({{a, c, inf_}, {-1, -1, -1}, true});
    link_initial();
    mark_.assign(tris_.size(), 0);
    last_ = 0;
    for (std::size_t i = 2; i < order.size(); ++i)
      if (i != third) insert(order[i]);
    return true;
  }

  const std::vector<Tri>& tris() const { return tris_; }

 private:
  bool ghost(const Tri& t) const { return t.v[2] == inf_; }

  void link_initial() {
    for (std::size_t t = 0; t < tris_.size(); ++t)
      for (int k = 0; k < 3; ++k) {
        const int e0 = tris_[t].v[std::size_t((k + 1) % 3)], e1 = tris_[t].v[std::size_t((k + 2) % 3)];
        for (std::size_t u = 0; u < tris_.size(); ++u)
          for (int j = 0; u != t && j < 3; ++j)
            if (tris_[u].v[std::size_t((j + 1) % 3)] == e1 && tris_[u].v[std::size_t((j + 2) % 3)] == e0)
              tris_[t].n[std::size_t(k)] = int(u);
      }
  }

  bool conflict(int t, IPoint p) const {
    const Tri& tr = tris_[std::size_t(t)];
    const IPoint a = pts_[std::size_t(tr.v[0])], b = pts_[std::size_t(tr.v[1])];
    if (ghost(tr)) {
      const int o = orient_exact(a, b, p);
      return o > 0 || (o == 0 && strictly_between(a, b, p));
    }
    return incircle_exact(a, b, pts_[std::size_t(tr.v[2])], p) > 0;
  }

  int locate(IPoint p) {
    int t = last_;
    std::uint32_t rng = 2463534242u;
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
      const Tri& tr = tris_[std::size_t(t)];
      if (ghost(tr)) {
        if (conflict(t, p)) return t;
        t = tr.n[2];
        continue;
      }
      rng ^= rng << 13;
      rng ^= rng >> 17;
      rng ^= rng << 5;
      const int start = int(rng % 3);
      int next = -1;
      for (int j = 0; j < 3; ++j) {
        const int k = (start + j) % 3;
        if (orient_exact(pts_[std::size_t(tr.v[std::size_t((k + 1) % 3)])],
                         pts_[std::size_t(tr.v[std::size_t((k + 2) % 3)])], p) < 0) {
          next = tr.n[std::size_t(k)];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    for (std::size_t k = 0; k < tris_.size(); ++k)
      if (tris_[k].alive && conflict(int(k), p)) return int(k);
    throw Error(Errc::convergence, "point location failed during triangulation");
  }

  int new_tri(const Tri& tr) {
    if (!free_.empty()) {
      const int t = free_.back();
      free_.pop_back();
      tris_[std::size_t(t)] = tr;
      return t;
    }
    tris_.push_back(tr);
    mark_.push_back(0);
    return int(tris_.size()) - 1;
  }

  void set_link(int t, int opposite, int nb) {
    Tri& tr = tris_[std::size_t(t)];
    for (int k = 0; k < 3; ++k)
      if (tr.v[std::size_t(k)] == opposite) tr.n[std::size_t(k)] = nb;
  }

  void insert(int ip) {
    const IPoint p = pts_[std::size_t(ip)];
    const int seed = locate(p);
    ++stamp_;
    cavity_.assign(1, seed);
    mark_[std::size_t(seed)] = stamp_;
    for (std::size_t q = 0; q < cavity_.size(); ++q) {
      const Tri& tr = tris_[std::size_t(cavity_[q])];
      for (int k = 0; k < 3; ++k) {
        const int nb = tr.n[std::size_t(k)];
        if (mark_[std::size_t(nb)] != stamp_ && conflict(nb, p)) {
          mark_[std::size_t(nb)] = stamp_;
          cavity_.push_back(nb);
        }
      }
    }
    boundary_.clear();
    for (int t : cavity_) {
      const Tri& tr = tris_[std::size_t(t)];
      for (int k = 0; k < 3; ++k) {
        const int nb = tr.n[std::size_t(k)];
        if (mark_[std::size_t(nb)] != stamp_)
          boundary_.push_back({tr.v[std::size_t((k + 1) % 3)], tr.v[std::size_t((k + 2) % 3)], nb});
      }
    }
    for (int t : cavity_) {
      tris_[std::size_t(t)].alive = false;
      free_.push_back(t);
    }
    created_.clear();
    for (const Edge& e : boundary_) {
      // Cyclic (a, b, p), rotated so a ghost keeps inf last.
      std::array<int, 3> v{e.a, e.b, ip};
      if (e.a == inf_) v = {e.b, ip, inf_};
      if (e.b == inf_) v = {ip, e.a, inf_};
      const int t = new_tri({v, {-1, -1, -1}, true});
      set_link(t, ip, e.outer);
      Tri& o = tris_[std::size_t(e.outer)];
      for (int k = 0; k < 3; ++k)
        if (o.v[std::size_t((k + 1) % 3)] == e.b && o.v[std::size_t((k + 2) % 3)] == e.a) o.n[std::size_t(k)] = t;
      created_.push_back({e.a, e.b, t});
    }
    // Around p, the triangle on edge (a, b) meets the one starting at b across
    // (b, p) and the one ending at a across (p, a).
    for (const auto& c : created_)
      for (const auto& d : created_) {
        if (d.a == c.b) set_link(c.t, c.a, d.t);
        if (d.b == c.a) set_link(c.t, c.b, d.t);
      }
    last_ = created_.front().t;
  }

  struct Edge {
    int a, b, outer;
  };
  struct Created {
    int a, b, t;
  };

  std::vector<IPoint> pts_;
  int inf_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<int> mark_;
  std::vector<int> cavity_;
  std::vector<Created> created_;
  std::vector<Edge> boundary_;
  int stamp_ = 0;
  int last_ = 0;
};

}  // namespace

double orient(Point a, Point b, Point c) { return double(orient_l(a, b, c)); }

Triangulation::Triangulation(const std::vector<Point>& points) : points_(points) {
  const std::size_t n = points.size();
  if (n < 3) return;
  double xmin = points[0].x, xmax = xmin, ymin = points[0].y, ymax = ymin;
  for (const Point& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(Errc::domain, "triangulation point is not finite");
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-300});
  const double cx = (xmin + xmax) / 2, cy = (ymin + ymax) / 2;
  const double quantum = span / double(std::int64_t(1) << kLatticeBits);

  std::vector<IPoint> lattice(n);
  for (std::size_t i = 0; i < n; ++i) {
    lattice[i] = {std::llround((points[i].x - cx) / quantum), std::llround((points[i].y - cy) / quantum)};
    points_[i] = {cx + double(lattice[i].x) * quantum, cy + double(lattice[i].y) * quantum};
  }

  constexpr int kOrder = 16;
  const double scale = double((1u << kOrder) - 1) / span;
  std::vector<std::uint64_t> key(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hx = std::clamp((points[i].x - xmin) * scale, 0.0, double((1u << kOrder) - 1));
    const double hy = std::clamp((points[i].y - ymin) * scale, 0.0, double((1u << kOrder) - 1));
    key[i] = hilbert_index(std::uint32_t(hx), std::uint32_t(hy), kOrder);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[std::size_t(a)] < key[std::size_t(b)]; });

  // Points sharing a lattice site keep only the lowest index.
  std::vector<int> by_site(order);
  std::sort(by_site.begin(), by_site.end(), [&](int a, int b) {
    const IPoint pa = lattice[std::size_t(a)], pb = lattice[std::size_t(b)];
    return pa.x != pb.x ? pa.x < pb.x : (pa.y != pb.y ? pa.y < pb.y : a < b);
  });
  std::vector<char> skip(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    const IPoint pa = lattice[std::size_t(by_site[i - 1])], pb = lattice[std::size_t(by_site[i])];
    if (pa.x == pb.x && pa.y == pb.y) skip[std::size_t(by_site[i])] = 1;
  }
  std::erase_if(order, [&](int i) { return skip[std::size_t(i)] != 0; });

  const int inf = int(n);
  std::vector<IPoint> work = lattice;
  work.push_back({0, 0});  // never read: predicates special-case the vertex at infinity
  Builder builder(std::move(work), inf);
  if (!builder.run(order)) return;

  const auto& tris = builder.tris();
  std::vector<int> remap(tris.size(), -1);
  for (std::size_t t = 0; t < tris.size(); ++t)
    if (tris[t].alive && tris[t].v[2] != inf) {
      remap[t] = int(triangles_.size());
      triangles_.push_back(tris[t].v);
    }
  neighbors_.resize(triangles_.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    if (remap[t] < 0) continue;
    for (int k = 0; k < 3; ++k)
      neighbors_[std::size_t(remap[t])][std::size_t(k)] = remap[std::size_t(tris[t].n[std::size_t(k)])];
  }
}

Triangulation::Location Triangulation::locate(Point p, int hint) const {
  Location loc;
  if (triangles_.empty()) return loc;
  auto edge_sign = [&](int tri, int k) {
    const auto& v = triangles_[std::size_t(tri)];
    return orient_l(points_[std::size_t(v[std::size_t((k + 1) % 3)])], points_[std::size_t(v[std::size_t((k + 2) % 3)])],
                    p);
  };
  auto fill = [&](int tri) {
    const auto& v = triangles_[std::size_t(tri)];
    const long double area = orient_l(points_[std::size_t(v[0])], points_[std::size_t(v[1])], points_[std::size_t(v[2])]);
    loc.triangle = tri;
    loc.bary = {double(edge_sign(tri, 0) / area), double(edge_sign(tri, 1) / area), 0.0};
    loc.bary[2] = 1.0 - loc.bary[0] - loc.bary[1];
  };
  int t = hint >= 0 && hint < int(triangles_.size()) ? hint : 0;
  std::uint32_t rng = 88675123u;
  for (std::size_t steps = 0; steps < 4 * triangles_.size() + 16; ++steps) {
    rng ^= rng << 13;
    rng ^= rng >> 17;
    rng ^= rng << 5;
    const int start = int(rng % 3);
    int next = -2;
    for (int j = 0; j < 3; ++j) {
      const int k = (start + j) % 3;
      if (edge_sign(t, k) < 0) {
        next = neighbors_[std::size_t(t)][std::size_t(k)];
        break;
      }
    }
    if (next == -1) return loc;  // the hull is convex, so p is outside
    if (next == -2) {
      fill(t);
      return loc;
    }
    t = next;
  }
  for (std::size_t k = 0; k < triangles_.size(); ++k)
    if (edge_sign(int(k), 0) >= 0 && edge_sign(int(k), 1) >= 0 && edge_sign(int(k), 2) >= 0) {
      fill(int(k));
      return loc;
    }
  return loc;
}

std::vector<std::vector<int>> Triangulation::vertex_neighbors() const {
  std::vector<std::vector<int>> adj(points_.size());
  for (const auto& v : triangles_)
    for (int k = 0; k < 3; ++k) {
      adj[std::size_t(v[std::size_t(k)])].push_back(v[std::size_t((k + 1) % 3)]);
      adj[std::size_t(v[std::size_t(k)])].push_back(v[std::size_t((k + 2) % 3)]);
    }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return adj;
}

}  // namespace chiprobe::reconstruct

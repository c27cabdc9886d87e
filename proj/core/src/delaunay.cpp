#include "focalgraph/delaunay.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

namespace focalgraph {

double orient2d(const Point2& a, const Point2& b, const Point2& c) noexcept {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) noexcept {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  return alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
         clift * (adx * bdy - bdx * ady);
}

namespace {

// The convex hull is closed off with "ghost" triangles that share one vertex at
// infinity, so no finite super-triangle can leak into the result.
constexpr std::int32_t kInfinite = -1;
constexpr std::int32_t kNone = -1;

// Position along a Hilbert curve over a 2^16 x 2^16 grid.
std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y) {
  constexpr std::uint32_t kSide = 1u << 16;
  std::uint64_t d = 0;
  for (std::uint32_t s = kSide / 2; s > 0; s /= 2) {
    const std::uint32_t rx = (x & s) ? 1 : 0;
    const std::uint32_t ry = (y & s) ? 1 : 0;
    d += std::uint64_t{s} * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = kSide - 1 - x;
        y = kSide - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

// Insertion order: spatially coherent so each point-location walk stays short.
// Equal keys keep input order, so the first of several duplicates is the one used.
std::vector<std::int32_t> insertion_order(std::span<const Point2> points) {
  double x0 = points[0].x, x1 = x0, y0 = points[0].y, y1 = y0;
  for (const Point2& p : points) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const double scale = 65535.0 / std::max({x1 - x0, y1 - y0, 1e-300});
  std::vector<std::pair<std::uint64_t, std::int32_t>> keyed(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto qx = static_cast<std::uint32_t>((points[i].x - x0) * scale);
    const auto qy = static_cast<std::uint32_t>((points[i].y - y0) * scale);
    keyed[i] = {hilbert_index(qx, qy), static_cast<std::int32_t>(i)};
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::int32_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = keyed[i].second;
  return order;
}

struct Tri {
  std::array<std::int32_t, 3> v;  // counter-clockwise; ghost triangles hold kInfinite
  std::array<std::int32_t, 3> n;  // n[i] is the neighbour across the edge opposite v[i]
  bool alive = true;

  bool ghost() const noexcept { return v[0] == kInfinite || v[1] == kInfinite || v[2] == kInfinite; }
};

class Triangulator {
 public:
  explicit Triangulator(std::span<const Point2> points) : pts_(points) {}

  std::vector<Triangle> run() {
    const std::size_t count = pts_.size();
    if (count < 3) return {};

    const std::vector<std::int32_t> order = insertion_order(pts_);
    // Seed with the first non-degenerate triple in insertion order.
    const std::int32_t i0 = order[0];
    std::size_t k1 = count;
    for (std::size_t k = 1; k < count; ++k) {
      if (!(pt(order[k]) == pt(i0))) {
        k1 = k;
        break;
      }
    }
    if (k1 == count) return {};
    std::size_t k2 = count;
    for (std::size_t k = k1 + 1; k < count; ++k) {
      if (orient2d(pt(i0), pt(order[k1]), pt(order[k])) != 0.0) {
        k2 = k;
        break;
      }
    }
    if (k2 == count) return {};

    seed(i0, order[k1], order[k2]);
    for (std::size_t k = 1; k < count; ++k) {
      if (k == k1 || k == k2) continue;
      insert(order[k]);
    }

    std::vector<Triangle> out;
    for (const Tri& t : tris_) {
      if (t.alive && !t.ghost()) out.push_back({t.v[0], t.v[1], t.v[2]});
    }
    return out;
  }

 private:
  const Point2& pt(std::int32_t i) const { return pts_[static_cast<std::size_t>(i)]; }

  std::int32_t add(std::array<std::int32_t, 3> v) {
    Tri t{v, {kNone, kNone, kNone}, true};
    if (!free_.empty()) {
      const std::int32_t id = free_.back();
      free_.pop_back();
      tris_[static_cast<std::size_t>(id)] = t;
      return id;
    }
    tris_.push_back(t);
    return static_cast<std::int32_t>(tris_.size() - 1);
  }

  Tri& tri(std::int32_t id) { return tris_[static_cast<std::size_t>(id)]; }

  void seed(std::int32_t a, std::int32_t b, std::int32_t c) {
    if (orient2d(pt(a), pt(b), pt(c)) < 0.0) std::swap(b, c);
    const std::int32_t t = add({a, b, c});
    // Ghost across edge (b, c) is (c, b, inf), and so on.
    const std::int32_t ga = add({c, b, kInfinite});
    const std::int32_t gb = add({a, c, kInfinite});
    const std::int32_t gc = add({b, a, kInfinite});
    tri(t).n = {ga, gb, gc};
    // Ghost (c, b, inf): opposite c is edge (b, inf) -> ghost (b, a, inf); opposite b is (inf, c) -> (a, c, inf).
    tri(ga).n = {gc, gb, t};
    tri(gb).n = {ga, gc, t};
    tri(gc).n = {gb, ga, t};
    last_ = t;
  }

  // Whether point p violates triangle t (lies strictly inside its circumcircle;
  // for ghosts, strictly outside the hull edge or on its open segment).
  bool conflicts(const Tri& t, const Point2& p) const {
    if (!t.ghost()) {
      return incircle(pt(t.v[0]), pt(t.v[1]), pt(t.v[2]), p) > kIncircleEpsilon;
    }
    int k = 0;
    while (t.v[static_cast<std::size_t>(k)] != kInfinite) ++k;
    const Point2& u = pt(t.v[static_cast<std::size_t>((k + 1) % 3)]);
    const Point2& w = pt(t.v[static_cast<std::size_t>((k + 2) % 3)]);
    const double o = orient2d(u, w, p);
    if (o > 0.0) return true;
    if (o < 0.0) return false;
    // Collinear with the hull edge: conflict only strictly inside the segment.
    const double dot = (p.x - u.x) * (w.x - u.x) + (p.y - u.y) * (w.y - u.y);
    const double len2 = (w.x - u.x) * (w.x - u.x) + (w.y - u.y) * (w.y - u.y);
    return dot > 0.0 && dot < len2;
  }

  // Visibility walk. Returns a triangle in conflict with p, or kNone for a duplicate point.
  std::int32_t locate(const Point2& p) {
    std::int32_t cur = last_;
    if (cur == kNone || !tri(cur).alive) cur = any_alive();
    if (tri(cur).ghost()) {
      if (conflicts(tri(cur), p)) return cur;
      cur = real_neighbour_of_ghost(cur);
    }
    std::uint32_t rot = 0;
    for (;;) {
      const Tri& t = tri(cur);
      bool moved = false;
      for (int e = 0; e < 3; ++e) {
        const int i = static_cast<int>((static_cast<std::uint32_t>(e) + rot) % 3);
        const auto a = t.v[static_cast<std::size_t>((i + 1) % 3)];
        const auto b = t.v[static_cast<std::size_t>((i + 2) % 3)];
        if (orient2d(pt(a), pt(b), p) < 0.0) {
          cur = t.n[static_cast<std::size_t>(i)];
          moved = true;
          break;
        }
      }
      ++rot;
      if (!moved) break;
      if (tri(cur).ghost()) return cur;  // outside the hull, beyond a visible edge
    }
    const Tri& t = tri(cur);
    for (std::int32_t v : t.v) {
      if (pt(v) == p) return kNone;
    }
    return cur;
  }

  std::int32_t any_alive() const {
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      if (tris_[i].alive) return static_cast<std::int32_t>(i);
    }
    return kNone;
  }

  std::int32_t real_neighbour_of_ghost(std::int32_t g) {
    const Tri& t = tri(g);
    for (int k = 0; k < 3; ++k) {
      if (t.v[static_cast<std::size_t>(k)] == kInfinite) return t.n[static_cast<std::size_t>(k)];
    }
    return kNone;
  }

  void insert(std::int32_t pid) {
    const Point2& p = pt(pid);
    const std::int32_t start = locate(p);
    if (start == kNone) return;
    if (!conflicts(tri(start), p)) return;

    cavity_.clear();
    stack_.clear();
    boundary_.clear();
    stack_.push_back(start);
    tri(start).alive = false;
    while (!stack_.empty()) {
      const std::int32_t cur = stack_.back();
      stack_.pop_back();
      cavity_.push_back(cur);
      for (int i = 0; i < 3; ++i) {
        const std::int32_t nb = tri(cur).n[static_cast<std::size_t>(i)];
        if (!tri(nb).alive) continue;  // already part of the cavity
        if (conflicts(tri(nb), p)) {
          tri(nb).alive = false;
          stack_.push_back(nb);
          continue;
        }
        const auto& v = tri(cur).v;
        boundary_.push_back({v[static_cast<std::size_t>((i + 1) % 3)],
                             v[static_cast<std::size_t>((i + 2) % 3)], nb});
      }
    }

    for (std::int32_t dead : cavity_) free_.push_back(dead);

    // Fan the cavity boundary to the new point.
    fan_.clear();
    for (const auto& [u, w, outside] : boundary_) {
      const std::int32_t t = add({u, w, pid});
      tri(t).n[2] = outside;
      Tri& o = tri(outside);
      for (int k = 0; k < 3; ++k) {
        const auto a = o.v[static_cast<std::size_t>((k + 1) % 3)];
        const auto b = o.v[static_cast<std::size_t>((k + 2) % 3)];
        if (a == w && b == u) o.n[static_cast<std::size_t>(k)] = t;
      }
      fan_.push_back({u, t});
    }
    for (const auto& [u, t] : fan_) {
      // Edge (w, p) of (u, w, p) is opposite u and shared with the fan triangle starting at w.
      const std::int32_t w = tri(t).v[1];
      for (const auto& [u2, t2] : fan_) {
        if (u2 == w) {
          tri(t).n[0] = t2;
          tri(t2).n[1] = t;
          break;
        }
      }
    }
    last_ = fan_.front().second;
  }

  struct Edge {
    std::int32_t u, w, outside;
  };

  std::span<const Point2> pts_;
  std::vector<Tri> tris_;
  std::vector<std::int32_t> free_;
  std::vector<std::int32_t> cavity_;
  std::vector<std::int32_t> stack_;
  std::vector<Edge> boundary_;
  std::vector<std::pair<std::int32_t, std::int32_t>> fan_;
  std::int32_t last_ = kNone;
};

}  // namespace

std::vector<Triangle> delaunay_triangulate(std::span<const Point2> points) {
  return Triangulator(points).run();
}

}  // namespace focalgraph

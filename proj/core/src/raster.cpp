#include "focalgraph/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "focalgraph/error.hpp"

namespace focalgraph {

std::size_t DepthMap::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(valid.pixels().begin(), valid.pixels().end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

Barycentric barycentric_coords(const Point2& p, const Point2& a, const Point2& b, const Point2& c) {
  const double area = orient2d(a, b, c);
  if (std::abs(area) <= kDegenerateArea) {
    throw Error(ErrorCode::DegenerateTriangle, "triangle area is zero");
  }
  // Orientation-consistent signed areas: weight of A is area(P, B, C) / area(A, B, C), etc.
  Barycentric w;
  w.a = orient2d(p, b, c) / area;
  w.b = orient2d(a, p, c) / area;
  w.c = orient2d(a, b, p) / area;
  return w;
}

namespace {

// For a shared edge traversed u -> v by a counter-clockwise triangle, exactly one
// of the two triangles sees the edge as "owning" direction.
bool owns_edge(const Point2& u, const Point2& v) {
  const double dy = v.y - u.y;
  const double dx = v.x - u.x;
  return dy > 0.0 || (dy == 0.0 && dx < 0.0);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  const std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

}  // namespace

DepthMap rasterize(const RefinedGraph& refined, int width, int height) {
  const DepthGraph& g = refined.graph;
  DepthMap map{RealImage(width, height, 0.0), Grayscale8(width, height, 0), refined.depth_count,
               kDefaultViewStep};

  auto point = [&](std::int32_t id) {
    const Node& n = g.nodes[static_cast<std::size_t>(id)];
    return Point2{static_cast<double>(n.x), static_cast<double>(n.y)};
  };

  // Directed counter-clockwise edges per start vertex. An edge u -> v lies on the
  // hull when no triangle traverses v -> u.
  std::vector<std::vector<std::int32_t>> out_edges(g.size());
  for (const Triangle& t : g.triangles) {
    const double area = orient2d(point(t[0]), point(t[1]), point(t[2]));
    if (std::abs(area) <= kDegenerateArea) continue;
    const bool ccw = area > 0.0;
    for (int i = 0; i < 3; ++i) {
      const std::int32_t u = t[static_cast<std::size_t>(i)];
      const std::int32_t v = t[static_cast<std::size_t>((i + 1) % 3)];
      if (ccw) {
        out_edges[static_cast<std::size_t>(u)].push_back(v);
      } else {
        out_edges[static_cast<std::size_t>(v)].push_back(u);
      }
    }
  }
  auto is_hull_edge = [&](std::int32_t u, std::int32_t v) {
    const auto& back = out_edges[static_cast<std::size_t>(v)];
    return std::find(back.begin(), back.end(), u) == back.end();
  };

  for (const Triangle& t : g.triangles) {
    std::array<Point2, 3> p{point(t[0]), point(t[1]), point(t[2])};
    std::array<double, 3> d{g.nodes[static_cast<std::size_t>(t[0])].depth,
                            g.nodes[static_cast<std::size_t>(t[1])].depth,
                            g.nodes[static_cast<std::size_t>(t[2])].depth};
    const double area = orient2d(p[0], p[1], p[2]);
    if (std::abs(area) <= kDegenerateArea) continue;
    if (area < 0.0) {
      std::swap(p[1], p[2]);
      std::swap(d[1], d[2]);
    }
    const std::array<std::int32_t, 3> ids = area < 0.0 ? std::array<std::int32_t, 3>{t[0], t[2], t[1]}
                                                       : std::array<std::int32_t, 3>{t[0], t[1], t[2]};
    // Edge i is opposite vertex i, traversed p[i+1] -> p[i+2].
    std::array<bool, 3> include_on_edge{};
    for (int i = 0; i < 3; ++i) {
      const auto u = static_cast<std::size_t>((i + 1) % 3);
      const auto v = static_cast<std::size_t>((i + 2) % 3);
      const bool hull = is_hull_edge(ids[u], ids[v]);
      include_on_edge[static_cast<std::size_t>(i)] = hull || owns_edge(p[u], p[v]);
    }

    const int y0 = std::max(0, static_cast<int>(std::min({p[0].y, p[1].y, p[2].y})));
    const int y1 = std::min(height - 1, static_cast<int>(std::max({p[0].y, p[1].y, p[2].y})));
    const double abs_area = std::abs(area);

    // Edge i as an exact integer affine function e_i(x, y) = a_i x + b_i y + c_i.
    std::array<std::int64_t, 3> ea{}, eb{}, ec{};
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& u = p[(i + 1) % 3];
      const auto& v = p[(i + 2) % 3];
      const auto ux = static_cast<std::int64_t>(u.x), uy = static_cast<std::int64_t>(u.y);
      ea[i] = uy - static_cast<std::int64_t>(v.y);
      eb[i] = static_cast<std::int64_t>(v.x) - ux;
      ec[i] = -ea[i] * ux - eb[i] * uy;
    }
    for (int y = y0; y <= y1; ++y) {
      std::array<std::int64_t, 3> r{};
      std::int64_t xs = 0, xe = width - 1;
      for (std::size_t i = 0; i < 3; ++i) {
        r[i] = eb[i] * y + ec[i];
        if (ea[i] > 0) {
          xs = std::max(xs, ceil_div(-r[i], ea[i]));
        } else if (ea[i] < 0) {
          xe = std::min(xe, floor_div(r[i], -ea[i]));
        } else if (r[i] < 0) {
          xe = -1;
        }
      }
      if (xs > xe) continue;
      auto depth_row = map.depth.row(y);
      auto valid_row = map.valid.row(y);
      for (std::int64_t x = xs; x <= xe; ++x) {
        const std::array<std::int64_t, 3> e{ea[0] * x + r[0], ea[1] * x + r[1], ea[2] * x + r[2]};
        bool in = true;
        for (std::size_t i = 0; i < 3; ++i) {
          if (e[i] == 0 && !include_on_edge[i]) in = false;
        }
        if (!in) continue;
        depth_row[static_cast<std::size_t>(x)] =
            (static_cast<double>(e[0]) * d[0] + static_cast<double>(e[1]) * d[1] + static_cast<double>(e[2]) * d[2]) /
            abs_area;
        valid_row[static_cast<std::size_t>(x)] = 1;
      }
    }
  }
  return map;
}

namespace {

// 1D squared Euclidean distance transform (Felzenszwalb-Huttenlocher) that also
// reports which sample attains the minimum.
void edt_1d(std::span<const double> f, std::span<double> dist, std::span<int> arg,
            std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  v.assign(static_cast<std::size_t>(n), 0);
  z.assign(static_cast<std::size_t>(n) + 1, 0.0);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (!std::isfinite(f[static_cast<std::size_t>(q)])) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = 0.0;
    for (;;) {
      const int r = v[static_cast<std::size_t>(k)];
      s = ((f[static_cast<std::size_t>(q)] + double(q) * q) - (f[static_cast<std::size_t>(r)] + double(r) * r)) /
          (2.0 * (q - r));
      if (s <= z[static_cast<std::size_t>(k)] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    if (s <= z[static_cast<std::size_t>(k)]) {
      // k == 0 and the new parabola dominates everywhere
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = kInf;
  }
  if (k < 0) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(arg.begin(), arg.end(), -1);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(j) + 1] < q) ++j;
    const int r = v[static_cast<std::size_t>(j)];
    dist[static_cast<std::size_t>(q)] = double(q - r) * (q - r) + f[static_cast<std::size_t>(r)];
    arg[static_cast<std::size_t>(q)] = r;
  }
}

}  // namespace

void fill_nearest(DepthMap& map) {
  const int w = map.width();
  const int h = map.height();
  if (map.valid_count() == 0) return;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Column pass: for each pixel, the nearest valid row in its column.
  RealImage col_dist(w, h, kInf);
  Image<int> col_arg(w, h, -1);
  std::vector<double> f(static_cast<std::size_t>(h)), dist(static_cast<std::size_t>(h));
  std::vector<int> arg(static_cast<std::size_t>(h)), v;
  std::vector<double> z;
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[static_cast<std::size_t>(y)] = map.valid(x, y) ? 0.0 : kInf;
    edt_1d(f, dist, arg, v, z);
    for (int y = 0; y < h; ++y) {
      col_dist(x, y) = dist[static_cast<std::size_t>(y)];
      col_arg(x, y) = arg[static_cast<std::size_t>(y)];
    }
  }
  // Row pass over the column distances.
  f.resize(static_cast<std::size_t>(w));
  dist.resize(static_cast<std::size_t>(w));
  arg.resize(static_cast<std::size_t>(w));
  const RealImage source = map.depth;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[static_cast<std::size_t>(x)] = col_dist(x, y);
    edt_1d(f, dist, arg, v, z);
    for (int x = 0; x < w; ++x) {
      if (map.valid(x, y)) continue;
      const int sx = arg[static_cast<std::size_t>(x)];
      if (sx < 0) continue;
      const int sy = col_arg(sx, y);
      map.depth(x, y) = source(sx, sy);
    }
  }
  std::fill(map.valid.pixels().begin(), map.valid.pixels().end(), std::uint8_t{1});
}

ViewImages normalize_for_view(const DepthMap& map, int step) {
  if (step < 1) throw Error(ErrorCode::InvalidArgument, "view step must be >= 1");
  ViewImages out{Grayscale8(map.width(), map.height(), 0), ColorImage(map.width(), map.height())};
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!map.is_valid(x, y)) {
        out.color(x, y) = Rgb8{255, 0, 0};
        continue;
      }
      const double level = std::round(map.depth(x, y) * step) + 1.0;
      const auto v = static_cast<std::uint8_t>(std::clamp(level, 1.0, 255.0));
      out.gray(x, y) = v;
      out.color(x, y) = Rgb8{v, v, v};
    }
  }
  return out;
}

}  // namespace focalgraph

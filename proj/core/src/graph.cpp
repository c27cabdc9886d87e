#include "focalgraph/graph.hpp"

#include <algorithm>

namespace focalgraph {

std::vector<Node> extract_local_maxima(const MaxMaps& maps) {
  const RealImage& m = maps.magnitude;
  const int w = m.width();
  const int h = m.height();
  std::vector<Node> nodes;
  // 0 = unvisited, 1 = belongs to an already emitted plateau
  Grayscale8 visited(w, h, 0);
  std::vector<Pixel> queue;

  auto is_candidate = [&](int x, int y) {
    const double v = m(x, y);
    if (!(v > 0.0)) return false;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if ((dx || dy) && m.contains(x + dx, y + dy) && m(x + dx, y + dy) > v) return false;
      }
    }
    return true;
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (visited(x, y) || !is_candidate(x, y)) continue;
      const double v = m(x, y);
      nodes.push_back(Node{static_cast<std::int32_t>(nodes.size()), x, y, v,
                           static_cast<double>(maps.depth(x, y)), NodeKind::NonMax});

      // Flood the equal-valued plateau so later candidates in it are skipped.
      visited(x, y) = 1;
      queue.assign(1, Pixel{x, y});
      while (!queue.empty()) {
        const Pixel p = queue.back();
        queue.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int qx = p.x + dx;
            const int qy = p.y + dy;
            if (!m.contains(qx, qy) || visited(qx, qy) || m(qx, qy) != v) continue;
            visited(qx, qy) = 1;
            queue.push_back({qx, qy});
          }
        }
      }
    }
  }
  return nodes;
}

std::vector<std::vector<std::int32_t>> adjacency_from_triangles(std::span<const Triangle> triangles,
                                                                std::size_t node_count) {
  std::vector<std::vector<std::int32_t>> adj(node_count);
  for (const Triangle& t : triangles) {
    for (int i = 0; i < 3; ++i) {
      const auto a = t[static_cast<std::size_t>(i)];
      const auto b = t[static_cast<std::size_t>((i + 1) % 3)];
      adj[static_cast<std::size_t>(a)].push_back(b);
      adj[static_cast<std::size_t>(b)].push_back(a);
    }
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

DepthGraph delaunay(std::vector<Node> nodes) {
  DepthGraph g;
  std::vector<Point2> points;
  points.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i].id = static_cast<std::int32_t>(i);
    points.push_back({static_cast<double>(nodes[i].x), static_cast<double>(nodes[i].y)});
  }
  g.triangles = delaunay_triangulate(points);
  g.adjacency = adjacency_from_triangles(g.triangles, nodes.size());
  g.nodes = std::move(nodes);
  return g;
}

Partition partition(const DepthGraph& graph) {
  Partition p;
  p.is_max.assign(graph.size(), false);
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const double mi = graph.nodes[i].magnitude;
    bool maximal = true;
    for (std::int32_t j : graph.adjacency[i]) {
      if (graph.nodes[static_cast<std::size_t>(j)].magnitude > mi) {
        maximal = false;
        break;
      }
    }
    p.is_max[i] = maximal;
    (maximal ? p.max_ids : p.nonmax_ids).push_back(static_cast<std::int32_t>(i));
  }
  return p;
}

void apply_partition(DepthGraph& graph, const Partition& labels) {
  for (std::size_t i = 0; i < graph.size(); ++i) {
    graph.nodes[i].kind = labels.is_max[i] ? NodeKind::Max : NodeKind::NonMax;
  }
}

}  // namespace focalgraph

#include "focalgraph/correspond.hpp"

#include <algorithm>
#include <cmath>

#include "focalgraph/error.hpp"

namespace focalgraph {

namespace {

// std::lround (half away from zero) without the library call.
int node_depth(const Node& n) {
  const int t = static_cast<int>(n.depth);
  const double f = n.depth - t;
  return f >= 0.5 ? t + 1 : (f <= -0.5 ? t - 1 : t);
}

Candidate from_node(const Node& n) {
  return Candidate{n.x, n.y, node_depth(n), n.magnitude, CandidateOrigin::GraphNode, n.id};
}

}  // namespace

CandidateSet collect_candidates(std::int32_t anchor, const DepthGraph& graph, const Partition& labels,
                                const FocusVolume& volume) {
  if (anchor < 0 || static_cast<std::size_t>(anchor) >= graph.size()) {
    throw Error(ErrorCode::OutOfBounds, "anchor id " + std::to_string(anchor));
  }
  const Node& a = graph.nodes[static_cast<std::size_t>(anchor)];
  const int da = node_depth(a);
  CandidateSet set{anchor, {}};
  std::vector<std::int32_t> taken;
  taken.reserve(32);
  set.entries.reserve(32);

  auto take = [&](std::int32_t id) {
    if (id == anchor || std::find(taken.begin(), taken.end(), id) != taken.end()) return;
    taken.push_back(id);
    set.entries.push_back(from_node(graph.nodes[static_cast<std::size_t>(id)]));
  };
  auto nonmax = [&](std::int32_t id) { return !labels.is_max[static_cast<std::size_t>(id)]; };
  auto depth_of = [&](std::int32_t id) { return node_depth(graph.nodes[static_cast<std::size_t>(id)]); };

  for (std::int32_t b : graph.neighbours(anchor)) {
    if (!nonmax(b)) continue;
    if (depth_of(b) != da) take(b);
    for (std::int32_t c : graph.neighbours(b)) {
      if (nonmax(c) && depth_of(c) != da) take(c);
    }
  }

  for (const ZSample& s : volume.z_profile(a.x, a.y)) {
    if (s.z != da && s.magnitude > 0.0) {
      set.entries.push_back(Candidate{a.x, a.y, s.z, s.magnitude, CandidateOrigin::VolumeEntry, -1});
    }
  }
  return set;
}

bool is_valid_correspondence(const Node& anchor, const Candidate& b, const Candidate& c,
                             double cos_threshold) {
  const int da = node_depth(anchor);
  if (b.depth == c.depth || b.depth == da || c.depth == da) return false;

  const double bx = b.x - anchor.x, by = b.y - anchor.y;
  const double cx = c.x - anchor.x, cy = c.y - anchor.y;
  const bool b_positional = bx != 0.0 || by != 0.0;
  const bool c_positional = cx != 0.0 || cy != 0.0;

  if (b_positional && c_positional) {
    const double cosine = (bx * cx + by * cy) / (std::sqrt(bx * bx + by * by) * std::sqrt(cx * cx + cy * cy));
    return cosine <= cos_threshold;
  }
  // Same-pixel samples carry no direction; require the depths to bracket the anchor.
  return (b.depth < da) != (c.depth < da);
}

std::vector<CorrespondencePair> collect_correspondences(const CandidateSet& candidates,
                                                        const Node& anchor, double cos_threshold) {
  if (!(cos_threshold >= -1.0 && cos_threshold < 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "cos_threshold must lie in [-1, 0)");
  }
  const auto& e = candidates.entries;
  const int da = node_depth(anchor);
  struct Offset {
    double x, y, norm;
  };
  std::vector<Offset> off(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double dx = e[i].x - anchor.x, dy = e[i].y - anchor.y;
    off[i] = {dx, dy, std::sqrt(dx * dx + dy * dy)};
  }
  std::vector<CorrespondencePair> pairs;
  pairs.reserve(2 * e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i].depth == da) continue;
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      if (e[j].depth == da || e[j].depth == e[i].depth) continue;
      bool ok;
      if (off[i].norm > 0.0 && off[j].norm > 0.0) {
        const double cosine = (off[i].x * off[j].x + off[i].y * off[j].y) / (off[i].norm * off[j].norm);
        ok = cosine <= cos_threshold;
      } else {
        ok = (e[i].depth < da) != (e[j].depth < da);
      }
      if (ok) pairs.push_back({candidates.anchor, e[i], e[j]});
    }
  }
  return pairs;
}

}  // namespace focalgraph

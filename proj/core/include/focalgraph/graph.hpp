#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "focalgraph/delaunay.hpp"
#include "focalgraph/volume.hpp"

namespace focalgraph {

enum class NodeKind { Max, NonMax, VolumeCandidate };

struct Node {
  std::int32_t id = 0;
  int x = 0;
  int y = 0;
  double magnitude = 0.0;
  double depth = 0.0;  // integer D value until refined
  NodeKind kind = NodeKind::NonMax;
};

// Delaunay graph over node positions. Triangles and adjacency index into
// `nodes`; node ids equal their position in the vector.
struct DepthGraph {
  std::vector<Node> nodes;
  std::vector<Triangle> triangles;
  std::vector<std::vector<std::int32_t>> adjacency;  // sorted, symmetric

  std::size_t size() const noexcept { return nodes.size(); }
  std::span<const std::int32_t> neighbours(std::int32_t id) const {
    return adjacency[static_cast<std::size_t>(id)];
  }
};

// 8-connected local maxima of M (M(p) > 0 and M(p) >= every neighbour). Within an
// 8-connected plateau of equal M, only the first candidate in row-major (y, x)
// order is kept. Nodes are numbered in row-major order.
std::vector<Node> extract_local_maxima(const MaxMaps& maps);

// Triangulates the node positions; ids are reassigned to 0..n-1 in input order.
DepthGraph delaunay(std::vector<Node> nodes);

// Adjacency lists from a triangle list over `node_count` nodes.
std::vector<std::vector<std::int32_t>> adjacency_from_triangles(std::span<const Triangle> triangles,
                                                                std::size_t node_count);

struct Partition {
  std::vector<std::int32_t> max_ids;
  std::vector<std::int32_t> nonmax_ids;
  std::vector<bool> is_max;  // indexed by node id
};

// Node i is maximal iff its magnitude is >= the magnitude of every neighbour.
Partition partition(const DepthGraph& graph);

// Copies partition labels into the node kinds.
void apply_partition(DepthGraph& graph, const Partition& labels);

}  // namespace focalgraph

#pragma once

#include <cstdint>
#include <vector>

#include "focalgraph/graph.hpp"
#include "focalgraph/volume.hpp"

namespace focalgraph {

enum class CandidateOrigin { GraphNode, VolumeEntry };

struct Candidate {
  int x = 0;
  int y = 0;
  int depth = 0;
  double magnitude = 0.0;
  CandidateOrigin origin = CandidateOrigin::GraphNode;
  std::int32_t node_id = -1;  // valid for GraphNode candidates
};

struct CandidateSet {
  std::int32_t anchor = -1;
  std::vector<Candidate> entries;
};

struct CorrespondencePair {
  std::int32_t anchor = -1;
  Candidate b;
  Candidate c;
};

inline constexpr double kDefaultCosThreshold = -0.95;

// Trace candidates for anchor `a`: non-maximal neighbours b with D(b) != D(a),
// non-maximal neighbours c of such b with D(c) != D(a), and every volume sample at
// the anchor pixel with z != D(a). Graph candidates are deduplicated by id.
CandidateSet collect_candidates(std::int32_t anchor, const DepthGraph& graph, const Partition& labels,
                                const FocusVolume& volume);

// Unordered pairs {b, c} with pairwise-distinct depths among {a, b, c} that lie on
// opposite sides of the anchor:
//   both positional    -> cos(angle(ab, ac)) <= cos_threshold
//   one volume entry   -> the other's depth is on the opposite side of D(a)
//   two volume entries -> their depths straddle D(a)
std::vector<CorrespondencePair> collect_correspondences(const CandidateSet& candidates,
                                                        const Node& anchor,
                                                        double cos_threshold = kDefaultCosThreshold);

// The pair predicate used by collect_correspondences.
bool is_valid_correspondence(const Node& anchor, const Candidate& b, const Candidate& c,
                             double cos_threshold);

}  // namespace focalgraph

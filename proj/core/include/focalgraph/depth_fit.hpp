#pragma once

#include <optional>
#include <span>
#include <vector>

#include "focalgraph/correspond.hpp"
#include "focalgraph/graph.hpp"

namespace focalgraph {

struct FitSample {
  double depth = 0.0;
  double log_magnitude = 0.0;  // ln(M), M > 0
};

FitSample make_fit_sample(double depth, double magnitude);

enum class FitStatus { Ok, DuplicateDepth, NonPositiveMagnitude, NoPeak };

struct FitResult {
  FitStatus status = FitStatus::NoPeak;
  double depth = 0.0;
  bool ok() const noexcept { return status == FitStatus::Ok; }
};

enum class FitFormula {
  LogParabola,  // vertex of the parabola through the three (D, ln M) points
  Printed,      // literal closed form kept for comparison experiments
};

// Peak of the Gaussian through three (depth, ln M) samples, `a` being the anchor.
// NoPeak when the log-magnitudes are collinear in depth or curve upwards.
FitResult gaussian_three_point(const FitSample& a, const FitSample& b, const FitSample& c,
                               FitFormula formula = FitFormula::LogParabola);

struct RefineOptions {
  double window = 0.0;  // plausibility half-width around D(a); <= 0 disables
  FitFormula formula = FitFormula::LogParabola;
};

// Median of successful fits that land within the window; D(a) when none do.
double refine_node_depth(const Node& anchor, std::span<const CorrespondencePair> pairs,
                         const RefineOptions& options = {});

double median(std::vector<double> values);

struct RefinedGraph {
  DepthGraph graph;
  int depth_count = 0;
};

// Re-triangulates the retained nodes (ids become 0..n-1 in the given order), then
// runs one in-place median pass in ascending id order: each node takes the median
// of itself and its current neighbour depths, so earlier updates feed later ones.
RefinedGraph rebuild_and_median(std::vector<Node> nodes, int depth_count);

// The median pass alone, exposed for tests. Returns the number of medians taken.
std::size_t interdependent_median_pass(DepthGraph& graph);

}  // namespace focalgraph

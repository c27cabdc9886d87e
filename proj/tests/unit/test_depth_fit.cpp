#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "focalgraph/depth_fit.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace focalgraph;

namespace {

double gaussian(double d, double amplitude, double mu, double s) {
  return amplitude * std::exp(-(d - mu) * (d - mu) / (2.0 * s * s));
}

FitSample sample(double d, double amplitude, double mu, double s) {
  return make_fit_sample(d, gaussian(d, amplitude, mu, s));
}

// Vertex of the parabola through three points by solving the 3x3 system with
// Cramer's rule in absolute depth coordinates.
double cramer_vertex(double d0, double y0, double d1, double y1, double d2, double y2) {
  auto det3 = [](double a, double b, double c, double d, double e, double f, double g, double h, double i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  };
  const double det = det3(d0 * d0, d0, 1, d1 * d1, d1, 1, d2 * d2, d2, 1);
  const double a = det3(y0, d0, 1, y1, d1, 1, y2, d2, 1) / det;
  const double b = det3(d0 * d0, y0, 1, d1 * d1, y1, 1, d2 * d2, y2, 1) / det;
  return -b / (2.0 * a);
}

Candidate cand(int depth, double m) { return Candidate{0, 0, depth, m, CandidateOrigin::VolumeEntry, -1}; }

DepthGraph graph_with(std::vector<double> depths, std::vector<std::pair<int, int>> edges) {
  DepthGraph g;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    g.nodes.push_back(Node{static_cast<std::int32_t>(i), int(i), 0, 1.0, depths[i], NodeKind::Max});
  }
  g.adjacency.resize(depths.size());
  for (auto [a, b] : edges) {
    g.adjacency[std::size_t(a)].push_back(b);
    g.adjacency[std::size_t(b)].push_back(a);
  }
  return g;
}

}  // namespace

TEST(GaussianFit, SymmetricNeighboursGiveAnchorDepth) {
  const FitResult r = gaussian_three_point(make_fit_sample(5, 10), make_fit_sample(4, 6), make_fit_sample(6, 6));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.depth, 5.0);
}

TEST(GaussianFit, RecoversKnownPeak) {
  const FitResult r = gaussian_three_point(sample(5, 3.0, 5.3, 1.7), sample(4, 3.0, 5.3, 1.7), sample(7, 3.0, 5.3, 1.7));
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r.depth, 5.3, 1e-12);
}

TEST(GaussianFit, DegenerateInputs) {
  // collinear log-magnitudes: exponential, no peak
  EXPECT_EQ(gaussian_three_point(make_fit_sample(1, std::exp(1.0)), make_fit_sample(2, std::exp(2.0)),
                                 make_fit_sample(3, std::exp(3.0)))
                .status,
            FitStatus::NoPeak);
  // anchor is a minimum: upward curvature
  EXPECT_EQ(gaussian_three_point(make_fit_sample(5, 1), make_fit_sample(4, 6), make_fit_sample(6, 6)).status,
            FitStatus::NoPeak);
  EXPECT_EQ(gaussian_three_point(make_fit_sample(5, 1), make_fit_sample(5, 6), make_fit_sample(6, 6)).status,
            FitStatus::DuplicateDepth);
  EXPECT_EQ(gaussian_three_point(make_fit_sample(5, 1), FitSample{4, std::log(0.0)}, make_fit_sample(6, 6)).status,
            FitStatus::NonPositiveMagnitude);
  EXPECT_FG_ERROR(make_fit_sample(1, 0.0), ErrorCode::InvalidArgument);
  EXPECT_FG_ERROR(make_fit_sample(1, -2.0), ErrorCode::InvalidArgument);
}

TEST(GaussianFit, InvariantToMagnitudeScale) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mu(2, 12), s(0.8, 4), k(0.01, 100);
  for (int i = 0; i < 200; ++i) {
    const double m = mu(rng), sd = s(rng), scale = k(rng);
    const FitResult r1 = gaussian_three_point(sample(6, 1, m, sd), sample(4, 1, m, sd), sample(9, 1, m, sd));
    const FitResult r2 =
        gaussian_three_point(sample(6, scale, m, sd), sample(4, scale, m, sd), sample(9, scale, m, sd));
    ASSERT_TRUE(r1.ok() && r2.ok());
    EXPECT_NEAR(r1.depth, r2.depth, 1e-12 * std::max(1.0, std::abs(r1.depth)));
  }
}

TEST(GaussianFit, ExactOnRandomGaussians) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> mu(0, 19), s(1.0, 5.0), amp(0.5, 500);
  std::uniform_int_distribution<int> off(-4, 4);
  int checked = 0;
  while (checked < 1000) {
    const double m = mu(rng), sd = s(rng), a = amp(rng);
    const int da = static_cast<int>(std::lround(m)), db = da + off(rng), dc = da + off(rng);
    if (db == da || dc == da || db == dc) continue;
    const FitSample sa = sample(da, a, m, sd), sb = sample(db, a, m, sd), sc = sample(dc, a, m, sd);
    const FitResult r = gaussian_three_point(sa, sb, sc);
    ASSERT_TRUE(r.ok());
    EXPECT_NEAR(r.depth, m, 1e-9);
    EXPECT_NEAR(r.depth, cramer_vertex(da, sa.log_magnitude, db, sb.log_magnitude, dc, sc.log_magnitude), 1e-9);
    // argument order of the non-anchor samples does not matter
    EXPECT_NEAR(gaussian_three_point(sa, sc, sb).depth, r.depth, 1e-12);
    ++checked;
  }
}

TEST(GaussianFit, PrintedClosedFormIsSelectable) {
  // The literal closed form is kept behind a switch; on the symmetric case it
  // does not return the anchor depth.
  const FitResult r = gaussian_three_point(make_fit_sample(5, 10), make_fit_sample(4, 6), make_fit_sample(6, 6),
                                           FitFormula::Printed);
  ASSERT_TRUE(r.ok());
  EXPECT_DOUBLE_EQ(r.depth, 2.25);
}

TEST(Refine, NoPairsKeepsAnchorDepth) {
  const Node a{0, 0, 0, 4.0, 7.0, NodeKind::Max};
  EXPECT_EQ(refine_node_depth(a, {}), 7.0);
}

TEST(Refine, MedianOfFits) {
  EXPECT_EQ(median({4.8, 5.1, 9.9}), 5.1);
  EXPECT_EQ(median({1.0, 4.0, 2.0, 3.0}), 2.5);
  EXPECT_EQ(median({3.0}), 3.0);
  EXPECT_FG_ERROR(median({}), ErrorCode::InvalidArgument);
}

TEST(Refine, FivePairsOnOneGaussian) {
  const double mu = 6.4, s = 2.0;
  const Node a{0, 0, 0, gaussian(6, 8, mu, s), 6.0, NodeKind::Max};
  std::vector<CorrespondencePair> pairs;
  for (auto [b, c] : std::vector<std::pair<int, int>>{{5, 7}, {4, 8}, {3, 9}, {2, 10}, {5, 9}}) {
    pairs.push_back({0, cand(b, gaussian(b, 8, mu, s)), cand(c, gaussian(c, 8, mu, s))});
  }
  EXPECT_NEAR(refine_node_depth(a, pairs), mu, 1e-9);
}

TEST(Refine, FailedFitsAndWindow) {
  const Node a{0, 0, 0, 10.0, 5.0, NodeKind::Max};
  const std::vector<CorrespondencePair> pairs{
      {0, cand(4, 6.0), cand(6, 6.0)},    // fit 5
      {0, cand(4, 20.0), cand(6, 20.0)},  // no peak
      {0, cand(4, 9.9), cand(6, 1.0)},    // peak near 4.5
  };
  const FitResult far = gaussian_three_point(make_fit_sample(5, 10), make_fit_sample(4, 9.9), make_fit_sample(6, 1.0));
  ASSERT_TRUE(far.ok());
  const double unwindowed = median({5.0, far.depth});
  EXPECT_NEAR(refine_node_depth(a, pairs), unwindowed, 1e-12);
  RefineOptions narrow;
  narrow.window = std::abs(far.depth - 5.0) / 2.0;
  EXPECT_EQ(refine_node_depth(a, pairs, narrow), 5.0);
  // Only the no-peak pair: falls back to D(a).
  EXPECT_EQ(refine_node_depth(a, std::vector<CorrespondencePair>{pairs[1]}), 5.0);
}

TEST(MedianPass, OutlierInTriangle) {
  DepthGraph g = graph_with({5, 5, 9}, {{0, 1}, {1, 2}, {0, 2}});
  EXPECT_EQ(interdependent_median_pass(g), 3u);
  for (const Node& n : g.nodes) EXPECT_EQ(n.depth, 5.0);
}

TEST(MedianPass, AllEqualUnchanged) {
  DepthGraph g = graph_with({3, 3, 3, 3}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}});
  interdependent_median_pass(g);
  for (const Node& n : g.nodes) EXPECT_EQ(n.depth, 3.0);
}

TEST(MedianPass, EarlierUpdatesFeedLaterNodes) {
  // Path 0-1-2: node 0 becomes 5, node 1 then sees {9, 5, 1} -> 5, node 2 sees {1, 5} -> 3.
  DepthGraph g = graph_with({1, 9, 1}, {{0, 1}, {1, 2}});
  interdependent_median_pass(g);
  EXPECT_EQ(g.nodes[0].depth, 5.0);
  EXPECT_EQ(g.nodes[1].depth, 5.0);
  EXPECT_EQ(g.nodes[2].depth, 3.0);
}

TEST(MedianPass, RebuildTriangulatesAndCountsEveryNode) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto points = oracle::random_points(rng, 30, 50, 50);
    auto nodes = oracle::nodes_from_points(points, rng, 12);
    const RefinedGraph r = rebuild_and_median(nodes, 12);
    EXPECT_EQ(r.depth_count, 12);
    ASSERT_EQ(r.graph.size(), nodes.size());
    EXPECT_EQ(oracle::check_delaunay(points, r.graph.triangles), "");
    double lo = 1e9, hi = -1e9;
    for (const Node& n : nodes) lo = std::min(lo, n.depth), hi = std::max(hi, n.depth);
    for (const Node& n : r.graph.nodes) {
      EXPECT_GE(n.depth, lo);
      EXPECT_LE(n.depth, hi);
    }
  }
}

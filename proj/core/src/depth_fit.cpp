#include "focalgraph/depth_fit.hpp"

#include <algorithm>
#include <cmath>

#include "focalgraph/error.hpp"

namespace focalgraph {

FitSample make_fit_sample(double depth, double magnitude) {
  if (!(magnitude > 0.0)) throw Error(ErrorCode::InvalidArgument, "magnitude must be > 0");
  return {depth, std::log(magnitude)};
}

namespace {

FitResult log_parabola(const FitSample& a, const FitSample& b, const FitSample& c) {
  // Centre on the anchor: q(u) = alpha u^2 + beta u + ln M(a), u = D - D(a).
  const double ub = b.depth - a.depth;
  const double uc = c.depth - a.depth;
  const double yb = b.log_magnitude - a.log_magnitude;
  const double yc = c.log_magnitude - a.log_magnitude;
  const double curvature_num = yb * uc - yc * ub;  // alpha * ub * uc * (ub - uc)
  const double alpha = curvature_num / (ub * uc * (ub - uc));
  if (!(alpha < 0.0) || !std::isfinite(alpha)) return {FitStatus::NoPeak, 0.0};
  const double vertex = (yb * uc * uc - yc * ub * ub) / (2.0 * curvature_num);
  if (!std::isfinite(vertex)) return {FitStatus::NoPeak, 0.0};
  return {FitStatus::Ok, a.depth + vertex};
}

FitResult printed_formula(const FitSample& a, const FitSample& b, const FitSample& c) {
  const double m_ab = a.log_magnitude - b.log_magnitude;
  const double m_ac = a.log_magnitude - c.log_magnitude;
  const double m_minus = m_ab + m_ac;
  const double d2_ab = a.depth * a.depth - b.depth * b.depth;
  const double delta_ac = 2.0 * std::abs(a.depth - c.depth);
  const double denom = delta_ac * m_minus;
  if (denom == 0.0) return {FitStatus::NoPeak, 0.0};
  const double value = m_ac * d2_ab / denom;
  if (!std::isfinite(value)) return {FitStatus::NoPeak, 0.0};
  return {FitStatus::Ok, value};
}

}  // namespace

FitResult gaussian_three_point(const FitSample& a, const FitSample& b, const FitSample& c,
                               FitFormula formula) {
  if (a.depth == b.depth || a.depth == c.depth || b.depth == c.depth) {
    return {FitStatus::DuplicateDepth, 0.0};
  }
  if (!std::isfinite(a.log_magnitude) || !std::isfinite(b.log_magnitude) ||
      !std::isfinite(c.log_magnitude)) {
    return {FitStatus::NonPositiveMagnitude, 0.0};
  }
  return formula == FitFormula::LogParabola ? log_parabola(a, b, c) : printed_formula(a, b, c);
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "median of empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double refine_node_depth(const Node& anchor, std::span<const CorrespondencePair> pairs,
                         const RefineOptions& options) {
  const double da = std::round(anchor.depth);
  if (!(anchor.magnitude > 0.0)) return da;
  const FitSample a{da, std::log(anchor.magnitude)};
  std::vector<double> fits;
  fits.reserve(pairs.size());
  // Pairs arrive grouped by b, so its logarithm is usually the previous one.
  double last_b = -1.0, last_b_log = 0.0;
  for (const CorrespondencePair& p : pairs) {
    if (!(p.b.magnitude > 0.0) || !(p.c.magnitude > 0.0)) continue;
    if (p.b.magnitude != last_b) {
      last_b = p.b.magnitude;
      last_b_log = std::log(last_b);
    }
    const FitResult r = gaussian_three_point(a, FitSample{double(p.b.depth), last_b_log},
                                             FitSample{double(p.c.depth), std::log(p.c.magnitude)},
                                             options.formula);
    if (!r.ok()) continue;
    if (options.window > 0.0 && std::abs(r.depth - da) > options.window) continue;
    fits.push_back(r.depth);
  }
  return fits.empty() ? da : median(std::move(fits));
}

std::size_t interdependent_median_pass(DepthGraph& graph) {
  std::size_t medians = 0;
  std::vector<double> window;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    window.clear();
    window.push_back(graph.nodes[i].depth);
    for (std::int32_t j : graph.adjacency[i]) window.push_back(graph.nodes[static_cast<std::size_t>(j)].depth);
    graph.nodes[i].depth = median(window);
    ++medians;
  }
  return medians;
}

RefinedGraph rebuild_and_median(std::vector<Node> nodes, int depth_count) {
  RefinedGraph out{delaunay(std::move(nodes)), depth_count};
  interdependent_median_pass(out.graph);
  return out;
}

}  // namespace focalgraph

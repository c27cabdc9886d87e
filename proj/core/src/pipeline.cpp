#include "focalgraph/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "focalgraph/error.hpp"
#include "focalgraph/parallel.hpp"

namespace focalgraph {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

void validate(const PipelineParams& params) {
  validate(params.canny);
  if (!(params.cos_threshold >= -1.0 && params.cos_threshold < 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "cos_threshold must lie in [-1, 0)");
  }
  if (params.view_step < 1) throw Error(ErrorCode::InvalidArgument, "view step must be >= 1");
  if (params.threads < 0) throw Error(ErrorCode::InvalidArgument, "threads must be >= 0");
}

std::vector<FocusSlice> preprocess(const FocalStack& stack, const CannyParams& canny, int threads,
                                   std::vector<double>* slice_ms) {
  validate(canny);
  std::vector<FocusSlice> slices(stack.images.size());
  std::vector<double> times(stack.images.size(), 0.0);
  parallel_for(stack.images.size(), threads, [&](std::size_t z) {
    const auto start = Clock::now();
    slices[z] = compute_focus_slice(stack.images[z], static_cast<int>(z), canny);
    times[z] = ms_since(start);
  });
  if (slice_ms) *slice_ms = std::move(times);
  return slices;
}

namespace {

PipelineResult run_depth_stages(std::vector<FocusSlice> slices, const PipelineParams& params,
                                const char*& stage) {
  stage = "volume";
  if (slices.empty()) throw Error(ErrorCode::TooFewImages, "no focus slices");
  PipelineResult r;
  const int width = slices.front().width;
  const int height = slices.front().height;
  const int depth_count = static_cast<int>(slices.size());

  auto t = Clock::now();
  r.volume = FocusVolume(std::move(slices));
  r.max_maps = build_max_maps(r.volume);
  r.timings.volume_ms = ms_since(t);
  r.stats.focus_entries = r.volume.entry_count();

  stage = "graph";
  t = Clock::now();
  r.all_graph = delaunay(extract_local_maxima(r.max_maps));
  r.labels = partition(r.all_graph);
  apply_partition(r.all_graph, r.labels);
  r.timings.graph_ms = ms_since(t);
  r.stats.all_nodes = r.all_graph.size();
  r.stats.max_nodes = r.labels.max_ids.size();
  r.stats.nonmax_nodes = r.labels.nonmax_ids.size();
  r.stats.all_triangles = r.all_graph.triangles.size();

  // Nodes whose depth gets refined, in ascending id order.
  std::vector<std::int32_t> anchors;
  if (params.use_all_nodes) {
    anchors.resize(r.all_graph.size());
    for (std::size_t i = 0; i < anchors.size(); ++i) anchors[i] = static_cast<std::int32_t>(i);
  } else {
    anchors = r.labels.max_ids;
  }

  // Candidates, pairs and fits are produced per anchor so pair lists never pile up;
  // the wall time of this phase is split between the two stages by summed per-anchor time.
  stage = "correspond";
  t = Clock::now();
  const RefineOptions refine{depth_count / 2.0, params.formula};
  const double max_depth = depth_count - 1;
  std::vector<Node> retained(anchors.size());
  std::vector<std::uint8_t> from_fit(anchors.size(), 0);
  std::vector<std::size_t> pair_counts(anchors.size(), 0);
  std::vector<double> corr_time(anchors.size(), 0.0), fit_time(anchors.size(), 0.0);
  parallel_for(anchors.size(), params.threads, [&](std::size_t i) {
    const auto t0 = Clock::now();
    Node n = r.all_graph.nodes[static_cast<std::size_t>(anchors[i])];
    const CandidateSet cands = collect_candidates(anchors[i], r.all_graph, r.labels, r.volume);
    const auto pairs = collect_correspondences(cands, n, params.cos_threshold);
    const auto t1 = Clock::now();
    const double refined = refine_node_depth(n, pairs, refine);
    from_fit[i] = refined != std::round(n.depth) || !pairs.empty();
    n.depth = std::clamp(refined, 0.0, max_depth);
    retained[i] = n;
    pair_counts[i] = pairs.size();
    corr_time[i] = std::chrono::duration<double, std::milli>(t1 - t0).count();
    fit_time[i] = ms_since(t1);
  });
  const double phase_ms = ms_since(t);
  const double corr_sum = std::accumulate(corr_time.begin(), corr_time.end(), 0.0);
  const double fit_sum = std::accumulate(fit_time.begin(), fit_time.end(), 0.0);
  const double share = corr_sum + fit_sum > 0.0 ? corr_sum / (corr_sum + fit_sum) : 0.5;
  r.timings.correspond_ms = phase_ms * share;
  r.timings.fit_ms = phase_ms - r.timings.correspond_ms;
  r.stats.correspondence_pairs = std::accumulate(pair_counts.begin(), pair_counts.end(), std::size_t{0});
  r.stats.refined_by_fit = static_cast<std::size_t>(std::count(from_fit.begin(), from_fit.end(), 1));

  stage = "depth_fit";
  t = Clock::now();
  r.refined = rebuild_and_median(std::move(retained), depth_count);
  r.timings.rebuild_ms = ms_since(t);
  r.stats.retained_nodes = r.refined.graph.size();
  r.stats.refined_triangles = r.refined.graph.triangles.size();

  stage = "raster";
  t = Clock::now();
  r.map = rasterize(r.refined, width, height);
  r.map.step_for_view = params.view_step;
  if (params.fill == FillMode::Nearest) fill_nearest(r.map);
  r.timings.raster_ms = ms_since(t);
  r.stats.valid_pixels = r.map.valid_count();
  return r;
}

}  // namespace

PipelineResult estimate_depth(std::vector<FocusSlice> slices, const PipelineParams& params) {
  validate(params);
  const char* stage = "volume";
  try {
    return run_depth_stages(std::move(slices), params, stage);
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

PipelineResult run_pipeline(const FocalStack& stack, const PipelineParams& params) {
  validate(params);
  std::vector<double> slice_ms;
  const auto t = Clock::now();
  std::vector<FocusSlice> slices;
  try {
    slices = preprocess(stack, params.canny, params.threads, &slice_ms);
  } catch (const Error& e) {
    throw StageError("focus_measure", e);
  }
  const double preprocess_ms = ms_since(t);
  PipelineResult r = estimate_depth(std::move(slices), params);
  r.timings.slice_ms = std::move(slice_ms);
  r.timings.preprocess_ms = preprocess_ms;
  return r;
}

}  // namespace focalgraph

#pragma once

#include <string>
#include <vector>

#include "focalgraph/correspond.hpp"
#include "focalgraph/depth_fit.hpp"
#include "focalgraph/focus_measure.hpp"
#include "focalgraph/graph.hpp"
#include "focalgraph/raster.hpp"
#include "focalgraph/stack_io.hpp"
#include "focalgraph/volume.hpp"

namespace focalgraph {

struct PipelineParams {
  CannyParams canny;
  double cos_threshold = kDefaultCosThreshold;
  bool use_all_nodes = false;
  FillMode fill = FillMode::None;
  int view_step = kDefaultViewStep;
  FitFormula formula = FitFormula::LogParabola;
  int threads = 0;  // 0 = hardware concurrency
};

void validate(const PipelineParams& params);

// Wall-clock milliseconds per stage.
struct StageTimings {
  std::vector<double> slice_ms;  // per-slice focus measure
  double preprocess_ms = 0.0;    // all slices
  double volume_ms = 0.0;        // sparse volume + maximum maps
  double graph_ms = 0.0;         // local maxima, triangulation, partition
  double correspond_ms = 0.0;    // candidates + correspondence pairs
  double fit_ms = 0.0;           // depth refinement
  double rebuild_ms = 0.0;       // re-triangulation + median pass
  double raster_ms = 0.0;        // rasterization (+ optional fill)

  double depth_stage_ms() const noexcept {
    return volume_ms + graph_ms + correspond_ms + fit_ms + rebuild_ms + raster_ms;
  }
  double total_ms() const noexcept { return preprocess_ms + depth_stage_ms(); }
};

struct PipelineStats {
  std::size_t focus_entries = 0;
  std::size_t all_nodes = 0;
  std::size_t max_nodes = 0;
  std::size_t nonmax_nodes = 0;
  std::size_t retained_nodes = 0;
  std::size_t all_triangles = 0;
  std::size_t refined_triangles = 0;
  std::size_t correspondence_pairs = 0;
  std::size_t refined_by_fit = 0;  // nodes whose depth came from at least one fit
  std::size_t valid_pixels = 0;
};

// Everything the depth stage produced, kept for reports and debug dumps.
struct PipelineResult {
  DepthMap map;
  PipelineStats stats;
  StageTimings timings;
  FocusVolume volume;
  MaxMaps max_maps;
  DepthGraph all_graph;  // G_all with partition labels in Node::kind
  Partition labels;
  RefinedGraph refined;

  bool degenerate() const noexcept { return refined.graph.triangles.empty(); }
};

std::vector<FocusSlice> preprocess(const FocalStack& stack, const CannyParams& canny, int threads,
                                   std::vector<double>* slice_ms = nullptr);

// volume -> graph -> correspond -> fit -> rebuild -> raster.
PipelineResult estimate_depth(std::vector<FocusSlice> slices, const PipelineParams& params);

PipelineResult run_pipeline(const FocalStack& stack, const PipelineParams& params);

}  // namespace focalgraph

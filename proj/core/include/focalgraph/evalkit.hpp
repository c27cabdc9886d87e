#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "focalgraph/pipeline.hpp"
#include "focalgraph/raster.hpp"
#include "focalgraph/stack_io.hpp"

namespace focalgraph {

// Ground truth for the thin-lens proxy: each pixel is blurred with
// sigma = blur_sigma_per_index * |gt_depth - z| in slice z.
struct SyntheticScene {
  RealImage gt_depth;  // index units
  Grayscale8 texture;
  double blur_sigma_per_index = 1.0;
};

struct SyntheticStack {
  FocalStack stack;
  RealImage gt_depth;
};

// Focal metadata of synthetic stacks: equally spaced, inclusive endpoints.
inline constexpr double kSynthFocalFirstMm = 50.0;
inline constexpr double kSynthFocalLastMm = 120.0;

// Spatially varying blur is approximated by linearly blending the two
// precomputed uniform-blur levels that bracket each pixel's sigma; a sigma that
// hits a level exactly (including 0) uses that level unblended.
SyntheticStack synth_stack(const SyntheticScene& scene, int depth_count);

// The blur levels used by synth_stack.
std::vector<double> blur_levels(double max_sigma);
// Normalized Gaussian blur, replicate-edge padding; sigma == 0 copies.
RealImage gaussian_blur(const Grayscale8& image, double sigma);

// Deterministic "dead leaves" texture: overlapping random discs.
Grayscale8 dead_leaves_texture(int width, int height, std::uint64_t seed);

SyntheticScene flat_scene(int width, int height, double gt, std::uint64_t seed);
// gt(x, .) = left + (right - left) * x / (width - 1)
SyntheticScene slanted_scene(int width, int height, double left, double right, std::uint64_t seed);

struct FinSceneOptions {
  int fin_width = 3;
  int fin_pitch = 16;
  double fin_depth = 14.0;
  double plane_depth = 4.0;
};
// Thin high-contrast ridges over a low-contrast, sparsely textured plane.
SyntheticScene fin_scene(int width, int height, const FinSceneOptions& options, std::uint64_t seed);

// Overwrites columns [0, width/2) of every slice with a constant gray value.
void flatten_left_half(FocalStack& stack, std::uint8_t gray = 128);

struct RegionMask {
  std::string label;
  Grayscale8 pixels;  // nonzero = in region
};

RegionMask full_mask(int width, int height, std::string label = "all");
RegionMask read_region_mask(const std::filesystem::path& path);

// Mean |depth - gt| over pixels that are in the mask and valid; nullopt when
// no such pixel exists. Throws Error(DimensionMismatch).
std::optional<double> mae(const DepthMap& map, const RealImage& gt, const RegionMask& mask);

// In-focus texture edges: pixels the focus measure accepts on the sharp texture.
Grayscale8 texture_edge_mask(const Grayscale8& texture, const CannyParams& params = {});

struct BenchReport {
  int repetitions = 0;
  std::vector<StageTimings> samples;
  std::vector<double> end_to_end_ms;  // wall time around each full run
  StageTimings median;                // per-field median over samples
  double median_end_to_end_ms = 0.0;
  std::vector<double> slice_median_ms;  // per-slice median over samples
  PipelineStats stats;                  // from the last repetition
  int width = 0;
  int height = 0;
  int depth_count = 0;
  int threads = 0;
};

// Runs the full pipeline `repetitions` (>= 3) times.
BenchReport bench(const FocalStack& stack, const PipelineParams& params, int repetitions);

std::string to_json(const BenchReport& report);
std::string to_json(const PipelineStats& stats, const StageTimings& timings);

}  // namespace focalgraph

#include "focalgraph/evalkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <json.hpp>

#include "focalgraph/error.hpp"
#include "focalgraph/parallel.hpp"

namespace focalgraph {

namespace {

// Portable draws from the raw engine output (distribution objects differ between
// standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

std::vector<double> gaussian_kernel(double sigma, int& radius) {
  radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    const double v = std::exp(-0.5 * t * t / (sigma * sigma));
    k[static_cast<std::size_t>(t + radius)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

double median_of(std::vector<double> v) { return v.empty() ? 0.0 : median(std::move(v)); }

}  // namespace

RealImage gaussian_blur(const Grayscale8& image, double sigma) {
  const int w = image.width();
  const int h = image.height();
  RealImage src(w, h);
  std::copy(image.pixels().begin(), image.pixels().end(), src.pixels().begin());
  if (!(sigma > 0.0)) return src;

  int r = 0;
  const auto k = gaussian_kernel(sigma, r);
  RealImage tmp(w, h);
  for (int y = 0; y < h; ++y) {
    const auto in = src.row(y);
    auto out = tmp.row(y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int t = -r; t <= r; ++t) {
        acc += k[static_cast<std::size_t>(t + r)] * in[static_cast<std::size_t>(std::clamp(x - t, 0, w - 1))];
      }
      out[static_cast<std::size_t>(x)] = acc;
    }
  }
  RealImage dst(w, h, 0.0);
  for (int y = 0; y < h; ++y) {
    auto out = dst.row(y);
    for (int t = -r; t <= r; ++t) {
      const double kv = k[static_cast<std::size_t>(t + r)];
      const auto in = tmp.row(std::clamp(y - t, 0, h - 1));
      for (int x = 0; x < w; ++x) out[static_cast<std::size_t>(x)] += kv * in[static_cast<std::size_t>(x)];
    }
  }
  return dst;
}

std::vector<double> blur_levels(double max_sigma) {
  std::vector<double> levels;
  for (int i = 0; i <= 8; ++i) levels.push_back(0.25 * i);  // 0 .. 2 in quarter steps
  while (levels.back() < max_sigma) levels.push_back(levels.back() * 1.2);
  return levels;
}

SyntheticStack synth_stack(const SyntheticScene& scene, int depth_count) {
  if (depth_count < kMinStackDepth) {
    throw Error(ErrorCode::InvalidArgument, "InvalidDepthCount: need at least " +
                                                std::to_string(kMinStackDepth) + " slices");
  }
  const int w = scene.texture.width();
  const int h = scene.texture.height();
  if (scene.gt_depth.width() != w || scene.gt_depth.height() != h) {
    throw Error(ErrorCode::DimensionMismatch, "ground truth and texture differ in size");
  }
  for (double g : scene.gt_depth.pixels()) {
    if (!(g >= 0.0 && g <= depth_count - 1)) {
      throw Error(ErrorCode::InvalidArgument, "ground truth outside [0, depth_count - 1]");
    }
  }

  double max_sigma = 0.0;
  for (double g : scene.gt_depth.pixels()) {
    max_sigma = std::max({max_sigma, scene.blur_sigma_per_index * g,
                          scene.blur_sigma_per_index * (depth_count - 1 - g)});
  }
  const std::vector<double> levels = blur_levels(max_sigma);
  std::vector<RealImage> blurred(levels.size());
  auto level_image = [&](std::size_t k) -> const RealImage& {
    if (blurred[k].empty()) blurred[k] = gaussian_blur(scene.texture, levels[k]);
    return blurred[k];
  };

  std::vector<Grayscale8> images;
  images.reserve(static_cast<std::size_t>(depth_count));
  for (int z = 0; z < depth_count; ++z) {
    Grayscale8 slice(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double sigma = scene.blur_sigma_per_index * std::abs(scene.gt_depth(x, y) - z);
        const auto upper = static_cast<std::size_t>(
            std::lower_bound(levels.begin(), levels.end(), sigma) - levels.begin());
        double value = 0.0;
        if (upper < levels.size() && levels[upper] == sigma) {
          value = level_image(upper)(x, y);
        } else {
          const std::size_t lo = upper - 1;
          const std::size_t hi = std::min(upper, levels.size() - 1);
          const double t = hi == lo ? 0.0 : (sigma - levels[lo]) / (levels[hi] - levels[lo]);
          value = (1.0 - t) * level_image(lo)(x, y) + t * level_image(hi)(x, y);
        }
        slice(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
      }
    }
    images.push_back(std::move(slice));
  }
  return {make_focal_stack(std::move(images),
                           linear_focal_lengths(depth_count, kSynthFocalFirstMm, kSynthFocalLastMm),
                           "synthetic"),
          scene.gt_depth};
}

Grayscale8 dead_leaves_texture(int width, int height, std::uint64_t seed) {
  Rng rng(seed);
  Grayscale8 tex(width, height, 128);
  const int discs = std::max(1, width * height / 40);
  for (int i = 0; i < discs; ++i) {
    const double cx = rng.uniform(-8.0, width + 8.0);
    const double cy = rng.uniform(-8.0, height + 8.0);
    const double radius = rng.uniform(2.5, 12.0);
    const auto value = static_cast<std::uint8_t>(rng.integer(10, 245));
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(cx + radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(cy + radius)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius) tex(x, y) = value;
      }
    }
  }
  return tex;
}

SyntheticScene flat_scene(int width, int height, double gt, std::uint64_t seed) {
  return {RealImage(width, height, gt), dead_leaves_texture(width, height, seed), 1.0};
}

SyntheticScene slanted_scene(int width, int height, double left, double right, std::uint64_t seed) {
  SyntheticScene s{RealImage(width, height), dead_leaves_texture(width, height, seed), 1.0};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      s.gt_depth(x, y) = width > 1 ? left + (right - left) * x / (width - 1) : left;
    }
  }
  return s;
}

SyntheticScene fin_scene(int width, int height, const FinSceneOptions& o, std::uint64_t seed) {
  Rng rng(seed);
  SyntheticScene s{RealImage(width, height, o.plane_depth), Grayscale8(width, height, 128), 1.0};
  // Plane: sparse low-contrast specks.
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (rng.uniform() < 0.02) {
        const int size = rng.integer(2, 4);
        const auto value = static_cast<std::uint8_t>(rng.uniform() < 0.5 ? 98 : 158);
        for (int dy = 0; dy < size && y + dy < height; ++dy) {
          for (int dx = 0; dx < size && x + dx < width; ++dx) s.texture(x + dx, y + dy) = value;
        }
      }
    }
  }
  // Fins: high-contrast alternating blocks along the ridge.
  for (int start = o.fin_pitch / 2; start < width; start += o.fin_pitch) {
    int y = 0;
    bool dark = rng.uniform() < 0.5;
    while (y < height) {
      const int run = rng.integer(3, 8);
      for (int yy = y; yy < std::min(height, y + run); ++yy) {
        for (int x = start; x < std::min(width, start + o.fin_width); ++x) {
          s.texture(x, yy) = dark ? 0 : 255;
          s.gt_depth(x, yy) = o.fin_depth;
        }
      }
      dark = !dark;
      y += run;
    }
  }
  return s;
}

void flatten_left_half(FocalStack& stack, std::uint8_t gray) {
  for (auto& img : stack.images) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width() / 2; ++x) img(x, y) = gray;
    }
  }
}

RegionMask full_mask(int width, int height, std::string label) {
  return {std::move(label), Grayscale8(width, height, 1)};
}

RegionMask read_region_mask(const std::filesystem::path& path) {
  return {path.stem().string(), read_pgm(path)};
}

std::optional<double> mae(const DepthMap& map, const RealImage& gt, const RegionMask& mask) {
  if (map.width() != gt.width() || map.height() != gt.height() ||
      map.width() != mask.pixels.width() || map.height() != mask.pixels.height()) {
    throw Error(ErrorCode::DimensionMismatch, "depth map, ground truth and mask must share dimensions");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      if (!mask.pixels(x, y) || !map.is_valid(x, y)) continue;
      sum += std::abs(map.depth(x, y) - gt(x, y));
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

Grayscale8 texture_edge_mask(const Grayscale8& texture, const CannyParams& params) {
  const FocusDebug d = compute_focus_debug(texture, params);
  return d.edges;
}

BenchReport bench(const FocalStack& stack, const PipelineParams& params, int repetitions) {
  if (repetitions < 3) throw Error(ErrorCode::InvalidArgument, "bench needs at least 3 repetitions");
  BenchReport report;
  report.repetitions = repetitions;
  report.width = stack.width;
  report.height = stack.height;
  report.depth_count = stack.depth_count();
  report.threads = resolve_threads(params.threads);
  for (int i = 0; i < repetitions; ++i) {
    const auto start = std::chrono::steady_clock::now();
    PipelineResult r = run_pipeline(stack, params);
    report.end_to_end_ms.push_back(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    report.samples.push_back(std::move(r.timings));
    report.stats = r.stats;
  }

  auto field_median = [&](auto member) {
    std::vector<double> v;
    for (const auto& s : report.samples) v.push_back(s.*member);
    return median_of(std::move(v));
  };
  report.median.preprocess_ms = field_median(&StageTimings::preprocess_ms);
  report.median.volume_ms = field_median(&StageTimings::volume_ms);
  report.median.graph_ms = field_median(&StageTimings::graph_ms);
  report.median.correspond_ms = field_median(&StageTimings::correspond_ms);
  report.median.fit_ms = field_median(&StageTimings::fit_ms);
  report.median.rebuild_ms = field_median(&StageTimings::rebuild_ms);
  report.median.raster_ms = field_median(&StageTimings::raster_ms);
  report.median_end_to_end_ms = median_of(report.end_to_end_ms);

  report.slice_median_ms.assign(static_cast<std::size_t>(stack.depth_count()), 0.0);
  for (std::size_t z = 0; z < report.slice_median_ms.size(); ++z) {
    std::vector<double> v;
    for (const auto& s : report.samples) v.push_back(s.slice_ms[z]);
    report.slice_median_ms[z] = median_of(std::move(v));
  }
  report.median.slice_ms = report.slice_median_ms;
  return report;
}

namespace {

nlohmann::json timings_json(const StageTimings& t) {
  return {{"preprocess_ms", t.preprocess_ms}, {"volume_ms", t.volume_ms},
          {"graph_ms", t.graph_ms},           {"correspond_ms", t.correspond_ms},
          {"fit_ms", t.fit_ms},               {"rebuild_ms", t.rebuild_ms},
          {"raster_ms", t.raster_ms},         {"depth_stage_ms", t.depth_stage_ms()},
          {"total_ms", t.total_ms()},         {"slice_ms", t.slice_ms}};
}

nlohmann::json stats_json(const PipelineStats& s) {
  return {{"focus_entries", s.focus_entries},
          {"node_count_all", s.all_nodes},
          {"node_count_max", s.max_nodes},
          {"node_count_nonmax", s.nonmax_nodes},
          {"node_count_retained", s.retained_nodes},
          {"triangle_count_all", s.all_triangles},
          {"triangle_count_refined", s.refined_triangles},
          {"correspondence_pairs", s.correspondence_pairs},
          {"nodes_refined_by_fit", s.refined_by_fit},
          {"valid_pixels", s.valid_pixels}};
}

}  // namespace

std::string to_json(const BenchReport& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    auto s = timings_json(r.samples[i]);
    s["end_to_end_ms"] = r.end_to_end_ms[i];
    samples.push_back(std::move(s));
  }
  nlohmann::json j{{"width", r.width},
                   {"height", r.height},
                   {"depth_count", r.depth_count},
                   {"threads", r.threads},
                   {"repetitions", r.repetitions},
                   {"samples", std::move(samples)},
                   {"median", timings_json(r.median)},
                   {"median_end_to_end_ms", r.median_end_to_end_ms},
                   {"slice_median_ms", r.slice_median_ms},
                   {"max_slice_median_ms",
                    r.slice_median_ms.empty() ? 0.0
                                              : *std::max_element(r.slice_median_ms.begin(), r.slice_median_ms.end())},
                   {"stats", stats_json(r.stats)}};
  return j.dump(2);
}

std::string to_json(const PipelineStats& stats, const StageTimings& timings) {
  nlohmann::json j{{"stats", stats_json(stats)}, {"timings", timings_json(timings)}};
  return j.dump(2);
}

}  // namespace focalgraph

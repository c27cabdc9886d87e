// focalgraph command line: build, synth, eval, bench, serve, debug-dump.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "focalgraph/debug_dump.hpp"
#include "focalgraph/error.hpp"
#include "focalgraph/evalkit.hpp"
#include "focalgraph/focuscontrol.hpp"
#include "focalgraph/pipeline.hpp"
#include "focalgraph/stack_io.hpp"
#include "json.hpp"

namespace fg = focalgraph;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kDegenerate = 4 };

// Raised for a failure that should be reported against a named stage.
struct CliFailure {
  std::string stage;
  std::string code;
  std::string message;
  int exit_code;
};

struct PipelineFlags {
  double sigma = fg::CannyParams{}.sigma;
  double non_edge_ratio = fg::CannyParams{}.non_edge_ratio;
  bool quantile_nonzero = false;
  double cos_threshold = fg::kDefaultCosThreshold;
  bool use_all_nodes = false;
  std::string fill = "none";
  int view_step = fg::kDefaultViewStep;
  bool printed_fit = false;
  int threads = 0;

  fg::PipelineParams params() const {
    fg::PipelineParams p;
    p.canny.sigma = sigma;
    p.canny.non_edge_ratio = non_edge_ratio;
    p.canny.quantile_domain =
        quantile_nonzero ? fg::QuantileDomain::NonzeroMagnitude : fg::QuantileDomain::AllPixels;
    p.cos_threshold = cos_threshold;
    p.use_all_nodes = use_all_nodes;
    p.fill = fill == "nearest" ? fg::FillMode::Nearest : fg::FillMode::None;
    p.view_step = view_step;
    p.formula = printed_fit ? fg::FitFormula::Printed : fg::FitFormula::LogParabola;
    p.threads = threads;
    return p;
  }
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
  cmd->add_option("--sigma", f.sigma, "Gaussian derivative sigma")->capture_default_str();
  cmd->add_option("--non-edge-ratio", f.non_edge_ratio, "Fraction of pixels below the edge threshold")
      ->capture_default_str();
  cmd->add_option("--cos-threshold", f.cos_threshold, "Opposite-direction cosine bound")->capture_default_str();
  cmd->add_flag("--use-all-nodes", f.use_all_nodes, "Keep non-maximal nodes through refinement");
  cmd->add_option("--fill", f.fill, "Hole filling")->check(CLI::IsMember({"none", "nearest"}))->capture_default_str();
  cmd->add_option("--view-step", f.view_step, "Preview intensity step per depth index")->capture_default_str();
  cmd->add_option("--threads", f.threads, "Worker threads (0 = all cores)")->capture_default_str();
  cmd->add_flag("--printed-fit", f.printed_fit)->group("");
  cmd->add_flag("--quantile-nonzero", f.quantile_nonzero)->group("");
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text << '\n';
  if (!out) throw fg::Error(fg::ErrorCode::IoError, "cannot write " + path);
}

template <typename F>
auto in_stage(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const fg::StageError& e) {
    throw CliFailure{e.stage(), std::string(fg::to_string(e.code())), e.what(),
                     e.code() == fg::ErrorCode::InvalidArgument ? kUsage : kData};
  } catch (const fg::Error& e) {
    throw CliFailure{stage, std::string(fg::to_string(e.code())), e.what(),
                     e.code() == fg::ErrorCode::InvalidArgument ? kUsage : kData};
  }
}

fg::FocalStack load(const std::string& manifest) {
  return in_stage("stack_io", [&] { return fg::load_stack(manifest); });
}

json stack_json(const fg::FocalStack& s) {
  return {{"name", s.name},
          {"width", s.width},
          {"height", s.height},
          {"depth_count", s.depth_count()},
          {"focal_lengths_mm", s.focal_lengths_mm}};
}

json params_json(const fg::PipelineParams& p) {
  return {{"sigma", p.canny.sigma},
          {"non_edge_ratio", p.canny.non_edge_ratio},
          {"cos_threshold", p.cos_threshold},
          {"use_all_nodes", p.use_all_nodes},
          {"fill", p.fill == fg::FillMode::Nearest ? "nearest" : "none"},
          {"view_step", p.view_step},
          {"threads", p.threads}};
}

// ---- build ---------------------------------------------------------------

struct BuildOptions {
  std::string stack, out, preview, color_preview, json_path;
  PipelineFlags flags;
};

int run_build(const BuildOptions& o) {
  const fg::PipelineParams params = o.flags.params();
  in_stage("cli", [&] { fg::validate(params); });
  const fg::FocalStack stack = load(o.stack);
  const fg::PipelineResult r = in_stage("pipeline", [&] { return fg::run_pipeline(stack, params); });

  in_stage("raster", [&] {
    fg::write_fdm(o.out, r.map);
    if (!o.preview.empty() || !o.color_preview.empty()) {
      const fg::ViewImages view = fg::normalize_for_view(r.map, params.view_step);
      if (!o.preview.empty()) fg::write_pgm(o.preview, view.gray);
      if (!o.color_preview.empty()) fg::write_ppm(o.color_preview, view.color);
    }
  });

  json report = json::parse(fg::to_json(r.stats, r.timings));
  report["stack"] = stack_json(stack);
  report["params"] = params_json(params);
  report["degenerate"] = r.degenerate();
  report["outputs"] = {{"depth_map", o.out}, {"preview", o.preview}, {"color_preview", o.color_preview}};
  if (!o.json_path.empty()) write_text(o.json_path, report.dump(2));

  std::fprintf(stderr, "nodes %zu (max %zu), triangles %zu, valid pixels %zu, depth stage %.1f ms, total %.1f ms\n",
               r.stats.all_nodes, r.stats.max_nodes, r.stats.refined_triangles, r.stats.valid_pixels,
               r.timings.depth_stage_ms(), r.timings.total_ms());
  if (r.degenerate()) {
    throw CliFailure{"graph", "Degenerate", "no triangles could be formed from the focus nodes", kDegenerate};
  }
  return kOk;
}

// ---- synth ---------------------------------------------------------------

struct SynthOptions {
  std::string scene = "flat";
  std::string out_dir;
  std::uint64_t seed = 1;
  int width = 256;
  int height = 256;
  int slices = 0;  // 0 = scene default
  double gt = 4.0;
  double left = 0.0;
  double right = 8.0;
};

int run_synth(const SynthOptions& o) {
  return in_stage("evalkit", [&] {
    fg::SyntheticScene scene;
    int slices = o.slices;
    if (o.scene == "flat" || o.scene == "halfgray") {
      scene = fg::flat_scene(o.width, o.height, o.gt, o.seed);
      if (slices == 0) slices = 9;
    } else if (o.scene == "slanted") {
      scene = fg::slanted_scene(o.width, o.height, o.left, o.right, o.seed);
      if (slices == 0) slices = 20;
    } else {
      scene = fg::fin_scene(o.width, o.height, {}, o.seed);
      if (slices == 0) slices = 20;
    }
    fg::SyntheticStack s = fg::synth_stack(scene, slices);
    s.stack.name = o.scene;

    fg::Grayscale8 mask(o.width, o.height, 255);
    if (o.scene == "halfgray") {
      fg::flatten_left_half(s.stack);
      for (int y = 0; y < o.height; ++y) {
        for (int x = o.width / 2; x < o.width; ++x) mask(x, y) = 0;
      }
    }

    const std::filesystem::path dir(o.out_dir);
    const auto manifest = fg::write_stack(s.stack, dir);
    fg::DepthMap gt{s.gt_depth, fg::Grayscale8(o.width, o.height, 1), slices, fg::kDefaultViewStep};
    fg::write_fdm(dir / "gt.fdm", gt);
    fg::write_pgm(dir / "mask.pgm", mask);
    fg::write_pgm(dir / "texture_edges.pgm", [&] {
      fg::Grayscale8 edges = fg::texture_edge_mask(scene.texture);
      for (auto& v : edges.pixels()) v = v ? 255 : 0;
      return edges;
    }());
    std::cout << manifest.string() << '\n';
    return kOk;
  });
}

// ---- eval ----------------------------------------------------------------

struct EvalOptions {
  std::string map, gt, mask, json_path;
};

int run_eval(const EvalOptions& o) {
  const fg::DepthMap map = in_stage("raster", [&] { return fg::read_fdm(o.map); });
  const fg::DepthMap gt = in_stage("raster", [&] { return fg::read_fdm(o.gt); });
  return in_stage("evalkit", [&] {
    const fg::RegionMask mask =
        o.mask.empty() ? fg::full_mask(map.depth.width(), map.depth.height()) : fg::read_region_mask(o.mask);
    const auto value = fg::mae(map, gt.depth, mask);
    std::size_t in_mask = 0, valid_in_mask = 0;
    if (mask.pixels.width() == map.valid.width() && mask.pixels.height() == map.valid.height()) {
      for (std::size_t i = 0; i < mask.pixels.pixels().size(); ++i) {
        if (!mask.pixels.pixels()[i]) continue;
        ++in_mask;
        if (map.valid.pixels()[i]) ++valid_in_mask;
      }
    }
    json report{{"mask", mask.label},
                {"mae", value ? json(*value) : json(nullptr)},
                {"mask_pixels", in_mask},
                {"valid_pixels", valid_in_mask},
                {"coverage", in_mask ? double(valid_in_mask) / double(in_mask) : 0.0}};
    if (!o.json_path.empty()) write_text(o.json_path, report.dump(2));
    // Keep stdout parseable when the JSON report goes there.
    std::FILE* summary = o.json_path == "-" ? stderr : stdout;
    if (value) {
      std::fprintf(summary, "mae %.6f over %zu of %zu pixels\n", *value, valid_in_mask, in_mask);
    } else {
      std::fprintf(summary, "mae undefined: no valid pixel in mask\n");
    }
    return kOk;
  });
}

// ---- bench ---------------------------------------------------------------

struct BenchOptions {
  std::string stack, json_path;
  int reps = 5;
  PipelineFlags flags;
};

int run_bench(const BenchOptions& o) {
  const fg::PipelineParams params = o.flags.params();
  in_stage("cli", [&] { fg::validate(params); });
  fg::FocalStack stack;
  if (o.stack.empty()) {
    stack = in_stage("evalkit", [] { return fg::synth_stack(fg::slanted_scene(640, 512, 2.0, 17.0, 5), 20).stack; });
  } else {
    stack = load(o.stack);
  }
  const fg::BenchReport report = in_stage("evalkit", [&] { return fg::bench(stack, params, o.reps); });
  if (!o.json_path.empty()) write_text(o.json_path, fg::to_json(report));
  double max_slice = 0.0;
  for (double v : report.slice_median_ms) max_slice = std::max(max_slice, v);
  std::fprintf(o.json_path == "-" ? stderr : stdout,
               "%dx%dx%d, %d reps, %d thread(s): preprocess %.1f ms (max slice %.1f ms), depth stage %.1f ms, end to end %.1f ms\n",
               report.width, report.height, report.depth_count, report.repetitions, report.threads,
               report.median.preprocess_ms, max_slice, report.median.depth_stage_ms(), report.median_end_to_end_ms);
  return kOk;
}

// ---- serve ---------------------------------------------------------------

struct ServeOptions {
  std::string stack, map, bind = "127.0.0.1:8713";
  fg::LensConfig lens;
};

int run_serve(const ServeOptions& o) {
  const fg::FocalStack stack = load(o.stack);
  const fg::DepthMap map = in_stage("raster", [&] { return fg::read_fdm(o.map); });
  in_stage("focuscontrol", [&] {
    fg::validate(o.lens);
    if (map.depth.width() != stack.width || map.depth.height() != stack.height ||
        map.depth_count != stack.depth_count()) {
      throw fg::Error(fg::ErrorCode::DimensionMismatch, "depth map does not belong to this stack");
    }
    fg::serve(stack, map, o.lens, o.bind);
  });
  return kOk;
}

// ---- debug-dump ----------------------------------------------------------

struct DumpOptions {
  std::string stack, out_dir;
  PipelineFlags flags;
};

int run_dump(const DumpOptions& o) {
  const fg::PipelineParams params = o.flags.params();
  in_stage("cli", [&] { fg::validate(params); });
  const fg::FocalStack stack = load(o.stack);
  const fg::PipelineResult r = in_stage("pipeline", [&] { return fg::run_pipeline(stack, params); });
  const auto files = in_stage("debug_dump", [&] { return fg::write_debug_dump(stack, r, params.canny, o.out_dir); });
  for (const auto& f : files) std::cout << f.string() << '\n';
  return kOk;
}

void report_failure(const CliFailure& f) {
  json j{{"error", {{"stage", f.stage}, {"code", f.code}, {"message", f.message}, {"exit_code", f.exit_code}}}};
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth maps from focal stacks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "focalgraph 0.1.0");

  BuildOptions build;
  auto* b = app.add_subcommand("build", "Estimate a depth map from a focal stack");
  b->add_option("--stack", build.stack, "Stack manifest")->required();
  b->add_option("--out", build.out, "Output depth map (.fdm)")->required();
  b->add_option("--preview", build.preview, "Grayscale preview (.pgm)");
  b->add_option("--color-preview", build.color_preview, "Preview with invalid pixels in red (.ppm)");
  b->add_option("--json", build.json_path, "Write a JSON report ('-' for stdout)");
  add_pipeline_flags(b, build.flags);

  SynthOptions synth;
  auto* s = app.add_subcommand("synth", "Write a synthetic stack with ground truth");
  s->add_option("--scene", synth.scene)->check(CLI::IsMember({"flat", "slanted", "fin", "halfgray"}))
      ->capture_default_str();
  s->add_option("--out-dir", synth.out_dir)->required();
  s->add_option("--seed", synth.seed)->capture_default_str();
  s->add_option("--width", synth.width)->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--height", synth.height)->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--slices", synth.slices, "Slice count (default 9 for flat/halfgray, 20 otherwise)");
  s->add_option("--gt", synth.gt, "Plane depth index for flat/halfgray")->capture_default_str();
  s->add_option("--left", synth.left, "Left-edge depth index for slanted")->capture_default_str();
  s->add_option("--right", synth.right, "Right-edge depth index for slanted")->capture_default_str();

  EvalOptions eval;
  auto* e = app.add_subcommand("eval", "Mean absolute error of a depth map against ground truth");
  e->add_option("--map", eval.map)->required();
  e->add_option("--gt", eval.gt)->required();
  e->add_option("--mask", eval.mask, "Region mask (.pgm, nonzero = inside)");
  e->add_option("--json", eval.json_path, "Write a JSON report ('-' for stdout)");

  BenchOptions bench;
  bench.flags.threads = 1;
  auto* be = app.add_subcommand("bench", "Time the pipeline stages");
  be->add_option("--stack", bench.stack, "Stack manifest (default: synthetic 640x512x20)");
  be->add_option("--reps", bench.reps)->capture_default_str();
  be->add_option("--json", bench.json_path, "Write a JSON report ('-' for stdout)");
  add_pipeline_flags(be, bench.flags);

  ServeOptions serve;
  auto* sv = app.add_subcommand("serve", "Serve stack, depth and focus queries over HTTP");
  sv->add_option("--stack", serve.stack)->required();
  sv->add_option("--map", serve.map)->required();
  sv->add_option("--bind", serve.bind)->capture_default_str();
  sv->add_option("--min-focal", serve.lens.min_focal_mm)->capture_default_str();
  sv->add_option("--max-focal", serve.lens.max_focal_mm)->capture_default_str();
  sv->add_option("--settle-ms", serve.lens.settle_time_ms)->capture_default_str();

  DumpOptions dump;
  auto* d = app.add_subcommand("debug-dump", "Write intermediate images and graphs");
  d->add_option("--stack", dump.stack)->required();
  d->add_option("--out-dir", dump.out_dir)->required();
  add_pipeline_flags(d, dump.flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*b) return run_build(build);
    if (*s) return run_synth(synth);
    if (*e) return run_eval(eval);
    if (*be) return run_bench(bench);
    if (*sv) return run_serve(serve);
    if (*d) return run_dump(dump);
  } catch (const CliFailure& f) {
    report_failure(f);
    return f.exit_code;
  } catch (const std::exception& ex) {
    report_failure({"cli", "Unexpected", ex.what(), kData});
    return kData;
  }
  return kUsage;
}

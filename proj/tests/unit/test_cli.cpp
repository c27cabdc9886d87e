#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "focalgraph/evalkit.hpp"
#include "test_util.hpp"

using namespace focalgraph;

namespace {

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliRun cli(const testutil::TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + FOCALGRAPH_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST(Cli, SynthBuildEval) {
  testutil::TempDir dir;
  const CliRun synth = cli(dir, "synth --scene slanted --width 96 --height 64 --slices 10 --out-dir " + q(dir / "s"));
  ASSERT_EQ(synth.exit_code, 0) << synth.err;
  for (const char* f : {"stack.txt", "gt.fdm", "mask.pgm", "texture_edges.pgm"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "s" / f)) << f;
  }

  const CliRun build = cli(dir, "build --threads 1 --stack " + q(dir / "s" / "stack.txt") + " --out " +
                                 q(dir / "d.fdm") + " --preview " + q(dir / "p.pgm") + " --color-preview " +
                                 q(dir / "p.ppm") + " --json -");
  ASSERT_EQ(build.exit_code, 0) << build.err;
  const auto report = nlohmann::json::parse(build.out);
  EXPECT_GT(report["stats"]["valid_pixels"].get<int>(), 0);
  const DepthMap map = read_fdm(dir / "d.fdm");
  EXPECT_EQ(map.width(), 96);
  EXPECT_EQ(map.depth_count, 10);
  EXPECT_EQ(read_pgm(dir / "p.pgm"), normalize_for_view(map, 10).gray);
  EXPECT_TRUE(std::filesystem::exists(dir / "p.ppm"));

  const CliRun eval = cli(dir, "eval --json - --map " + q(dir / "d.fdm") + " --gt " + q(dir / "s" / "gt.fdm") +
                                " --mask " + q(dir / "s" / "mask.pgm"));
  ASSERT_EQ(eval.exit_code, 0) << eval.err;
  const auto e = nlohmann::json::parse(eval.out);
  EXPECT_LT(e["mae"].get<double>(), 1.0);
  EXPECT_GT(e["coverage"].get<double>(), 0.0);
}

TEST(Cli, BuildIsByteDeterministic) {
  testutil::TempDir dir;
  ASSERT_EQ(cli(dir, "synth --scene flat --width 80 --height 60 --out-dir " + q(dir / "s")).exit_code, 0);
  const std::string stack = q(dir / "s" / "stack.txt");
  ASSERT_EQ(cli(dir, "build --stack " + stack + " --out " + q(dir / "a.fdm")).exit_code, 0);
  ASSERT_EQ(cli(dir, "build --threads 1 --stack " + stack + " --out " + q(dir / "b.fdm")).exit_code, 0);
  EXPECT_EQ(slurp(dir / "a.fdm"), slurp(dir / "b.fdm"));
}

TEST(Cli, ErrorsAreReportedWithStageAndExitCode) {
  testutil::TempDir dir;
  testutil::write_file(dir / "bad.txt", "this is not a manifest\n");
  const CliRun bad = cli(dir, "build --stack " + q(dir / "bad.txt") + " --out " + q(dir / "x.fdm"));
  EXPECT_EQ(bad.exit_code, 3);
  const auto err = nlohmann::json::parse(bad.err.substr(0, bad.err.find('\n')));
  EXPECT_EQ(err["error"]["stage"], "stack_io");
  EXPECT_EQ(err["error"]["exit_code"], 3);
  EXPECT_FALSE(std::filesystem::exists(dir / "x.fdm"));

  EXPECT_EQ(cli(dir, "build --out " + q(dir / "x.fdm")).exit_code, 2);
  EXPECT_EQ(cli(dir, "no-such-command").exit_code, 2);
  ASSERT_EQ(cli(dir, "synth --scene flat --width 40 --height 30 --out-dir " + q(dir / "s")).exit_code, 0);
  EXPECT_EQ(cli(dir, "build --sigma -1 --stack " + q(dir / "s" / "stack.txt") + " --out " + q(dir / "x.fdm")).exit_code,
            2);
}

TEST(Cli, FeaturelessStackIsDegenerate) {
  testutil::TempDir dir;
  std::vector<Grayscale8> images(3, Grayscale8(20, 20, 100));
  write_stack(make_focal_stack(images, {50, 60, 70}), dir.path());
  const CliRun r = cli(dir, "build --stack " + q(dir / "stack.txt") + " --out " + q(dir / "d.fdm"));
  EXPECT_EQ(r.exit_code, 4);
  EXPECT_NE(r.err.find("\"graph\""), std::string::npos);
  ASSERT_TRUE(std::filesystem::exists(dir / "d.fdm"));
  EXPECT_EQ(read_fdm(dir / "d.fdm").valid_count(), 0u);
}

TEST(Cli, DebugDumpWritesArtifacts) {
  testutil::TempDir dir;
  ASSERT_EQ(cli(dir, "synth --scene flat --width 48 --height 40 --slices 4 --gt 2 --out-dir " + q(dir / "s")).exit_code,
            0);
  const CliRun r = cli(dir, "debug-dump --stack " + q(dir / "s" / "stack.txt") + " --out-dir " + q(dir / "dbg"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  for (const char* f : {"slice_000_edges.pgm", "max_depth.pgm", "graph_all.svg", "graph_refined.svg", "depth_color.ppm"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "dbg" / f)) << f;
  }
}

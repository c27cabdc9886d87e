#pragma once

#include <array>
#include <filesystem>
#include <optional>

#include "focalgraph/delaunay.hpp"
#include "focalgraph/depth_fit.hpp"
#include "focalgraph/image.hpp"

namespace focalgraph {

inline constexpr int kDefaultViewStep = 10;

// Dense per-pixel depth index with an explicit validity mask.
struct DepthMap {
  RealImage depth;
  Grayscale8 valid;  // 1 = has depth
  int depth_count = 0;
  int step_for_view = kDefaultViewStep;

  int width() const noexcept { return depth.width(); }
  int height() const noexcept { return depth.height(); }
  bool is_valid(int x, int y) const noexcept { return valid(x, y) != 0; }
  std::size_t valid_count() const noexcept;
};

struct Barycentric {
  double a = 0.0, b = 0.0, c = 0.0;
};

inline constexpr double kDegenerateArea = 1e-12;
inline constexpr double kInsideTolerance = 1e-12;

// Signed-area ratios (PBC, PAC, PAB) / ABC, oriented so that a + b + c = 1.
// Throws Error(DegenerateTriangle) when |area(ABC)| <= 1e-12.
Barycentric barycentric_coords(const Point2& p, const Point2& a, const Point2& b, const Point2& c);

inline bool inside(const Barycentric& w) noexcept {
  return w.a >= -kInsideTolerance && w.b >= -kInsideTolerance && w.c >= -kInsideTolerance;
}

enum class FillMode { None, Nearest };

// Barycentric interpolation of node depths over every triangle. Pixel centres sit
// at integer coordinates. Pixels on an edge shared by two triangles belong to one
// of them (top-left rule); hull edges are inclusive. Uncovered pixels are invalid.
DepthMap rasterize(const RefinedGraph& graph, int width, int height);

// Gives each invalid pixel the depth of the nearest valid pixel (Euclidean),
// marking it valid. No-op on maps without valid pixels.
void fill_nearest(DepthMap& map);

struct ViewImages {
  Grayscale8 gray;   // round(depth * step) + 1 clamped to [1, 255]; invalid = 0
  ColorImage color;  // same intensities, invalid = pure red
};
ViewImages normalize_for_view(const DepthMap& map, int step);

// ".fdm" float depth map: 16-byte header ("FDM1", u32 width, u32 height,
// u32 depth_count, little-endian) followed by width*height little-endian float32
// depths, row-major, NaN marking invalid pixels.
std::vector<std::uint8_t> encode_fdm(const DepthMap& map);
DepthMap decode_fdm(std::span<const std::uint8_t> bytes);
void write_fdm(const std::filesystem::path& path, const DepthMap& map);
DepthMap read_fdm(const std::filesystem::path& path);

}  // namespace focalgraph

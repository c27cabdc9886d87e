#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "focalgraph/image.hpp"

namespace focalgraph {

// Which pixels the adaptive edge threshold quantile is taken over.
enum class QuantileDomain {
  AllPixels,        // default: zeros included
  NonzeroMagnitude  // experimental
};

struct CannyParams {
  double sigma = std::sqrt(2.0);
  double non_edge_ratio = 0.95;
  QuantileDomain quantile_domain = QuantileDomain::AllPixels;
};

// Throws Error(InvalidArgument) unless sigma > 0 and 0 < non_edge_ratio < 1.
void validate(const CannyParams& params);

struct DerivativeKernels {
  int radius = 0;  // side = 2 * radius + 1
  RealImage kernel_x;
  RealImage kernel_y;
};

// d/dx and d/dy of the 2D Gaussian N(0, sigma^2) sampled at integer offsets,
// truncated at ceil(3 sigma). Entry (i + radius, j + radius) holds offset (i, j).
// Convolving kernel_x with I(x, y) = x gives a positive response.
DerivativeKernels gaussian_derivative_kernels(double sigma);

// 1D factors: kernel_x(i, j) == derivative[i] * gaussian[j].
struct SeparableKernels {
  int radius = 0;
  std::vector<double> gaussian;
  std::vector<double> derivative;
};
SeparableKernels separable_derivative_kernels(double sigma);

struct GradientField {
  RealImage gx;
  RealImage gy;
  RealImage magnitude;  // hypot(gx, gy)
};

// Convolution with the derivative-of-Gaussian kernels, replicate-edge padding.
GradientField compute_gradients(const Grayscale8& image, double sigma);

// Gradient-direction non-maximum suppression over 4 quantized directions.
// A pixel p with step d survives iff m(p) > 0, m(p) > m(p - d) and m(p) >= m(p + d);
// out-of-image neighbours count as zero. Returns a 0/1 mask.
Grayscale8 non_maximum_suppression(const GradientField& gradients);

// Quantile value used as the edge threshold (nearest-rank).
double adaptive_threshold(std::span<const double> magnitudes, double non_edge_ratio,
                          QuantileDomain domain = QuantileDomain::AllPixels);

struct FocusEntry {
  std::uint32_t index = 0;  // row-major pixel index
  double magnitude = 0.0;
};

// One z-slice of the focus volume: edge-accepted pixels and their raw magnitude.
struct FocusSlice {
  int width = 0;
  int height = 0;
  int z = 0;
  std::vector<FocusEntry> entries;  // ascending index

  std::size_t size() const noexcept { return entries.size(); }
  // Magnitude at (x, y), or 0 when the pixel was not accepted.
  double at(int x, int y) const noexcept;
};

FocusSlice compute_focus_slice(const Grayscale8& image, int z, const CannyParams& params = {});

// Intermediate images of the focus measure, for debug dumps.
struct FocusDebug {
  RealImage magnitude;
  Grayscale8 edges;  // 0/1
  RealImage filtered_magnitude;
  double threshold = 0.0;
};
FocusDebug compute_focus_debug(const Grayscale8& image, const CannyParams& params = {});

}  // namespace focalgraph

#include "focalgraph/focus_measure.hpp"

#include <algorithm>
#include <numbers>

#include "focalgraph/error.hpp"

namespace focalgraph {

void validate(const CannyParams& params) {
  if (!(params.sigma > 0.0) || !std::isfinite(params.sigma)) {
    throw Error(ErrorCode::InvalidArgument, "sigma must be > 0");
  }
  if (!(params.non_edge_ratio > 0.0 && params.non_edge_ratio < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "non_edge_ratio must lie in (0, 1)");
  }
}

SeparableKernels separable_derivative_kernels(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "InvalidSigma: sigma must be > 0");
  }
  SeparableKernels k;
  k.radius = static_cast<int>(std::ceil(3.0 * sigma));
  const std::size_t side = static_cast<std::size_t>(2 * k.radius + 1);
  k.gaussian.resize(side);
  k.derivative.resize(side);
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  for (int t = -k.radius; t <= k.radius; ++t) {
    const double g = norm * std::exp(-0.5 * t * t / (sigma * sigma));
    k.gaussian[static_cast<std::size_t>(t + k.radius)] = g;
    k.derivative[static_cast<std::size_t>(t + k.radius)] = -t / (sigma * sigma) * g;
  }
  return k;
}

DerivativeKernels gaussian_derivative_kernels(double sigma) {
  const SeparableKernels sep = separable_derivative_kernels(sigma);
  const int side = 2 * sep.radius + 1;
  DerivativeKernels k{sep.radius, RealImage(side, side), RealImage(side, side)};
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      k.kernel_x(i, j) = sep.derivative[ui] * sep.gaussian[uj];
      k.kernel_y(i, j) = sep.gaussian[ui] * sep.derivative[uj];
    }
  }
  return k;
}

namespace {

// out(x, y) = sum_t kernel[t + r] * in(clamp(x - t), y)
void convolve_rows(const RealImage& in, std::span<const double> kernel, int radius, bool antisymmetric,
                   RealImage& out) {
  const int w = in.width();
  std::vector<double> padded(static_cast<std::size_t>(w + 2 * radius));
  for (int y = 0; y < in.height(); ++y) {
    const auto src = in.row(y);
    for (int x = -radius; x < w + radius; ++x) {
      padded[static_cast<std::size_t>(x + radius)] = src[static_cast<std::size_t>(std::clamp(x, 0, w - 1))];
    }
    auto dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      // padded index of in(x - t) is x - t + radius
      const double* base = padded.data() + x + 2 * radius;
      if (antisymmetric) {
        // kernel[r - t] == -kernel[r + t], so flat input cancels exactly
        const double* c = padded.data() + x + radius;
        for (int t = 1; t <= radius; ++t) acc += kernel[static_cast<std::size_t>(t + radius)] * (c[-t] - c[t]);
      } else {
        for (int t = -radius; t <= radius; ++t) acc += kernel[static_cast<std::size_t>(t + radius)] * base[-t - radius];
      }
      dst[static_cast<std::size_t>(x)] = acc;
    }
  }
}

// out(x, y) = sum_t kernel[t + r] * in(x, clamp(y - t))
void convolve_cols(const RealImage& in, std::span<const double> kernel, int radius, bool antisymmetric,
                   RealImage& out) {
  const int w = in.width();
  const int h = in.height();
  for (int y = 0; y < h; ++y) {
    auto dst = out.row(y);
    std::fill(dst.begin(), dst.end(), 0.0);
    if (antisymmetric) {
      for (int t = 1; t <= radius; ++t) {
        const double kv = kernel[static_cast<std::size_t>(t + radius)];
        const auto up = in.row(std::clamp(y - t, 0, h - 1));
        const auto down = in.row(std::clamp(y + t, 0, h - 1));
        for (int x = 0; x < w; ++x) {
          const auto ux = static_cast<std::size_t>(x);
          dst[ux] += kv * (up[ux] - down[ux]);
        }
      }
      continue;
    }
    for (int t = -radius; t <= radius; ++t) {
      const double kv = kernel[static_cast<std::size_t>(t + radius)];
      const auto src = in.row(std::clamp(y - t, 0, h - 1));
      for (int x = 0; x < w; ++x) dst[static_cast<std::size_t>(x)] += kv * src[static_cast<std::size_t>(x)];
    }
  }
}

}  // namespace

GradientField compute_gradients(const Grayscale8& image, double sigma) {
  const SeparableKernels k = separable_derivative_kernels(sigma);
  const int w = image.width();
  const int h = image.height();
  RealImage src(w, h);
  std::copy(image.pixels().begin(), image.pixels().end(), src.pixels().begin());

  RealImage tmp(w, h);
  GradientField g{RealImage(w, h), RealImage(w, h), RealImage(w, h)};
  convolve_rows(src, k.derivative, k.radius, true, tmp);
  convolve_cols(tmp, k.gaussian, k.radius, false, g.gx);
  convolve_rows(src, k.gaussian, k.radius, false, tmp);
  convolve_cols(tmp, k.derivative, k.radius, true, g.gy);

  auto gx = g.gx.pixels();
  auto gy = g.gy.pixels();
  auto m = g.magnitude.pixels();
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::hypot(gx[i], gy[i]);
  return g;
}

Grayscale8 non_maximum_suppression(const GradientField& gradients) {
  constexpr double kTan22_5 = 0.41421356237309503;  // sqrt(2) - 1
  constexpr double kTan67_5 = 2.4142135623730949;   // sqrt(2) + 1
  const RealImage& mag = gradients.magnitude;
  const int w = mag.width();
  const int h = mag.height();
  Grayscale8 mask(w, h, 0);

  auto at = [&](int x, int y) { return mag.contains(x, y) ? mag(x, y) : 0.0; };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double m = mag(x, y);
      if (!(m > 0.0)) continue;
      const double gx = gradients.gx(x, y);
      const double gy = gradients.gy(x, y);
      const double ax = std::abs(gx);
      const double ay = std::abs(gy);
      int dx = 0;
      int dy = 0;
      if (ay <= kTan22_5 * ax) {
        dx = 1;
      } else if (ay > kTan67_5 * ax) {
        dy = 1;
      } else {
        dx = (gx * gy > 0.0) ? 1 : -1;
        dy = 1;
      }
      if (m > at(x - dx, y - dy) && m >= at(x + dx, y + dy)) mask(x, y) = 1;
    }
  }
  return mask;
}

double adaptive_threshold(std::span<const double> magnitudes, double non_edge_ratio,
                          QuantileDomain domain) {
  std::vector<double> values;
  if (domain == QuantileDomain::AllPixels) {
    values.assign(magnitudes.begin(), magnitudes.end());
  } else {
    values.reserve(magnitudes.size() / 4);
    for (double v : magnitudes) {
      if (v > 0.0) values.push_back(v);
    }
  }
  if (values.empty()) return 0.0;
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(non_edge_ratio * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n) - 1;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank), values.end());
  return values[rank];
}

double FocusSlice::at(int x, int y) const noexcept {
  if (x < 0 || y < 0 || x >= width || y >= height) return 0.0;
  const auto idx = static_cast<std::uint32_t>(y * width + x);
  const auto it = std::lower_bound(entries.begin(), entries.end(), idx,
                                   [](const FocusEntry& e, std::uint32_t i) { return e.index < i; });
  return (it != entries.end() && it->index == idx) ? it->magnitude : 0.0;
}

namespace {

struct FilteredEdges {
  GradientField gradients;
  Grayscale8 nms;
  double threshold = 0.0;
};

FilteredEdges filter_edges(const Grayscale8& image, const CannyParams& params) {
  validate(params);
  if (image.empty()) throw Error(ErrorCode::InvalidArgument, "empty image");
  FilteredEdges f;
  f.gradients = compute_gradients(image, params.sigma);
  f.nms = non_maximum_suppression(f.gradients);
  f.threshold = adaptive_threshold(f.gradients.magnitude.pixels(), params.non_edge_ratio,
                                   params.quantile_domain);
  return f;
}

bool accepted(const FilteredEdges& f, std::size_t i) {
  const double m = f.gradients.magnitude.pixels()[i];
  return f.nms.pixels()[i] != 0 && m > 0.0 && m >= f.threshold;
}

}  // namespace

FocusSlice compute_focus_slice(const Grayscale8& image, int z, const CannyParams& params) {
  const FilteredEdges f = filter_edges(image, params);
  FocusSlice slice{image.width(), image.height(), z, {}};
  const auto mag = f.gradients.magnitude.pixels();
  for (std::size_t i = 0; i < mag.size(); ++i) {
    if (accepted(f, i)) slice.entries.push_back({static_cast<std::uint32_t>(i), mag[i]});
  }
  return slice;
}

FocusDebug compute_focus_debug(const Grayscale8& image, const CannyParams& params) {
  FilteredEdges f = filter_edges(image, params);
  FocusDebug d;
  d.threshold = f.threshold;
  d.edges = Grayscale8(image.width(), image.height(), 0);
  d.filtered_magnitude = RealImage(image.width(), image.height(), 0.0);
  const auto mag = f.gradients.magnitude.pixels();
  for (std::size_t i = 0; i < mag.size(); ++i) {
    if (accepted(f, i)) {
      d.edges.pixels()[i] = 1;
      d.filtered_magnitude.pixels()[i] = mag[i];
    }
  }
  d.magnitude = std::move(f.gradients.magnitude);
  return d;
}

}  // namespace focalgraph

#pragma once

#include <cstdint>
#include <vector>

#include "focalgraph/focus_measure.hpp"
#include "focalgraph/image.hpp"

namespace focalgraph {

struct ZSample {
  int z = 0;
  double magnitude = 0.0;
  friend bool operator==(const ZSample&, const ZSample&) = default;
};

// Stack of sparse focus slices V(x, y, z) with a per-pixel index over z.
class FocusVolume {
 public:
  FocusVolume() = default;
  // Slices must share dimensions and carry z = 0..n-1 in order.
  explicit FocusVolume(std::vector<FocusSlice> slices);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int depth_count() const noexcept { return static_cast<int>(slices_.size()); }
  const std::vector<FocusSlice>& slices() const noexcept { return slices_; }

  // All stored samples at (x, y), ascending z. Throws Error(OutOfBounds).
  std::span<const ZSample> z_profile(int x, int y) const;
  std::span<const ZSample> z_profile_unchecked(std::size_t pixel_index) const noexcept {
    return {samples_.data() + offsets_[pixel_index], samples_.data() + offsets_[pixel_index + 1]};
  }
  std::size_t entry_count() const noexcept { return samples_.size(); }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<FocusSlice> slices_;
  std::vector<std::uint32_t> offsets_;  // CSR row pointers, size w*h+1
  std::vector<ZSample> samples_;
};

struct MaxMaps {
  RealImage magnitude;   // M, 0 = no measurement
  Image<int> depth;      // D, meaningful where M > 0
};

// M(x,y) = max_z V(x,y,z), D = argmax (smallest z on ties); M = D = 0 where empty.
MaxMaps build_max_maps(const FocusVolume& volume);

std::vector<ZSample> z_profile(const FocusVolume& volume, int x, int y);

}  // namespace focalgraph

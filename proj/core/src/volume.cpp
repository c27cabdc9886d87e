#include "focalgraph/volume.hpp"

#include <string>

#include "focalgraph/error.hpp"

namespace focalgraph {

FocusVolume::FocusVolume(std::vector<FocusSlice> slices) : slices_(std::move(slices)) {
  if (slices_.empty()) return;
  width_ = slices_.front().width;
  height_ = slices_.front().height;
  for (std::size_t z = 0; z < slices_.size(); ++z) {
    const FocusSlice& s = slices_[z];
    if (s.width != width_ || s.height != height_) {
      throw Error(ErrorCode::DimensionMismatch, "focus slice " + std::to_string(z) + " has different size");
    }
    if (s.z != static_cast<int>(z)) {
      throw Error(ErrorCode::InvalidArgument, "focus slices must be ordered by z");
    }
  }

  const std::size_t pixels = static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  offsets_.assign(pixels + 1, 0);
  for (const FocusSlice& s : slices_) {
    for (const FocusEntry& e : s.entries) {
      if (e.index >= pixels) throw Error(ErrorCode::OutOfBounds, "focus entry outside image");
      ++offsets_[e.index + 1];
    }
  }
  for (std::size_t i = 0; i < pixels; ++i) offsets_[i + 1] += offsets_[i];

  samples_.resize(offsets_.back());
  std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
  // Slices are visited in z order, so each pixel's run ends up sorted by z.
  for (const FocusSlice& s : slices_) {
    for (const FocusEntry& e : s.entries) {
      samples_[cursor[e.index]++] = ZSample{s.z, e.magnitude};
    }
  }
}

std::span<const ZSample> FocusVolume::z_profile(int x, int y) const {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) {
    throw Error(ErrorCode::OutOfBounds, "pixel (" + std::to_string(x) + ", " + std::to_string(y) + ")");
  }
  return z_profile_unchecked(static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                             static_cast<std::size_t>(x));
}

std::vector<ZSample> z_profile(const FocusVolume& volume, int x, int y) {
  const auto profile = volume.z_profile(x, y);
  return {profile.begin(), profile.end()};
}

MaxMaps build_max_maps(const FocusVolume& volume) {
  MaxMaps maps{RealImage(volume.width(), volume.height(), 0.0),
               Image<int>(volume.width(), volume.height(), 0)};
  auto m = maps.magnitude.pixels();
  auto d = maps.depth.pixels();
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (const ZSample& s : volume.z_profile_unchecked(i)) {
      if (s.magnitude > m[i]) {
        m[i] = s.magnitude;
        d[i] = s.z;
      }
    }
  }
  return maps;
}

}  // namespace focalgraph

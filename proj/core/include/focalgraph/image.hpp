#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace focalgraph {

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

// Dense row-major raster.
template <typename T>
class Image {
 public:
  using value_type = T;

  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    assert(width >= 0 && height >= 0);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

  std::span<T> row(int y) noexcept {
    return std::span<T>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }
  std::span<const T> row(int y) const noexcept {
    return std::span<const T>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }
  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Grayscale8 = Image<std::uint8_t>;
using RealImage = Image<double>;

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};
using ColorImage = Image<Rgb8>;

// Netpbm I/O. Reading accepts binary P5 (maxval <= 255) and P6; color input is
// reduced to gray as floor((r + g + b) / 3). 16-bit files are rejected.
Grayscale8 read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Grayscale8& image);
void write_ppm(const std::filesystem::path& path, const ColorImage& image);

// Binary P5 encoding into / out of memory (used by the HTTP service).
std::vector<std::uint8_t> encode_pgm(const Grayscale8& image);
Grayscale8 decode_pgm(std::span<const std::uint8_t> bytes);

// Linearly maps [min, max] of the finite values to [0, 255]; constant images map to 0.
Grayscale8 normalize_to_gray(const RealImage& image);

}  // namespace focalgraph

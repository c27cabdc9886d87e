#include "focalgraph/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "focalgraph/error.hpp"

namespace focalgraph {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonMonotonicFocal: return "NonMonotonicFocal";
    case ErrorCode::TooFewImages: return "TooFewImages";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) {
      out.push_back(static_cast<char>(bytes_[pos_++]));
    }
    if (out.empty()) throw Error(ErrorCode::ParseError, "truncated netpbm header");
    return out;
  }

  int integer() {
    const std::string t = token();
    if (!std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      throw Error(ErrorCode::ParseError, "bad netpbm header field '" + t + "'");
    }
    const long v = std::stol(t);
    if (v <= 0 || v > std::numeric_limits<int>::max()) {
      throw Error(ErrorCode::ParseError, "netpbm header value out of range");
    }
    return static_cast<int>(v);
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::ParseError, "missing raster separator");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

Grayscale8 decode_pgm(std::span<const std::uint8_t> bytes) {
  HeaderReader header(bytes);
  const std::string magic = header.token();
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw Error(ErrorCode::UnsupportedFormat, "expected binary P5 or P6, got '" + magic + "'");
  }
  const int width = header.integer();
  const int height = header.integer();
  const int maxval = header.integer();
  if (maxval > 255) {
    throw Error(ErrorCode::UnsupportedFormat, "only 8-bit netpbm is supported (maxval " +
                                                  std::to_string(maxval) + ")");
  }
  const std::size_t offset = header.raster_offset();
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() < offset + count * static_cast<std::size_t>(channels)) {
    throw Error(ErrorCode::ParseError, "truncated raster");
  }

  Grayscale8 image(width, height);
  auto out = image.pixels();
  const std::uint8_t* src = bytes.data() + offset;
  if (channels == 1) {
    std::copy(src, src + count, out.begin());
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const unsigned sum = unsigned{src[3 * i]} + src[3 * i + 1] + src[3 * i + 2];
      out[i] = static_cast<std::uint8_t>(sum / 3);
    }
  }
  return image;
}

Grayscale8 read_pgm(const std::filesystem::path& path) {
  const auto bytes = read_all(path);
  try {
    return decode_pgm(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_pgm(const Grayscale8& image) {
  const std::string header = "P5\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), image.pixels().begin(), image.pixels().end());
  return bytes;
}

void write_pgm(const std::filesystem::path& path, const Grayscale8& image) {
  write_all(path, encode_pgm(image));
}

void write_ppm(const std::filesystem::path& path, const ColorImage& image) {
  const std::string header = "P6\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.reserve(bytes.size() + image.size() * 3);
  for (const Rgb8& p : image.pixels()) {
    bytes.push_back(p.r);
    bytes.push_back(p.g);
    bytes.push_back(p.b);
  }
  write_all(path, bytes);
}

Grayscale8 normalize_to_gray(const RealImage& image) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : image.pixels()) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Grayscale8 out(image.width(), image.height(), 0);
  if (!(hi > lo)) return out;
  const double scale = 255.0 / (hi - lo);
  auto dst = out.pixels();
  auto src = image.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (std::isfinite(src[i])) {
      dst[i] = static_cast<std::uint8_t>(std::lround((src[i] - lo) * scale));
    }
  }
  return out;
}

}  // namespace focalgraph

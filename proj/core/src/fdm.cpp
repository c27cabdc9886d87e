#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "focalgraph/error.hpp"
#include "focalgraph/raster.hpp"

namespace focalgraph {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'F', 'D', 'M', '1'};
constexpr std::size_t kHeaderSize = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

}  // namespace

std::vector<std::uint8_t> encode_fdm(const DepthMap& map) {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  out.reserve(kHeaderSize + map.depth.size() * 4);
  put_u32(out, static_cast<std::uint32_t>(map.width()));
  put_u32(out, static_cast<std::uint32_t>(map.height()));
  put_u32(out, static_cast<std::uint32_t>(map.depth_count));
  const auto depth = map.depth.pixels();
  const auto valid = map.valid.pixels();
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const float f = valid[i] ? static_cast<float>(depth[i]) : std::numeric_limits<float>::quiet_NaN();
    put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

DepthMap decode_fdm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::UnsupportedFormat, "not an FDM1 depth map");
  }
  const std::uint32_t width = get_u32(bytes.data() + 4);
  const std::uint32_t height = get_u32(bytes.data() + 8);
  const std::uint32_t depth_count = get_u32(bytes.data() + 12);
  const std::size_t count = std::size_t{width} * height;
  if (width > (1u << 16) || height > (1u << 16) || bytes.size() != kHeaderSize + count * 4) {
    throw Error(ErrorCode::ParseError, "FDM size does not match header");
  }
  DepthMap map{RealImage(static_cast<int>(width), static_cast<int>(height), 0.0),
               Grayscale8(static_cast<int>(width), static_cast<int>(height), 0),
               static_cast<int>(depth_count), kDefaultViewStep};
  auto depth = map.depth.pixels();
  auto valid = map.valid.pixels();
  for (std::size_t i = 0; i < count; ++i) {
    const float f = std::bit_cast<float>(get_u32(bytes.data() + kHeaderSize + 4 * i));
    if (std::isnan(f)) continue;
    depth[i] = f;
    valid[i] = 1;
  }
  return map;
}

void write_fdm(const std::filesystem::path& path, const DepthMap& map) {
  const auto bytes = encode_fdm(map);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

DepthMap read_fdm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_fdm(bytes);
}

}  // namespace focalgraph

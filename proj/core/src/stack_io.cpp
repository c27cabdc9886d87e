#include "focalgraph/stack_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "focalgraph/error.hpp"

namespace focalgraph {

namespace {

constexpr std::string_view kHeaderPrefix = "focalstack v";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view text, int line_no) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_no) + ": bad focal length '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

FocalStack make_focal_stack(std::vector<Grayscale8> images, std::vector<double> focal_lengths_mm,
                            std::string name) {
  if (images.size() != focal_lengths_mm.size()) {
    throw Error(ErrorCode::InvalidArgument, "image count and focal length count differ");
  }
  if (images.size() < static_cast<std::size_t>(kMinStackDepth)) {
    throw Error(ErrorCode::TooFewImages, "need at least " + std::to_string(kMinStackDepth) +
                                             " images, got " + std::to_string(images.size()));
  }
  const int width = images.front().width();
  const int height = images.front().height();
  if (width <= 0 || height <= 0) throw Error(ErrorCode::DimensionMismatch, "empty image");
  for (std::size_t i = 1; i < images.size(); ++i) {
    if (images[i].width() != width || images[i].height() != height) {
      throw Error(ErrorCode::DimensionMismatch,
                  "image " + std::to_string(i) + " is " + std::to_string(images[i].width()) + "x" +
                      std::to_string(images[i].height()) + ", expected " + std::to_string(width) +
                      "x" + std::to_string(height));
    }
  }
  const bool ascending = focal_lengths_mm[1] > focal_lengths_mm[0];
  for (std::size_t i = 1; i < focal_lengths_mm.size(); ++i) {
    const double step = focal_lengths_mm[i] - focal_lengths_mm[i - 1];
    if (!(ascending ? step > 0.0 : step < 0.0)) {
      throw Error(ErrorCode::NonMonotonicFocal,
                  "focal lengths not strictly monotonic at entry " + std::to_string(i));
    }
  }
  return FocalStack{std::move(images), std::move(focal_lengths_mm), width, height, std::move(name)};
}

StackManifest parse_manifest(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  StackManifest manifest;
  bool have_header = false;
  std::string notes;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (!have_header) {
      if (view.empty()) continue;
      if (!view.starts_with(kHeaderPrefix)) {
        throw Error(ErrorCode::ParseError, "missing 'focalstack v1' header");
      }
      const std::string_view ver = view.substr(kHeaderPrefix.size());
      const auto [ptr, ec] = std::from_chars(ver.data(), ver.data() + ver.size(), manifest.version);
      if (ec != std::errc{} || ptr != ver.data() + ver.size() || manifest.version != 1) {
        throw Error(ErrorCode::ParseError, "unsupported manifest version '" + std::string(ver) + "'");
      }
      have_header = true;
      continue;
    }
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (!notes.empty()) notes.push_back('\n');
      notes += trim(view.substr(1));
      continue;
    }
    const auto tab = view.rfind('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected path<TAB>focal_mm");
    }
    const std::string_view path = trim(view.substr(0, tab));
    if (path.empty()) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty path");
    manifest.image_paths.emplace_back(std::string(path));
    manifest.focal_lengths_mm.push_back(parse_real(view.substr(tab + 1), line_no));
  }
  if (!have_header) throw Error(ErrorCode::ParseError, "empty manifest");
  if (!notes.empty()) manifest.notes = std::move(notes);
  return manifest;
}

std::string format_manifest(const StackManifest& manifest) {
  std::ostringstream out;
  out << kHeaderPrefix << manifest.version << '\n';
  if (manifest.notes) {
    std::istringstream notes(*manifest.notes);
    std::string line;
    while (std::getline(notes, line)) out << "# " << line << '\n';
  }
  char buf[64];
  for (std::size_t i = 0; i < manifest.image_paths.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", manifest.focal_lengths_mm[i]);
    out << manifest.image_paths[i].generic_string() << '\t' << buf << '\n';
  }
  return out.str();
}

StackManifest read_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::MissingFile, manifest_path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_manifest(buffer.str());
}

FocalStack load_stack(const std::filesystem::path& manifest_path) {
  const StackManifest manifest = read_manifest(manifest_path);
  const auto base = manifest_path.parent_path();
  if (manifest.image_paths.size() < static_cast<std::size_t>(kMinStackDepth)) {
    throw Error(ErrorCode::TooFewImages, "manifest lists " + std::to_string(manifest.image_paths.size()) +
                                             " images");
  }
  std::vector<Grayscale8> images;
  images.reserve(manifest.image_paths.size());
  for (const auto& rel : manifest.image_paths) {
    const auto path = rel.is_absolute() ? rel : base / rel;
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::MissingFile, path.string());
    images.push_back(read_pgm(path));
  }
  return make_focal_stack(std::move(images), manifest.focal_lengths_mm,
                          manifest_path.stem().string());
}

std::filesystem::path write_stack(const FocalStack& stack, const std::filesystem::path& directory,
                                  const std::string& manifest_name) {
  std::filesystem::create_directories(directory);
  StackManifest manifest;
  manifest.focal_lengths_mm = stack.focal_lengths_mm;
  if (!stack.name.empty()) manifest.notes = stack.name;
  char name[32];
  for (int z = 0; z < stack.depth_count(); ++z) {
    std::snprintf(name, sizeof name, "slice_%03d.pgm", z);
    write_pgm(directory / name, stack.images[static_cast<std::size_t>(z)]);
    manifest.image_paths.emplace_back(name);
  }
  const auto manifest_path = directory / manifest_name;
  std::ofstream out(manifest_path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + manifest_path.string());
  out << format_manifest(manifest);
  return manifest_path;
}

std::vector<double> linear_focal_lengths(int count, double first_mm, double last_mm) {
  std::vector<double> out(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        count == 1 ? first_mm : first_mm + (last_mm - first_mm) * i / (count - 1);
  }
  return out;
}

}  // namespace focalgraph

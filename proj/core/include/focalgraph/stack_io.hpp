#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "focalgraph/image.hpp"

namespace focalgraph {

// An ordered focal stack. Construct through make_focal_stack() or load_stack(),
// both of which enforce the invariants: >= 3 images, identical dimensions, and
// strictly monotonic focal lengths (ascending or descending).
struct FocalStack {
  std::vector<Grayscale8> images;
  std::vector<double> focal_lengths_mm;
  int width = 0;
  int height = 0;
  std::string name;

  int depth_count() const noexcept { return static_cast<int>(images.size()); }
};

struct StackManifest {
  int version = 1;
  std::vector<std::filesystem::path> image_paths;
  std::vector<double> focal_lengths_mm;
  std::optional<std::string> notes;
};

inline constexpr int kMinStackDepth = 3;

// Validates and assembles a stack; throws Error on any invariant violation.
FocalStack make_focal_stack(std::vector<Grayscale8> images, std::vector<double> focal_lengths_mm,
                            std::string name = {});

// Manifest format:
//   focalstack v1
//   # optional notes (comment lines)
//   relative/path.pgm<TAB>focal_mm
StackManifest parse_manifest(const std::string& text);
std::string format_manifest(const StackManifest& manifest);

StackManifest read_manifest(const std::filesystem::path& manifest_path);
FocalStack load_stack(const std::filesystem::path& manifest_path);

// Writes slice_NNN.pgm files next to the manifest and returns the manifest path.
std::filesystem::path write_stack(const FocalStack& stack, const std::filesystem::path& directory,
                                  const std::string& manifest_name = "stack.txt");

// Equally spaced focal lengths from first to last, both inclusive.
std::vector<double> linear_focal_lengths(int count, double first_mm, double last_mm);

}  // namespace focalgraph

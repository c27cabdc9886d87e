#include "focalgraph/debug_dump.hpp"

#include <cstdio>
#include <sstream>

#include "focalgraph/error.hpp"

namespace focalgraph {

namespace {

std::string slice_name(int z, const char* what) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "slice_%03d_%s.pgm", z, what);
  return buf;
}

Grayscale8 binary_to_gray(const Grayscale8& mask) {
  Grayscale8 out(mask.width(), mask.height(), 0);
  for (std::size_t i = 0; i < mask.pixels().size(); ++i) out.pixels()[i] = mask.pixels()[i] ? 255 : 0;
  return out;
}

RealImage depth_as_real(const Image<int>& depth) {
  RealImage out(depth.width(), depth.height(), 0.0);
  for (std::size_t i = 0; i < depth.pixels().size(); ++i) out.pixels()[i] = depth.pixels()[i];
  return out;
}

// Dimmed maximum-magnitude background with maximal nodes at 255 and the others at 160.
Grayscale8 node_overlay(const MaxMaps& maps, const DepthGraph& graph) {
  Grayscale8 out = normalize_to_gray(maps.magnitude);
  for (auto& v : out.pixels()) v = static_cast<std::uint8_t>(v / 4);
  for (const Node& n : graph.nodes) {
    const std::uint8_t value = n.kind == NodeKind::Max ? 255 : 160;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (out.contains(n.x + dx, n.y + dy)) out(n.x + dx, n.y + dy) = value;
      }
    }
  }
  return out;
}

}  // namespace

std::string graph_svg(const DepthGraph& graph, int width, int height) {
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"black\"/>\n";
  svg << "<g stroke=\"#4af\" stroke-width=\"0.5\" fill=\"none\">\n";
  for (const Triangle& t : graph.triangles) {
    svg << "<polygon points=\"";
    for (int i = 0; i < 3; ++i) {
      const Node& n = graph.nodes[static_cast<std::size_t>(t[static_cast<std::size_t>(i)])];
      svg << (i ? " " : "") << n.x << ',' << n.y;
    }
    svg << "\"/>\n";
  }
  svg << "</g>\n<g stroke=\"#fc4\" stroke-width=\"0.5\">\n";
  for (const Node& n : graph.nodes) {
    svg << "<circle cx=\"" << n.x << "\" cy=\"" << n.y << "\" r=\"1.5\" fill=\""
        << (n.kind == NodeKind::Max ? "#fc4" : "none") << "\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> write_debug_dump(const FocalStack& stack, const PipelineResult& result,
                                                    const CannyParams& canny,
                                                    const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + directory.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto pgm = [&](const std::string& name, const Grayscale8& image) {
    written.push_back(directory / name);
    write_pgm(written.back(), image);
  };
  auto text = [&](const std::string& name, const std::string& body) {
    written.push_back(directory / name);
    std::FILE* f = std::fopen(written.back().string().c_str(), "wb");
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + written.back().string());
    const bool ok = std::fwrite(body.data(), 1, body.size(), f) == body.size();
    if (std::fclose(f) != 0 || !ok) throw Error(ErrorCode::IoError, "cannot write " + written.back().string());
  };

  for (std::size_t z = 0; z < stack.images.size(); ++z) {
    const FocusDebug dbg = compute_focus_debug(stack.images[z], canny);
    const int zi = static_cast<int>(z);
    pgm(slice_name(zi, "magnitude"), normalize_to_gray(dbg.magnitude));
    pgm(slice_name(zi, "edges"), binary_to_gray(dbg.edges));
    pgm(slice_name(zi, "filtered"), normalize_to_gray(dbg.filtered_magnitude));
  }
  pgm("max_magnitude.pgm", normalize_to_gray(result.max_maps.magnitude));
  pgm("max_depth.pgm", normalize_to_gray(depth_as_real(result.max_maps.depth)));
  pgm("nodes.pgm", node_overlay(result.max_maps, result.all_graph));
  text("graph_all.svg", graph_svg(result.all_graph, stack.width, stack.height));
  text("graph_refined.svg", graph_svg(result.refined.graph, stack.width, stack.height));

  const ViewImages view = normalize_for_view(result.map, result.map.step_for_view);
  pgm("depth_preview.pgm", view.gray);
  written.push_back(directory / "depth_color.ppm");
  write_ppm(written.back(), view.color);
  return written;
}

}  // namespace focalgraph

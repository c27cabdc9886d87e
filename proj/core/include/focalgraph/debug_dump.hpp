#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "focalgraph/pipeline.hpp"

namespace focalgraph {

// Wireframe of a graph as a standalone SVG in pixel coordinates. Maximal nodes
// are drawn filled, the rest hollow.
std::string graph_svg(const DepthGraph& graph, int width, int height);

// Per-slice magnitude/edge/filtered images, the maximum maps, a node overlay,
// wireframes of both graphs and the depth previews. Returns the files written.
std::vector<std::filesystem::path> write_debug_dump(const FocalStack& stack, const PipelineResult& result,
                                                    const CannyParams& canny,
                                                    const std::filesystem::path& directory);

}  // namespace focalgraph

#include "focalgraph/focuscontrol.hpp"

#include <charconv>
#include <cmath>

#include <json.hpp>

#include "focalgraph/error.hpp"

namespace focalgraph {

void validate(const LensConfig& lens) {
  if (!(lens.min_focal_mm < lens.max_focal_mm)) {
    throw Error(ErrorCode::InvalidArgument, "lens range must satisfy min < max");
  }
  if (!(lens.settle_time_ms >= 0.0)) throw Error(ErrorCode::InvalidArgument, "settle time must be >= 0");
}

std::optional<double> query_depth(const DepthMap& map, int x, int y) {
  if (!map.depth.contains(x, y)) {
    throw Error(ErrorCode::OutOfBounds, "pixel (" + std::to_string(x) + ", " + std::to_string(y) + ")");
  }
  if (!map.is_valid(x, y)) return std::nullopt;
  return map.depth(x, y);
}

FocusCommand depth_to_focal(double depth_index, const FocalStack& stack, const LensConfig& lens) {
  const int n = stack.depth_count();
  if (n < 1 || !(depth_index >= 0.0 && depth_index <= n - 1)) {
    throw Error(ErrorCode::IndexOutOfRange, "depth index " + std::to_string(depth_index));
  }
  const auto& f = stack.focal_lengths_mm;
  const auto lo = static_cast<std::size_t>(std::floor(depth_index));
  double focal = f[lo];
  if (lo + 1 < f.size()) {
    const double t = depth_index - static_cast<double>(lo);
    focal = t == 0.0 ? f[lo] : f[lo] + t * (f[lo + 1] - f[lo]);
  }
  focal = std::clamp(focal, lens.min_focal_mm, lens.max_focal_mm);
  return {focal, depth_index, true};
}

FocusController::FocusController(const FocalStack& stack, const DepthMap& map, LensConfig lens)
    : stack_(stack), map_(map), lens_(lens) {
  validate(lens_);
  if (map.width() != stack.width || map.height() != stack.height) {
    throw Error(ErrorCode::DimensionMismatch, "depth map does not match the stack");
  }
}

FocusReply FocusController::focus(int x, int y) {
  const std::optional<double> depth = query_depth(map_, x, y);
  std::lock_guard lock(mutex_);
  FocusReply reply;
  if (depth) {
    const double d = std::clamp(*depth, 0.0, static_cast<double>(stack_.depth_count() - 1));
    const FocusCommand cmd = depth_to_focal(d, stack_, lens_);
    last_valid_ = cmd;
    reply.valid = true;
    reply.depth_index = d;
    reply.focal_length_mm = cmd.focal_length_mm;
    reply.nearest_frame = static_cast<int>(std::lround(d));
  } else if (last_valid_) {
    reply.focal_length_mm = last_valid_->focal_length_mm;
  }
  return reply;
}

std::optional<FocusCommand> FocusController::last_valid() const {
  std::lock_guard lock(mutex_);
  return last_valid_;
}

std::string to_json(const FocusReply& r) {
  nlohmann::json j;
  j["valid"] = r.valid;
  j["depth_index"] = r.depth_index ? nlohmann::json(*r.depth_index) : nlohmann::json(nullptr);
  j["focal_length_mm"] = r.focal_length_mm ? nlohmann::json(*r.focal_length_mm) : nlohmann::json(nullptr);
  j["nearest_frame"] = r.nearest_frame ? nlohmann::json(*r.nearest_frame) : nlohmann::json(nullptr);
  return j.dump();
}

namespace {

std::string error_body(const std::string& message) { return nlohmann::json{{"error", message}}.dump(); }

std::optional<int> parse_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string to_string_bytes(const std::vector<std::uint8_t>& bytes) { return {bytes.begin(), bytes.end()}; }

}  // namespace

FocusService::FocusService(const FocalStack& stack, const DepthMap& map, LensConfig lens)
    : stack_(stack), map_(map), controller_(stack, map, lens),
      fdm_bytes_(to_string_bytes(encode_fdm(map))),
      preview_bytes_(to_string_bytes(encode_pgm(normalize_for_view(map, map.step_for_view).gray))) {}

HttpResponse FocusService::meta() const {
  nlohmann::json j{{"width", stack_.width},
                   {"height", stack_.height},
                   {"depth_count", stack_.depth_count()},
                   {"focal_lengths_mm", stack_.focal_lengths_mm},
                   {"view_step", map_.step_for_view}};
  return {200, "application/json", j.dump(), true};
}

HttpResponse FocusService::frame(const std::string& index) const {
  const auto z = parse_int(index);
  if (!z || *z < 0 || *z >= stack_.depth_count()) {
    return {404, "application/json", error_body("no frame '" + index + "'"), true};
  }
  return {200, "image/x-portable-graymap",
          to_string_bytes(encode_pgm(stack_.images[static_cast<std::size_t>(*z)])), true};
}

HttpResponse FocusService::focus(const std::vector<std::pair<std::string, std::string>>& query) {
  std::optional<int> x, y;
  for (const auto& [k, v] : query) {
    if (k == "x") x = parse_int(v);
    if (k == "y") y = parse_int(v);
  }
  if (!x || !y) return {422, "application/json", error_body("x and y must be integers"), false};
  if (!map_.depth.contains(*x, *y)) {
    return {422, "application/json", error_body("query point outside the image"), false};
  }
  return {200, "application/json", to_json(controller_.focus(*x, *y)), false};
}

HttpResponse FocusService::handle(const std::string& method, const std::string& path,
                                  const std::vector<std::pair<std::string, std::string>>& query) {
  if (method != "GET" && method != "HEAD") return {405, "application/json", error_body("method not allowed"), false};
  if (path == "/meta") return meta();
  if (path == "/focus") return focus(query);
  if (path == "/depthmap") return {200, "application/octet-stream", fdm_bytes_, true};
  if (path == "/preview") return {200, "image/x-portable-graymap", preview_bytes_, true};
  constexpr std::string_view kFrame = "/frame/";
  if (path.starts_with(kFrame)) return frame(path.substr(kFrame.size()));
  return {404, "application/json", error_body("unknown route " + path), true};
}

}  // namespace focalgraph

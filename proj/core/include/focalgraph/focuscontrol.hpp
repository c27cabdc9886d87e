#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "focalgraph/raster.hpp"
#include "focalgraph/stack_io.hpp"

namespace focalgraph {

struct LensConfig {
  double min_focal_mm = 50.0;
  double max_focal_mm = 120.0;
  double settle_time_ms = 2.5;
};

void validate(const LensConfig& lens);

struct FocusCommand {
  double focal_length_mm = 0.0;
  double source_depth_index = 0.0;
  bool valid = false;
};

// Depth at (x, y), or nullopt for an unmeasurable pixel. Throws Error(OutOfBounds).
std::optional<double> query_depth(const DepthMap& map, int x, int y);

// Piecewise-linear interpolation of the stack's focal lengths at a fractional
// index, clamped to the lens range. Throws Error(IndexOutOfRange).
FocusCommand depth_to_focal(double depth_index, const FocalStack& stack, const LensConfig& lens);

struct FocusReply {
  bool valid = false;
  std::optional<double> depth_index;      // present when valid
  std::optional<double> focal_length_mm;  // last valid command when invalid (if any)
  std::optional<int> nearest_frame;       // round(depth_index) when valid
};

// Stateful focus controller: an invalid query holds the last valid command.
class FocusController {
 public:
  FocusController(const FocalStack& stack, const DepthMap& map, LensConfig lens = {});

  FocusReply focus(int x, int y);
  std::optional<FocusCommand> last_valid() const;

  const FocalStack& stack() const noexcept { return stack_; }
  const DepthMap& map() const noexcept { return map_; }
  const LensConfig& lens() const noexcept { return lens_; }

 private:
  const FocalStack& stack_;
  const DepthMap& map_;
  LensConfig lens_;
  mutable std::mutex mutex_;
  std::optional<FocusCommand> last_valid_;
};

std::string to_json(const FocusReply& reply);

// Transport-independent HTTP handling so the routes can be tested without sockets.
struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  bool cacheable = true;
};

class FocusService {
 public:
  FocusService(const FocalStack& stack, const DepthMap& map, LensConfig lens = {});

  // path without query string; query as (key, value) pairs
  HttpResponse handle(const std::string& method, const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& query);

  FocusController& controller() noexcept { return controller_; }

 private:
  HttpResponse meta() const;
  HttpResponse frame(const std::string& index) const;
  HttpResponse focus(const std::vector<std::pair<std::string, std::string>>& query);

  const FocalStack& stack_;
  const DepthMap& map_;
  FocusController controller_;
  std::string fdm_bytes_;
  std::string preview_bytes_;
};

// Blocking HTTP server (GET /meta, /frame/{z}, /focus?x=&y=, /depthmap, /preview).
// Returns when stop_server() is called or the socket fails.
class HttpServer {
 public:
  explicit HttpServer(FocusService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 binds an ephemeral port; returns the bound port or -1.
  int bind(const std::string& host, int port);
  bool listen_after_bind();
  void stop();
  bool wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Parses "host:port" (port required). Throws Error(InvalidArgument).
std::pair<std::string, int> parse_bind_address(const std::string& address);

// Serves the routes above until the process is stopped. Throws Error(IoError)
// when the address cannot be bound.
void serve(const FocalStack& stack, const DepthMap& map, const LensConfig& lens,
           const std::string& bind_address);

}  // namespace focalgraph

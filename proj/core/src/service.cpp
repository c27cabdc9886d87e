#include <httplib.h>

#include <charconv>
#include <cstdio>

#include "focalgraph/error.hpp"
#include "focalgraph/focuscontrol.hpp"

namespace focalgraph {

struct HttpServer::Impl {
  explicit Impl(FocusService& s) : service(s) {}
  FocusService& service;
  httplib::Server server;
};

HttpServer::HttpServer(FocusService& service) : impl_(std::make_unique<Impl>(service)) {
  impl_->server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                     {"Access-Control-Allow-Methods", "GET, OPTIONS"}});
  impl_->server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  const auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    std::vector<std::pair<std::string, std::string>> query(req.params.begin(), req.params.end());
    const HttpResponse r = impl_->service.handle(req.method, req.path, query);
    res.status = r.status;
    res.set_header("Cache-Control", r.cacheable ? "public, max-age=3600" : "no-store");
    res.set_content(r.body, r.content_type);
  };
  // Other methods reach the service too, which answers 405.
  impl_->server.Get(".*", forward);
  impl_->server.Post(".*", forward);
  impl_->server.Put(".*", forward);
  impl_->server.Patch(".*", forward);
  impl_->server.Delete(".*", forward);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

bool HttpServer::wait_until_ready() const {
  impl_->server.wait_until_ready();
  return impl_->server.is_running();
}

std::pair<std::string, int> parse_bind_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(ErrorCode::InvalidArgument, "bind address must be host:port, got '" + address + "'");
  }
  int port = -1;
  const char* first = address.data() + colon + 1;
  const char* last = address.data() + address.size();
  const auto [ptr, ec] = std::from_chars(first, last, port);
  if (ec != std::errc{} || ptr != last || port < 0 || port > 65535) {
    throw Error(ErrorCode::InvalidArgument, "bad port in '" + address + "'");
  }
  return {address.substr(0, colon), port};
}

void serve(const FocalStack& stack, const DepthMap& map, const LensConfig& lens,
           const std::string& bind_address) {
  const auto [host, port] = parse_bind_address(bind_address);
  FocusService service(stack, map, lens);
  HttpServer server(service);
  const int bound = server.bind(host, port);
  if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + bind_address);
  std::fprintf(stderr, "serving on http://%s:%d\n", host.c_str(), bound);
  if (!server.listen_after_bind()) throw Error(ErrorCode::IoError, "listen failed on " + bind_address);
}

}  // namespace focalgraph

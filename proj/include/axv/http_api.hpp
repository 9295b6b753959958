#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "axv/service.hpp"

namespace httplib {
class Server;
}

namespace axv {

struct ListenAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

inline constexpr const char* kAddrEnv = "AXV_EXPLAIN_ADDR";

/// Parses "host:port" (or ":port", meaning all interfaces).
ListenAddress parse_listen_address(std::string_view text);

/// Flag wins over the environment; otherwise 127.0.0.1:8080.
ListenAddress resolve_listen_address(const std::optional<std::string>& flag);

struct HttpOptions {
  /// Directory of built UI assets served at "/". A placeholder page is
  /// served when unset or missing.
  std::optional<std::filesystem::path> static_dir;
};

/// JSON-over-HTTP front end for an ExplainService.
class HttpApi {
 public:
  HttpApi(ExplainService& service, HttpOptions options = {});
  ~HttpApi();
  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen_after_bind();
  void stop();

 private:
  void install_routes();

  ExplainService& service_;
  HttpOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::atomic<bool> stopping_{false};
};

}  // namespace axv

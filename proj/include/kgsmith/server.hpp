#pragma once

// REST facade over Platform (cpp-httplib, thread-pooled).

#include <memory>
#include <string>
#include <vector>

#include "kgsmith/platform.hpp"

namespace kgsmith {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080; // 0 picks a free port
  std::vector<std::string> cors_origins;
};

class Server {
public:
  Server(Platform& platform, ServerConfig config);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds the socket; returns the bound port. Throws IoFailure.
  int bind();
  // Blocks serving requests until stop().
  void serve();
  void stop();
  void wait_until_ready() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace kgsmith

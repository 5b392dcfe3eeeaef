#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <mutex>
#include <thread>
#include <vector>

#include "prgf/synthetic.hpp"
#include "prgf/types.hpp"

namespace prgf {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0: let the OS pick
};

/// "host:port". A bare port number binds 127.0.0.1.
Endpoint parse_endpoint(const std::string& text);

/// Embeddable TCP server exposing a synthetic model over the newline-delimited
/// JSON wire protocol. Each connection gets a fresh ledger with the configured
/// budget; requests within a connection are answered strictly in order.
/// Connections are handled concurrently.
class OracleServer {
 public:
  OracleServer(const SyntheticModelSpec& spec, const Endpoint& endpoint,
               std::optional<std::uint64_t> budget_per_connection);
  ~OracleServer();

  OracleServer(const OracleServer&) = delete;
  OracleServer& operator=(const OracleServer&) = delete;

  /// Port actually bound (resolves an ephemeral request).
  std::uint16_t port() const { return port_; }
  std::string host() const { return host_; }

  void stop();

 private:
  void accept_loop();
  void handle_connection(int fd);

  std::shared_ptr<const SyntheticModel> model_;
  std::optional<std::uint64_t> budget_;
  std::string host_;
  std::uint16_t port_ = 0;
  int listen_fd_ = -1;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::vector<std::thread> workers_;
  std::vector<int> open_connections_;  // shut down on stop so workers unblock
  std::mutex workers_mutex_;
};

/// Spec-level entry point: build the model from `spec` and serve it.
std::unique_ptr<OracleServer> serve(const SyntheticModelSpec& spec, const Endpoint& endpoint,
                                    std::uint64_t budget_per_connection);

}  // namespace prgf

#include "prgf/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>

#include "prgf/oracle.hpp"
#include "prgf/wire.hpp"

namespace prgf {

namespace {

void close_fd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

bool send_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n <= 0) return false;
    off += static_cast<std::size_t>(n);
  }
  return true;
}

/// Buffered line reader over a socket. Returns false on EOF / error.
class LineReader {
 public:
  explicit LineReader(int fd) : fd_(fd) {}

  bool next(std::string& line) {
    for (;;) {
      const auto pos = buffer_.find('\n');
      if (pos != std::string::npos) {
        line.assign(buffer_, 0, pos);
        buffer_.erase(0, pos + 1);
        return true;
      }
      char chunk[4096];
      const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
      if (n <= 0) return false;
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buffer_;
};

}  // namespace

Endpoint parse_endpoint(const std::string& text) {
  Endpoint ep;
  const auto colon = text.rfind(':');
  std::string port_str;
  if (colon == std::string::npos) {
    port_str = text;
  } else {
    if (colon > 0) ep.host = text.substr(0, colon);
    port_str = text.substr(colon + 1);
  }
  try {
    const unsigned long port = std::stoul(port_str);
    if (port > 65535) throw ConfigError("endpoint: port out of range: " + text);
    ep.port = static_cast<std::uint16_t>(port);
  } catch (const std::logic_error&) {
    throw ConfigError("endpoint: cannot parse '" + text + "' (expected host:port)");
  }
  return ep;
}

OracleServer::OracleServer(const SyntheticModelSpec& spec, const Endpoint& endpoint,
                           std::optional<std::uint64_t> budget_per_connection)
    : model_(std::make_shared<SyntheticModel>(spec)),
      budget_(budget_per_connection),
      host_(endpoint.host) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw TransportError("server: socket() failed");

  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(endpoint.port);
  if (::inet_pton(AF_INET, endpoint.host.c_str(), &addr.sin_addr) != 1) {
    close_fd(listen_fd_);
    throw TransportError("server: cannot parse bind address " + endpoint.host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    const std::string err = std::strerror(errno);
    close_fd(listen_fd_);
    throw TransportError("server: bind failed on " + endpoint.host + ":" +
                         std::to_string(endpoint.port) + ": " + err);
  }
  if (::listen(listen_fd_, 16) != 0) {
    close_fd(listen_fd_);
    throw TransportError("server: listen failed");
  }

  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);

  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
}

OracleServer::~OracleServer() { stop(); }

void OracleServer::stop() {
  if (!running_.exchange(false)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  if (accept_thread_.joinable()) accept_thread_.join();
  close_fd(listen_fd_);
  std::vector<std::thread> workers;
  {
    std::lock_guard<std::mutex> lock(workers_mutex_);
    // Unblock workers sitting in recv on live connections.
    for (int fd : open_connections_) ::shutdown(fd, SHUT_RDWR);
    workers.swap(workers_);
  }
  for (auto& w : workers)
    if (w.joinable()) w.join();
}

void OracleServer::accept_loop() {
  while (running_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, 100);
    if (rc <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    std::lock_guard<std::mutex> lock(workers_mutex_);
    workers_.emplace_back([this, fd] { handle_connection(fd); });
  }
}

void OracleServer::handle_connection(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  {
    std::lock_guard<std::mutex> lock(workers_mutex_);
    open_connections_.push_back(fd);
  }

  QueryLedger ledger(budget_);
  LineReader reader(fd);
  std::string line;
  while (running_ && reader.next(line)) {
    if (line.empty()) continue;
    WireResponse resp;
    const DecodedRequest req = decode_request(line);
    resp.id = req.id;
    if (req.error) {
      resp.error = *req.error;
    } else if (req.x.size() != model_->dim()) {
      resp.error = "dim_mismatch";
    } else {
      try {
        ledger.charge();
        resp.loss = model_->loss(req.x, req.label);
        resp.queries_used = ledger.used();
      } catch (const BudgetExhaustedError&) {
        resp.error = "budget_exhausted";
      }
    }
    if (!send_all(fd, encode_response(resp) + "\n")) break;
  }
  {
    std::lock_guard<std::mutex> lock(workers_mutex_);
    std::erase(open_connections_, fd);
  }
  ::close(fd);
}

std::unique_ptr<OracleServer> serve(const SyntheticModelSpec& spec, const Endpoint& endpoint,
                                    std::uint64_t budget_per_connection) {
  return std::make_unique<OracleServer>(spec, endpoint, budget_per_connection);
}

}  // namespace prgf

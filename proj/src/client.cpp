#include "prgf/client.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "prgf/wire.hpp"

namespace prgf {

RemoteOracle::RemoteOracle(const Endpoint& endpoint, Eigen::Index dim) : dim_(dim) {
  if (dim < 1) throw ConfigError("remote oracle: dim must be >= 1");
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw TransportError("client: socket() failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(endpoint.port);
  if (::inet_pton(AF_INET, endpoint.host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw TransportError("client: cannot parse address " + endpoint.host);
  }
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    const std::string err = std::strerror(errno);
    ::close(fd_);
    throw TransportError("client: connect to " + endpoint.host + ":" +
                         std::to_string(endpoint.port) + " failed: " + err);
  }
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

RemoteOracle::~RemoteOracle() {
  if (fd_ >= 0) ::close(fd_);
}

double RemoteOracle::query(const RealVec& x, std::int64_t label) {
  WireRequest req;
  req.id = next_id_++;
  req.x = x;
  req.label = label;
  const std::string line = encode_request(req) + "\n";

  std::size_t off = 0;
  while (off < line.size()) {
    const ssize_t n = ::send(fd_, line.data() + off, line.size() - off, MSG_NOSIGNAL);
    if (n <= 0) throw TransportError("client: connection lost while sending");
    off += static_cast<std::size_t>(n);
  }

  std::string resp_line;
  for (;;) {
    const auto pos = recv_buffer_.find('\n');
    if (pos != std::string::npos) {
      resp_line.assign(recv_buffer_, 0, pos);
      recv_buffer_.erase(0, pos + 1);
      break;
    }
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (n <= 0) throw TransportError("client: connection lost while waiting for response");
    recv_buffer_.append(chunk, static_cast<std::size_t>(n));
  }

  const WireResponse resp = decode_response(resp_line);
  if (resp.id != req.id)
    throw TransportError("client: response id mismatch (got " + std::to_string(resp.id) + ")");
  if (resp.error) {
    if (*resp.error == "budget_exhausted") throw BudgetExhaustedError(ledger_.used());
    throw TransportError("client: server rejected request: " + *resp.error);
  }
  ledger_.charge();
  server_used_ = resp.queries_used.value();
  return resp.loss.value();
}

std::unique_ptr<RemoteOracle> connect(const Endpoint& endpoint, Eigen::Index dim) {
  return std::make_unique<RemoteOracle>(endpoint, dim);
}

}  // namespace prgf

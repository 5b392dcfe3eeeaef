#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "prgf/oracle.hpp"
#include "prgf/server.hpp"

namespace prgf {

/// Loss oracle backed by a remote server; every query() is one wire round
/// trip. There is no true-gradient backdoor on a remote oracle.
///
/// The wire protocol carries no model metadata, so the caller supplies the
/// input dimension (it knows the model spec anyway, e.g. to build priors).
class RemoteOracle final : public LossOracle {
 public:
  RemoteOracle(const Endpoint& endpoint, Eigen::Index dim);
  ~RemoteOracle() override;

  RemoteOracle(const RemoteOracle&) = delete;
  RemoteOracle& operator=(const RemoteOracle&) = delete;

  Eigen::Index dim() const override { return dim_; }
  QueryLedger& ledger() override { return ledger_; }
  double query(const RealVec& x, std::int64_t label) override;

  /// queries_used reported by the server on the last successful response.
  std::uint64_t server_reported_used() const { return server_used_; }

 private:
  Eigen::Index dim_;
  QueryLedger ledger_;  // client-side mirror, unbounded; the server enforces the budget
  int fd_ = -1;
  std::uint64_t next_id_ = 1;
  std::uint64_t server_used_ = 0;
  std::string recv_buffer_;
};

std::unique_ptr<RemoteOracle> connect(const Endpoint& endpoint, Eigen::Index dim);

}  // namespace prgf

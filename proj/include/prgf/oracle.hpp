#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "prgf/types.hpp"

namespace prgf {

/// Raised when a query would exceed the ledger budget. Carries the number of
/// queries already spent at the point of the attempt.
class BudgetExhaustedError : public std::runtime_error {
 public:
  explicit BudgetExhaustedError(std::uint64_t used_)
      : std::runtime_error("query budget exhausted after " + std::to_string(used_) + " queries"),
        used(used_) {}
  std::uint64_t used;
};

/// Connection-level failure talking to a remote oracle; distinct from budget
/// exhaustion so an attack loop can tell the two apart.
class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Query accounting. `used` is monotonically non-decreasing and never exceeds
/// the budget; a query that would exceed it throws before any work happens.
/// Updates are atomic so an oracle may be shared across threads.
class QueryLedger {
 public:
  explicit QueryLedger(std::optional<std::uint64_t> budget = std::nullopt) : budget_(budget) {
    if (budget_ && *budget_ == 0) throw ConfigError("ledger: budget must be positive");
  }

  std::uint64_t used() const { return used_.load(std::memory_order_relaxed); }
  std::optional<std::uint64_t> budget() const { return budget_; }

  /// Charge one query or throw BudgetExhaustedError.
  void charge() {
    for (;;) {
      std::uint64_t cur = used_.load(std::memory_order_relaxed);
      if (budget_ && cur >= *budget_) throw BudgetExhaustedError(cur);
      if (used_.compare_exchange_weak(cur, cur + 1, std::memory_order_relaxed)) return;
    }
  }

 private:
  std::atomic<std::uint64_t> used_{0};
  std::optional<std::uint64_t> budget_;
};

/// Black-box loss contract f(x, y). Every call to query() charges the ledger
/// by exactly one. Implementations must return finite losses for finite x.
class LossOracle {
 public:
  virtual ~LossOracle() = default;

  virtual Eigen::Index dim() const = 0;
  virtual double query(const RealVec& x, std::int64_t label) = 0;
  virtual QueryLedger& ledger() = 0;
  const QueryLedger& ledger() const { return const_cast<LossOracle*>(this)->ledger(); }

  /// Predicted label, for oracles shaped like classifiers. Costs one ledger
  /// query. Returns nullopt when the oracle has no notion of classification.
  virtual std::optional<std::int64_t> classify(const RealVec& /*x*/) { return std::nullopt; }
};

}  // namespace prgf

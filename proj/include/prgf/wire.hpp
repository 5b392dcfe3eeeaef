#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "prgf/types.hpp"

namespace prgf {

/// Newline-delimited JSON wire protocol, one object per line, UTF-8:
///
///   request:  {"id": u64, "op": "loss", "x": [f64...], "label": i64}
///   response: {"id": u64, "loss": f64, "queries_used": u64}
///           | {"id": u64, "error": "budget_exhausted" | "malformed" | "dim_mismatch"}
///
/// Doubles are serialized as shortest round-trip decimals, so losses survive a
/// round trip bit-exactly.

struct WireRequest {
  std::uint64_t id = 0;
  RealVec x;
  std::int64_t label = 0;
};

struct WireResponse {
  std::uint64_t id = 0;
  std::optional<double> loss;
  std::optional<std::uint64_t> queries_used;
  std::optional<std::string> error;  // "budget_exhausted" | "malformed" | "dim_mismatch"

  bool ok() const { return loss.has_value(); }
};

/// Decoded request line. When `error` is set the line was rejected and `id`
/// holds the request id when one could be recovered (0 otherwise).
struct DecodedRequest {
  std::uint64_t id = 0;
  RealVec x;
  std::int64_t label = 0;
  std::optional<std::string> error;
};

std::string encode_request(const WireRequest& req);
std::string encode_response(const WireResponse& resp);

DecodedRequest decode_request(const std::string& line);
WireResponse decode_response(const std::string& line);  // throws TransportError on garbage

}  // namespace prgf

#include "prgf/wire.hpp"

#include <cmath>

#include <json.hpp>

#include "prgf/oracle.hpp"

namespace prgf {

using nlohmann::json;

std::string encode_request(const WireRequest& req) {
  json j;
  j["id"] = req.id;
  j["op"] = "loss";
  json xs = json::array();
  for (Eigen::Index i = 0; i < req.x.size(); ++i) xs.push_back(req.x[i]);
  j["x"] = std::move(xs);
  j["label"] = req.label;
  return j.dump();
}

std::string encode_response(const WireResponse& resp) {
  json j;
  j["id"] = resp.id;
  if (resp.error) {
    j["error"] = *resp.error;
  } else {
    j["loss"] = resp.loss.value();
    j["queries_used"] = resp.queries_used.value();
  }
  return j.dump();
}

DecodedRequest decode_request(const std::string& line) {
  DecodedRequest out;
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    out.error = "malformed";
    return out;
  }
  if (j.contains("id") && j["id"].is_number_unsigned()) out.id = j["id"].get<std::uint64_t>();
  if (!j.contains("op") || j["op"] != "loss" || !j.contains("x") || !j["x"].is_array() ||
      !j.contains("label") || !j["label"].is_number_integer()) {
    out.error = "malformed";
    return out;
  }
  const auto& xs = j["x"];
  out.x.resize(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const auto& v : xs) {
    if (!v.is_number()) {
      out.error = "malformed";
      return out;
    }
    out.x[i++] = v.get<double>();
  }
  if (!out.x.allFinite()) {
    out.error = "malformed";
    return out;
  }
  out.label = j["label"].get<std::int64_t>();
  return out;
}

WireResponse decode_response(const std::string& line) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object() || !j.contains("id"))
    throw TransportError("unparseable response line: " + line);
  WireResponse resp;
  resp.id = j["id"].get<std::uint64_t>();
  if (j.contains("error")) {
    resp.error = j["error"].get<std::string>();
  } else if (j.contains("loss") && j.contains("queries_used")) {
    resp.loss = j["loss"].get<double>();
    resp.queries_used = j["queries_used"].get<std::uint64_t>();
  } else {
    throw TransportError("response line missing fields: " + line);
  }
  return resp;
}

}  // namespace prgf

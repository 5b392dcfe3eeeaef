#include <doctest.h>

#include <cmath>

#include "prgf/client.hpp"
#include "prgf/rng.hpp"
#include "prgf/server.hpp"
#include "prgf/synthetic.hpp"
#include "prgf/wire.hpp"

using namespace prgf;

namespace {

SyntheticModelSpec linear2() {
  SyntheticModelSpec spec;
  spec.kind = ModelKind::Linear;
  spec.dim = 2;
  spec.seed = 5;
  return spec;
}

}  // namespace

TEST_CASE("doubles survive the wire bit-exactly") {
  RngStream rng(3, 0);
  WireRequest req;
  req.id = 42;
  req.label = -3;
  req.x = RealVec(6);
  req.x << 0.1, -1.0 / 3.0, 1e-300, 12345678.912345678, std::exp(1.0), rng.next_normal();
  const DecodedRequest round = decode_request(encode_request(req));
  REQUIRE_FALSE(round.error.has_value());
  CHECK(round.id == 42);
  CHECK(round.label == -3);
  REQUIRE(round.x.size() == 6);
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(round.x[i] == req.x[i]);

  WireResponse resp;
  resp.id = 42;
  resp.loss = -0.12345678901234567;
  resp.queries_used = 7;
  const WireResponse back = decode_response(encode_response(resp));
  CHECK(back.loss.value() == resp.loss.value());
}

TEST_CASE("malformed lines decode to errors with recovered ids") {
  CHECK(decode_request("not json").error.value() == "malformed");
  CHECK(decode_request(R"({"id": 9, "op": "nope", "x": [], "label": 0})").error.value() ==
        "malformed");
  CHECK(decode_request(R"({"id": 9, "op": "nope", "x": [], "label": 0})").id == 9);
  CHECK(decode_request(R"({"id": 1, "op": "loss", "x": [1, "two"], "label": 0})").error.value() ==
        "malformed");
  CHECK_THROWS_AS(decode_response("garbage"), TransportError);
}

TEST_CASE("server answers the documented example") {
  OracleServer server(linear2(), Endpoint{"127.0.0.1", 0}, 10);
  RemoteOracle client(Endpoint{"127.0.0.1", server.port()}, 2);
  const double loss = client.query(RealVec::Zero(2), 0);
  CHECK(loss == 0.0);
  CHECK(client.server_reported_used() == 1);
}

TEST_CASE("remote and local oracles agree bit-exactly, including query counts") {
  OracleServer server(linear2(), Endpoint{"127.0.0.1", 0}, 2000);
  RemoteOracle remote(Endpoint{"127.0.0.1", server.port()}, 2);
  SyntheticOracle local(linear2());

  RngStream rng(9, 0);
  for (int i = 0; i < 1000; ++i) {
    RealVec x(2);
    x << 10.0 * rng.next_normal(), rng.next_normal();
    CHECK(remote.query(x, 0) == local.query(x, 0));
  }
  CHECK(remote.ledger().used() == local.ledger().used());
  CHECK(remote.server_reported_used() == local.ledger().used());
}

TEST_CASE("per-connection budgets are enforced exactly") {
  OracleServer server(linear2(), Endpoint{"127.0.0.1", 0}, 3);
  RemoteOracle a(Endpoint{"127.0.0.1", server.port()}, 2);
  const RealVec x = RealVec::Ones(2);
  for (int i = 0; i < 3; ++i) a.query(x, 0);
  CHECK_THROWS_AS(a.query(x, 0), BudgetExhaustedError);
  CHECK(a.ledger().used() == 3);

  // A fresh connection has a fresh budget.
  RemoteOracle b(Endpoint{"127.0.0.1", server.port()}, 2);
  for (int i = 0; i < 3; ++i) b.query(x, 0);
  CHECK(b.ledger().used() == 3);
}

TEST_CASE("dimension mismatches are protocol errors, not budget errors") {
  OracleServer server(linear2(), Endpoint{"127.0.0.1", 0}, 10);
  RemoteOracle client(Endpoint{"127.0.0.1", server.port()}, 5);
  CHECK_THROWS_AS(client.query(RealVec::Zero(5), 0), TransportError);
}

TEST_CASE("losing the connection raises a transport error") {
  auto server = std::make_unique<OracleServer>(linear2(), Endpoint{"127.0.0.1", 0}, 10);
  RemoteOracle client(Endpoint{"127.0.0.1", server->port()}, 2);
  client.query(RealVec::Zero(2), 0);
  server->stop();
  server.reset();
  CHECK_THROWS_AS(
      [&] {
        for (int i = 0; i < 100; ++i) client.query(RealVec::Zero(2), 0);
      }(),
      TransportError);
}

#include <doctest.h>

#include <json.hpp>

#include "prgf/config.hpp"

using namespace prgf;
using nlohmann::json;

namespace {

json minimal_config() {
  return json::parse(R"({
    "model": {"kind": "softplus", "dim": 64, "seed": 7, "classes": 5},
    "estimator": {"method": "prgf", "q": 20},
    "prior": {"target_cosine": 0.4, "mode": "rederive"},
    "attack": {"norm": "l2", "eta": 0.1, "max_queries": 2000,
               "success": {"kind": "loss_threshold", "loss_threshold": 2.5}},
    "seeds": [1, 2, 3],
    "label": 0
  })");
}

}  // namespace

TEST_CASE("a valid config loads with resolved defaults") {
  const RunConfig cfg = RunConfig::from_json(minimal_config());
  CHECK(cfg.model.dim == 64);
  CHECK(cfg.estimator.q == 20);
  CHECK(cfg.seeds.size() == 3);
  CHECK(cfg.oracle == "local");
  // sigma and epsilon resolve against the model dimension
  CHECK(cfg.estimator.resolved_sigma(64) == doctest::Approx(1e-4 * 8.0));
  CHECK(cfg.attack.resolved_epsilon(64) == doctest::Approx(std::sqrt(0.064)));
}

TEST_CASE("unknown keys are rejected at every level") {
  json top = minimal_config();
  top["surprise"] = 1;
  CHECK_THROWS_AS(RunConfig::from_json(top), ConfigError);

  json est = minimal_config();
  est["estimator"]["qq"] = 3;
  CHECK_THROWS_AS(RunConfig::from_json(est), ConfigError);

  json attack = minimal_config();
  attack["attack"]["success"]["threshold"] = 1.0;
  CHECK_THROWS_AS(RunConfig::from_json(attack), ConfigError);
}

TEST_CASE("invalid values fail validation before anything runs") {
  json bad_q = minimal_config();
  bad_q["estimator"]["q"] = 0;
  CHECK_THROWS_AS(RunConfig::from_json(bad_q), ConfigError);

  json bad_oracle = minimal_config();
  bad_oracle["oracle"] = "carrier-pigeon://";
  CHECK_THROWS_AS(RunConfig::from_json(bad_oracle), ConfigError);

  json bad_cosine = minimal_config();
  bad_cosine["prior"]["target_cosine"] = 1.5;
  CHECK_THROWS_AS(RunConfig::from_json(bad_cosine), ConfigError);

  json bad_subspace = minimal_config();
  bad_subspace["prior"]["subspace"] = {{"d", 7}};  // 7 does not divide 64
  CHECK_THROWS_AS(RunConfig::from_json(bad_subspace), ConfigError);

  json needs_subspace = minimal_config();
  needs_subspace["estimator"]["method"] = "prgf_d";
  CHECK_THROWS_AS(RunConfig::from_json(needs_subspace), ConfigError);
}

TEST_CASE("remote oracle strings parse into endpoints") {
  json j = minimal_config();
  j["oracle"] = "remote://127.0.0.1:9001";
  const RunConfig cfg = RunConfig::from_json(j);
  const auto ep = cfg.remote_endpoint();
  REQUIRE(ep.has_value());
  CHECK(ep->host == "127.0.0.1");
  CHECK(ep->port == 9001);
  CHECK_FALSE(RunConfig::from_json(minimal_config()).remote_endpoint().has_value());
}

TEST_CASE("config round-trips through its resolved JSON form") {
  json j = minimal_config();
  j["prior"]["subspace"] = {{"d", 16}, {"mode", "block"}};
  j["bench_methods"] = json::array({json{{"label", "rgf"}, {"method", "rgf"}},
                                    json{{"label", "fix"}, {"method", "prgf"},
                                         {"lambda_override", 0.5}}});
  const RunConfig cfg = RunConfig::from_json(j);
  const json resolved = cfg.to_json();
  const RunConfig again = RunConfig::from_json(resolved);
  CHECK(again.to_json().dump() == resolved.dump());
  CHECK(again.bench_methods.size() == 2);
  CHECK(again.bench_methods[1].est.lambda_override.value() == doctest::Approx(0.5));
}

TEST_CASE("bench config defaults to the single configured method") {
  const RunConfig cfg = RunConfig::from_json(minimal_config());
  const BenchConfig bench = cfg.to_bench_config();
  REQUIRE(bench.methods.size() == 1);
  CHECK(bench.methods[0].label == "prgf");
}

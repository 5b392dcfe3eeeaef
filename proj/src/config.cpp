#include "prgf/config.hpp"

#include <fstream>
#include <set>

namespace prgf {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::string& where,
                         const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError("config: " + where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
}

template <typename T>
void read_to(const json& j, const std::string& key, T& out) {
  if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

void read_optional_double(const json& j, const std::string& key, std::optional<double>& out) {
  if (j.contains(key) && !j[key].is_null()) out = j[key].get<double>();
}

SyntheticModelSpec parse_model(const json& j) {
  reject_unknown_keys(j, "model",
                      {"kind", "dim", "seed", "scale", "classes", "smooth_dim", "rough_scale",
                       "convex"});
  SyntheticModelSpec spec;
  if (!j.contains("kind") || !j.contains("dim"))
    throw ConfigError("config: model requires 'kind' and 'dim'");
  spec.kind = parse_model_kind(j["kind"].get<std::string>());
  spec.dim = j["dim"].get<Eigen::Index>();
  read_to(j, "seed", spec.seed);
  read_to(j, "scale", spec.scale);
  read_to(j, "classes", spec.classes);
  read_to(j, "smooth_dim", spec.smooth_dim);
  read_to(j, "rough_scale", spec.rough_scale);
  read_to(j, "convex", spec.convex);
  return spec;
}

EstimatorConfig parse_estimator(const json& j, const EstimatorConfig& base) {
  reject_unknown_keys(j, "estimator",
                      {"method", "q", "sigma", "norm_probes", "norm_refresh", "lambda_override",
                       "mu_override", "threshold_c"});
  EstimatorConfig cfg = base;
  if (j.contains("method")) cfg.method = parse_method(j["method"].get<std::string>());
  read_to(j, "q", cfg.q);
  read_to(j, "sigma", cfg.sigma);
  read_to(j, "norm_probes", cfg.norm_probes);
  read_to(j, "norm_refresh", cfg.norm_refresh);
  read_optional_double(j, "lambda_override", cfg.lambda_override);
  read_optional_double(j, "mu_override", cfg.mu_override);
  read_to(j, "threshold_c", cfg.threshold_c);
  return cfg;
}

SubspaceConfig parse_subspace(const json& j) {
  reject_unknown_keys(j, "prior.subspace", {"d", "mode", "channels"});
  SubspaceConfig cfg;
  if (!j.contains("d")) throw ConfigError("config: subspace requires 'd'");
  cfg.d = j["d"].get<Eigen::Index>();
  if (j.contains("mode")) {
    const auto mode = j["mode"].get<std::string>();
    if (mode == "block")
      cfg.mode = SubspaceMode::BlockReplication;
    else if (mode == "image")
      cfg.mode = SubspaceMode::ImageNearestNeighbor;
    else
      throw ConfigError("config: unknown subspace mode '" + mode + "'");
  }
  read_to(j, "channels", cfg.channels);
  return cfg;
}

AttackConfig parse_attack(const json& j) {
  reject_unknown_keys(j, "attack",
                      {"norm", "epsilon", "eta", "max_queries", "success", "box"});
  AttackConfig cfg;
  if (j.contains("norm")) cfg.norm = parse_norm_kind(j["norm"].get<std::string>());
  read_to(j, "epsilon", cfg.epsilon);
  read_to(j, "eta", cfg.eta);
  read_to(j, "max_queries", cfg.max_queries);
  if (j.contains("success")) {
    const json& s = j["success"];
    reject_unknown_keys(s, "attack.success", {"kind", "loss_threshold"});
    if (s.contains("kind")) {
      const auto kind = s["kind"].get<std::string>();
      if (kind == "loss_threshold")
        cfg.success.kind = SuccessRule::Kind::LossThreshold;
      else if (kind == "misclassify")
        cfg.success.kind = SuccessRule::Kind::Misclassify;
      else
        throw ConfigError("config: unknown success kind '" + kind + "'");
    }
    read_to(s, "loss_threshold", cfg.success.loss_threshold);
  }
  if (j.contains("box") && !j["box"].is_null()) {
    const json& b = j["box"];
    if (!b.is_array() || b.size() != 2)
      throw ConfigError("config: box must be [lo, hi]");
    cfg.box = std::make_pair(b[0].get<double>(), b[1].get<double>());
  }
  return cfg;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  reject_unknown_keys(j, "config",
                      {"model", "oracle", "estimator", "prior", "attack", "seeds", "label", "x0",
                       "output", "bench_methods"});
  RunConfig cfg;
  if (!j.contains("model")) throw ConfigError("config: 'model' is required");
  cfg.model = parse_model(j["model"]);
  read_to(j, "oracle", cfg.oracle);
  if (j.contains("estimator")) cfg.estimator = parse_estimator(j["estimator"], EstimatorConfig{});
  if (j.contains("prior")) {
    const json& p = j["prior"];
    reject_unknown_keys(p, "prior", {"target_cosine", "mode", "subspace"});
    read_to(p, "target_cosine", cfg.prior_cosine);
    if (p.contains("mode")) {
      const auto mode = p["mode"].get<std::string>();
      if (mode == "rederive")
        cfg.prior_mode = PriorSource::Mode::Rederive;
      else if (mode == "frozen")
        cfg.prior_mode = PriorSource::Mode::Frozen;
      else
        throw ConfigError("config: unknown prior mode '" + mode + "'");
    }
    if (p.contains("subspace") && !p["subspace"].is_null())
      cfg.subspace = parse_subspace(p["subspace"]);
  }
  if (j.contains("attack")) cfg.attack = parse_attack(j["attack"]);
  read_to(j, "seeds", cfg.seeds);
  read_to(j, "label", cfg.label);
  if (j.contains("x0") && !j["x0"].is_null()) {
    const json& x = j["x0"];
    if (x.is_string()) {
      if (x.get<std::string>() != "origin")
        throw ConfigError("config: x0 must be \"origin\" or an array");
    } else if (x.is_array()) {
      RealVec v(static_cast<Eigen::Index>(x.size()));
      Eigen::Index i = 0;
      for (const auto& e : x) v[i++] = e.get<double>();
      cfg.x0 = std::move(v);
    } else {
      throw ConfigError("config: x0 must be \"origin\" or an array");
    }
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    reject_unknown_keys(o, "output", {"traces", "summary", "curve"});
    read_to(o, "traces", cfg.traces_path);
    read_to(o, "summary", cfg.summary_path);
    read_to(o, "curve", cfg.curve_path);
  }
  if (j.contains("bench_methods")) {
    for (const json& m : j["bench_methods"]) {
      reject_unknown_keys(m, "bench_methods[]",
                          {"label", "method", "q", "sigma", "norm_probes", "norm_refresh",
                           "lambda_override", "mu_override", "threshold_c"});
      BenchMethodSpec spec;
      if (!m.contains("label")) throw ConfigError("config: bench method requires 'label'");
      spec.label = m["label"].get<std::string>();
      json est = m;
      est.erase("label");
      spec.est = parse_estimator(est, cfg.estimator);
      cfg.bench_methods.push_back(std::move(spec));
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ConfigError("config: " + path + " is not valid JSON");
  return from_json(j);
}

void RunConfig::validate() const {
  model.validate();
  estimator.validate();
  attack.validate();
  if (prior_cosine < 0.0 || prior_cosine > 1.0)
    throw ConfigError("config: prior target_cosine must lie in [0, 1]");
  if (oracle != "local" && oracle.rfind("remote://", 0) != 0)
    throw ConfigError("config: oracle must be \"local\" or \"remote://host:port\"");
  if (x0 && x0->size() != model.dim) throw ConfigError("config: x0 dimension mismatch");
  if (subspace) build_subspace(*subspace, model.dim);  // divisibility checks
  if (method_uses_subspace(estimator.method) && !subspace)
    throw ConfigError("config: method needs prior.subspace");
  for (const auto& m : bench_methods)
    if (method_uses_subspace(m.est.method) && !subspace)
      throw ConfigError("config: bench method '" + m.label + "' needs prior.subspace");
}

std::optional<Endpoint> RunConfig::remote_endpoint() const {
  if (oracle == "local") return std::nullopt;
  return parse_endpoint(oracle.substr(std::string("remote://").size()));
}

json RunConfig::to_json() const {
  json j;
  j["model"] = {{"kind", model_kind_name(model.kind)}, {"dim", model.dim},
                {"seed", model.seed},                  {"scale", model.scale},
                {"classes", model.classes},            {"smooth_dim", model.smooth_dim},
                {"rough_scale", model.rough_scale},    {"convex", model.convex}};
  j["oracle"] = oracle;
  json est;
  est["method"] = method_name(estimator.method);
  est["q"] = estimator.q;
  est["sigma"] = estimator.resolved_sigma(model.dim);
  est["norm_probes"] = estimator.norm_probes;
  est["norm_refresh"] = estimator.norm_refresh;
  est["lambda_override"] =
      estimator.lambda_override ? json(*estimator.lambda_override) : json(nullptr);
  est["mu_override"] = estimator.mu_override ? json(*estimator.mu_override) : json(nullptr);
  est["threshold_c"] = estimator.threshold_c;
  j["estimator"] = std::move(est);
  json prior;
  prior["target_cosine"] = prior_cosine;
  prior["mode"] = prior_mode == PriorSource::Mode::Rederive ? "rederive" : "frozen";
  if (subspace) {
    prior["subspace"] = {
        {"d", subspace->d},
        {"mode", subspace->mode == SubspaceMode::BlockReplication ? "block" : "image"},
        {"channels", subspace->channels}};
  }
  j["prior"] = std::move(prior);
  json attack_j;
  attack_j["norm"] = norm_kind_name(attack.norm);
  attack_j["epsilon"] = attack.resolved_epsilon(model.dim);
  attack_j["eta"] = attack.eta;
  attack_j["max_queries"] = attack.max_queries;
  attack_j["success"] = {
      {"kind",
       attack.success.kind == SuccessRule::Kind::LossThreshold ? "loss_threshold" : "misclassify"},
      {"loss_threshold", attack.success.loss_threshold}};
  if (attack.box) attack_j["box"] = {attack.box->first, attack.box->second};
  j["attack"] = std::move(attack_j);
  j["seeds"] = seeds;
  j["label"] = label;
  if (x0) {
    json xs = json::array();
    for (Eigen::Index i = 0; i < x0->size(); ++i) xs.push_back((*x0)[i]);
    j["x0"] = std::move(xs);
  } else {
    j["x0"] = "origin";
  }
  j["output"] = {{"traces", traces_path}, {"summary", summary_path}, {"curve", curve_path}};
  if (!bench_methods.empty()) {
    json arr = json::array();
    for (const auto& m : bench_methods) {
      json mj;
      mj["label"] = m.label;
      mj["method"] = method_name(m.est.method);
      mj["q"] = m.est.q;
      if (m.est.lambda_override) mj["lambda_override"] = *m.est.lambda_override;
      if (m.est.mu_override) mj["mu_override"] = *m.est.mu_override;
      arr.push_back(std::move(mj));
    }
    j["bench_methods"] = std::move(arr);
  }
  return j;
}

BenchConfig RunConfig::to_bench_config() const {
  BenchConfig bench;
  bench.model = model;
  bench.remote = remote_endpoint();
  bench.prior_cosine = prior_cosine;
  bench.prior_mode = prior_mode;
  bench.subspace = subspace;
  bench.attack = attack;
  bench.seeds = seeds;
  bench.label = label;
  bench.x0 = x0;
  if (bench_methods.empty()) {
    bench.methods.push_back({method_name(estimator.method), estimator});
  } else {
    bench.methods = bench_methods;
  }
  return bench;
}

}  // namespace prgf

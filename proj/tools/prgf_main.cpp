#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "prgf/bench.hpp"
#include "prgf/config.hpp"
#include "prgf/server.hpp"
#include "prgf/suites.hpp"

namespace {

std::atomic<bool> g_stop{false};
void handle_signal(int) { g_stop = true; }

std::uint64_t default_seed_from_env() {
  if (const char* env = std::getenv("PRGF_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::logic_error&) {
      throw prgf::ConfigError("PRGF_SEED is not a valid integer");
    }
  }
  return 1;
}

void apply_default_seeds(prgf::RunConfig& cfg) {
  if (cfg.seeds.empty()) cfg.seeds = {default_seed_from_env()};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw prgf::ConfigError("cannot open output file " + path);
  out << content;
}

std::string render_traces(const prgf::RunConfig& cfg, const prgf::BenchResult& result) {
  std::string out;
  nlohmann::json header;
  header["type"] = "config";
  header["config"] = cfg.to_json();
  out += header.dump() + "\n";
  for (const auto& method : result.methods)
    for (std::size_t i = 0; i < method.traces.size(); ++i)
      out += prgf::trace_to_jsonl(method.traces[i],
                                  method.label + "/seed=" + std::to_string(cfg.seeds[i]));
  return out;
}

int finish_runs(const prgf::RunConfig& cfg, const prgf::BenchResult& result, bool write_curve) {
  write_file(cfg.traces_path, render_traces(cfg, result));
  write_file(cfg.summary_path, prgf::bench_summary_csv(result, cfg.attack.norm));
  if (write_curve) write_file(cfg.curve_path, prgf::bench_success_curve_csv(result));

  bool clean = true;
  for (const auto& method : result.methods) {
    std::cout << method.label << ": asr=" << method.summary.success_rate;
    if (method.summary.avg_queries) std::cout << " avg_queries=" << *method.summary.avg_queries;
    if (method.median_queries) std::cout << " median_queries=" << *method.median_queries;
    std::cout << "\n";
    for (const auto& trace : method.traces)
      if (trace.outcome == prgf::AttackOutcome::TransportFailure) {
        clean = false;
        std::cerr << "transport failure: " << trace.error << "\n";
      }
  }
  return clean ? 0 : 1;
}

std::vector<prgf::BenchMethodSpec> default_bench_methods(const prgf::RunConfig& cfg) {
  using prgf::Method;
  std::vector<prgf::BenchMethodSpec> methods;
  const auto add = [&](const std::string& label, Method m, std::optional<double> lambda) {
    prgf::BenchMethodSpec spec;
    spec.label = label;
    spec.est = cfg.estimator;
    spec.est.method = m;
    spec.est.lambda_override = lambda;
    methods.push_back(std::move(spec));
  };
  add("rgf", Method::Rgf, std::nullopt);
  add("prgf", Method::Prgf, std::nullopt);
  add("prgf_fix0.5", Method::Prgf, 0.5);
  add("prgf_fix0.05", Method::Prgf, 0.05);
  add("avg", Method::Averaging, std::nullopt);
  if (cfg.subspace) {
    add("rgf_d", Method::RgfSubspace, std::nullopt);
    add("prgf_d", Method::PrgfSubspace, std::nullopt);
    add("avg_d", Method::AveragingSubspace, std::nullopt);
  }
  return methods;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zeroth-order gradient estimation and black-box attack toolkit"};
  app.require_subcommand(1);

  // attack
  auto* attack_cmd = app.add_subcommand("attack", "run a seed sweep of one attack method");
  std::string attack_config_path;
  std::string oracle_override, traces_override, summary_override;
  attack_cmd->add_option("--config", attack_config_path, "JSON run config")->required();
  attack_cmd->add_option("--oracle", oracle_override, "override: local | remote://host:port");
  attack_cmd->add_option("--traces", traces_override, "override traces output path");
  attack_cmd->add_option("--summary", summary_override, "override summary output path");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "compare estimator methods on one benchmark");
  std::string bench_config_path, bench_oracle_override, curve_override;
  bench_cmd->add_option("--config", bench_config_path, "JSON run config")->required();
  bench_cmd->add_option("--oracle", bench_oracle_override, "override oracle");
  bench_cmd->add_option("--curve", curve_override, "override success-curve output path");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
  std::string suite_name;
  std::uint64_t verify_seed = 0;
  bool have_seed = false;
  std::string report_path;
  verify_cmd->add_option("--suite", suite_name, "theorem1|lambda|mu|beta|covariance|monotonic|sigma-sweep|all")
      ->required();
  verify_cmd->add_option("--seed", verify_seed, "rng seed")->each([&](const std::string&) {
    have_seed = true;
  });
  verify_cmd->add_option("--report", report_path, "JSON report path (default verify-<suite>.json)");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "serve a synthetic oracle over TCP");
  std::string model_kind = "linear", listen_addr = "127.0.0.1:0";
  std::uint64_t serve_seed = 0, budget = 10000;
  Eigen::Index dim = 0, smooth_dim = 0;
  double scale = 1.0, rough_scale = 0.0;
  int classes = 10;
  serve_cmd->add_option("--model", model_kind, "linear|quadratic|softplus")->required();
  serve_cmd->add_option("--dim", dim, "input dimension")->required();
  serve_cmd->add_option("--seed", serve_seed, "model seed");
  serve_cmd->add_option("--budget", budget, "query budget per connection")->required();
  serve_cmd->add_option("--listen", listen_addr, "bind address host:port")->required();
  serve_cmd->add_option("--scale", scale, "weight scale");
  serve_cmd->add_option("--classes", classes, "softplus classes");
  serve_cmd->add_option("--smooth-dim", smooth_dim, "softplus smooth subspace dim");
  serve_cmd->add_option("--rough-scale", rough_scale, "softplus orthogonal leak");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*attack_cmd) {
      prgf::RunConfig cfg = prgf::RunConfig::from_file(attack_config_path);
      if (!oracle_override.empty()) cfg.oracle = oracle_override;
      if (!traces_override.empty()) cfg.traces_path = traces_override;
      if (!summary_override.empty()) cfg.summary_path = summary_override;
      apply_default_seeds(cfg);
      cfg.validate();
      prgf::BenchConfig bench = cfg.to_bench_config();
      bench.methods = {{prgf::method_name(cfg.estimator.method), cfg.estimator}};
      return finish_runs(cfg, prgf::run_bench(bench), /*write_curve=*/false);
    }

    if (*bench_cmd) {
      prgf::RunConfig cfg = prgf::RunConfig::from_file(bench_config_path);
      if (!bench_oracle_override.empty()) cfg.oracle = bench_oracle_override;
      if (!curve_override.empty()) cfg.curve_path = curve_override;
      apply_default_seeds(cfg);
      cfg.validate();
      if (cfg.bench_methods.empty()) cfg.bench_methods = default_bench_methods(cfg);
      return finish_runs(cfg, prgf::run_bench(cfg.to_bench_config()), /*write_curve=*/true);
    }

    if (*verify_cmd) {
      const std::uint64_t seed = have_seed ? verify_seed : default_seed_from_env();
      std::vector<std::string> names =
          suite_name == "all" ? prgf::suite_names() : std::vector<std::string>{suite_name};
      bool all_pass = true;
      for (const auto& name : names) {
        const prgf::SuiteReport report = prgf::run_suite(name, seed);
        for (const auto& check : report.checks)
          std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << report.suite << "/" << check.name
                    << " value=" << check.value << " expected=" << check.expected
                    << " tol=" << check.tolerance << "\n";
        std::cout << (report.pass() ? "[PASS] " : "[FAIL] ") << "suite " << report.suite << "\n";
        const std::string path =
            report_path.empty() ? "verify-" + report.suite + ".json" : report_path;
        write_file(path, report.to_json().dump(2) + "\n");
        all_pass = all_pass && report.pass();
      }
      return all_pass ? 0 : 1;
    }

    if (*serve_cmd) {
      prgf::SyntheticModelSpec spec;
      spec.kind = prgf::parse_model_kind(model_kind);
      spec.dim = dim;
      spec.seed = serve_seed;
      spec.scale = scale;
      spec.classes = classes;
      spec.smooth_dim = smooth_dim;
      spec.rough_scale = rough_scale;
      spec.validate();

      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      auto server = prgf::serve(spec, prgf::parse_endpoint(listen_addr), budget);
      std::cout << "serving " << model_kind << " (dim=" << dim << ") on " << server->host() << ":"
                << server->port() << ", budget " << budget << " per connection\n"
                << std::flush;
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server->stop();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

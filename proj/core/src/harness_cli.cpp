#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "usol/harness.hpp"

namespace usol::harness {

namespace {

struct Flags {
  std::optional<int> d, k, n, workers;
  std::optional<double> L;
  std::optional<std::string> pair, lambda_seq, z_sweep, out, svg, profile, config;
  std::optional<long long> seed;
  std::vector<std::string> tol;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--dim", f.d, "ambient dimension d >= 3");
  app->add_option("--signature-k", f.k, "number of negative signs, 1 <= k <= d-1");
  app->add_option("--grid", f.n, "lattice points per axis (power of two)");
  app->add_option("--box", f.L, "box length per axis");
  app->add_option("--pair", f.pair, "exponent pair as 1/p,1/q (e.g. 5/6,1/6)");
  app->add_option("--lambda-seq", f.lambda_seq, "geometric lambda sequence a:b:count");
  app->add_option("--z-sweep", f.z_sweep, "circle:N or line:a0:a1:b:count");
  app->add_option("--out", f.out, "output directory for CSV files");
  app->add_option("--svg", f.svg, "directory for log-log plots");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--profile", f.profile, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  app->add_option("--workers", f.workers, "worker threads (0: automatic)");
  app->add_option("--tol", f.tol, "override a check bound, label=value")->take_all();
  app->add_option("--config", f.config, "key = value configuration file");
}

// Config file first, command-line flags on top.
ExperimentConfig build_config(const Flags& f) {
  ExperimentConfig cfg;
  if (f.config) apply_config_file(cfg, *f.config);
  auto set = [&](const char* key, const auto& opt) {
    if (!opt) return;
    if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, std::string>)
      apply_setting(cfg, key, *opt);
    else if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, double>)
      apply_setting(cfg, key, fmt(*opt));
    else
      apply_setting(cfg, key, std::to_string(*opt));
  };
  set("dim", f.d);
  set("signature-k", f.k);
  set("grid", f.n);
  set("box", f.L);
  set("pair", f.pair);
  set("lambda-seq", f.lambda_seq);
  set("z-sweep", f.z_sweep);
  set("out", f.out);
  set("svg", f.svg);
  set("seed", f.seed);
  set("profile", f.profile);
  set("workers", f.workers);
  for (const auto& t : f.tol) {
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("--tol expects label=value, got '" + t + "'");
    apply_setting(cfg, "tol." + t.substr(0, eq), t.substr(eq + 1));
  }
  validate(cfg);
  return cfg;
}

void print_report(const ExperimentReport& r, const std::string& csv) {
  std::printf("[%s] criterion %d, %.2fs -> %s\n", r.name.c_str(), r.criterion, r.runtime_s, csv.c_str());
  for (const auto& c : r.checks)
    std::printf("  %-4s %-22s %-10s value=%-14.6g bounds=[%g, %g]  %s\n", c.pass ? "PASS" : "FAIL", c.label.c_str(),
                c.kind.c_str(), c.value, c.lo, c.hi, c.anchor.c_str());
  for (const auto& n : r.notes) std::printf("  note: %s\n", n.c_str());
}

int run_subcommand(const std::string& sub, const ExperimentConfig& cfg) {
  if (cfg.workers > 0) setenv("USOL_WORKERS", std::to_string(cfg.workers).c_str(), 1);
  std::filesystem::create_directories(cfg.out_dir);
  if (!cfg.svg_dir.empty()) std::filesystem::create_directories(cfg.svg_dir);
  bool ok = true;
  for (const auto& name : subcommand_experiments(sub)) {
    ExperimentReport r = run_experiment(name, cfg);
    std::string csv = (std::filesystem::path(cfg.out_dir) / (name + ".csv")).string();
    write_csv(r, csv);
    if (!cfg.svg_dir.empty()) write_svg(r, (std::filesystem::path(cfg.svg_dir) / (name + ".svg")).string());
    print_report(r, csv);
    ok = ok && r.pass();
  }
  return ok ? 0 : 1;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"usol: numerical checks for uniform resolvent estimates of non-elliptic quadratic forms"};
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> subs{
      {"region", "classify the named exponent pairs"},
      {"dyadic-check", "dyadic resolution of the delta function"},
      {"pv-check", "principal value resolution and the A/B/C decomposition"},
      {"kernel", "kernel support, kernel decay and the T lambda scaling"},
      {"oscillatory", "decay of the oscillatory integral"},
      {"restrict-extend", "chart extension against the mollified extension"},
      {"polar-check", "hyperbolic polar coordinates"},
      {"sharpness-glambda", "g_lambda family regression"},
      {"sharpness-knapp", "Knapp family regression"},
      {"sharpness-stationary", "stationary phase necessity"},
      {"sharpness-cone", "cone reduction necessity"},
      {"sweep", "resolvent norm sweep over z"},
      {"normest", "norm estimator sanity checks"},
      {"all", "every experiment"},
  };
  std::vector<Flags> flags(subs.size());
  std::vector<CLI::App*> apps;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    apps.push_back(app.add_subcommand(subs[i].first, subs[i].second));
    add_flags(apps.back(), flags[i]);
  }
  std::string recheck_path;
  auto* rc = app.add_subcommand("recheck", "recompute the verdicts of a stored CSV from its rows");
  rc->add_option("csv", recheck_path, "CSV written by a previous run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rc->parsed()) {
      ExperimentReport r = recheck_csv(recheck_path);
      print_report(r, recheck_path);
      return r.pass() ? 0 : 1;
    }
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (apps[i]->parsed()) return run_subcommand(subs[i].first, build_config(flags[i]));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "convergence error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

}  // namespace usol::harness

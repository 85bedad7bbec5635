// Command-line entry point: check / bench / sweep / trace subcommands over
// the lock algorithms, the explicit-state checker, and the cost simulator.
//
// Exit codes: 0 success; 1 a checked property is violated or a configuration
// is invalid; 2 usage error or missing config file.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "alock/checker.hpp"
#include "alock/config.hpp"
#include "alock/scenario.hpp"
#include "alock/sim.hpp"

namespace {

int config_error(const std::string& msg) {
  std::fprintf(stderr, "alock: %s\n", msg.c_str());
  return 1;
}

int usage_error(const std::string& msg) {
  std::fprintf(stderr, "alock: %s\n", msg.c_str());
  return 2;
}

// Creates the directory (if needed) and writes the whole file.
bool write_file(const std::string& dir, const std::string& name,
                const std::string& content, std::string& err) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    err = "cannot create out directory '" + dir + "': " + ec.message();
    return false;
  }
  std::string path = dir + "/" + name;
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) {
    err = "cannot write '" + path + "'";
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// check

int run_check_cmd(int np, int budget, const std::string& algo,
                  uint64_t max_states) {
  alock::model::CheckerConfig cfg;
  cfg.num_processes = np;
  cfg.initial_budget = budget;
  cfg.max_states = max_states;
  if (!alock::model::algo_from_string(algo, cfg.algo))
    return usage_error("--algo must be alock, spinlock, or mcs");

  try {
    alock::model::validate(cfg);
  } catch (const std::invalid_argument& e) {
    return config_error(e.what());
  }

  std::printf("np = %d\nbudget = %d\nalgo = %s\nmax_states = %llu\n\n",
              cfg.num_processes, cfg.initial_budget,
              alock::model::to_string(cfg.algo),
              static_cast<unsigned long long>(cfg.max_states));

  alock::model::CheckResult res = alock::model::run_check(cfg);
  std::printf("states_explored = %llu\ncapped = %s\n\n",
              static_cast<unsigned long long>(res.states_explored),
              res.capped ? "yes" : "no");

  std::unique_ptr<alock::model::Model> model;
  switch (cfg.algo) {
    case alock::model::Algo::kAlock:
      model = std::make_unique<alock::model::AlockModel>(cfg);
      break;
    case alock::model::Algo::kSpinlock:
      model = std::make_unique<alock::model::SpinModel>(cfg);
      break;
    case alock::model::Algo::kMcs:
      model = std::make_unique<alock::model::McsModel>(cfg);
      break;
  }

  for (const auto& r : res.reports) {
    std::printf("  %-44s %s%s\n", r.property.c_str(),
                alock::model::to_string(r.verdict),
                r.informational ? "  (informational)" : "");
    if (!r.detail.empty()) std::printf("      %s\n", r.detail.c_str());
    if (r.verdict == alock::model::Verdict::kViolated) {
      std::string trace = alock::model::render_trace(*model, r);
      if (!trace.empty()) std::printf("%s", trace.c_str());
    }
  }
  std::printf("\n");
  for (const auto& r : res.reports)
    std::printf("%s\n", alock::model::report_line(r).c_str());

  return res.all_hold() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// bench / sweep

// Reads and parses the config file; nonzero means "exit with this code".
int load_config(const std::string& path, alock::BenchConfig& cfg) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return usage_error("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    cfg = alock::parse_bench_config(ss.str());
  } catch (const std::invalid_argument& e) {
    return config_error(std::string(e.what()) + " in '" + path + "'");
  }
  return 0;
}

int apply_overrides(const std::optional<uint64_t>& seed,
                    const std::optional<std::string>& algo,
                    alock::BenchConfig& cfg) {
  if (seed) cfg.workload.seed = *seed;
  if (algo && !alock::sim::algo_from_string(*algo, cfg.algo))
    return usage_error("--algo must be alock, spinlock, or mcs");
  return 0;
}

int run_bench_cmd(const std::string& config_path,
                  const std::optional<uint64_t>& seed,
                  const std::optional<std::string>& algo,
                  const std::optional<std::string>& out) {
  alock::BenchConfig cfg;
  if (int rc = load_config(config_path, cfg); rc != 0) return rc;
  if (int rc = apply_overrides(seed, algo, cfg); rc != 0) return rc;

  std::printf("%s\n", alock::render_bench_config(cfg).c_str());

  alock::sim::RunMetrics r;
  try {
    r = alock::sim::run(cfg.workload, cfg.model, cfg.algo, cfg.budgets);
  } catch (const std::invalid_argument& e) {
    return config_error(e.what());
  }

  std::string csv = alock::sim::csv_header() + "\n" +
                    alock::sim::csv_row(cfg.workload, cfg.algo, cfg.budgets, r) +
                    "\n";
  std::printf("%s", csv.c_str());

  if (out) {
    // long-format latency CDF alongside the CSV, one "algo latency fraction"
    // row per distinct latency — directly plottable
    std::string cdf = "algo latency cdf\n";
    for (const auto& [latency, fraction] : alock::sim::latency_cdf(r)) {
      cdf += std::string(alock::sim::to_string(cfg.algo)) + " " +
             std::to_string(latency) + " " + std::to_string(fraction) + "\n";
    }
    std::string err;
    if (!write_file(*out, "bench.csv", csv, err) ||
        !write_file(*out, "bench_cdf.dat", cdf, err))
      return config_error(err);
    std::fprintf(stderr, "wrote %s/bench.csv and %s/bench_cdf.dat\n",
                 out->c_str(), out->c_str());
  }
  return 0;
}

int run_sweep_cmd(const std::string& config_path,
                  const std::optional<uint64_t>& seed,
                  const std::optional<std::string>& out) {
  alock::BenchConfig cfg;
  if (int rc = load_config(config_path, cfg); rc != 0) return rc;
  if (int rc = apply_overrides(seed, std::nullopt, cfg); rc != 0) return rc;
  if (cfg.algo != alock::sim::SimAlgo::kAlock)
    return config_error("sweep varies hand-off allowances; algo must be alock");

  std::printf("%s\n", alock::render_bench_config(cfg).c_str());

  std::string csv;
  try {
    auto cells = alock::sim::budget_sweep(cfg.workload, cfg.model,
                                          cfg.sweep_local_budgets,
                                          cfg.sweep_remote_budgets);
    csv = alock::sim::sweep_csv(cells);
  } catch (const std::invalid_argument& e) {
    return config_error(e.what());
  }
  std::printf("%s", csv.c_str());

  if (out) {
    std::string err;
    if (!write_file(*out, "sweep.csv", csv, err)) return config_error(err);
    std::fprintf(stderr, "wrote %s/sweep.csv\n", out->c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// trace

int run_trace_cmd(const std::string& name,
                  const std::optional<std::string>& golden_flag,
                  const std::optional<std::string>& out) {
  // default golden location: the committed data directory, when visible
  std::string golden;
  bool golden_required = false;
  if (golden_flag) {
    golden = *golden_flag;
    golden_required = true;
  } else if (std::string c = "data/" + name + ".trace";
             std::filesystem::exists(c)) {
    golden = c;
  }

  std::printf("scenario = %s\ngolden = %s\n\n", name.c_str(),
              golden.empty() ? "(none)" : golden.c_str());

  std::string trace;
  try {
    trace = alock::scenario_trace(name);
  } catch (const std::invalid_argument& e) {
    return usage_error(e.what());
  }
  std::printf("%s", trace.c_str());

  if (out) {
    std::string err;
    if (!write_file(*out, name + ".trace", trace, err))
      return config_error(err);
    std::fprintf(stderr, "wrote %s/%s.trace\n", out->c_str(), name.c_str());
  }

  if (!golden.empty()) {
    std::ifstream f(golden, std::ios::binary);
    if (!f) {
      if (golden_required)
        return usage_error("cannot read golden file '" + golden + "'");
    } else {
      std::stringstream ss;
      ss << f.rdbuf();
      if (ss.str() == trace) {
        std::fprintf(stderr, "trace matches %s\n", golden.c_str());
      } else {
        std::fprintf(stderr, "trace DIFFERS from %s\n", golden.c_str());
        return 1;
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "asymmetric lock toolkit: state-space checking, cost simulation, and "
      "walk-through traces"};
  app.require_subcommand(1);

  int np = 2, budget = 1;
  std::string check_algo = "alock";
  uint64_t max_states = 10'000'000;
  CLI::App* check =
      app.add_subcommand("check",
                         "explore a lock's full state space and verify its "
                         "properties");
  check->add_option("--np", np, "number of processes");
  check->add_option("--budget", budget, "initial hand-off allowance");
  check->add_option("--algo", check_algo, "alock, spinlock, or mcs");
  check->add_option("--max-states", max_states, "state-count safety cap");

  std::string bench_config;
  std::optional<uint64_t> bench_seed;
  std::optional<std::string> bench_algo, bench_out;
  CLI::App* bench =
      app.add_subcommand("bench",
                         "run one simulated workload and report throughput "
                         "and latency");
  bench->add_option("--config", bench_config, "key=value workload config")
      ->required();
  bench->add_option("--algo", bench_algo, "override the configured algorithm");
  bench->add_option("--seed", bench_seed, "override the configured seed");
  bench->add_option("--out", bench_out, "output directory")
      ->envname("ALOCK_OUT");

  std::string sweep_config;
  std::optional<uint64_t> sweep_seed;
  std::optional<std::string> sweep_out;
  CLI::App* sweep =
      app.add_subcommand("sweep",
                         "run the hand-off allowance grid and report "
                         "speedups vs (5,5)");
  sweep->add_option("--config", sweep_config, "key=value workload config")
      ->required();
  sweep->add_option("--seed", sweep_seed, "override the configured seed");
  sweep->add_option("--out", sweep_out, "output directory")
      ->envname("ALOCK_OUT");

  std::string scenario = "fig2";
  std::optional<std::string> golden, trace_out;
  CLI::App* trace =
      app.add_subcommand("trace",
                         "emit a named deterministic walk-through step log");
  trace->add_option("--scenario", scenario, "scenario name (default fig2)");
  trace->add_option("--golden", golden, "golden file to diff against");
  trace->add_option("--out", trace_out, "output directory")
      ->envname("ALOCK_OUT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // renders the message and usage on the diagnostic stream
    return 2;
  }

  if (*check) return run_check_cmd(np, budget, check_algo, max_states);
  if (*bench) return run_bench_cmd(bench_config, bench_seed, bench_algo,
                                   bench_out);
  if (*sweep) return run_sweep_cmd(sweep_config, sweep_seed, sweep_out);
  if (*trace) return run_trace_cmd(scenario, golden, trace_out);
  return 2;  // unreachable: require_subcommand enforces one
}

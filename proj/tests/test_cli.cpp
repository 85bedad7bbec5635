#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// Drives the installed command-line binary (path in $ALOCK_CLI) as a real
// subprocess and checks exit codes, output contracts, and byte stability.

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
  const char* p = std::getenv("ALOCK_CLI");
  REQUIRE_MESSAGE(p != nullptr, "ALOCK_CLI must point at the built binary");
  return p;
}

std::string data_dir() {
  const char* p = std::getenv("ALOCK_DATA");
  REQUIRE_MESSAGE(p != nullptr, "ALOCK_DATA must point at the data directory");
  return p;
}

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("alock_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE_MESSAGE(f.good(), "readable: " << p.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  f << content;
  REQUIRE(f.good());
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path out = scratch_dir() / ("out" + std::to_string(counter));
  fs::path err = scratch_dir() / ("err" + std::to_string(counter));
  ++counter;
  std::string cmd = cli_path() + " " + args + " > " + out.string() + " 2> " +
                    err.string();
  int status = std::system(cmd.c_str());
  RunResult r;
  r.code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("check verifies the default configuration and reports every property") {
  RunResult r = run_cli("check --np 2 --budget 1 --algo alock");
  CHECK(r.code == 0);
  // effective configuration echo
  CHECK(contains(r.out, "np = 2"));
  CHECK(contains(r.out, "budget = 1"));
  CHECK(contains(r.out, "algo = alock"));
  // machine-readable verdict lines with the frozen state count
  CHECK(contains(r.out, "property=MutualExclusion verdict=holds states=730"));
  CHECK(contains(r.out, "property=StarvationFree verdict=holds"));
  CHECK(contains(r.out, "property=DeadAndLivelockFree verdict=holds"));
  CHECK(contains(r.out, "property=CohortFairness verdict=holds"));
  CHECK(contains(r.out, "property=GlobalFairness verdict=holds"));
  // the critical-section infinitely-often check is reported but not gating:
  // a process may idle outside the critical section forever by design
  CHECK(contains(r.out, "property=ExecsCriticalSectionInfinitelyOften"));
}

TEST_CASE("check distinguishes invalid configurations from usage errors") {
  CHECK(run_cli("check --np 0 --budget 1").code == 1);      // out of range
  CHECK(run_cli("check --np 2 --budget 0").code == 1);      // out of range
  CHECK(run_cli("check --algo ticket").code == 2);          // unknown name
  CHECK(run_cli("check --np two").code == 2);               // not a number
  CHECK(run_cli("check --np 2 --out /tmp").code == 2);      // foreign flag
  CHECK(run_cli("frobnicate").code == 2);                   // no such command
  CHECK(run_cli("check --np 2 --budget 1").code == 0);      // baselines fine
}

TEST_CASE("check runs the baseline algorithms too") {
  RunResult spin = run_cli("check --np 2 --algo spinlock");
  CHECK(spin.code == 1);  // an adversarial schedule starves one process
  CHECK(contains(spin.out, "property=StarvationFree verdict=violated"));
  CHECK(contains(spin.out, "property=MutualExclusion verdict=holds"));

  RunResult mcs = run_cli("check --np 2 --algo mcs");
  CHECK(mcs.code == 0);
  CHECK(contains(mcs.out, "property=MutualExclusion verdict=holds states=280"));
  CHECK(contains(mcs.out, "property=FifoOrder verdict=holds"));
}

TEST_CASE("trace reproduces the committed golden walk-through byte for byte") {
  fs::path out = scratch_dir() / "tracedir";
  std::string golden = data_dir() + "/fig2.trace";
  RunResult r = run_cli("trace --scenario fig2 --golden " + golden + " --out " +
                        out.string());
  CHECK(r.code == 0);
  CHECK(contains(r.out, "scenario = fig2"));
  CHECK(contains(r.err, "trace matches"));
  CHECK(slurp(out / "fig2.trace") == slurp(golden));
}

TEST_CASE("trace rejects unknown scenarios and unreadable goldens") {
  CHECK(run_cli("trace --scenario nosuch").code == 2);
  CHECK(run_cli("trace --scenario fig2 --golden /nonexistent/g.trace").code ==
        2);
}

TEST_CASE("trace exits nonzero when the golden differs") {
  fs::path forged = scratch_dir() / "forged.trace";
  spit(forged, "something else entirely\n");
  RunResult r = run_cli("trace --scenario fig2 --golden " + forged.string());
  CHECK(r.code == 1);
  CHECK(contains(r.err, "DIFFERS"));
}

namespace {

std::string small_bench_config() {
  return
      "algo = alock\n"
      "nodes = 1\n"
      "threads_per_node = 4\n"
      "lock_count = 20\n"
      "locality_pct = 100\n"
      "max_time = 4000\n"
      "seed = 42\n";
}

}  // namespace

TEST_CASE("bench echoes its configuration and emits the csv contract") {
  fs::path conf = scratch_dir() / "small.conf";
  spit(conf, small_bench_config());
  fs::path out = scratch_dir() / "benchdir";
  RunResult r = run_cli("bench --config " + conf.string() + " --out " +
                        out.string());
  CHECK(r.code == 0);
  // the full effective configuration, defaults included
  CHECK(contains(r.out, "algo = alock"));
  CHECK(contains(r.out, "remote_op_cost = 10"));
  CHECK(contains(r.out, "conn_window = 200"));
  CHECK(contains(r.out,
                 "algo,nodes,threads,locks,locality,budget_l,budget_r,"
                 "throughput,p50,p99,p999,remote_steps,local_steps"));
  CHECK(contains(r.out, "\nalock,1,4,20,100,5,20,"));
  // the out directory got the table and the plottable long-format cdf
  std::string csv = slurp(out / "bench.csv");
  CHECK(contains(csv, "alock,1,4,20,100,"));
  std::string cdf = slurp(out / "bench_cdf.dat");
  CHECK(contains(cdf, "algo latency cdf\n"));
  CHECK(contains(cdf, "alock "));
}

TEST_CASE("bench reruns are byte-identical") {
  fs::path conf = scratch_dir() / "small2.conf";
  spit(conf, small_bench_config());
  RunResult a = run_cli("bench --config " + conf.string());
  RunResult b = run_cli("bench --config " + conf.string());
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  // a different seed actually changes the measurement
  RunResult c = run_cli("bench --config " + conf.string() + " --seed 7");
  CHECK(c.code == 0);
  CHECK(c.out != a.out);
}

TEST_CASE("bench flag overrides take effect") {
  fs::path conf = scratch_dir() / "small3.conf";
  spit(conf, small_bench_config());
  RunResult r = run_cli("bench --config " + conf.string() + " --algo mcs");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "algo = mcs"));
  CHECK(contains(r.out, "\nmcs,1,4,20,100,0,0,"));
}

TEST_CASE("bench error handling separates missing from invalid configs") {
  CHECK(run_cli("bench").code == 2);                        // no --config
  CHECK(run_cli("bench --config missing.cfg").code == 2);   // unreadable
  fs::path bad = scratch_dir() / "bad.conf";
  spit(bad, "frobnicate = 3\n");
  CHECK(run_cli("bench --config " + bad.string()).code == 1);  // unknown key
  fs::path bad2 = scratch_dir() / "bad2.conf";
  spit(bad2, "nodes = 99\nmax_time = 1000\n");
  RunResult r = run_cli("bench --config " + bad2.string());
  CHECK(r.code == 1);  // parses, fails validation
  CHECK(contains(r.err, "nodes"));
}

TEST_CASE("sweep reports speedups against the baseline cell") {
  fs::path conf = scratch_dir() / "sweep.conf";
  spit(conf,
       "algo = alock\n"
       "nodes = 2\n"
       "threads_per_node = 2\n"
       "lock_count = 20\n"
       "max_time = 4000\n"
       "sweep_local_budgets = 5\n"
       "sweep_remote_budgets = 5, 20\n");
  fs::path out = scratch_dir() / "sweepdir";
  RunResult r = run_cli("sweep --config " + conf.string() + " --out " +
                        out.string());
  CHECK(r.code == 0);
  CHECK(contains(r.out, "budget_l,budget_r,speedup_vs_5_5"));
  CHECK(contains(r.out, "5,5,1.000000"));
  CHECK(contains(slurp(out / "sweep.csv"), "5,5,1.000000"));

  // the sweep varies the lock's own allowances; baselines have none
  fs::path mcs = scratch_dir() / "sweep_mcs.conf";
  spit(mcs, "algo = mcs\nnodes = 2\nthreads_per_node = 2\nlock_count = 20\n"
            "max_time = 4000\n");
  CHECK(run_cli("sweep --config " + mcs.string()).code == 1);

  // a grid without the (5,5) reference cell is invalid
  fs::path nogrid = scratch_dir() / "sweep_nobase.conf";
  spit(nogrid,
       "algo = alock\nnodes = 2\nthreads_per_node = 2\nlock_count = 20\n"
       "max_time = 4000\nsweep_local_budgets = 3\nsweep_remote_budgets = 7\n");
  CHECK(run_cli("sweep --config " + nogrid.string()).code == 1);
}

TEST_CASE("the out directory environment default is honored") {
  fs::path conf = scratch_dir() / "small4.conf";
  spit(conf, small_bench_config());
  fs::path envout = scratch_dir() / "envdir";
  std::string cmd = "ALOCK_OUT=" + envout.string() + " " + cli_path() +
                    " bench --config " + conf.string() + " > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(envout / "bench.csv"));
}

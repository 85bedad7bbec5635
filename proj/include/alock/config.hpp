#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alock/alock.hpp"
#include "alock/sim.hpp"

namespace alock {

// Parsed benchmark/sweep configuration: a workload, a cost model, the
// algorithm under test, its hand-off allowances, and the sweep grid.
struct BenchConfig {
  sim::WorkloadSpec workload;
  sim::LatencyModel model;
  sim::SimAlgo algo = sim::SimAlgo::kAlock;
  BudgetPolicy budgets;
  std::vector<int64_t> sweep_local_budgets = {5};
  std::vector<int64_t> sweep_remote_budgets = {5, 10, 20};
};

// Parses the line-oriented `key = value` format: one assignment per line,
// `#` starts a comment, blank lines allowed, later assignments win.  List
// values are comma-separated.  Unknown keys, malformed numbers, and
// out-of-range values throw std::invalid_argument naming the offender.
//
// Keys: algo, nodes, threads_per_node, lock_count, locality_pct, op_count,
// max_time, cs_cost, seed, budget_local, budget_remote, local_op_cost,
// remote_op_cost, loopback_op_cost, nic_capacity, poll_backoff, conn_window,
// conn_divisor, sweep_local_budgets, sweep_remote_budgets.
BenchConfig parse_bench_config(const std::string& text);

// Renders a config in the same key=value format it is parsed from, every
// key present: the "full effective configuration" echo for reproducibility.
std::string render_bench_config(const BenchConfig& c);

}  // namespace alock

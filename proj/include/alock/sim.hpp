#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "alock/alock.hpp"

namespace alock::sim {

enum class SimAlgo { kAlock, kSpinlock, kMcs };
const char* to_string(SimAlgo a);
bool algo_from_string(std::string_view s, SimAlgo& out);

// One benchmark configuration: a partitioned lock table (lock i lives on
// node i % nodes) and threads that loop pick-lock / acquire / hold / release
// with zero think time.  locality_pct of each thread's picks target locks on
// its own node; the rest go to a uniformly chosen foreign lock.
struct WorkloadSpec {
  uint32_t nodes = 1;
  uint32_t threads_per_node = 8;
  uint32_t lock_count = 20;     // 20 high / 100 medium / 1000 low contention
  uint32_t locality_pct = 100;  // percent of picks that stay on-node
  uint64_t op_count = 20000;    // stop after this many lock+unlock pairs
  uint64_t max_time = 0;        // optional cap in time units, 0 = none
  uint64_t cs_cost = 5;         // time units spent holding the lock
  uint64_t seed = 42;
};

// Per-class step costs plus a NIC congestion knob.  A remote-class step
// issued at a NIC with f operations in flight (itself included) takes
// cost * max(capacity, f) / capacity time units — no penalty below capacity,
// then linear (integer arithmetic end to end, so runs replay exactly).
// Loopback is a remote-class step whose actor sits on the target node; it
// runs at its own cost but shares the same NIC accounting.
struct LatencyModel {
  uint64_t local_op_cost = 1;
  uint64_t remote_op_cost = 10;
  uint64_t loopback_op_cost = 10;
  uint32_t nic_capacity = 2;
  // A poll that reads the same word and sees the same value as the thread's
  // previous step is a spin round that learned nothing; the thread backs off
  // this many time units (charged as wait) before its next step.
  uint64_t poll_backoff = 6;
  // Connection pressure: every remote actor that touched this NIC within the
  // last conn_window time units holds a connection context, and each such
  // context beyond the issuing one loads the NIC like 1/conn_divisor of an
  // in-flight op (cache thrash from too many hot connections, approximated).
  uint64_t conn_window = 200;
  uint32_t conn_divisor = 1;

  uint64_t charge(uint64_t base, uint64_t load) const {
    uint64_t f = load < nic_capacity ? nic_capacity : load;
    return base * f / nic_capacity;
  }
};

void validate(const WorkloadSpec& w, const LatencyModel& m);

struct RunMetrics {
  uint64_t completed_ops = 0;
  uint64_t simulated_time = 0;       // completion time of the last counted op
  double throughput = 0.0;           // completed_ops / simulated_time
  uint64_t p50 = 0, p99 = 0, p999 = 0;
  uint64_t remote_steps = 0, local_steps = 0;
  // global tie-break entries (victim-word writes), split by the writer's
  // placement relative to the lock's node; zero for the baseline algorithms
  uint64_t victim_writes_local = 0, victim_writes_remote = 0;
  // the subset of those entries forced by an exhausted hand-off allowance
  // (the writer's step just before was a read of its own budget seeing 0)
  uint64_t budget_reacquires_local = 0, budget_reacquires_remote = 0;
  std::vector<uint64_t> samples;     // per-op latency, completion order
  // conservation bookkeeping, indexed by thread: every unit of a thread's
  // accounted time is either a charged step / critical-section hold (busy)
  // or a blocked-retry delay (wait)
  std::vector<uint64_t> busy, wait;
};

RunMetrics run(const WorkloadSpec& w, const LatencyModel& m, SimAlgo algo,
               BudgetPolicy pol = {});

std::string csv_header();
std::string csv_row(const WorkloadSpec& w, SimAlgo algo, BudgetPolicy pol,
                    const RunMetrics& r);

// (latency value, cumulative fraction) steps, nondecreasing, ending at 1;
// empty metrics give an empty table.
std::vector<std::pair<uint64_t, double>> latency_cdf(const RunMetrics& r);

// Relative-speedup table: every (local, remote) budget cell is run at 95, 90
// and 85 percent locality with workload randomness identical across cells,
// and its throughput ratio against the (5, 5) baseline cell is averaged over
// the three localities.  The baseline cell must be in the grid.
struct SweepCell {
  int64_t local = 0;
  int64_t remote = 0;
  double ratio = 0.0;             // 1.0 for the baseline cell by construction
  double throughput[3] = {};      // per locality, 95 / 90 / 85
};
std::vector<SweepCell> budget_sweep(const WorkloadSpec& base,
                                    const LatencyModel& m,
                                    const std::vector<int64_t>& local_budgets,
                                    const std::vector<int64_t>& remote_budgets);
std::string sweep_csv(const std::vector<SweepCell>& cells);

}  // namespace alock::sim

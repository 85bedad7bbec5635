#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "alock/checker.hpp"

namespace alock {

// Lockstep refinement harness: drives the operational lock (arena memory +
// step machines) and the checker's transition system from one shared random
// schedule at label granularity, asserting after every step that the two
// sides agree on everything they both expose — queue tails against the
// cohort array, the victim word, descriptor budgets, successor links, and
// the passed flag — and that they agree on which processes are enabled.
//
// Process-to-actor mapping: checker cohorts are pid parity, the operational
// cohorts are placement, so pid's slot (pid%2)+1 picks the node — slot 1
// actors live with the lock (local queue), slot 2 actors on the other node
// (remote queue).  The checker's pid-valued victim word maps to the
// operational cohort-valued one through the same slots.
struct BisimConfig {
  int num_processes = 2;
  int budget = 2;
  uint64_t schedules = 1000;
  uint64_t steps_per_schedule = 160;
  uint64_t seed = 1;
  // Checking the comparator: a mutated transition system against the correct
  // operational lock must be reported as divergent.
  model::Mutation model_mutation = model::Mutation::kNone;
};

struct BisimReport {
  uint64_t schedules_run = 0;
  uint64_t steps_driven = 0;
  uint64_t divergences = 0;
  std::string first_divergence;          // empty when clean
  std::array<uint64_t, 32> label_fired;  // coverage, indexed by label value

  BisimReport() { label_fired.fill(0); }
  uint64_t fired(Label l) const { return label_fired[static_cast<size_t>(l)]; }
};

BisimReport run_bisim(const BisimConfig& cfg);

}  // namespace alock

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "alock/labels.hpp"

namespace alock::model {

inline constexpr int kMaxProcs = 8;

enum class Algo { kAlock, kSpinlock, kMcs };
enum class Mutation {
  kNone,
  kDropVictimWrite,        // g1 no longer publishes the victim
  kSkipSuccessorWait,      // release skips the hand-off on a missed CAS
  kPassWithoutDecrement,   // hand-off copies the budget instead of decrementing
};

const char* to_string(Algo a);
bool algo_from_string(std::string_view s, Algo& out);

struct CheckerConfig {
  int num_processes = 2;
  int initial_budget = 1;
  Algo algo = Algo::kAlock;
  Mutation mutation = Mutation::kNone;
  uint64_t max_states = 10'000'000;
};

// Throws std::invalid_argument when out of range (1 <= NP <= kMaxProcs,
// 1 <= B <= 200, max_states >= 1).
void validate(const CheckerConfig& cfg);

// One explored transition: process `pid` fired the step at `label` (a code
// private to the model that produced it; render via Model::label_name).
struct Edge {
  uint32_t to;
  uint8_t pid;
  uint8_t label;
};

// A transition system over canonically-encoded states.  Contract for every
// implementation: byte pid-1 of an encoded state is pc[pid], and each
// (state, pid) has at most ONE successor — the only nondeterminism lives in
// initial_states(), so the scheduler's choice of pid is the sole branching.
class Model {
 public:
  virtual ~Model() = default;
  virtual int np() const = 0;
  virtual std::vector<std::string> initial_states() const = 0;
  // Fires pid's next step.  False when pid is blocked (a failed await).
  virtual bool step(const std::string& state, int pid, std::string& out,
                    uint8_t& label) const = 0;
  // Weak fairness obliges pid here: step enabled and not fairness-exempt
  // (the non-critical section is exempt — a process may idle there forever).
  virtual bool obliged(const std::string& state, int pid) const = 0;
  virtual const char* label_name(uint8_t label) const = 0;
  // Number of processes at their critical-section label.
  virtual int cs_count(const std::string& state) const = 0;
  // Baseline models flag states where a later arrival holds the lock while
  // an earlier one still waits; the queue-order ghost data lives in the state.
  virtual bool fifo_violated(const std::string&) const { return false; }

  uint8_t pc_of(const std::string& state, int pid) const {
    return static_cast<uint8_t>(state[pid - 1]);
  }
};

// Appendix-faithful ALock transition system.  Processes are 1..NP; cohort
// membership is pid parity (slot (pid%2)+1), victim holds a raw pid, and the
// per-pid call stack tracks the acquire/release procedure returns.
class AlockModel : public Model {
 public:
  explicit AlockModel(const CheckerConfig& cfg);

  struct View {
    uint8_t pc[kMaxProcs + 1];
    uint8_t victim;
    uint8_t cohort[3];  // slots 1 and 2; 0 = empty
    int8_t budget[kMaxProcs + 1];
    uint8_t next[kMaxProcs + 1];
    uint8_t passed[kMaxProcs + 1];
    uint8_t pred[kMaxProcs + 1];
    uint8_t depth[kMaxProcs + 1];
    uint8_t ret[kMaxProcs + 1][2];
  };
  View decode(const std::string& state) const;
  std::string encode(const View& v) const;

  int np() const override { return np_; }
  std::vector<std::string> initial_states() const override;
  bool step(const std::string& state, int pid, std::string& out,
            uint8_t& label) const override;
  bool obliged(const std::string& state, int pid) const override;
  const char* label_name(uint8_t label) const override;
  int cs_count(const std::string& state) const override;

 private:
  int np_;
  int budget_;
  Mutation mutation_;
};

// Test-and-set lock where the CAS is modelled as an await (a spin round that
// cannot succeed is a stutter, so it carries no weak-fairness credit).
class SpinModel : public Model {
 public:
  enum L : uint8_t { kP1, kNcs, kEnter, kTry, kCs, kExit };
  explicit SpinModel(const CheckerConfig& cfg);
  int np() const override { return np_; }
  std::vector<std::string> initial_states() const override;
  bool step(const std::string& state, int pid, std::string& out,
            uint8_t& label) const override;
  bool obliged(const std::string& state, int pid) const override;
  const char* label_name(uint8_t label) const override;
  int cs_count(const std::string& state) const override;
  bool fifo_violated(const std::string& state) const override;

 private:
  int np_;
};

// Single-queue MCS lock with an atomic tail swap; the arrival rank ghost
// records swap order so FIFO service is a state invariant.
class McsModel : public Model {
 public:
  enum L : uint8_t { kP1, kNcs, kEnter, kSwp, kLnk, kWai, kCs, kCas, kR1, kR2 };
  explicit McsModel(const CheckerConfig& cfg);
  int np() const override { return np_; }
  std::vector<std::string> initial_states() const override;
  bool step(const std::string& state, int pid, std::string& out,
            uint8_t& label) const override;
  bool obliged(const std::string& state, int pid) const override;
  const char* label_name(uint8_t label) const override;
  int cs_count(const std::string& state) const override;
  bool fifo_violated(const std::string& state) const override;

 private:
  int np_;
};

struct StateGraph {
  int np = 0;
  const Model* model = nullptr;  // non-owning; outlives the graph in all uses
  std::vector<std::string> states;
  std::vector<std::vector<Edge>> adj;
  // Breadth-first spanning tree for shortest traces back to an initial state.
  std::vector<uint32_t> parent;  // kNoParent for roots
  std::vector<Edge> via;
  std::vector<uint32_t> roots;
  std::vector<uint8_t> obliged;  // np bytes per state, one bool per pid
  bool capped = false;

  static constexpr uint32_t kNoParent = UINT32_MAX;
  uint64_t size() const { return states.size(); }
  uint8_t pc(uint32_t s, int pid) const {
    return static_cast<uint8_t>(states[s][pid - 1]);
  }
  bool is_obliged(uint32_t s, int pid) const {
    return obliged[uint64_t{s} * np + (pid - 1)] != 0;
  }
};

// Deterministic BFS exploration (state indices are discovery order).
StateGraph explore(const Model& m, uint64_t max_states);

enum class Verdict { kHolds, kViolated, kRefused };
const char* to_string(Verdict v);

struct TraceStep {
  uint8_t pid;
  uint8_t label;
};

struct PropertyReport {
  std::string property;
  Verdict verdict = Verdict::kHolds;
  uint64_t states = 0;
  // Violations: schedule from initial_states()[root]; liveness adds a lasso
  // cycle (empty cycle + stutter=true when the behavior parks quiescently).
  int root = 0;
  std::vector<TraceStep> prefix;
  std::vector<TraceStep> cycle;
  bool stutter = false;
  bool informational = false;  // reported for information, never gating
  std::string detail;
};

// Render one report as the stable machine-readable line
// "property=<name> verdict=<holds|violated|refused> states=<n>".
std::string report_line(const PropertyReport& r);
// Multi-line human rendering of a counterexample (empty string when holding).
std::string render_trace(const Model& m, const PropertyReport& r);

struct CheckResult {
  CheckerConfig config;
  uint64_t states_explored = 0;
  bool capped = false;
  std::vector<PropertyReport> reports;
  bool all_hold() const;  // ignores informational reports
};

// Explores the configured model and evaluates its property suite:
// ALock gets MutualExclusion, ExecsCriticalSectionInfinitelyOften,
// StarvationFree, DeadAndLivelockFree, CohortFairness, GlobalFairness plus an
// informational CohortFairness variant anchored at the blocking wait; the
// baselines get MutualExclusion, FifoOrder, StarvationFree and
// DeadAndLivelockFree.  Safety verdicts on a capped graph cover the explored
// prefix only (flagged in detail); liveness verdicts on a capped graph are
// refused.
CheckResult run_check(const CheckerConfig& cfg);

// --- liveness engine (exposed for tests) -----------------------------------

// States from which some weakly-fair behavior remains in ¬q forever, where
// q is one flag byte per state.  Computed from the condensation of the ¬q
// subgraph: a fair cycle needs, for every pid, either an in-component state
// not obliging pid or an in-component step by pid; quiescent states (no pid
// obliged) fairly stutter forever.  The result is the backward closure of
// those witnesses through ¬q.
struct FairAvoid {
  std::vector<uint8_t> avoid;      // per state
  std::vector<uint8_t> quiescent;  // per state, already masked to ¬q
  std::vector<int32_t> comp;       // condensation id, -1 outside ¬q
  std::vector<uint8_t> comp_fair;  // per component
};
FairAvoid fair_avoid(const StateGraph& g, const std::vector<uint8_t>& q);

// Lasso rooted at `from` (which must satisfy fa.avoid): a q-avoiding path to
// a witness plus a fair cycle (or stutter).  Paths are edge lists.
struct Lasso {
  std::vector<Edge> path;
  std::vector<Edge> cycle;
  bool stutter = false;
};
Lasso build_lasso(const StateGraph& g, const FairAvoid& fa, uint32_t from);

}  // namespace alock::model

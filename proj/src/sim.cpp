#include "alock/sim.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <memory>
#include <optional>
#include <queue>
#include <unordered_map>
#include <unordered_set>
#include <random>
#include <stdexcept>

#include "alock/baselines.hpp"
#include "alock/memory.hpp"

namespace alock::sim {

const char* to_string(SimAlgo a) {
  switch (a) {
    case SimAlgo::kAlock: return "alock";
    case SimAlgo::kSpinlock: return "spinlock";
    case SimAlgo::kMcs: return "mcs";
  }
  return "?";
}

bool algo_from_string(std::string_view s, SimAlgo& out) {
  if (s == "alock") out = SimAlgo::kAlock;
  else if (s == "spinlock") out = SimAlgo::kSpinlock;
  else if (s == "mcs") out = SimAlgo::kMcs;
  else return false;
  return true;
}

void validate(const WorkloadSpec& w, const LatencyModel& m) {
  if (w.nodes < 1 || w.nodes > RdmaPtr::kMaxNodes)
    throw std::invalid_argument("nodes must be in 1.." +
                                std::to_string(RdmaPtr::kMaxNodes));
  if (w.lock_count < w.nodes)
    throw std::invalid_argument("need at least one lock per node");
  if (w.locality_pct > 100)
    throw std::invalid_argument("locality_pct must be in 0..100");
  if (m.local_op_cost < 1 || m.remote_op_cost < 1 || m.loopback_op_cost < 1)
    throw std::invalid_argument("op costs must be at least 1");
  if (m.remote_op_cost < m.local_op_cost)
    throw std::invalid_argument("remote cost must not undercut local cost");
  if (m.nic_capacity < 1)
    throw std::invalid_argument("nic capacity must be at least 1");
  if (m.conn_divisor < 1)
    throw std::invalid_argument("connection divisor must be at least 1");
  if (w.op_count == 0 && w.max_time == 0)
    throw std::invalid_argument("need an op_count or max_time stop condition");
}

namespace {

// A thread's standing state for one lock, created on first use.
struct AlockSlot {
  LockHandle h;
  std::optional<AcquireOp> acq;
  std::optional<ReleaseOp> rel;
};
struct McsSlot {
  McsHandle h;
  std::optional<McsAcquireOp> acq;
  std::optional<McsReleaseOp> rel;
};
struct SpinSlot {
  std::optional<SpinAcquireOp> acq;
  std::optional<SpinReleaseOp> rel;
};

enum class ThreadPhase : uint8_t { kAcquire, kHold, kRelease };

struct Thread {
  ActorId actor = 0;
  uint32_t node = 0;
  std::mt19937_64 rng;
  ThreadPhase phase = ThreadPhase::kAcquire;
  uint32_t lock = 0;         // current target
  uint64_t op_start = 0;     // when the current pick was made
  bool choosing = true;      // needs a fresh pick at its next event
  // previous emitted step, for spotting no-progress spin rounds
  uint64_t prev_target = 0;
  uint64_t prev_value = 0;
  bool prev_was_read = false;
};

struct Event {
  uint64_t time;
  uint32_t tid;
  uint64_t seq;
  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (tid != o.tid) return tid > o.tid;
    return seq > o.seq;
  }
};

class Simulation {
 public:
  Simulation(const WorkloadSpec& w, const LatencyModel& m, SimAlgo algo,
             BudgetPolicy pol)
      : w_(w), model_(m), algo_(algo), pol_(pol), mem_(w.nodes) {
    mem_.set_observer([this](const MemStep& s) { last_ = s; have_last_ = true; });
    locks_.reserve(w_.lock_count);
    for (uint32_t i = 0; i < w_.lock_count; ++i) {
      uint32_t node = i % w_.nodes;
      switch (algo_) {
        case SimAlgo::kAlock: locks_.push_back(alloc_lock(mem_, node)); break;
        case SimAlgo::kSpinlock: locks_.push_back(alloc_spinlock(mem_, node)); break;
        case SimAlgo::kMcs: locks_.push_back(alloc_mcs(mem_, node)); break;
      }
      if (algo_ == SimAlgo::kAlock)
        victim_addrs_.insert(victim_field(locks_.back()).raw());
    }
    uint32_t nthreads = w_.nodes * w_.threads_per_node;
    threads_.resize(nthreads);
    nic_.assign(w_.nodes, {});
    conns_.assign(w_.nodes, {});
    for (uint32_t t = 0; t < nthreads; ++t) {
      Thread& th = threads_[t];
      th.node = t / w_.threads_per_node;
      th.actor = mem_.add_actor(th.node);
      th.rng.seed(w_.seed + uint64_t{0x9E3779B97F4A7C15} * (t + 1));
    }
    switch (algo_) {
      case SimAlgo::kAlock:
        alock_.resize(uint64_t{nthreads} * w_.lock_count);
        break;
      case SimAlgo::kMcs:
        mcs_.resize(uint64_t{nthreads} * w_.lock_count);
        break;
      case SimAlgo::kSpinlock:
        spin_.resize(uint64_t{nthreads} * w_.lock_count);
        break;
    }
    metrics_.busy.assign(nthreads, 0);
    metrics_.wait.assign(nthreads, 0);
  }

  RunMetrics take() {
    for (uint32_t t = 0; t < threads_.size(); ++t) push(0, t);
    while (!queue_.empty()) {
      Event e = queue_.top();
      if (w_.max_time != 0 && e.time > w_.max_time) break;
      if (w_.op_count != 0 && metrics_.completed_ops >= w_.op_count) break;
      queue_.pop();
      fire(e);
    }
    finish();
    return std::move(metrics_);
  }

 private:
  void push(uint64_t time, uint32_t tid) { queue_.push(Event{time, tid, seq_++}); }

  // One remote-class NIC transaction by `actor` against node `nic`: evict
  // finished in-flight ops and stale connection contexts, account the new
  // op and the issuer's connection, and return the congested duration.
  uint64_t nic_price(uint64_t now, uint32_t nic, uint64_t base, ActorId actor) {
    metrics_.remote_steps++;
    auto& inflight = nic_[nic];
    while (!inflight.empty() && inflight.top() <= now) inflight.pop();
    auto& conns = conns_[nic];
    while (!conns.expiry.empty() && conns.expiry.top().first <= now) {
      auto [when, a] = conns.expiry.top();
      conns.expiry.pop();
      auto it = conns.active.find(a);
      if (it != conns.active.end() && it->second == when) conns.active.erase(it);
    }
    conns.active[actor] = now + model_.conn_window;
    conns.expiry.push({now + model_.conn_window, actor});
    uint64_t pressure =
        (conns.active.size() - 1) / model_.conn_divisor;  // beyond the issuer
    uint64_t d = model_.charge(base, inflight.size() + 1 + pressure);
    inflight.push(now + d);
    return d;
  }

  // Duration of the step the observer just saw, with NIC accounting for
  // remote-class steps (loopback included) charged at the target's NIC.
  uint64_t price(uint64_t now) {
    if (last_.cls == AccessClass::kLocal) {
      metrics_.local_steps++;
      return model_.local_op_cost;
    }
    uint32_t nic = last_.target.node();
    uint64_t base = mem_.actor_node(last_.actor) == nic ? model_.loopback_op_cost
                                                        : model_.remote_op_cost;
    return nic_price(now, nic, base, last_.actor);
  }

  // A refused step is a CAS attempt that found the word's atomic pipeline
  // busy.  The local CAS path commits in one step and never refuses, so
  // every refusal is a remote-class attempt against the lock word — and the
  // bounced attempt still crossed the NIC, so it pays the congested remote
  // price (charged as wait) before the thread can try again.
  uint64_t bounce_price(uint64_t now, uint32_t tid) {
    Thread& th = threads_[tid];
    RdmaPtr word = locks_[th.lock];
    if (algo_ == SimAlgo::kAlock) {
      const LockHandle& h = alock_[slot(tid, th.lock)].h;
      word = tail_field(h.lock, h.cohort);
    }
    uint32_t nic = word.node();
    uint64_t base = th.node == nic ? model_.loopback_op_cost
                                   : model_.remote_op_cost;
    return nic_price(now, nic, base, th.actor);
  }

  void pick_lock(Thread& th, uint64_t now) {
    bool local = w_.nodes == 1 ||
                 th.rng() % 100 < w_.locality_pct;
    for (;;) {
      uint32_t i = static_cast<uint32_t>(th.rng() % w_.lock_count);
      if ((i % w_.nodes == th.node) == local) {
        th.lock = i;
        break;
      }
    }
    th.op_start = now;
    th.choosing = false;
  }

  // One thread action per event: exactly one memory step, one blocked retry,
  // or the critical-section hold.
  void fire(const Event& e) {
    Thread& th = threads_[e.tid];
    const uint64_t now = e.time;
    if (th.choosing) pick_lock(th, now);

    if (th.phase == ThreadPhase::kHold) {
      metrics_.busy[e.tid] += w_.cs_cost;
      th.phase = ThreadPhase::kRelease;
      open_release(e.tid);
      push(now + w_.cs_cost, e.tid);
      return;
    }

    have_last_ = false;
    bool stepped = th.phase == ThreadPhase::kAcquire ? step_acquire(e.tid)
                                                     : step_release(e.tid);
    if (!stepped) {  // bounced off another in-flight atomic on the lock word
      uint64_t d = bounce_price(now, e.tid);
      metrics_.wait[e.tid] += d;
      push(now + d, e.tid);
      return;
    }
    if (!have_last_)
      throw std::logic_error("sim: a machine step emitted no memory access");
    if (last_.kind == StepKind::kWrite && is_victim_word(last_.target)) {
      const LockHandle& h = alock_[slot(e.tid, th.lock)].h;
      bool exhausted = th.prev_was_read &&
                       th.prev_target == h.desc.plus(DescLayout::kBudget).raw() &&
                       th.prev_value == budget_word(0);
      if (mem_.actor_node(last_.actor) == last_.target.node()) {
        metrics_.victim_writes_local++;
        if (exhausted) metrics_.budget_reacquires_local++;
      } else {
        metrics_.victim_writes_remote++;
        if (exhausted) metrics_.budget_reacquires_remote++;
      }
    }
    uint64_t d = price(now);
    metrics_.busy[e.tid] += d;

    // an unchanged poll earns a backoff before this thread's next step
    bool is_read =
        last_.kind == StepKind::kRead || last_.kind == StepKind::kCasRead;
    uint64_t gap = 0;
    if (is_read && th.prev_was_read && th.prev_target == last_.target.raw() &&
        th.prev_value == last_.value) {
      gap = model_.poll_backoff;
      metrics_.wait[e.tid] += gap;
    }
    th.prev_was_read = is_read;
    th.prev_target = last_.target.raw();
    th.prev_value = last_.value;

    if (th.phase == ThreadPhase::kAcquire && acquire_done(e.tid)) {
      close_acquire(e.tid);
      th.phase = ThreadPhase::kHold;
    } else if (th.phase == ThreadPhase::kRelease && release_done(e.tid)) {
      close_release(e.tid);
      th.phase = ThreadPhase::kAcquire;
      th.choosing = true;
      metrics_.completed_ops++;
      metrics_.samples.push_back(now + d - th.op_start);
      metrics_.simulated_time = std::max(metrics_.simulated_time, now + d);
      if (w_.op_count != 0 && metrics_.completed_ops >= w_.op_count) return;
    }
    push(now + d + gap, e.tid);
  }

  // --- per-algorithm plumbing ----------------------------------------------

  uint64_t slot(uint32_t tid, uint32_t lock) const {
    return uint64_t{tid} * w_.lock_count + lock;
  }

  bool is_victim_word(RdmaPtr p) const {
    return algo_ == SimAlgo::kAlock && victim_addrs_.count(p.raw()) != 0;
  }

  bool step_acquire(uint32_t tid) {
    Thread& th = threads_[tid];
    switch (algo_) {
      case SimAlgo::kAlock: {
        AlockSlot& s = alock_[slot(tid, th.lock)];
        if (!s.acq) {
          if (s.h.desc.null()) s.h = make_handle(mem_, th.actor, locks_[th.lock]);
          s.acq.emplace(mem_, s.h, pol_);
        }
        return s.acq->step();
      }
      case SimAlgo::kMcs: {
        McsSlot& s = mcs_[slot(tid, th.lock)];
        if (!s.acq) {
          if (s.h.desc.null())
            s.h = make_mcs_handle(mem_, th.actor, locks_[th.lock]);
          s.acq.emplace(mem_, s.h);
        }
        return s.acq->step();
      }
      case SimAlgo::kSpinlock: {
        SpinSlot& s = spin_[slot(tid, th.lock)];
        if (!s.acq) s.acq.emplace(mem_, th.actor, locks_[th.lock]);
        return s.acq->step();
      }
    }
    return false;
  }

  bool acquire_done(uint32_t tid) {
    Thread& th = threads_[tid];
    switch (algo_) {
      case SimAlgo::kAlock: return alock_[slot(tid, th.lock)].acq->done();
      case SimAlgo::kMcs: return mcs_[slot(tid, th.lock)].acq->done();
      case SimAlgo::kSpinlock: return spin_[slot(tid, th.lock)].acq->done();
    }
    return false;
  }

  void close_acquire(uint32_t tid) {
    Thread& th = threads_[tid];
    switch (algo_) {
      case SimAlgo::kAlock: alock_[slot(tid, th.lock)].acq.reset(); break;
      case SimAlgo::kMcs: mcs_[slot(tid, th.lock)].acq.reset(); break;
      case SimAlgo::kSpinlock: spin_[slot(tid, th.lock)].acq.reset(); break;
    }
  }

  void open_release(uint32_t tid) {
    Thread& th = threads_[tid];
    switch (algo_) {
      case SimAlgo::kAlock: {
        AlockSlot& s = alock_[slot(tid, th.lock)];
        s.rel.emplace(mem_, s.h);
        break;
      }
      case SimAlgo::kMcs: {
        McsSlot& s = mcs_[slot(tid, th.lock)];
        s.rel.emplace(mem_, s.h);
        break;
      }
      case SimAlgo::kSpinlock: {
        SpinSlot& s = spin_[slot(tid, th.lock)];
        s.rel.emplace(mem_, th.actor, locks_[th.lock]);
        break;
      }
    }
  }

  bool step_release(uint32_t tid) {
    Thread& th = threads_[tid];
    switch (algo_) {
      case SimAlgo::kAlock: return alock_[slot(tid, th.lock)].rel->step();
      case SimAlgo::kMcs: return mcs_[slot(tid, th.lock)].rel->step();
      case SimAlgo::kSpinlock: return spin_[slot(tid, th.lock)].rel->step();
    }
    return false;
  }

  bool release_done(uint32_t tid) {
    Thread& th = threads_[tid];
    switch (algo_) {
      case SimAlgo::kAlock: return alock_[slot(tid, th.lock)].rel->done();
      case SimAlgo::kMcs: return mcs_[slot(tid, th.lock)].rel->done();
      case SimAlgo::kSpinlock: return spin_[slot(tid, th.lock)].rel->done();
    }
    return false;
  }

  void close_release(uint32_t tid) {
    Thread& th = threads_[tid];
    switch (algo_) {
      case SimAlgo::kAlock: alock_[slot(tid, th.lock)].rel.reset(); break;
      case SimAlgo::kMcs: mcs_[slot(tid, th.lock)].rel.reset(); break;
      case SimAlgo::kSpinlock: spin_[slot(tid, th.lock)].rel.reset(); break;
    }
  }

  void finish() {
    if (metrics_.completed_ops > 0 && metrics_.simulated_time > 0)
      metrics_.throughput = static_cast<double>(metrics_.completed_ops) /
                            static_cast<double>(metrics_.simulated_time);
    std::vector<uint64_t> sorted = metrics_.samples;
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double q) -> uint64_t {
      if (sorted.empty()) return 0;
      size_t i = static_cast<size_t>(q * static_cast<double>(sorted.size() - 1));
      return sorted[i];
    };
    metrics_.p50 = quantile(0.50);
    metrics_.p99 = quantile(0.99);
    metrics_.p999 = quantile(0.999);
  }

  WorkloadSpec w_;
  LatencyModel model_;
  SimAlgo algo_;
  BudgetPolicy pol_;
  Memory mem_;
  std::vector<RdmaPtr> locks_;
  std::unordered_set<uint64_t> victim_addrs_;
  std::vector<Thread> threads_;
  std::vector<AlockSlot> alock_;
  std::vector<McsSlot> mcs_;
  std::vector<SpinSlot> spin_;
  // per node: completion times of in-flight NIC operations
  std::vector<std::priority_queue<uint64_t, std::vector<uint64_t>,
                                  std::greater<uint64_t>>>
      nic_;
  // per node: connection contexts held by recently-active remote actors
  struct Connections {
    std::unordered_map<ActorId, uint64_t> active;  // actor -> expiry
    std::priority_queue<std::pair<uint64_t, ActorId>,
                        std::vector<std::pair<uint64_t, ActorId>>,
                        std::greater<std::pair<uint64_t, ActorId>>>
        expiry;
  };
  std::vector<Connections> conns_;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
  uint64_t seq_ = 0;
  MemStep last_{};
  bool have_last_ = false;
  RunMetrics metrics_;
};

}  // namespace

RunMetrics run(const WorkloadSpec& w, const LatencyModel& m, SimAlgo algo,
               BudgetPolicy pol) {
  validate(w, m);
  if (algo == SimAlgo::kAlock && !pol.valid())
    throw std::invalid_argument("budgets must be at least 1");
  if (w.threads_per_node == 0) return RunMetrics{};
  Simulation s(w, m, algo, pol);
  return s.take();
}

std::string csv_header() {
  return "algo,nodes,threads,locks,locality,budget_l,budget_r,throughput,"
         "p50,p99,p999,remote_steps,local_steps";
}

std::string csv_row(const WorkloadSpec& w, SimAlgo algo, BudgetPolicy pol,
                    const RunMetrics& r) {
  int64_t bl = algo == SimAlgo::kAlock ? pol.local : 0;
  int64_t br = algo == SimAlgo::kAlock ? pol.remote : 0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%s,%u,%u,%u,%u,%" PRId64 ",%" PRId64 ",%.6f,%" PRIu64
                ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64,
                to_string(algo), w.nodes, w.nodes * w.threads_per_node,
                w.lock_count, w.locality_pct, bl, br, r.throughput, r.p50,
                r.p99, r.p999, r.remote_steps, r.local_steps);
  return buf;
}

std::vector<std::pair<uint64_t, double>> latency_cdf(const RunMetrics& r) {
  std::vector<std::pair<uint64_t, double>> out;
  if (r.samples.empty()) return out;
  std::vector<uint64_t> sorted = r.samples;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    out.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

std::vector<SweepCell> budget_sweep(const WorkloadSpec& base,
                                    const LatencyModel& m,
                                    const std::vector<int64_t>& local_budgets,
                                    const std::vector<int64_t>& remote_budgets) {
  static constexpr uint32_t kLocalities[3] = {95, 90, 85};
  bool baseline_in_grid = false;
  for (int64_t l : local_budgets)
    for (int64_t r : remote_budgets)
      baseline_in_grid |= l == 5 && r == 5;
  if (!baseline_in_grid)
    throw std::invalid_argument("sweep grid must include the (5,5) baseline");

  std::vector<SweepCell> cells;
  double baseline[3] = {};
  for (int64_t l : local_budgets) {
    for (int64_t r : remote_budgets) {
      SweepCell c;
      c.local = l;
      c.remote = r;
      for (int i = 0; i < 3; ++i) {
        WorkloadSpec w = base;
        w.locality_pct = kLocalities[i];
        // identical seeds across cells: every cell sees the same workload
        // randomness, so the ratio isolates the budget policy
        w.seed = base.seed + i;
        RunMetrics rm = run(w, m, SimAlgo::kAlock, BudgetPolicy{l, r});
        c.throughput[i] = rm.throughput;
      }
      if (l == 5 && r == 5)
        for (int i = 0; i < 3; ++i) baseline[i] = c.throughput[i];
      cells.push_back(c);
    }
  }
  for (SweepCell& c : cells) {
    double acc = 0;
    for (int i = 0; i < 3; ++i) acc += c.throughput[i] / baseline[i];
    c.ratio = acc / 3.0;
  }
  return cells;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::string out = "budget_l,budget_r,speedup_vs_5_5\n";
  char buf[128];
  for (const SweepCell& c : cells) {
    std::snprintf(buf, sizeof(buf), "%" PRId64 ",%" PRId64 ",%.6f\n", c.local,
                  c.remote, c.ratio);
    out += buf;
  }
  return out;
}

}  // namespace alock::sim

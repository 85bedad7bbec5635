#include "alock/bisim.hpp"

#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "alock/alock.hpp"
#include "alock/memory.hpp"

namespace alock {
namespace {

using model::AlockModel;

int slot_of(int pid) { return pid % 2 + 1; }
Cohort cohort_of_slot(int s) {
  return s == 1 ? Cohort::kLocal : Cohort::kRemote;
}

// One driven process: its standing handle plus whichever operation machine
// is currently open (at most one; none while in the request loop).
struct Proc {
  LockHandle h;
  std::optional<AcquireOp> acq;
  std::optional<ReleaseOp> rel;
};

class Lockstep {
 public:
  Lockstep(const BisimConfig& cfg, int initial_victim, BisimReport& report,
           uint64_t schedule_index)
      : model_(model_config(cfg)),
        mem_(2),
        np_(cfg.num_processes),
        report_(report),
        schedule_(schedule_index),
        procs_(static_cast<size_t>(cfg.num_processes) + 1) {
    lock_ = alloc_lock(mem_, 0);
    for (int pid = 1; pid <= np_; ++pid) {
      ActorId a = mem_.add_actor(slot_of(pid) == 1 ? 0u : 1u);
      procs_[pid].h = make_handle(mem_, a, lock_);
      if (procs_[pid].h.cohort != cohort_of_slot(slot_of(pid)))
        throw std::logic_error("bisim: placement did not produce the mapped cohort");
      // the checker's idle budget is below zero; fresh descriptors are zeroed
      mem_.poke(procs_[pid].h.desc.plus(DescLayout::kBudget), budget_word(-1));
    }
    for (const std::string& s : model_.initial_states())
      if (model_.decode(s).victim == initial_victim) state_ = s;
    if (state_.empty())
      throw std::logic_error("bisim: no initial state for requested victim");
    mem_.poke(victim_field(lock_),
              victim_word(cohort_of_slot(slot_of(initial_victim))));
    pol_ = BudgetPolicy{cfg.budget, cfg.budget};
  }

  // False once a divergence has been recorded (the schedule is abandoned —
  // everything after the first disagreement would be noise).
  bool ok() const { return ok_; }

  bool model_enabled(int pid) {
    std::string nxt;
    uint8_t lab = 0;
    return model_.step(state_, pid, nxt, lab);
  }

  bool core_enabled(int pid) const {
    const Proc& p = procs_[pid];
    if (p.acq) return p.acq->label_enabled();
    if (p.rel) return p.rel->label_enabled();
    return true;  // request-loop labels always fire
  }

  void check_enabledness() {
    for (int pid = 1; pid <= np_ && ok_; ++pid) {
      bool me = model_enabled(pid);
      bool ce = core_enabled(pid);
      if (me != ce)
        diverge(pid, "enabledness", me ? "model steps, lock blocked"
                                       : "lock steps, model blocked");
    }
  }

  void fire(int pid) {
    std::string nxt;
    uint8_t lab8 = 0;
    if (!model_.step(state_, pid, nxt, lab8)) {
      diverge(pid, "schedule", "fired a disabled process");
      return;
    }
    const Label lab = static_cast<Label>(lab8);
    report_.label_fired[lab8]++;
    Proc& p = procs_[pid];
    if (p.acq) {
      if (p.acq->label() != lab) {
        diverge(pid, "acquire label", std::string(to_string(p.acq->label())) +
                                          " vs model " + to_string(lab));
        return;
      }
      p.acq->advance_label();
      if (p.acq->done()) p.acq.reset();
    } else if (p.rel) {
      if (p.rel->label() != lab) {
        diverge(pid, "release label", std::string(to_string(p.rel->label())) +
                                          " vs model " + to_string(lab));
        return;
      }
      p.rel->advance_label();
      if (p.rel->done()) p.rel.reset();
    } else if (lab == Label::kEnter) {
      p.acq.emplace(mem_, p.h, pol_);
    } else if (lab == Label::kExit) {
      p.rel.emplace(mem_, p.h);
    } else if (lab != Label::kP1 && lab != Label::kNcs && lab != Label::kCs) {
      diverge(pid, "request loop", std::string("model fired ") + to_string(lab) +
                                       " with no operation open");
      return;
    }
    state_ = nxt;
    report_.steps_driven++;
    compare(pid, lab);
  }

 private:
  static model::CheckerConfig model_config(const BisimConfig& cfg) {
    model::CheckerConfig mc;
    mc.num_processes = cfg.num_processes;
    mc.initial_budget = cfg.budget;
    mc.algo = model::Algo::kAlock;
    mc.mutation = cfg.model_mutation;
    model::validate(mc);
    return mc;
  }

  // Everything both sides expose, after every label: the victim word (pid in
  // the checker, cohort on the wire — the slot map connects them), both
  // queue tails against the cohort array, and each descriptor's budget and
  // successor words plus the passed flag.
  void compare(int pid, Label lab) {
    if (!ok_) return;
    AlockModel::View v = model_.decode(state_);

    uint64_t cv = mem_.peek(victim_field(lock_));
    uint64_t ev = victim_word(cohort_of_slot(slot_of(v.victim)));
    if (cv != ev) {
      diverge(pid, "victim", "word " + std::to_string(cv) + " vs model slot " +
                                 std::to_string(slot_of(v.victim)));
      return;
    }
    for (int s : {1, 2}) {
      uint64_t tail = mem_.peek(tail_field(lock_, cohort_of_slot(s)));
      int occ = v.cohort[s];
      uint64_t want = occ == 0 ? 0 : procs_[occ].h.desc.raw();
      if (tail != want) {
        diverge(pid, "tail", "slot " + std::to_string(s) + " holds " +
                                 std::to_string(tail) + ", model says pid " +
                                 std::to_string(occ));
        return;
      }
    }
    for (int q = 1; q <= np_; ++q) {
      const LockHandle& h = procs_[q].h;
      int64_t cb = budget_value(mem_.peek(h.desc.plus(DescLayout::kBudget)));
      if (cb != v.budget[q]) {
        diverge(pid, "budget", "pid " + std::to_string(q) + ": descriptor " +
                                   std::to_string(cb) + " vs model " +
                                   std::to_string(v.budget[q]));
        return;
      }
      uint64_t cn = mem_.peek(h.desc.plus(DescLayout::kNext));
      uint64_t en = v.next[q] == 0 ? 0 : procs_[v.next[q]].h.desc.raw();
      if (cn != en) {
        diverge(pid, "next", "pid " + std::to_string(q) + ": descriptor " +
                                 std::to_string(cn) + " vs model pid " +
                                 std::to_string(v.next[q]));
        return;
      }
      if (h.passed != (v.passed[q] != 0)) {
        diverge(pid, "passed", "pid " + std::to_string(q) + ": handle " +
                                   (h.passed ? "true" : "false") + " vs model " +
                                   std::to_string(v.passed[q]));
        return;
      }
    }
    (void)lab;
  }

  void diverge(int pid, const char* what, const std::string& detail) {
    ok_ = false;
    report_.divergences++;
    if (report_.first_divergence.empty()) {
      std::ostringstream os;
      os << "schedule " << schedule_ << " step " << report_.steps_driven
         << " pid " << pid << " [" << what << "]: " << detail;
      report_.first_divergence = os.str();
    }
  }

  AlockModel model_;
  Memory mem_;
  int np_;
  BisimReport& report_;
  uint64_t schedule_;
  std::vector<Proc> procs_;
  RdmaPtr lock_;
  BudgetPolicy pol_;
  std::string state_;
  bool ok_ = true;
};

}  // namespace

BisimReport run_bisim(const BisimConfig& cfg) {
  BisimReport report;
  for (uint64_t i = 0; i < cfg.schedules; ++i) {
    // both victim initialisations get driven; the model explores both too
    Lockstep ls(cfg, 1 + static_cast<int>(i % 2), report, i);
    std::mt19937_64 rng(cfg.seed + i);
    for (uint64_t k = 0; k < cfg.steps_per_schedule && ls.ok(); ++k) {
      ls.check_enabledness();
      if (!ls.ok()) break;
      std::vector<int> enabled;
      for (int pid = 1; pid <= cfg.num_processes; ++pid)
        if (ls.model_enabled(pid)) enabled.push_back(pid);
      if (enabled.empty()) break;  // cannot happen: the request loop spins
      std::uniform_int_distribution<size_t> pick(0, enabled.size() - 1);
      ls.fire(enabled[pick(rng)]);
    }
    report.schedules_run++;
  }
  return report;
}

}  // namespace alock

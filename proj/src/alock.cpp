#include "alock/alock.hpp"

#include <cassert>
#include <cinttypes>
#include <cstdio>

namespace alock {

const char* to_string(Label l) {
  switch (l) {
    case Label::kP1: return "p1";
    case Label::kNcs: return "ncs";
    case Label::kEnter: return "enter";
    case Label::kP2: return "p2";
    case Label::kCs: return "cs";
    case Label::kExit: return "exit";
    case Label::kC1: return "c1";
    case Label::kSwap: return "swap";
    case Label::kCwait: return "cwait";
    case Label::kC2: return "c2";
    case Label::kC3: return "c3";
    case Label::kC4: return "c4";
    case Label::kC5: return "c5";
    case Label::kC6: return "c6";
    case Label::kC7: return "c7";
    case Label::kC8: return "c8";
    case Label::kC9: return "c9";
    case Label::kC10: return "c10";
    case Label::kG1: return "g1";
    case Label::kGwait: return "gwait";
    case Label::kG2: return "g2";
    case Label::kG3: return "g3";
    case Label::kG4: return "g4";
    case Label::kCas: return "cas";
    case Label::kR1: return "r1";
    case Label::kR2: return "r2";
    case Label::kR3: return "r3";
  }
  return "?";
}

RdmaPtr alloc_lock(Memory& m, uint32_t node) {
  return m.alloc(node, LockLayout::kSize, 64);
}

LockHandle make_handle(Memory& m, ActorId a, RdmaPtr lock) {
  Cohort c = classify(m.actor_node(a), lock) == AccessClass::kLocal
                 ? Cohort::kLocal
                 : Cohort::kRemote;
  RdmaPtr d = m.alloc(m.actor_node(a), DescLayout::kSize, 64);
  return LockHandle{a, lock, c, d, false};
}

// --- acquire -----------------------------------------------------------------

AcquireOp::AcquireOp(Memory& m, LockHandle& h, BudgetPolicy pol)
    : mem_(m), h_(h), pol_(pol) {
  assert(pol_.valid());
}

bool AcquireOp::control(Phase p) const {
  switch (p) {
    case Phase::kPostSwap:
    case Phase::kCallGlobal:
    case Phase::kSetPassed:
    case Phase::kClearPassed:
    case Phase::kQueueRet:
    case Phase::kP2:
    case Phase::kGwait:
    case Phase::kGlobalRet:
      return true;
    default:
      return false;
  }
}

Label AcquireOp::label() const {
  switch (phase_) {
    case Phase::kInitBudget:
    case Phase::kInitNext: return Label::kC1;
    case Phase::kSwapCasLocal:
    case Phase::kSwapCasRead:
    case Phase::kSwapCasWrite: return Label::kSwap;
    case Phase::kPostSwap: return Label::kCwait;
    case Phase::kLinkPred: return Label::kC2;
    case Phase::kSpinBudget: return Label::kC3;
    case Phase::kCheckZero: return Label::kC4;
    case Phase::kCallGlobal: return Label::kC5;
    case Phase::kTopUpReacquire: return Label::kC6;
    case Phase::kSetPassed: return Label::kC7;
    case Phase::kFreshTopUp: return Label::kC8;
    case Phase::kClearPassed: return Label::kC9;
    case Phase::kQueueRet: return Label::kC10;
    case Phase::kP2: return Label::kP2;
    case Phase::kVictimWrite: return Label::kG1;
    case Phase::kGwait: return Label::kGwait;
    case Phase::kReadOtherTail: return Label::kG2;
    case Phase::kReadVictim: return Label::kG3;
    case Phase::kGlobalRet: return Label::kG4;
    case Phase::kDone: return Label::kCs;
  }
  return Label::kCs;
}

bool AcquireOp::label_enabled() const {
  switch (phase_) {
    case Phase::kSpinBudget:
      return budget_value(mem_.peek(h_.desc.plus(DescLayout::kBudget))) >= 0;
    case Phase::kSwapCasRead:
      return mem_.cas_ready(h_.actor, tail_field(h_.lock, h_.cohort));
    case Phase::kDone:
      return false;
    default:
      return true;
  }
}

StepResult AcquireOp::micro() {
  RdmaPtr tail = tail_field(h_.lock, h_.cohort);
  RdmaPtr budget_f = h_.desc.plus(DescLayout::kBudget);
  switch (phase_) {
    case Phase::kInitBudget:
      // Fresh request: park the budget below zero so a later hand-off can be
      // told apart from leftovers of the previous round.
      mem_.write(h_.actor, budget_f, budget_word(-1));
      phase_ = Phase::kInitNext;
      return StepResult::kStepped;
    case Phase::kInitNext:
      mem_.write(h_.actor, h_.desc.plus(DescLayout::kNext), 0);
      swap_expected_ = 0;
      phase_ = classify(mem_.actor_node(h_.actor), tail) == AccessClass::kLocal
                   ? Phase::kSwapCasLocal
                   : Phase::kSwapCasRead;
      return StepResult::kStepped;

    // Enqueue: swap this descriptor into the cohort tail via CAS, re-arming
    // the expected value from whatever the failed attempt observed.
    case Phase::kSwapCasLocal: {
      uint64_t old = mem_.cas(h_.actor, tail, swap_expected_, h_.desc.raw());
      if (old == swap_expected_) {
        pred_ = RdmaPtr::from_raw(old);
        phase_ = Phase::kPostSwap;
      } else {
        swap_expected_ = old;
      }
      return StepResult::kStepped;
    }
    case Phase::kSwapCasRead:
      if (!mem_.cas_ready(h_.actor, tail)) return StepResult::kBlocked;
      swap_observed_ = mem_.cas_read(h_.actor, tail, swap_expected_);
      swap_pass_ = swap_observed_ == swap_expected_;
      phase_ = Phase::kSwapCasWrite;
      return StepResult::kStepped;
    case Phase::kSwapCasWrite:
      mem_.cas_write(h_.actor, tail, h_.desc.raw());
      if (swap_pass_) {
        pred_ = RdmaPtr::from_raw(swap_expected_);
        phase_ = Phase::kPostSwap;
      } else {
        swap_expected_ = swap_observed_;
        phase_ = Phase::kSwapCasRead;
      }
      return StepResult::kStepped;

    case Phase::kPostSwap:
      phase_ = pred_.null() ? Phase::kFreshTopUp : Phase::kLinkPred;
      return StepResult::kMoved;

    // Queued behind a predecessor: link in, then spin on the budget word of
    // this request's own descriptor until the hand-off lands.
    case Phase::kLinkPred:
      mem_.write(h_.actor, pred_.plus(DescLayout::kNext), h_.desc.raw());
      phase_ = Phase::kSpinBudget;
      return StepResult::kStepped;
    case Phase::kSpinBudget: {
      int64_t b = budget_value(mem_.read(h_.actor, budget_f));
      if (b >= 0) phase_ = Phase::kCheckZero;
      return StepResult::kStepped;
    }
    case Phase::kCheckZero: {
      int64_t b = budget_value(mem_.read(h_.actor, budget_f));
      phase_ = b == 0 ? Phase::kCallGlobal : Phase::kSetPassed;
      return StepResult::kStepped;
    }

    // Hand-off arrived with the allowance used up: this side must win the
    // global tie-break again before it may keep the lock.
    case Phase::kCallGlobal:
      g_from_queue_ = true;
      phase_ = Phase::kVictimWrite;
      return StepResult::kMoved;
    case Phase::kTopUpReacquire:
      mem_.write(h_.actor, budget_f, budget_word(pol_.initial(h_.cohort)));
      phase_ = Phase::kSetPassed;
      return StepResult::kStepped;
    case Phase::kSetPassed:
      h_.passed = true;
      phase_ = Phase::kQueueRet;
      return StepResult::kMoved;

    // Empty queue: this request leads its cohort and will run the tie-break
    // after the queue phase returns.
    case Phase::kFreshTopUp:
      mem_.write(h_.actor, budget_f, budget_word(pol_.initial(h_.cohort)));
      phase_ = Phase::kClearPassed;
      return StepResult::kStepped;
    case Phase::kClearPassed:
      h_.passed = false;
      phase_ = Phase::kQueueRet;
      return StepResult::kMoved;

    case Phase::kQueueRet:
      phase_ = Phase::kP2;
      return StepResult::kMoved;
    case Phase::kP2:
      if (h_.passed) {
        phase_ = Phase::kDone;
      } else {
        g_from_queue_ = false;
        phase_ = Phase::kVictimWrite;
      }
      return StepResult::kMoved;

    // Two-party tie-break between the cohorts: raise own claim by yielding
    // (victim := own side), then wait until the other side's queue is empty
    // or it has yielded more recently.  The other tail is read first, so the
    // victim word is not touched at all on an uncontended pass.
    case Phase::kVictimWrite:
      mem_.write(h_.actor, victim_field(h_.lock), victim_word(h_.cohort));
      phase_ = Phase::kGwait;
      return StepResult::kStepped;
    case Phase::kGwait:
      phase_ = Phase::kReadOtherTail;
      return StepResult::kMoved;
    case Phase::kReadOtherTail: {
      uint64_t t = mem_.read(h_.actor, tail_field(h_.lock, other(h_.cohort)));
      phase_ = t == 0 ? Phase::kGlobalRet : Phase::kReadVictim;
      return StepResult::kStepped;
    }
    case Phase::kReadVictim: {
      uint64_t v = mem_.read(h_.actor, victim_field(h_.lock));
      phase_ = v != victim_word(h_.cohort) ? Phase::kGlobalRet : Phase::kGwait;
      return StepResult::kStepped;
    }
    case Phase::kGlobalRet:
      phase_ = g_from_queue_ ? Phase::kTopUpReacquire : Phase::kDone;
      return StepResult::kMoved;

    case Phase::kDone:
      return StepResult::kDone;
  }
  return StepResult::kDone;
}

bool AcquireOp::step() {
  while (!done() && control(phase_)) micro();
  if (done()) return false;
  if (micro() == StepResult::kBlocked) return false;
  while (!done() && control(phase_)) micro();
  return true;
}

bool AcquireOp::advance_label() {
  if (done()) return false;
  assert(label_enabled());
  Label start = label();
  while (!done() && label() == start) {
    if (micro() == StepResult::kBlocked) return false;
  }
  return true;
}

// --- release -----------------------------------------------------------------

ReleaseOp::ReleaseOp(Memory& m, LockHandle& h) : mem_(m), h_(h) {
  phase_ = classify(mem_.actor_node(h_.actor), tail_field(h_.lock, h_.cohort)) ==
                   AccessClass::kLocal
               ? Phase::kCasLocal
               : Phase::kCasRead;
}

bool ReleaseOp::control(Phase p) const { return p == Phase::kRet; }

Label ReleaseOp::label() const {
  switch (phase_) {
    case Phase::kCasLocal:
    case Phase::kCasRead:
    case Phase::kCasWrite: return Label::kCas;
    case Phase::kReadNext: return Label::kR1;
    case Phase::kReadBudget:
    case Phase::kWriteSucc: return Label::kR2;
    case Phase::kRet: return Label::kR3;
    case Phase::kDone: return Label::kP1;
  }
  return Label::kP1;
}

bool ReleaseOp::label_enabled() const {
  switch (phase_) {
    case Phase::kReadNext:
      return mem_.peek(h_.desc.plus(DescLayout::kNext)) != 0;
    case Phase::kCasRead:
      return mem_.cas_ready(h_.actor, tail_field(h_.lock, h_.cohort));
    case Phase::kDone:
      return false;
    default:
      return true;
  }
}

StepResult ReleaseOp::micro() {
  RdmaPtr tail = tail_field(h_.lock, h_.cohort);
  switch (phase_) {
    // One CAS attempt, no retry: either the tail still names this request
    // (nobody queued up — clear it) or a successor exists and gets the lock
    // handed over.
    case Phase::kCasLocal: {
      uint64_t old = mem_.cas(h_.actor, tail, h_.desc.raw(), 0);
      phase_ = old == h_.desc.raw() ? Phase::kRet : Phase::kReadNext;
      return StepResult::kStepped;
    }
    case Phase::kCasRead:
      if (!mem_.cas_ready(h_.actor, tail)) return StepResult::kBlocked;
      cas_observed_ = mem_.cas_read(h_.actor, tail, h_.desc.raw());
      cas_pass_ = cas_observed_ == h_.desc.raw();
      phase_ = Phase::kCasWrite;
      return StepResult::kStepped;
    case Phase::kCasWrite:
      mem_.cas_write(h_.actor, tail, 0);
      phase_ = cas_pass_ ? Phase::kRet : Phase::kReadNext;
      return StepResult::kStepped;

    // The successor may have swapped in but not linked yet; poll own next
    // until it shows up.
    case Phase::kReadNext: {
      uint64_t n = mem_.read(h_.actor, h_.desc.plus(DescLayout::kNext));
      if (n != 0) {
        succ_ = RdmaPtr::from_raw(n);
        phase_ = Phase::kReadBudget;
      }
      return StepResult::kStepped;
    }
    case Phase::kReadBudget:
      budget_ = budget_value(mem_.read(h_.actor, h_.desc.plus(DescLayout::kBudget)));
      phase_ = Phase::kWriteSucc;
      return StepResult::kStepped;
    case Phase::kWriteSucc:
      // The hand-off: the successor's budget spin ends the moment this
      // lands, with one less hand-off remaining on this side's allowance.
      mem_.write(h_.actor, succ_.plus(DescLayout::kBudget), budget_word(budget_ - 1));
      phase_ = Phase::kRet;
      return StepResult::kStepped;

    case Phase::kRet:
      phase_ = Phase::kDone;
      return StepResult::kMoved;
    case Phase::kDone:
      return StepResult::kDone;
  }
  return StepResult::kDone;
}

bool ReleaseOp::step() {
  while (!done() && control(phase_)) micro();
  if (done()) return false;
  if (micro() == StepResult::kBlocked) return false;
  while (!done() && control(phase_)) micro();
  return true;
}

bool ReleaseOp::advance_label() {
  if (done()) return false;
  assert(label_enabled());
  Label start = label();
  while (!done() && label() == start) {
    if (micro() == StepResult::kBlocked) return false;
  }
  return true;
}

// --- dumps -------------------------------------------------------------------

std::string dump_lock(const Memory& m, RdmaPtr lock) {
  char buf[160];
  uint64_t tr = m.peek(lock.plus(LockLayout::kTailRemote));
  uint64_t tl = m.peek(lock.plus(LockLayout::kTailLocal));
  uint64_t v = m.peek(victim_field(lock));
  std::snprintf(buf, sizeof buf,
                "alock addr=0x%" PRIx64 " tail_r=0x%" PRIx64 " tail_l=0x%" PRIx64
                " victim=%c",
                lock.raw(), tr, tl,
                v == victim_word(Cohort::kLocal) ? 'L' : 'R');
  return buf;
}

std::string dump_descriptor(const Memory& m, uint32_t actor, RdmaPtr desc) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "desc actor=%u budget=%" PRId64 " next=0x%" PRIx64,
                actor, budget_value(m.peek(desc.plus(DescLayout::kBudget))),
                m.peek(desc.plus(DescLayout::kNext)));
  return buf;
}

}  // namespace alock

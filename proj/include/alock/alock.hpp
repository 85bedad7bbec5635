#pragma once

#include <cstdint>
#include <string>

#include "alock/labels.hpp"
#include "alock/memory.hpp"

namespace alock {

// Which of the two queues an actor competes in, fixed by placement: actors on
// the lock's node go through the local queue, everyone else through the
// remote one.
enum class Cohort : uint8_t { kLocal = 0, kRemote = 1 };

inline Cohort other(Cohort c) {
  return c == Cohort::kLocal ? Cohort::kRemote : Cohort::kLocal;
}
inline char cohort_letter(Cohort c) { return c == Cohort::kLocal ? 'L' : 'R'; }

// How many times the lock may be handed straight to a queue successor before
// the holder side has to go back through the global tie-break.  The remote
// side gets the larger allowance because its hand-offs amortise expensive
// NIC round trips.
struct BudgetPolicy {
  int64_t local = 5;
  int64_t remote = 20;
  int64_t initial(Cohort c) const { return c == Cohort::kLocal ? local : remote; }
  bool valid() const { return local >= 1 && remote >= 1; }
};

// 64-byte lock record.  The two tail words double as the presence flags of a
// two-party tie-break (queue occupied == flag raised), with the victim word
// as its third ingredient.  Offsets are part of the wire contract.
struct LockLayout {
  static constexpr uint64_t kSize = 64;
  static constexpr uint64_t kTailRemote = 0x0;
  static constexpr uint64_t kTailLocal = 0x10;
  static constexpr uint64_t kVictim = 0x20;
};

// 64-byte queue descriptor: hand-off budget (two's complement in the word),
// then the successor pointer.
struct DescLayout {
  static constexpr uint64_t kSize = 64;
  static constexpr uint64_t kBudget = 0x0;
  static constexpr uint64_t kNext = 0x8;
};

inline RdmaPtr tail_field(RdmaPtr lock, Cohort c) {
  return lock.plus(c == Cohort::kRemote ? LockLayout::kTailRemote
                                        : LockLayout::kTailLocal);
}
inline RdmaPtr victim_field(RdmaPtr lock) { return lock.plus(LockLayout::kVictim); }
inline uint64_t victim_word(Cohort c) { return static_cast<uint64_t>(c); }

inline uint64_t budget_word(int64_t b) { return static_cast<uint64_t>(b); }
inline int64_t budget_value(uint64_t w) { return static_cast<int64_t>(w); }

// Fresh zeroed lock record: both queues empty, victim pointing at the local
// side.
RdmaPtr alloc_lock(Memory& m, uint32_t node);

// One actor's standing state against one lock.  The descriptor lives on the
// actor's own node, so its budget spin is CPU-side even for remote-cohort
// actors; it is re-initialised at the head of every acquire and reused.
struct LockHandle {
  ActorId actor = 0;
  RdmaPtr lock;
  Cohort cohort = Cohort::kLocal;
  RdmaPtr desc;
  bool passed = false;  // last acquire was handed over inside the cohort
};

LockHandle make_handle(Memory& m, ActorId a, RdmaPtr lock);

enum class StepResult : uint8_t { kStepped, kMoved, kBlocked, kDone };

// Acquire and release as step-yielding machines: every shared-memory access
// is one step() call, so the driver owns the interleaving completely.
// Public movement comes in two granularities:
//   step()           advance until exactly one memory step has been emitted
//                    (pure control transitions collapse around it);
//   advance_label()  advance until label() changes once — the granularity the
//                    transition-system checker moves at.
// Both return false when the machine is finished or cannot move (the only
// blocking point on acquire is an enqueue cas-read held back by another open
// CAS on the tail word).  label_enabled() is checker-grade enabledness: it
// additionally holds back the budget spin until the top-up arrived.
class AcquireOp {
 public:
  AcquireOp(Memory& m, LockHandle& h, BudgetPolicy pol);

  Label label() const;
  bool done() const { return phase_ == Phase::kDone; }
  bool label_enabled() const;
  bool step();
  bool advance_label();

 private:
  enum class Phase : uint8_t {
    kInitBudget, kInitNext,
    kSwapCasLocal, kSwapCasRead, kSwapCasWrite,
    kPostSwap, kLinkPred, kSpinBudget, kCheckZero,
    kCallGlobal, kTopUpReacquire, kSetPassed, kFreshTopUp, kClearPassed,
    kQueueRet, kP2,
    kVictimWrite, kGwait, kReadOtherTail, kReadVictim, kGlobalRet,
    kDone,
  };

  StepResult micro();
  bool control(Phase p) const;

  Memory& mem_;
  LockHandle& h_;
  BudgetPolicy pol_;
  Phase phase_ = Phase::kInitBudget;
  uint64_t swap_expected_ = 0;   // running expectation of the enqueue CAS
  uint64_t swap_observed_ = 0;
  bool swap_pass_ = false;
  RdmaPtr pred_;                 // predecessor descriptor after the swap
  bool g_from_queue_ = false;    // tie-break entered from the budget-0 path
};

class ReleaseOp {
 public:
  ReleaseOp(Memory& m, LockHandle& h);

  Label label() const;
  bool done() const { return phase_ == Phase::kDone; }
  bool label_enabled() const;
  bool step();
  bool advance_label();

 private:
  enum class Phase : uint8_t {
    kCasLocal, kCasRead, kCasWrite,
    kReadNext, kReadBudget, kWriteSucc,
    kRet, kDone,
  };

  StepResult micro();
  bool control(Phase p) const;

  Memory& mem_;
  LockHandle& h_;
  Phase phase_;
  bool cas_pass_ = false;
  uint64_t cas_observed_ = 0;
  RdmaPtr succ_;
  int64_t budget_ = 0;
};

// "alock addr=<hex> tail_r=<hex> tail_l=<hex> victim=<L|R>" — raw pointers in
// hex, taken outside the access model (no steps emitted).
std::string dump_lock(const Memory& m, RdmaPtr lock);
// "desc actor=<id> budget=<int> next=<hex>"
std::string dump_descriptor(const Memory& m, uint32_t actor, RdmaPtr desc);

}  // namespace alock

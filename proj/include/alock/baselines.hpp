#pragma once

#include "alock/alock.hpp"

namespace alock {

// The two competitor designs.  Both route every access through the NIC, even
// when the caller sits on the lock's node (loopback) — that is what a design
// with no CPU-side fast path does, and it is what the asymmetric design is
// measured against.

// --- competitor one: spin lock on a single remote word -----------------------
// The word holds 0 when free and actor-id+1 while held (never 0 while held).
// Acquire spins whole CAS rounds over the wire; release is one write.

RdmaPtr alloc_spinlock(Memory& m, uint32_t node);

class SpinAcquireOp {
 public:
  SpinAcquireOp(Memory& m, ActorId a, RdmaPtr lock);
  bool done() const { return phase_ == Phase::kDone; }
  bool step();
  int rounds() const { return rounds_; }  // CAS attempts so far

 private:
  enum class Phase : uint8_t { kCasRead, kCasWrite, kDone };
  Memory& mem_;
  ActorId actor_;
  RdmaPtr lock_;
  Phase phase_ = Phase::kCasRead;
  bool pass_ = false;
  int rounds_ = 0;
};

class SpinReleaseOp {
 public:
  SpinReleaseOp(Memory& m, ActorId a, RdmaPtr lock)
      : mem_(m), actor_(a), lock_(lock) {}
  bool done() const { return done_; }
  bool step();

 private:
  Memory& mem_;
  ActorId actor_;
  RdmaPtr lock_;
  bool done_ = false;
};

// --- competitor two: the classic queue lock ported onto the NIC path ---------
// One tail word; 64-byte descriptors with a go flag then a next pointer.
// Waiters spin on their own descriptor's go flag — but through loopback, so
// even that polling is NIC traffic.  Hand-off order is the enqueue order.

struct McsLayout {
  static constexpr uint64_t kLockSize = 8;  // just the tail word
  static constexpr uint64_t kDescSize = 64;
  static constexpr uint64_t kGo = 0x0;
  static constexpr uint64_t kNext = 0x8;
};

RdmaPtr alloc_mcs(Memory& m, uint32_t node);

struct McsHandle {
  ActorId actor = 0;
  RdmaPtr lock;
  RdmaPtr desc;
};

McsHandle make_mcs_handle(Memory& m, ActorId a, RdmaPtr lock);

class McsAcquireOp {
 public:
  McsAcquireOp(Memory& m, McsHandle& h);
  bool done() const { return phase_ == Phase::kDone; }
  bool step();

 private:
  enum class Phase : uint8_t {
    kInitGo, kInitNext, kCasRead, kCasWrite, kLinkPred, kSpinGo, kDone,
  };
  Memory& mem_;
  McsHandle& h_;
  Phase phase_ = Phase::kInitGo;
  uint64_t expected_ = 0;
  uint64_t observed_ = 0;
  bool pass_ = false;
  RdmaPtr pred_;
};

class McsReleaseOp {
 public:
  McsReleaseOp(Memory& m, McsHandle& h);
  bool done() const { return phase_ == Phase::kDone; }
  bool step();

 private:
  enum class Phase : uint8_t { kCasRead, kCasWrite, kReadNext, kWriteGo, kDone };
  Memory& mem_;
  McsHandle& h_;
  Phase phase_ = Phase::kCasRead;
  bool pass_ = false;
  RdmaPtr succ_;
};

}  // namespace alock

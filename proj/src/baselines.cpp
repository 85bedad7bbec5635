#include "alock/baselines.hpp"

namespace alock {

// --- spin lock ---------------------------------------------------------------

RdmaPtr alloc_spinlock(Memory& m, uint32_t node) { return m.alloc(node, 8, 8); }

SpinAcquireOp::SpinAcquireOp(Memory& m, ActorId a, RdmaPtr lock)
    : mem_(m), actor_(a), lock_(lock) {}

bool SpinAcquireOp::step() {
  switch (phase_) {
    case Phase::kCasRead: {
      if (!mem_.cas_ready(actor_, lock_)) return false;
      uint64_t old = mem_.cas_read(actor_, lock_, 0, Route::kLoopback);
      pass_ = old == 0;
      rounds_++;
      phase_ = Phase::kCasWrite;
      return true;
    }
    case Phase::kCasWrite:
      mem_.cas_write(actor_, lock_, uint64_t{actor_} + 1);
      phase_ = pass_ ? Phase::kDone : Phase::kCasRead;
      return true;
    case Phase::kDone:
      return false;
  }
  return false;
}

bool SpinReleaseOp::step() {
  if (done_) return false;
  mem_.write(actor_, lock_, 0, Route::kLoopback);
  done_ = true;
  return true;
}

// --- queue lock over loopback ------------------------------------------------

RdmaPtr alloc_mcs(Memory& m, uint32_t node) {
  return m.alloc(node, McsLayout::kLockSize, 8);
}

McsHandle make_mcs_handle(Memory& m, ActorId a, RdmaPtr lock) {
  return McsHandle{a, lock, m.alloc(m.actor_node(a), McsLayout::kDescSize, 64)};
}

McsAcquireOp::McsAcquireOp(Memory& m, McsHandle& h) : mem_(m), h_(h) {}

bool McsAcquireOp::step() {
  switch (phase_) {
    case Phase::kInitGo:
      mem_.write(h_.actor, h_.desc.plus(McsLayout::kGo), 0, Route::kLoopback);
      phase_ = Phase::kInitNext;
      return true;
    case Phase::kInitNext:
      mem_.write(h_.actor, h_.desc.plus(McsLayout::kNext), 0, Route::kLoopback);
      expected_ = 0;
      phase_ = Phase::kCasRead;
      return true;
    case Phase::kCasRead:
      if (!mem_.cas_ready(h_.actor, h_.lock)) return false;
      observed_ = mem_.cas_read(h_.actor, h_.lock, expected_, Route::kLoopback);
      pass_ = observed_ == expected_;
      phase_ = Phase::kCasWrite;
      return true;
    case Phase::kCasWrite:
      mem_.cas_write(h_.actor, h_.lock, h_.desc.raw());
      if (pass_) {
        pred_ = RdmaPtr::from_raw(expected_);
        // Empty queue: holder outright.  Otherwise link and wait for the go.
        phase_ = pred_.null() ? Phase::kDone : Phase::kLinkPred;
      } else {
        expected_ = observed_;
        phase_ = Phase::kCasRead;
      }
      return true;
    case Phase::kLinkPred:
      mem_.write(h_.actor, pred_.plus(McsLayout::kNext), h_.desc.raw(), Route::kLoopback);
      phase_ = Phase::kSpinGo;
      return true;
    case Phase::kSpinGo: {
      uint64_t go = mem_.read(h_.actor, h_.desc.plus(McsLayout::kGo), Route::kLoopback);
      if (go != 0) phase_ = Phase::kDone;
      return true;
    }
    case Phase::kDone:
      return false;
  }
  return false;
}

McsReleaseOp::McsReleaseOp(Memory& m, McsHandle& h) : mem_(m), h_(h) {}

bool McsReleaseOp::step() {
  switch (phase_) {
    case Phase::kCasRead:
      if (!mem_.cas_ready(h_.actor, h_.lock)) return false;
      pass_ = mem_.cas_read(h_.actor, h_.lock, h_.desc.raw(), Route::kLoopback) ==
              h_.desc.raw();
      phase_ = Phase::kCasWrite;
      return true;
    case Phase::kCasWrite:
      mem_.cas_write(h_.actor, h_.lock, 0);
      phase_ = pass_ ? Phase::kDone : Phase::kReadNext;
      return true;
    case Phase::kReadNext: {
      // Successor swapped in but may not be linked yet; poll until it is.
      uint64_t n = mem_.read(h_.actor, h_.desc.plus(McsLayout::kNext), Route::kLoopback);
      if (n != 0) {
        succ_ = RdmaPtr::from_raw(n);
        phase_ = Phase::kWriteGo;
      }
      return true;
    }
    case Phase::kWriteGo:
      mem_.write(h_.actor, succ_.plus(McsLayout::kGo), 1, Route::kLoopback);
      phase_ = Phase::kDone;
      return true;
    case Phase::kDone:
      return false;
  }
  return false;
}

}  // namespace alock

#include "alock/scenario.hpp"

#include <stdexcept>

#include "alock/alock.hpp"
#include "alock/memory.hpp"

namespace alock {

std::vector<std::string> scenario_names() { return {"fig2"}; }

std::string scenario_trace(const std::string& name) {
  if (name == "fig2") return walkthrough_trace();
  throw std::invalid_argument("unknown scenario: " + name);
}

namespace {

void append_state(std::string& log, const Memory& mem, RdmaPtr lock,
                  const LockHandle& t1, const LockHandle& t2, bool descs) {
  log += dump_lock(mem, lock) + "\n";
  if (descs) {
    log += dump_descriptor(mem, t1.actor, t1.desc) + "\n";
    log += dump_descriptor(mem, t2.actor, t2.desc) + "\n";
  }
}

}  // namespace

std::string walkthrough_trace() {
  Memory mem(2, 4096);
  ActorId t1 = mem.add_actor(0);  // off-node actor: every lock access remote
  ActorId t2 = mem.add_actor(1);  // co-located actor
  RdmaPtr lock = alloc_lock(mem, 1);
  LockHandle h1 = make_handle(mem, t1, lock);
  LockHandle h2 = make_handle(mem, t2, lock);
  BudgetPolicy pol;  // default allowances

  std::string log;
  mem.set_observer([&log](const MemStep& s) { log += format_step(s) + "\n"; });

  // Frame 1: the bare scene — empty queues, tie-break pointing local.
  log += "# frame 1\n";
  append_state(log, mem, lock, h1, h2, false);

  // Frame 2: both sides stage their descriptors (budget parked at -1, no
  // successor).
  log += "# frame 2\n";
  AcquireOp a1(mem, h1, pol);
  AcquireOp a2(mem, h2, pol);
  a1.step();  // budget := -1
  a1.step();  // next := 0
  a2.step();
  a2.step();
  append_state(log, mem, lock, h1, h2, true);

  // Frame 3: the remote actor swings its descriptor into the remote tail
  // (two-step CAS over the wire) and, finding the queue empty, tops its
  // budget up — it leads its cohort.
  log += "# frame 3\n";
  a1.step();  // cas-read tail_r
  a1.step();  // cas-write tail_r
  a1.step();  // budget := remote allowance
  append_state(log, mem, lock, h1, h2, true);

  // Frame 4: tie-break — yield the victim slot to the remote side, then read
  // the local tail; it is clear, so the lock is won outright.
  log += "# frame 4\n";
  a1.step();  // victim := R
  a1.step();  // read tail_l -> 0
  append_state(log, mem, lock, h1, h2, true);

  // Frame 5: the remote actor is in its critical section.  Meanwhile the
  // co-located actor swaps into the local tail (one atomic step on its own
  // node) and tops up its budget as the fresh head of the local queue.
  log += "# frame 5\n";
  a2.step();  // cas tail_l
  a2.step();  // budget := local allowance
  append_state(log, mem, lock, h1, h2, true);

  // Frame 6: the co-located actor runs the tie-break: victim := L, then one
  // wait round — the remote tail is held and the victim still names the
  // local side, so it keeps waiting.
  log += "# frame 6\n";
  a2.step();  // victim := L
  a2.step();  // read tail_r -> held
  a2.step();  // read victim -> L, stay
  append_state(log, mem, lock, h1, h2, true);

  // Frame 7: the remote actor releases — one two-step CAS clears the remote
  // tail (no successor queued behind it).
  log += "# frame 7\n";
  ReleaseOp r1(mem, h1);
  r1.step();  // cas-read tail_r
  r1.step();  // cas-write tail_r := 0
  append_state(log, mem, lock, h1, h2, true);

  // Frame 8: the waiter re-reads the remote tail, finds it clear, and enters
  // its critical section.
  log += "# frame 8\n";
  a2.step();  // read tail_r -> 0
  append_state(log, mem, lock, h1, h2, true);

  return log;
}

}  // namespace alock

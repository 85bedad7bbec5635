#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <random>

#include "alock/alock.hpp"
#include "alock/scenario.hpp"

using namespace alock;

namespace {

struct Rig {
  Memory mem;
  RdmaPtr lock;
  explicit Rig(uint32_t nodes, uint32_t lock_node = 0)
      : mem(nodes, 1 << 16), lock(alloc_lock(mem, lock_node)) {}
};

// Drive a machine to completion with nothing else running.
template <class Op>
void run_alone(Op& op) {
  int guard = 0;
  while (!op.done()) {
    REQUIRE(op.step());
    REQUIRE(++guard < 100);
  }
}

std::vector<MemStep> remote_only(const std::vector<MemStep>& t) {
  std::vector<MemStep> out;
  for (const auto& s : t)
    if (s.cls == AccessClass::kRemote) out.push_back(s);
  return out;
}

}  // namespace

TEST_CASE("handles pick the cohort by placement and keep descriptors at home") {
  Rig rig(2, 1);
  ActorId near = rig.mem.add_actor(1);
  ActorId far = rig.mem.add_actor(0);
  LockHandle hn = make_handle(rig.mem, near, rig.lock);
  LockHandle hf = make_handle(rig.mem, far, rig.lock);
  CHECK(hn.cohort == Cohort::kLocal);
  CHECK(hf.cohort == Cohort::kRemote);
  CHECK(hn.desc.node() == 1);
  CHECK(hf.desc.node() == 0);  // own node, so the budget spin stays CPU-side
  CHECK(hn.desc.addr() % 64 == 0);
}

TEST_CASE("uncontended local acquire and release never leave the node") {
  Rig rig(2, 0);
  ActorId a = rig.mem.add_actor(0);
  LockHandle h = make_handle(rig.mem, a, rig.lock);
  rig.mem.enable_trace(true);

  AcquireOp acq(rig.mem, h, {});
  run_alone(acq);
  CHECK(h.passed == false);  // fresh head of an empty queue
  CHECK(remote_only(rig.mem.trace()).empty());
  // budget, next, tail swap, top-up, victim, other-tail read
  CHECK(rig.mem.trace().size() == 6);
  CHECK(rig.mem.peek(tail_field(rig.lock, Cohort::kLocal)) == h.desc.raw());

  rig.mem.clear_trace();
  ReleaseOp rel(rig.mem, h);
  run_alone(rel);
  CHECK(remote_only(rig.mem.trace()).empty());
  CHECK(rig.mem.trace().size() == 1);  // one single-step CAS clears the tail
  CHECK(rig.mem.peek(tail_field(rig.lock, Cohort::kLocal)) == 0);
}

TEST_CASE("uncontended remote acquire spends exactly one CAS, one victim write, one read") {
  Rig rig(2, 1);
  ActorId a = rig.mem.add_actor(0);
  LockHandle h = make_handle(rig.mem, a, rig.lock);
  rig.mem.enable_trace(true);

  AcquireOp acq(rig.mem, h, {});
  run_alone(acq);
  auto rem = remote_only(rig.mem.trace());
  // The whole wire bill, in order: the two-step tail CAS, the victim claim,
  // the other-tail read.  Anything beyond this is a regression.
  REQUIRE(rem.size() == 4);
  CHECK(rem[0].kind == StepKind::kCasRead);
  CHECK(rem[0].target == tail_field(rig.lock, Cohort::kRemote));
  CHECK(rem[1].kind == StepKind::kCasWrite);
  CHECK(rem[1].value == h.desc.raw());
  CHECK(rem[2].kind == StepKind::kWrite);
  CHECK(rem[2].target == victim_field(rig.lock));
  CHECK(rem[2].value == victim_word(Cohort::kRemote));
  CHECK(rem[3].kind == StepKind::kRead);
  CHECK(rem[3].target == tail_field(rig.lock, Cohort::kLocal));
  CHECK(rem[3].value == 0);
  // The local half is the descriptor bookkeeping: init pair plus top-up.
  CHECK(rig.mem.trace().size() - rem.size() == 3);

  rig.mem.clear_trace();
  ReleaseOp rel(rig.mem, h);
  run_alone(rel);
  auto rrel = remote_only(rig.mem.trace());
  REQUIRE(rrel.size() == 2);  // exactly the clearing CAS, nothing else
  CHECK(rrel[0].kind == StepKind::kCasRead);
  CHECK(rrel[1].kind == StepKind::kCasWrite);
  CHECK(rrel[1].value == 0);
  CHECK(rig.mem.trace().size() == 2);  // and nothing local either
}

TEST_CASE("in-cohort hand-off: successor inherits budget minus one and skips the tie-break") {
  // Two actors on two different off-nodes still share the remote cohort.
  Rig rig(3, 0);
  ActorId a = rig.mem.add_actor(1);
  ActorId b = rig.mem.add_actor(2);
  LockHandle ha = make_handle(rig.mem, a, rig.lock);
  LockHandle hb = make_handle(rig.mem, b, rig.lock);
  CHECK(ha.cohort == Cohort::kRemote);
  CHECK(hb.cohort == Cohort::kRemote);
  BudgetPolicy pol{5, 20};

  AcquireOp acq_a(rig.mem, ha, pol);
  run_alone(acq_a);

  // b queues up behind a: the first CAS attempt observes a's descriptor,
  // the re-armed retry lands, then b links and parks on its budget.
  AcquireOp acq_b(rig.mem, hb, pol);
  rig.mem.enable_trace(true);
  while (!acq_b.done() && acq_b.label() != Label::kC3) REQUIRE(acq_b.step());
  auto swaps = remote_only(rig.mem.trace());
  REQUIRE(swaps.size() == 5);  // failed CAS pair, winning CAS pair, link write
  CHECK(swaps[4].kind == StepKind::kWrite);
  CHECK(swaps[4].target == ha.desc.plus(DescLayout::kNext));
  CHECK(rig.mem.peek(tail_field(rig.lock, Cohort::kRemote)) == hb.desc.raw());

  // b spins: budget still parked below zero.
  CHECK(!acq_b.label_enabled());
  CHECK(acq_b.step());  // a spin re-check is a real (local) read step
  CHECK(acq_b.label() == Label::kC3);

  // a hands over instead of clearing the tail.
  rig.mem.clear_trace();
  ReleaseOp rel_a(rig.mem, ha);
  run_alone(rel_a);
  auto rel_steps = rig.mem.trace();
  // CAS pair (fails: tail moved on), next poll, budget read, hand-off write.
  REQUIRE(rel_steps.size() == 5);
  CHECK(rel_steps[4].kind == StepKind::kWrite);
  CHECK(rel_steps[4].target == hb.desc.plus(DescLayout::kBudget));
  CHECK(budget_value(rel_steps[4].value) == 19);  // holder had 20

  // b wakes with a positive allowance: no victim traffic, no tie-break.
  rig.mem.clear_trace();
  run_alone(acq_b);
  CHECK(hb.passed == true);
  for (const auto& s : rig.mem.trace()) CHECK(s.target != victim_field(rig.lock));
  CHECK(budget_value(rig.mem.peek(hb.desc.plus(DescLayout::kBudget))) == 19);
}

TEST_CASE("hand-off with spent allowance forces the tie-break and a top-up") {
  Rig rig(2, 0);
  ActorId a = rig.mem.add_actor(1);
  ActorId b = rig.mem.add_actor(1);
  LockHandle ha = make_handle(rig.mem, a, rig.lock);
  LockHandle hb = make_handle(rig.mem, b, rig.lock);
  BudgetPolicy pol{5, 1};  // one hand-off only on the remote side

  AcquireOp acq_a(rig.mem, ha, pol);
  run_alone(acq_a);
  AcquireOp acq_b(rig.mem, hb, pol);
  while (!acq_b.done() && acq_b.label() != Label::kC3) REQUIRE(acq_b.step());
  ReleaseOp rel_a(rig.mem, ha);
  run_alone(rel_a);

  // b receives budget 0: it must win the tie-break again before keeping the
  // lock, then tops back up to the full allowance.
  rig.mem.enable_trace(true);
  run_alone(acq_b);
  CHECK(hb.passed == true);
  bool victim_written = false;
  for (const auto& s : rig.mem.trace())
    if (s.kind == StepKind::kWrite && s.target == victim_field(rig.lock)) victim_written = true;
  CHECK(victim_written);
  CHECK(budget_value(rig.mem.peek(hb.desc.plus(DescLayout::kBudget))) == 1);
}

TEST_CASE("release waits for a successor that swapped in but has not linked yet") {
  Rig rig(2, 0);
  ActorId a = rig.mem.add_actor(1);
  ActorId b = rig.mem.add_actor(1);
  LockHandle ha = make_handle(rig.mem, a, rig.lock);
  LockHandle hb = make_handle(rig.mem, b, rig.lock);
  BudgetPolicy pol{5, 20};

  AcquireOp acq_a(rig.mem, ha, pol);
  run_alone(acq_a);

  // b: init pair, then the failed CAS pair and the winning CAS pair — stop
  // right before the link write.
  AcquireOp acq_b(rig.mem, hb, pol);
  for (int i = 0; i < 6; ++i) REQUIRE(acq_b.step());
  CHECK(acq_b.label() == Label::kC2);
  CHECK(rig.mem.peek(ha.desc.plus(DescLayout::kNext)) == 0);

  // a's release: the CAS misses (tail names b now), and the successor poll
  // spins on nothing until b links.
  ReleaseOp rel_a(rig.mem, ha);
  REQUIRE(rel_a.step());  // cas-read
  REQUIRE(rel_a.step());  // cas-write, miss
  CHECK(rel_a.label() == Label::kR1);
  CHECK(!rel_a.label_enabled());
  REQUIRE(rel_a.step());  // poll: nothing yet
  CHECK(rel_a.label() == Label::kR1);

  REQUIRE(acq_b.step());  // the link write lands
  CHECK(rel_a.label_enabled());
  run_alone(rel_a);
  run_alone(acq_b);
  CHECK(hb.passed);
  CHECK(budget_value(rig.mem.peek(hb.desc.plus(DescLayout::kBudget))) == 19);
}

TEST_CASE("tie-break lets exactly one cohort head through") {
  Rig rig(2, 0);
  ActorId l = rig.mem.add_actor(0);
  ActorId r = rig.mem.add_actor(1);
  LockHandle hl = make_handle(rig.mem, l, rig.lock);
  LockHandle hr = make_handle(rig.mem, r, rig.lock);
  BudgetPolicy pol;

  // Both become fresh heads of their queues, then race into the tie-break.
  AcquireOp al(rig.mem, hl, pol);
  AcquireOp ar(rig.mem, hr, pol);
  while (al.label() != Label::kG1) REQUIRE(al.step());
  while (ar.label() != Label::kG1) REQUIRE(ar.step());

  // r yields first, l yields second — so l is the victim and r goes through.
  REQUIRE(ar.step());  // victim := R
  REQUIRE(al.step());  // victim := L
  REQUIRE(ar.step());  // r: other tail held...
  REQUIRE(ar.step());  // ...but victim says L: r proceeds
  CHECK(ar.done());
  REQUIRE(al.step());  // l: other tail held...
  REQUIRE(al.step());  // ...and victim is L itself: l keeps waiting
  CHECK(!al.done());
  CHECK(al.label() == Label::kG2);

  // Only after r releases does l get through, via the cleared tail.
  ReleaseOp rr(rig.mem, hr);
  run_alone(rr);
  REQUIRE(al.step());
  CHECK(al.done());
}

TEST_CASE("state dumps are verbatim stable") {
  Rig rig(2, 1);
  ActorId t2 = rig.mem.add_actor(1);
  LockHandle h = make_handle(rig.mem, t2, rig.lock);
  CHECK(dump_lock(rig.mem, rig.lock) ==
        "alock addr=0x1000000000000040 tail_r=0x0 tail_l=0x0 victim=L");
  AcquireOp acq(rig.mem, h, {});
  run_alone(acq);
  CHECK(dump_lock(rig.mem, rig.lock) ==
        "alock addr=0x1000000000000040 tail_r=0x0 tail_l=0x1000000000000080 victim=L");
  CHECK(dump_descriptor(rig.mem, 0, h.desc) == "desc actor=0 budget=5 next=0x0");
}

TEST_CASE("walk-through scenario replays deterministically with the expected shape") {
  std::string one = walkthrough_trace();
  std::string two = walkthrough_trace();
  CHECK(one == two);
  for (int f = 1; f <= 8; ++f)
    CHECK(one.find("# frame " + std::to_string(f)) != std::string::npos);
  // 17 memory steps end to end (counted by the leading seq field).
  CHECK(one.find("\n16 ") != std::string::npos);
  CHECK(one.find("\n17 ") == std::string::npos);
  CHECK(scenario_trace("fig2") == one);
  CHECK_THROWS_AS(scenario_trace("nope"), std::invalid_argument);
}

TEST_CASE("stress: random schedules keep mutual exclusion, progress, and queue sanity") {
  // Four actors, two per cohort, interleaved one memory step at a time by a
  // seeded scheduler.  The critical section is tracked host-side.
  for (uint64_t seed : {11ull, 22ull, 33ull, 44ull, 55ull}) {
    Rig rig(2, 0);
    BudgetPolicy pol{2, 3};  // small budgets: exercise the reacquire path
    struct Actor {
      ActorId id;
      LockHandle h;
      std::unique_ptr<AcquireOp> acq;
      std::unique_ptr<ReleaseOp> rel;
      int completed = 0;
      bool in_cs = false;
    };
    std::vector<Actor> actors;
    for (int i = 0; i < 4; ++i) {
      ActorId id = rig.mem.add_actor(i < 2 ? 0 : 1);
      actors.push_back({id, make_handle(rig.mem, id, rig.lock), nullptr, nullptr, 0, false});
    }
    std::mt19937_64 rng(seed);
    int in_cs_count = 0;
    const int kTarget = 6;
    for (uint64_t tick = 0; tick < 200000; ++tick) {
      Actor& a = actors[rng() % actors.size()];
      if (a.completed >= kTarget) continue;
      if (a.in_cs) {
        // Leave the critical section at a random later pick.
        a.in_cs = false;
        in_cs_count--;
        a.rel = std::make_unique<ReleaseOp>(rig.mem, a.h);
        continue;
      }
      if (a.rel) {
        if (a.rel->done()) {
          a.rel.reset();
          a.completed++;
        } else {
          a.rel->step();
        }
        continue;
      }
      if (!a.acq) {
        // Before re-enqueueing, this descriptor must be unreachable: not in a
        // tail word, and not in the next pointer of anyone still holding a
        // queue position.  (Retired descriptors keep stale next values; those
        // are never followed, and each request clears its own next before it
        // swaps back in.)
        CHECK(rig.mem.peek(tail_field(rig.lock, Cohort::kLocal)) != a.h.desc.raw());
        CHECK(rig.mem.peek(tail_field(rig.lock, Cohort::kRemote)) != a.h.desc.raw());
        for (const Actor& o : actors) {
          bool queued = o.in_cs || (o.rel && !o.rel->done()) ||
                        (o.acq && o.acq->label() != Label::kC1 &&
                         o.acq->label() != Label::kSwap);
          if (o.id != a.id && queued)
            CHECK(rig.mem.peek(o.h.desc.plus(DescLayout::kNext)) != a.h.desc.raw());
        }
        a.acq = std::make_unique<AcquireOp>(rig.mem, a.h, pol);
        continue;
      }
      if (a.acq->done()) {
        a.acq.reset();
        a.in_cs = true;
        in_cs_count++;
        REQUIRE(in_cs_count == 1);  // never two holders
        continue;
      }
      a.acq->step();
      if (a.acq->done()) {
        a.acq.reset();
        a.in_cs = true;
        in_cs_count++;
        REQUIRE(in_cs_count == 1);
      }
    }
    for (const Actor& a : actors) CHECK(a.completed >= kTarget);
  }
}

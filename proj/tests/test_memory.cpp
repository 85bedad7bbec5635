#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "alock/memory.hpp"
#include "support/interleave.hpp"

using namespace alock;

TEST_CASE("pointer packing round-trips node and offset") {
  // Edge offsets plus a sampled spread across the 60-bit range.
  std::vector<uint64_t> addrs = {0, 8, 64, 4096, RdmaPtr::kAddrMask - 7,
                                 RdmaPtr::kAddrMask};
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) addrs.push_back(rng() & RdmaPtr::kAddrMask);
  for (uint32_t node = 0; node < RdmaPtr::kMaxNodes; ++node) {
    for (uint64_t a : addrs) {
      RdmaPtr p = RdmaPtr::make(node, a);
      CHECK(p.node() == node);
      CHECK(p.addr() == a);
      CHECK(RdmaPtr::from_raw(p.raw()) == p);
    }
  }
  CHECK(kNullPtr.null());
  CHECK(RdmaPtr::make(0, 8).plus(16).addr() == 24);
  CHECK(RdmaPtr::make(3, 8).plus(8).node() == 3);
}

TEST_CASE("allocation is aligned, zeroed, non-overlapping, and never offset 0") {
  Memory mem(3, 4096);
  RdmaPtr a = mem.alloc(0, 8);
  CHECK(a.addr() >= Memory::kReservedBytes);  // raw 0 stays null
  RdmaPtr b = mem.alloc(0, 24);
  RdmaPtr c = mem.alloc(0, 8, 64);
  CHECK(b.addr() >= a.addr() + 8);
  CHECK(c.addr() % 64 == 0);
  CHECK(c.addr() >= b.addr() + 24);
  CHECK(mem.peek(a) == 0);
  CHECK(mem.peek(c) == 0);
  RdmaPtr far = mem.alloc(2, 8);
  CHECK(far.node() == 2);

  CHECK_THROWS_AS(mem.alloc(0, 0), MemoryFault);
  CHECK_THROWS_AS(mem.alloc(0, 12), MemoryFault);
  CHECK_THROWS_AS(mem.alloc(0, 8, 16), MemoryFault);
  CHECK_THROWS_AS(mem.alloc(7, 8), MemoryFault);
  CHECK_THROWS_AS(mem.alloc(1, 1 << 20), ArenaExhausted);
}

TEST_CASE("faults: unallocated, misaligned, null") {
  Memory mem(2, 4096);
  ActorId a = mem.add_actor(0);
  RdmaPtr p = mem.alloc(0, 8);
  CHECK_THROWS_AS(mem.read(a, kNullPtr), MemoryFault);
  CHECK_THROWS_AS(mem.read(a, p.plus(8)), MemoryFault);           // past cursor
  CHECK_THROWS_AS(mem.read(a, RdmaPtr::make(0, p.addr() + 4)), MemoryFault);
  CHECK_THROWS_AS(mem.write(a, RdmaPtr::make(1, 64), 1), MemoryFault);
  CHECK_THROWS_AS(mem.read(a, RdmaPtr::make(0, 8)), MemoryFault);  // reserved
}

TEST_CASE("classification is placement, loopback forces the NIC path") {
  Memory mem(2, 4096);
  ActorId near = mem.add_actor(0);
  ActorId far = mem.add_actor(1);
  RdmaPtr p = mem.alloc(0, 8);
  CHECK(classify(mem.actor_node(near), p) == AccessClass::kLocal);
  CHECK(classify(mem.actor_node(far), p) == AccessClass::kRemote);

  mem.enable_trace(true);
  mem.read(near, p);
  mem.read(far, p);
  mem.read(near, p, Route::kLoopback);
  const auto& t = mem.trace();
  REQUIRE(t.size() == 3);
  CHECK(t[0].cls == AccessClass::kLocal);
  CHECK(t[1].cls == AccessClass::kRemote);
  CHECK(t[2].cls == AccessClass::kRemote);  // co-located but routed via NIC
  CHECK(mem.local_steps() == 1);
  CHECK(mem.remote_steps() == 2);
}

TEST_CASE("read, write, cas behave sequentially per actor") {
  Memory mem(2, 4096);
  ActorId a = mem.add_actor(0);
  RdmaPtr p = mem.alloc(0, 8);
  CHECK(mem.read(a, p) == 0);
  mem.write(a, p, 41);
  CHECK(mem.read(a, p) == 41);
  CHECK(mem.cas(a, p, 41, 42) == 41);  // success returns old value
  CHECK(mem.peek(p) == 42);
  CHECK(mem.cas(a, p, 41, 99) == 42);  // failure leaves the word alone
  CHECK(mem.peek(p) == 42);
}

TEST_CASE("local cas is one step, remote cas is exactly two") {
  Memory mem(2, 4096);
  ActorId near = mem.add_actor(0);
  ActorId far = mem.add_actor(1);
  RdmaPtr p = mem.alloc(0, 8);

  uint64_t before = mem.step_count();
  mem.cas(near, p, 0, 5);
  CHECK(mem.step_count() - before == 1);

  before = mem.step_count();
  mem.cas(far, p, 5, 6);  // convenience form still emits both halves
  CHECK(mem.step_count() - before == 2);

  // A failed compare costs the same two steps and installs nothing.
  mem.enable_trace(true);
  before = mem.step_count();
  CHECK(mem.cas_read(far, p, 999) == 6);
  mem.cas_write(far, p, 7);
  CHECK(mem.step_count() - before == 2);
  CHECK(mem.peek(p) == 6);
  const auto& t = mem.trace();
  REQUIRE(t.size() == 2);
  CHECK(t[0].kind == StepKind::kCasRead);
  CHECK(t[1].kind == StepKind::kCasWrite);
  CHECK(t[1].value == 6);  // what the word held after the no-op install
}

TEST_CASE("one word serialises concurrent remote CASes") {
  Memory mem(3, 4096);
  ActorId far1 = mem.add_actor(1);
  ActorId far2 = mem.add_actor(2);
  RdmaPtr p = mem.alloc(0, 8);
  RdmaPtr q = mem.alloc(0, 8);

  CHECK(mem.cas_ready(far1, p));
  mem.cas_read(far1, p, 0);
  CHECK(!mem.cas_ready(far2, p));
  CHECK(mem.cas_ready(far2, q));  // other words are unaffected
  CHECK(mem.cas_open(far1));
  CHECK_THROWS_AS(mem.cas_read(far2, p, 0), MemoryFault);
  mem.cas_write(far1, p, 3);
  CHECK(mem.cas_ready(far2, p));
  CHECK(!mem.cas_open(far1));

  // cas_write without an open compare is a bug.
  CHECK_THROWS_AS(mem.cas_write(far2, p, 9), MemoryFault);
  // cas_read against a co-located word without loopback is a bug.
  ActorId near = mem.add_actor(0);
  CHECK_THROWS_AS(mem.cas_read(near, p, 0), MemoryFault);
  CHECK(mem.cas_read(near, p, 0, Route::kLoopback) == 3);
  mem.cas_write(near, p, 4);
}

TEST_CASE("two local CASes with the same expectation: exactly one wins under every schedule") {
  struct W {
    Memory mem;
    RdmaPtr x;
    ActorId a, b;
    uint64_t ra = 99, rb = 99;
  };
  auto make = [] {
    Memory mem(1, 4096);
    RdmaPtr x = mem.alloc(0, 8);
    ActorId a = mem.add_actor(0), b = mem.add_actor(0);
    return W{std::move(mem), x, a, b};
  };
  litmus::Script<W> sa{[](W& w) { w.ra = w.mem.cas(w.a, w.x, 0, 1); }};
  litmus::Script<W> sb{[](W& w) { w.rb = w.mem.cas(w.b, w.x, 0, 2); }};
  std::function<std::string(W&)> out = [](W& w) {
    bool a_won = w.ra == 0, b_won = w.rb == 0;
    CHECK(a_won != b_won);
    return std::string(a_won ? "a" : "b");
  };
  auto all = litmus::all_interleavings<W, std::string>(make, {sa, sb}, out);
  CHECK(all.size() == 2);  // either order, but never both or neither
}

TEST_CASE("a local write can land between the halves of a remote cas (lost update)") {
  Memory mem(2, 4096);
  ActorId near = mem.add_actor(0);
  ActorId far = mem.add_actor(1);
  RdmaPtr x = mem.alloc(0, 8);

  CHECK(mem.cas_read(far, x, 0) == 0);  // compare passes against 0
  mem.write(near, x, 5);                // CPU-side store slips in
  mem.cas_write(far, x, 7);             // install goes through anyway
  CHECK(mem.peek(x) == 7);              // the store's 5 is gone
}

TEST_CASE("fixed schedules replay to identical traces") {
  auto run = [] {
    Memory mem(2, 4096);
    ActorId near = mem.add_actor(0);
    ActorId far = mem.add_actor(1);
    RdmaPtr x = mem.alloc(0, 8);
    RdmaPtr y = mem.alloc(1, 8);
    mem.enable_trace(true);
    mem.write(near, x, 1);
    mem.cas_read(far, x, 1);
    mem.write(near, y, 2);
    mem.cas_write(far, x, 9);
    mem.read(far, y);
    std::string log;
    for (const auto& s : mem.trace()) log += format_step(s) + "\n";
    return log;
  };
  std::string one = run(), two = run();
  CHECK(one == two);
  CHECK(one.find("0 0 0 local write") == 0);
}

TEST_CASE("step log format is stable") {
  Memory mem(2, 4096);
  ActorId far = mem.add_actor(1);
  RdmaPtr x = mem.alloc(0, 8);
  mem.enable_trace(true);
  mem.write(far, x, 0x2a);
  CHECK(format_step(mem.trace()[0]) ==
        "0 0 0 remote write 0x" + [&] {
          char b[32];
          std::snprintf(b, sizeof b, "%lx", (unsigned long)x.addr());
          return std::string(b);
        }() + " 0x2a");
}

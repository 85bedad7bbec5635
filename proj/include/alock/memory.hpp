#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "alock/rdma_ptr.hpp"

namespace alock {

using ActorId = uint32_t;

// Which side of the asymmetry a step falls on.  Local steps go through the
// CPU's coherent path; Remote steps go through a NIC.  The class is derived
// from actor and target placement, except that loopback routing forces the
// NIC path even for a co-located target.
enum class AccessClass : uint8_t { kLocal, kRemote };

enum class StepKind : uint8_t { kRead, kWrite, kCasRead, kCasWrite };

// How an access is routed.  kAuto derives the class from placement; kLoopback
// forces the NIC path (remote semantics and remote cost) regardless of where
// the target lives.  Designs that keep all their accesses one-sided use
// loopback for their "local" traffic.
enum class Route : uint8_t { kAuto, kLoopback };

// One shared-memory access as admitted by the global interleaving.  `value`
// is what the access observed (read, cas-read) or what it left behind (write,
// cas-write; a failed cas-write leaves the old value, and that old value is
// recorded).
struct MemStep {
  uint64_t seq;
  ActorId actor;
  AccessClass cls;
  StepKind kind;
  RdmaPtr target;
  uint64_t value;
};

const char* to_string(AccessClass c);
const char* to_string(StepKind k);

// "seq actor node class kind addr value" — node is the node the step executes
// against, addr the byte offset inside it; addr and value in hex.
std::string format_step(const MemStep& s);

// Signals a bug in a lock algorithm: unallocated or misaligned target, a
// cas-write without a matching cas-read, two remote CASes racing on one word.
class MemoryFault : public std::runtime_error {
 public:
  explicit MemoryFault(const std::string& what) : std::runtime_error(what) {}
};

// An arena ran out of space.
class ArenaExhausted : public std::runtime_error {
 public:
  explicit ArenaExhausted(const std::string& what) : std::runtime_error(what) {}
};

// Placement is the whole story: an access is Local exactly when the actor is
// on the target's node.
AccessClass classify(uint32_t actor_node, RdmaPtr target);

// The partitioned memory image.  One word-granular arena per node, a registry
// of actors pinned to nodes, and the admission rules for steps.  Every
// mutation happens through exactly one MemStep at a time; the caller (test
// schedule, model checker driver, or simulator) decides the interleaving.
class Memory {
 public:
  static constexpr uint64_t kDefaultArenaBytes = uint64_t{1} << 24;
  // Offset 0 on every node is reserved so that raw 0 stays null.
  static constexpr uint64_t kReservedBytes = 64;

  explicit Memory(uint32_t nodes, uint64_t bytes_per_node = kDefaultArenaBytes);

  uint32_t nodes() const { return static_cast<uint32_t>(arenas_.size()); }
  ActorId add_actor(uint32_t node);
  uint32_t actor_count() const { return static_cast<uint32_t>(actor_node_.size()); }
  uint32_t actor_node(ActorId a) const;

  // Bump allocation, 8- or 64-byte aligned, zero-initialised.
  RdmaPtr alloc(uint32_t node, uint64_t bytes, uint64_t align = 8);

  // --- one step per call -----------------------------------------------------
  uint64_t read(ActorId a, RdmaPtr p, Route r = Route::kAuto);
  void write(ActorId a, RdmaPtr p, uint64_t value, Route r = Route::kAuto);

  // Local-class CAS is a single atomic step.  For a remote-class target this
  // convenience issues the two halves back to back with nothing in between;
  // hostile schedules split them via cas_read/cas_write instead.
  uint64_t cas(ActorId a, RdmaPtr p, uint64_t expected, uint64_t desired,
               Route r = Route::kAuto);

  // Two-step remote CAS.  The compare is evaluated at cas_read time; the
  // matching cas_write installs `desired` only if that compare passed (and is
  // emitted as a step either way).  The NIC executes atomics on one word
  // serially: while some actor's CAS is open on a word, no other actor may
  // start one there — poll cas_ready before scheduling a cas_read.
  bool cas_ready(ActorId a, RdmaPtr p) const;
  uint64_t cas_read(ActorId a, RdmaPtr p, uint64_t expected, Route r = Route::kAuto);
  void cas_write(ActorId a, RdmaPtr p, uint64_t desired);
  bool cas_open(ActorId a) const;  // does `a` have an unfinished remote CAS?

  // --- accounting ------------------------------------------------------------
  uint64_t step_count() const { return seq_; }
  uint64_t local_steps() const { return local_steps_; }
  uint64_t remote_steps() const { return remote_steps_; }

  void set_observer(std::function<void(const MemStep&)> fn) { observer_ = std::move(fn); }
  void enable_trace(bool on) { trace_on_ = on; }
  const std::vector<MemStep>& trace() const { return trace_; }
  void clear_trace() { trace_.clear(); }

  // Debug/test accessors outside the access model: no step, no class, no trace.
  uint64_t peek(RdmaPtr p) const;
  void poke(RdmaPtr p, uint64_t value);

 private:
  struct Arena {
    std::vector<uint64_t> words;
    uint64_t cursor;  // next free byte offset
  };
  struct OpenCas {
    ActorId actor;
    uint64_t expected;
    uint64_t observed;
    bool pass;
  };

  uint64_t& word(RdmaPtr p);
  const uint64_t& word(RdmaPtr p) const;
  void check_access(RdmaPtr p) const;
  AccessClass route_class(ActorId a, RdmaPtr p, Route r) const;
  uint64_t emit(ActorId a, AccessClass cls, StepKind kind, RdmaPtr p, uint64_t value);

  std::vector<Arena> arenas_;
  std::vector<uint32_t> actor_node_;
  std::unordered_map<uint64_t, OpenCas> open_cas_;     // keyed by target raw
  std::vector<uint64_t> actor_open_;                   // per actor: open target raw, 0 = none
  uint64_t seq_ = 0;
  uint64_t local_steps_ = 0;
  uint64_t remote_steps_ = 0;
  bool trace_on_ = false;
  std::vector<MemStep> trace_;
  std::function<void(const MemStep&)> observer_;
};

}  // namespace alock

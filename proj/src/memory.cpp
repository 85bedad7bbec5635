#include "alock/memory.hpp"

#include <cinttypes>
#include <cstdio>

namespace alock {

const char* to_string(AccessClass c) {
  return c == AccessClass::kLocal ? "local" : "remote";
}

const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::kRead: return "read";
    case StepKind::kWrite: return "write";
    case StepKind::kCasRead: return "casread";
    case StepKind::kCasWrite: return "caswrite";
  }
  return "?";
}

std::string format_step(const MemStep& s) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%" PRIu64 " %u %u %s %s 0x%" PRIx64 " 0x%" PRIx64,
                s.seq, s.actor, s.target.node(), to_string(s.cls), to_string(s.kind),
                s.target.addr(), s.value);
  return buf;
}

AccessClass classify(uint32_t actor_node, RdmaPtr target) {
  return actor_node == target.node() ? AccessClass::kLocal : AccessClass::kRemote;
}

Memory::Memory(uint32_t nodes, uint64_t bytes_per_node) {
  if (nodes == 0 || nodes > RdmaPtr::kMaxNodes)
    throw MemoryFault("node count out of range");
  if (bytes_per_node < 2 * kReservedBytes || bytes_per_node % 8 != 0)
    throw MemoryFault("arena size invalid");
  arenas_.resize(nodes);
  for (auto& a : arenas_) {
    a.words.assign(bytes_per_node / 8, 0);
    a.cursor = kReservedBytes;
  }
}

ActorId Memory::add_actor(uint32_t node) {
  if (node >= nodes()) throw MemoryFault("actor on unknown node");
  actor_node_.push_back(node);
  actor_open_.push_back(0);
  return static_cast<ActorId>(actor_node_.size() - 1);
}

uint32_t Memory::actor_node(ActorId a) const {
  if (a >= actor_node_.size()) throw MemoryFault("unknown actor");
  return actor_node_[a];
}

RdmaPtr Memory::alloc(uint32_t node, uint64_t bytes, uint64_t align) {
  if (node >= nodes()) throw MemoryFault("alloc on unknown node");
  if (bytes == 0 || bytes % 8 != 0) throw MemoryFault("alloc size must be a word multiple");
  if (align != 8 && align != 64) throw MemoryFault("alloc alignment must be 8 or 64");
  Arena& ar = arenas_[node];
  uint64_t start = (ar.cursor + align - 1) / align * align;
  if (start + bytes > ar.words.size() * 8)
    throw ArenaExhausted("arena exhausted on node " + std::to_string(node));
  ar.cursor = start + bytes;
  return RdmaPtr::make(node, start);
}

uint64_t& Memory::word(RdmaPtr p) { return arenas_[p.node()].words[p.addr() / 8]; }
const uint64_t& Memory::word(RdmaPtr p) const { return arenas_[p.node()].words[p.addr() / 8]; }

void Memory::check_access(RdmaPtr p) const {
  if (p.null()) throw MemoryFault("null target");
  if (p.node() >= nodes()) throw MemoryFault("target on unknown node");
  if (p.addr() % 8 != 0) throw MemoryFault("misaligned target");
  const Arena& ar = arenas_[p.node()];
  if (p.addr() < kReservedBytes || p.addr() + 8 > ar.cursor)
    throw MemoryFault("unallocated target");
}

AccessClass Memory::route_class(ActorId a, RdmaPtr p, Route r) const {
  if (a >= actor_node_.size()) throw MemoryFault("unknown actor");
  if (r == Route::kLoopback) return AccessClass::kRemote;
  return classify(actor_node_[a], p);
}

uint64_t Memory::emit(ActorId a, AccessClass cls, StepKind kind, RdmaPtr p, uint64_t value) {
  MemStep s{seq_++, a, cls, kind, p, value};
  (cls == AccessClass::kLocal ? local_steps_ : remote_steps_)++;
  if (trace_on_) trace_.push_back(s);
  if (observer_) observer_(s);
  return value;
}

uint64_t Memory::read(ActorId a, RdmaPtr p, Route r) {
  check_access(p);
  return emit(a, route_class(a, p, r), StepKind::kRead, p, word(p));
}

void Memory::write(ActorId a, RdmaPtr p, uint64_t value, Route r) {
  check_access(p);
  word(p) = value;
  emit(a, route_class(a, p, r), StepKind::kWrite, p, value);
}

uint64_t Memory::cas(ActorId a, RdmaPtr p, uint64_t expected, uint64_t desired, Route r) {
  check_access(p);
  AccessClass cls = route_class(a, p, r);
  if (cls == AccessClass::kLocal) {
    uint64_t old = word(p);
    if (old == expected) word(p) = desired;
    // A local CAS is one indivisible step; record what it left behind.
    emit(a, cls, StepKind::kCasWrite, p, word(p));
    return old;
  }
  uint64_t old = cas_read(a, p, expected, r);
  cas_write(a, p, desired);
  return old;
}

bool Memory::cas_ready(ActorId a, RdmaPtr p) const {
  (void)a;
  return open_cas_.find(p.raw()) == open_cas_.end();
}

uint64_t Memory::cas_read(ActorId a, RdmaPtr p, uint64_t expected, Route r) {
  check_access(p);
  AccessClass cls = route_class(a, p, r);
  if (cls != AccessClass::kRemote) throw MemoryFault("cas_read is remote-only");
  if (actor_open_[a] != 0) throw MemoryFault("actor already has an open cas");
  if (!cas_ready(a, p)) throw MemoryFault("remote cas collision on one word");
  uint64_t old = word(p);
  open_cas_[p.raw()] = OpenCas{a, expected, old, old == expected};
  actor_open_[a] = p.raw();
  return emit(a, cls, StepKind::kCasRead, p, old);
}

void Memory::cas_write(ActorId a, RdmaPtr p, uint64_t desired) {
  check_access(p);
  auto it = open_cas_.find(p.raw());
  if (it == open_cas_.end() || it->second.actor != a)
    throw MemoryFault("cas_write without matching cas_read");
  if (it->second.pass) word(p) = desired;
  uint64_t left = word(p);
  open_cas_.erase(it);
  actor_open_[a] = 0;
  emit(a, AccessClass::kRemote, StepKind::kCasWrite, p, left);
}

bool Memory::cas_open(ActorId a) const {
  if (a >= actor_open_.size()) throw MemoryFault("unknown actor");
  return actor_open_[a] != 0;
}

uint64_t Memory::peek(RdmaPtr p) const {
  check_access(p);
  return word(p);
}

void Memory::poke(RdmaPtr p, uint64_t value) {
  check_access(p);
  word(p) = value;
}

}  // namespace alock

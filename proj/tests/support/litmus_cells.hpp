#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "alock/memory.hpp"
#include "support/interleave.hpp"

// The 3x3 atomicity matrix for one shared 8-byte word: a CPU-side actor on
// the word's node runs {read, write, cas} against a NIC-side actor on another
// node running {read, write, cas}.  A pairing is atomic ("serializable") when
// every interleaving's outcome equals some sequential order's outcome.  The
// two-step remote CAS is the only source of non-atomicity: a local write or
// local cas can slip between its compare and its install.

namespace litmus {

enum class LocalOp { kRead, kWrite, kCas };
enum class RemoteOp { kRead, kWrite, kCas };

struct CellWorld {
  alock::Memory mem;
  alock::RdmaPtr x;
  alock::ActorId lcpu, rnic;
  uint64_t l_obs =~uint64_t{0};
  uint64_t r_obs = ~uint64_t{0};
};

struct CellResult {
  LocalOp lop;
  RemoteOp rop;
  bool serializable;                 // observed over the full enumeration
  std::string witness;               // one non-serial outcome, if any
  size_t schedules;
};

inline const char* to_string(LocalOp o) {
  switch (o) {
    case LocalOp::kRead: return "read";
    case LocalOp::kWrite: return "write";
    case LocalOp::kCas: return "cas";
  }
  return "?";
}

inline const char* to_string(RemoteOp o) {
  switch (o) {
    case RemoteOp::kRead: return "read";
    case RemoteOp::kWrite: return "write";
    case RemoteOp::kCas: return "cas";
  }
  return "?";
}

// Outcome: final word value plus what each side observed.
inline std::string cell_outcome(CellWorld& w) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "x=%llu l=%lld r=%lld",
                (unsigned long long)w.mem.peek(w.x),
                w.l_obs == ~uint64_t{0} ? -1LL : (long long)w.l_obs,
                w.r_obs == ~uint64_t{0} ? -1LL : (long long)w.r_obs);
  return buf;
}

inline CellResult run_cell(LocalOp lop, RemoteOp rop) {
  static constexpr uint64_t kInit = 1, kLVal = 5, kRVal = 7;
  auto make = [] {
    alock::Memory mem(2, 4096);
    alock::RdmaPtr x = mem.alloc(0, 8);
    alock::ActorId lcpu = mem.add_actor(0);
    alock::ActorId rnic = mem.add_actor(1);
    mem.poke(x, kInit);
    return CellWorld{std::move(mem), x, lcpu, rnic};
  };

  Script<CellWorld> local;
  switch (lop) {
    case LocalOp::kRead:
      local.push_back([](CellWorld& w) { w.l_obs = w.mem.read(w.lcpu, w.x); });
      break;
    case LocalOp::kWrite:
      local.push_back([](CellWorld& w) { w.mem.write(w.lcpu, w.x, kLVal); });
      break;
    case LocalOp::kCas:
      local.push_back([](CellWorld& w) { w.l_obs = w.mem.cas(w.lcpu, w.x, kInit, kLVal); });
      break;
  }

  Script<CellWorld> remote;
  switch (rop) {
    case RemoteOp::kRead:
      remote.push_back([](CellWorld& w) { w.r_obs = w.mem.read(w.rnic, w.x); });
      break;
    case RemoteOp::kWrite:
      remote.push_back([](CellWorld& w) { w.mem.write(w.rnic, w.x, kRVal); });
      break;
    case RemoteOp::kCas:
      remote.push_back([](CellWorld& w) { w.r_obs = w.mem.cas_read(w.rnic, w.x, kInit); });
      remote.push_back([](CellWorld& w) { w.mem.cas_write(w.rnic, w.x, kRVal); });
      break;
  }

  std::function<std::string(CellWorld&)> out = cell_outcome;
  auto all = all_interleavings<CellWorld, std::string>(make, {local, remote}, out);
  auto serial = serial_orders<CellWorld, std::string>(make, {local, remote}, out);

  CellResult res{lop, rop, subset(all, serial), "", 0};
  size_t total = local.size() + remote.size();
  // #schedules = C(total, local.size())
  size_t c = 1;
  for (size_t i = 0; i < local.size(); ++i) c = c * (total - i) / (i + 1);
  res.schedules = c;
  for (const auto& o : all)
    if (!serial.count(o)) {
      res.witness = o;
      break;
    }
  return res;
}

// Expected matrix: only the pairings where a one-step local mutation can land
// between the remote CAS's compare and install are non-atomic.
inline bool expected_atomic(LocalOp lop, RemoteOp rop) {
  bool local_mutates = lop != LocalOp::kRead;
  return !(local_mutates && rop == RemoteOp::kCas);
}

inline std::vector<CellResult> run_table_matrix() {
  std::vector<CellResult> out;
  for (LocalOp lop : {LocalOp::kRead, LocalOp::kWrite, LocalOp::kCas})
    for (RemoteOp rop : {RemoteOp::kRead, RemoteOp::kWrite, RemoteOp::kCas})
      out.push_back(run_cell(lop, rop));
  return out;
}

}  // namespace litmus

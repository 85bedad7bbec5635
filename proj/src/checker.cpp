#include "alock/checker.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

namespace alock::model {

const char* to_string(Algo a) {
  switch (a) {
    case Algo::kAlock: return "alock";
    case Algo::kSpinlock: return "spinlock";
    case Algo::kMcs: return "mcs";
  }
  return "?";
}

bool algo_from_string(std::string_view s, Algo& out) {
  if (s == "alock") { out = Algo::kAlock; return true; }
  if (s == "spinlock") { out = Algo::kSpinlock; return true; }
  if (s == "mcs") { out = Algo::kMcs; return true; }
  return false;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kHolds: return "holds";
    case Verdict::kViolated: return "violated";
    case Verdict::kRefused: return "refused";
  }
  return "?";
}

void validate(const CheckerConfig& cfg) {
  if (cfg.num_processes < 1 || cfg.num_processes > kMaxProcs)
    throw std::invalid_argument("num_processes out of range [1," +
                                std::to_string(kMaxProcs) + "]");
  if (cfg.initial_budget < 1 || cfg.initial_budget > 200)
    throw std::invalid_argument("initial_budget out of range [1,200]");
  if (cfg.max_states < 1) throw std::invalid_argument("max_states must be >= 1");
}

// --- ALock transition system -------------------------------------------------

namespace {
constexpr int us(int pid) { return pid % 2 + 1; }
constexpr int them(int pid) { return (pid + 1) % 2 + 1; }
constexpr uint8_t lbl(Label l) { return static_cast<uint8_t>(l); }
// budget bytes carry a +2 bias so -1 (waiting) and a mutated -2 stay encodable
constexpr int kBudgetBias = 2;
}  // namespace

AlockModel::AlockModel(const CheckerConfig& cfg)
    : np_(cfg.num_processes), budget_(cfg.initial_budget), mutation_(cfg.mutation) {}

AlockModel::View AlockModel::decode(const std::string& s) const {
  View v{};
  const auto* b = reinterpret_cast<const uint8_t*>(s.data());
  for (int p = 1; p <= np_; ++p) v.pc[p] = b[p - 1];
  v.victim = b[np_];
  v.cohort[1] = b[np_ + 1];
  v.cohort[2] = b[np_ + 2];
  for (int p = 1; p <= np_; ++p) {
    const uint8_t* f = b + np_ + 3 + (p - 1) * 4;
    v.budget[p] = static_cast<int8_t>(static_cast<int>(f[0]) - kBudgetBias);
    v.next[p] = f[1];
    v.passed[p] = f[2];
    v.pred[p] = f[3];
    const uint8_t* st = b + np_ + 3 + np_ * 4 + (p - 1) * 3;
    v.depth[p] = st[0];
    v.ret[p][0] = st[1];
    v.ret[p][1] = st[2];
  }
  return v;
}

std::string AlockModel::encode(const View& v) const {
  std::string s(static_cast<size_t>(8 * np_ + 3), '\0');
  auto* b = reinterpret_cast<uint8_t*>(s.data());
  for (int p = 1; p <= np_; ++p) b[p - 1] = v.pc[p];
  b[np_] = v.victim;
  b[np_ + 1] = v.cohort[1];
  b[np_ + 2] = v.cohort[2];
  for (int p = 1; p <= np_; ++p) {
    uint8_t* f = b + np_ + 3 + (p - 1) * 4;
    f[0] = static_cast<uint8_t>(v.budget[p] + kBudgetBias);
    f[1] = v.next[p];
    f[2] = v.passed[p];
    f[3] = v.pred[p];
    uint8_t* st = b + np_ + 3 + np_ * 4 + (p - 1) * 3;
    st[0] = v.depth[p];
    st[1] = v.ret[p][0];
    st[2] = v.ret[p][1];
  }
  return s;
}

std::vector<std::string> AlockModel::initial_states() const {
  View v{};
  for (int p = 1; p <= np_; ++p) {
    v.pc[p] = lbl(Label::kP1);
    v.budget[p] = -1;
  }
  // victim starts at either cohort slot; exploration branches on both
  std::vector<std::string> out;
  for (uint8_t victim : {1, 2}) {
    v.victim = victim;
    out.push_back(encode(v));
  }
  return out;
}

bool AlockModel::step(const std::string& state, int pid, std::string& out,
                      uint8_t& label) const {
  View v = decode(state);
  const auto l = static_cast<Label>(v.pc[pid]);
  label = v.pc[pid];
  auto push = [&](Label ret, Label target) {
    assert(v.depth[pid] < 2);
    v.ret[pid][v.depth[pid]++] = lbl(ret);
    v.pc[pid] = lbl(target);
  };
  auto pop = [&] {
    assert(v.depth[pid] > 0);
    v.pc[pid] = v.ret[pid][--v.depth[pid]];
    v.ret[pid][v.depth[pid]] = 0;
  };
  switch (l) {
    case Label::kP1: v.pc[pid] = lbl(Label::kNcs); break;
    case Label::kNcs: v.pc[pid] = lbl(Label::kEnter); break;
    case Label::kEnter:
      v.pred[pid] = 0;  // fresh procedure local
      push(Label::kP2, Label::kC1);
      break;
    case Label::kP2:
      if (!v.passed[pid]) push(Label::kCs, Label::kG1);
      else v.pc[pid] = lbl(Label::kCs);
      break;
    case Label::kCs: v.pc[pid] = lbl(Label::kExit); break;
    case Label::kExit: push(Label::kP1, Label::kCas); break;

    case Label::kG1:
      if (mutation_ != Mutation::kDropVictimWrite) v.victim = static_cast<uint8_t>(pid);
      v.pc[pid] = lbl(Label::kGwait);
      break;
    case Label::kGwait: v.pc[pid] = lbl(Label::kG2); break;
    case Label::kG2:
      v.pc[pid] = lbl(v.cohort[them(pid)] == 0 ? Label::kG4 : Label::kG3);
      break;
    case Label::kG3:
      v.pc[pid] = lbl(v.victim != pid ? Label::kG4 : Label::kGwait);
      break;
    case Label::kG4: pop(); break;

    case Label::kC1:
      v.budget[pid] = -1;
      v.next[pid] = 0;
      v.pc[pid] = lbl(Label::kSwap);
      break;
    case Label::kSwap:
      v.pred[pid] = v.cohort[us(pid)];
      v.cohort[us(pid)] = static_cast<uint8_t>(pid);
      v.pc[pid] = lbl(Label::kCwait);
      break;
    case Label::kCwait:
      v.pc[pid] = lbl(v.pred[pid] != 0 ? Label::kC2 : Label::kC8);
      break;
    case Label::kC2:
      v.next[v.pred[pid]] = static_cast<uint8_t>(pid);
      v.pc[pid] = lbl(Label::kC3);
      break;
    case Label::kC3:
      if (v.budget[pid] < 0) return false;  // await Budget(self) >= 0
      v.pc[pid] = lbl(Label::kC4);
      break;
    case Label::kC4:
      v.pc[pid] = lbl(v.budget[pid] == 0 ? Label::kC5 : Label::kC7);
      break;
    case Label::kC5: push(Label::kC6, Label::kG1); break;
    case Label::kC6:
      v.budget[pid] = static_cast<int8_t>(budget_);
      v.pc[pid] = lbl(Label::kC7);
      break;
    case Label::kC7:
      v.passed[pid] = 1;
      v.pc[pid] = lbl(Label::kC10);
      break;
    case Label::kC8:
      v.budget[pid] = static_cast<int8_t>(budget_);
      v.pc[pid] = lbl(Label::kC9);
      break;
    case Label::kC9:
      v.passed[pid] = 0;
      v.pc[pid] = lbl(Label::kC10);
      break;
    case Label::kC10:
      v.pred[pid] = 0;  // locals restore to their defaults on return
      pop();
      break;

    case Label::kCas:
      if (v.cohort[us(pid)] == pid) {
        v.cohort[us(pid)] = 0;
        v.pc[pid] = lbl(Label::kR3);
      } else {
        v.pc[pid] = lbl(mutation_ == Mutation::kSkipSuccessorWait ? Label::kR3
                                                                  : Label::kR1);
      }
      break;
    case Label::kR1:
      if (v.next[pid] == 0) return false;  // await a linked successor
      v.pc[pid] = lbl(Label::kR2);
      break;
    case Label::kR2: {
      int dec = mutation_ == Mutation::kPassWithoutDecrement ? 0 : 1;
      v.budget[v.next[pid]] = static_cast<int8_t>(v.budget[pid] - dec);
      v.pc[pid] = lbl(Label::kR3);
      break;
    }
    case Label::kR3: pop(); break;
  }
  out = encode(v);
  return true;
}

bool AlockModel::obliged(const std::string& state, int pid) const {
  const auto l = static_cast<Label>(pc_of(state, pid));
  if (l == Label::kNcs) return false;  // fairness-exempt
  if (l == Label::kC3 || l == Label::kR1) {
    View v = decode(state);
    return l == Label::kC3 ? v.budget[pid] >= 0 : v.next[pid] != 0;
  }
  return true;
}

const char* AlockModel::label_name(uint8_t label) const {
  return alock::to_string(static_cast<Label>(label));
}

int AlockModel::cs_count(const std::string& state) const {
  int n = 0;
  for (int p = 1; p <= np_; ++p)
    if (pc_of(state, p) == lbl(Label::kCs)) ++n;
  return n;
}

// --- spin-lock model ---------------------------------------------------------

namespace {
constexpr uint8_t kNoRank = 0xFF;

// Retire `pid`'s arrival rank, keeping the survivors contiguous from 0.
void drop_rank(uint8_t* rank, int np, int pid) {
  uint8_t r = rank[pid - 1];
  rank[pid - 1] = kNoRank;
  if (r == kNoRank) return;
  for (int j = 0; j < np; ++j)
    if (rank[j] != kNoRank && rank[j] > r) rank[j]--;
}

uint8_t take_rank(const uint8_t* rank, int np) {
  uint8_t n = 0;
  for (int j = 0; j < np; ++j)
    if (rank[j] != kNoRank) ++n;
  return n;
}

// A later arrival sits in the critical section while an earlier one waits.
bool rank_order_broken(const std::string& s, int np, uint8_t cs_code,
                       const uint8_t* rank) {
  for (int i = 0; i < np; ++i) {
    if (static_cast<uint8_t>(s[i]) != cs_code || rank[i] == kNoRank) continue;
    for (int j = 0; j < np; ++j)
      if (rank[j] != kNoRank && rank[j] < rank[i]) return true;
  }
  return false;
}
}  // namespace

SpinModel::SpinModel(const CheckerConfig& cfg) : np_(cfg.num_processes) {}

std::vector<std::string> SpinModel::initial_states() const {
  std::string s(static_cast<size_t>(2 * np_ + 1), '\0');
  for (int p = 0; p < np_; ++p) {
    s[p] = kP1;
    s[np_ + 1 + p] = static_cast<char>(kNoRank);
  }
  return {s};
}

bool SpinModel::step(const std::string& state, int pid, std::string& out,
                     uint8_t& label) const {
  std::string s = state;
  auto* b = reinterpret_cast<uint8_t*>(s.data());
  uint8_t* lk = b + np_;
  uint8_t* rank = b + np_ + 1;
  label = b[pid - 1];
  switch (label) {
    case kP1: b[pid - 1] = kNcs; break;
    case kNcs: b[pid - 1] = kEnter; break;
    case kEnter:
      rank[pid - 1] = take_rank(rank, np_);
      b[pid - 1] = kTry;
      break;
    case kTry:
      // A CAS round against a held word changes nothing — a stutter, so it is
      // modelled (and fairness-counted) as a blocked await instead.
      if (*lk != 0) return false;
      *lk = static_cast<uint8_t>(pid);
      b[pid - 1] = kCs;
      break;
    case kCs: b[pid - 1] = kExit; break;
    case kExit:
      *lk = 0;
      drop_rank(rank, np_, pid);
      b[pid - 1] = kP1;
      break;
    default: return false;
  }
  out = std::move(s);
  return true;
}

bool SpinModel::obliged(const std::string& state, int pid) const {
  uint8_t l = pc_of(state, pid);
  if (l == kNcs) return false;
  if (l == kTry) return static_cast<uint8_t>(state[np_]) == 0;
  return true;
}

const char* SpinModel::label_name(uint8_t label) const {
  switch (label) {
    case kP1: return "p1";
    case kNcs: return "ncs";
    case kEnter: return "enter";
    case kTry: return "try";
    case kCs: return "cs";
    case kExit: return "exit";
  }
  return "?";
}

int SpinModel::cs_count(const std::string& state) const {
  int n = 0;
  for (int p = 0; p < np_; ++p)
    if (static_cast<uint8_t>(state[p]) == kCs) ++n;
  return n;
}

bool SpinModel::fifo_violated(const std::string& state) const {
  return rank_order_broken(state, np_, kCs,
                           reinterpret_cast<const uint8_t*>(state.data()) + np_ + 1);
}

// --- MCS queue-lock model ----------------------------------------------------

McsModel::McsModel(const CheckerConfig& cfg) : np_(cfg.num_processes) {}

namespace {
struct McsFields {
  uint8_t* go;
  uint8_t* next;
  uint8_t* pred;
  uint8_t* rank;
};
McsFields mcs_fields(uint8_t* b, int np, int pid) {
  uint8_t* f = b + np + 1 + (pid - 1) * 4;
  return {f, f + 1, f + 2, f + 3};
}
}  // namespace

std::vector<std::string> McsModel::initial_states() const {
  std::string s(static_cast<size_t>(5 * np_ + 1), '\0');
  auto* b = reinterpret_cast<uint8_t*>(s.data());
  for (int p = 1; p <= np_; ++p) {
    b[p - 1] = kP1;
    *mcs_fields(b, np_, p).rank = kNoRank;
  }
  return {s};
}

bool McsModel::step(const std::string& state, int pid, std::string& out,
                    uint8_t& label) const {
  std::string s = state;
  auto* b = reinterpret_cast<uint8_t*>(s.data());
  uint8_t* tail = b + np_;
  McsFields f = mcs_fields(b, np_, pid);
  // per-pid rank bytes are strided; drop/take walk them via this view
  uint8_t ranks[kMaxProcs];
  auto load_ranks = [&] {
    for (int p = 1; p <= np_; ++p) ranks[p - 1] = *mcs_fields(b, np_, p).rank;
  };
  auto store_ranks = [&] {
    for (int p = 1; p <= np_; ++p) *mcs_fields(b, np_, p).rank = ranks[p - 1];
  };
  label = b[pid - 1];
  switch (label) {
    case kP1: b[pid - 1] = kNcs; break;
    case kNcs: b[pid - 1] = kEnter; break;
    case kEnter:
      *f.go = 0;
      *f.next = 0;
      *f.pred = 0;
      b[pid - 1] = kSwp;
      break;
    case kSwp:
      *f.pred = *tail;
      *tail = static_cast<uint8_t>(pid);
      load_ranks();
      ranks[pid - 1] = take_rank(ranks, np_);
      store_ranks();
      b[pid - 1] = kLnk;
      break;
    case kLnk:
      if (*f.pred != 0) {
        *mcs_fields(b, np_, *f.pred).next = static_cast<uint8_t>(pid);
        b[pid - 1] = kWai;
      } else {
        b[pid - 1] = kCs;
      }
      break;
    case kWai:
      if (*f.go == 0) return false;  // parked until the predecessor's hand-off
      b[pid - 1] = kCs;
      break;
    case kCs: b[pid - 1] = kCas; break;
    case kCas:
      if (*tail == pid) {
        *tail = 0;
        load_ranks();
        drop_rank(ranks, np_, pid);
        store_ranks();
        b[pid - 1] = kP1;
      } else {
        b[pid - 1] = kR1;
      }
      break;
    case kR1:
      if (*f.next == 0) return false;  // successor swapped in but not linked
      b[pid - 1] = kR2;
      break;
    case kR2:
      *mcs_fields(b, np_, *f.next).go = 1;
      load_ranks();
      drop_rank(ranks, np_, pid);
      store_ranks();
      b[pid - 1] = kP1;
      break;
    default: return false;
  }
  out = std::move(s);
  return true;
}

bool McsModel::obliged(const std::string& state, int pid) const {
  uint8_t l = pc_of(state, pid);
  if (l == kNcs) return false;
  const auto* b = reinterpret_cast<const uint8_t*>(state.data());
  const uint8_t* f = b + np_ + 1 + (pid - 1) * 4;
  if (l == kWai) return f[0] == 1;
  if (l == kR1) return f[1] != 0;
  return true;
}

const char* McsModel::label_name(uint8_t label) const {
  switch (label) {
    case kP1: return "p1";
    case kNcs: return "ncs";
    case kEnter: return "enter";
    case kSwp: return "swap";
    case kLnk: return "link";
    case kWai: return "wait";
    case kCs: return "cs";
    case kCas: return "cas";
    case kR1: return "r1";
    case kR2: return "r2";
  }
  return "?";
}

int McsModel::cs_count(const std::string& state) const {
  int n = 0;
  for (int p = 0; p < np_; ++p)
    if (static_cast<uint8_t>(state[p]) == kCs) ++n;
  return n;
}

bool McsModel::fifo_violated(const std::string& state) const {
  uint8_t ranks[kMaxProcs];
  const auto* b = reinterpret_cast<const uint8_t*>(state.data());
  for (int p = 1; p <= np_; ++p) ranks[p - 1] = b[np_ + 1 + (p - 1) * 4 + 3];
  return rank_order_broken(state, np_, kCs, ranks);
}

// --- exploration -------------------------------------------------------------

StateGraph explore(const Model& m, uint64_t max_states) {
  StateGraph g;
  g.np = m.np();
  g.model = &m;
  std::unordered_map<std::string, uint32_t> index;
  auto intern = [&](const std::string& s, uint32_t parent, Edge via) {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    auto id = static_cast<uint32_t>(g.states.size());
    index.emplace(s, id);
    g.states.push_back(s);
    g.adj.emplace_back();
    g.parent.push_back(parent);
    g.via.push_back(via);
    for (int pid = 1; pid <= g.np; ++pid)
      g.obliged.push_back(m.obliged(s, pid) ? 1 : 0);
    return id;
  };
  for (const auto& s : m.initial_states())
    g.roots.push_back(intern(s, StateGraph::kNoParent, Edge{}));
  std::string nxt;
  uint8_t label = 0;
  for (uint32_t i = 0; i < g.states.size(); ++i) {
    if (g.states.size() >= max_states) {
      g.capped = true;  // frontier left unexpanded
      break;
    }
    const std::string s = g.states[i];  // copy: intern() may reallocate
    for (int pid = 1; pid <= g.np; ++pid) {
      if (!m.step(s, pid, nxt, label)) continue;
      uint32_t to = intern(nxt, i, Edge{0, static_cast<uint8_t>(pid), label});
      g.adj[i].push_back(Edge{to, static_cast<uint8_t>(pid), label});
    }
  }
  return g;
}

// --- property evaluation -----------------------------------------------------

namespace {

using Flags = std::vector<uint8_t>;

template <typename Pred>
Flags mark(const StateGraph& g, Pred pred) {
  Flags f(g.size(), 0);
  for (uint32_t s = 0; s < g.size(); ++s) f[s] = pred(s) ? 1 : 0;
  return f;
}

// Shortest schedule from an initial state to `s` along the BFS tree; the
// position of that initial state within StateGraph::roots lands in root_out.
std::vector<TraceStep> tree_prefix(const StateGraph& g, uint32_t s,
                                   int& root_out) {
  std::vector<TraceStep> steps;
  uint32_t cur = s;
  while (g.parent[cur] != StateGraph::kNoParent) {
    steps.push_back(TraceStep{g.via[cur].pid, g.via[cur].label});
    cur = g.parent[cur];
  }
  root_out = 0;
  for (size_t i = 0; i < g.roots.size(); ++i)
    if (g.roots[i] == cur) root_out = static_cast<int>(i);
  std::reverse(steps.begin(), steps.end());
  return steps;
}

void append_edges(std::vector<TraceStep>& out, const std::vector<Edge>& edges) {
  for (const Edge& e : edges) out.push_back(TraceStep{e.pid, e.label});
}

// BFS inside `allowed` (nullptr = everywhere) from `starts` to the first state
// satisfying `target`; edge list of the path comes back through `path`.
template <typename Pred>
bool bfs_path(const StateGraph& g, const std::vector<uint32_t>& starts,
              const Flags* allowed, Pred target, uint32_t& end,
              std::vector<Edge>& path, uint32_t& origin) {
  std::vector<uint32_t> prev(g.size(), StateGraph::kNoParent);
  std::vector<Edge> via(g.size());
  std::vector<uint8_t> seen(g.size(), 0);
  std::vector<uint32_t> queue;
  std::vector<uint32_t> root(g.size(), StateGraph::kNoParent);
  for (uint32_t s : starts) {
    if (seen[s] || (allowed && !(*allowed)[s])) continue;
    seen[s] = 1;
    root[s] = s;
    queue.push_back(s);
  }
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    uint32_t v = queue[qi];
    if (target(v)) {
      end = v;
      origin = root[v];
      std::vector<Edge> rev;
      for (uint32_t cur = v; prev[cur] != StateGraph::kNoParent; cur = prev[cur])
        rev.push_back(via[cur]);
      path.assign(rev.rbegin(), rev.rend());
      return true;
    }
    for (const Edge& e : g.adj[v]) {
      if (seen[e.to] || (allowed && !(*allowed)[e.to])) continue;
      seen[e.to] = 1;
      prev[e.to] = v;
      via[e.to] = e;
      root[e.to] = root[v];
      queue.push_back(e.to);
    }
  }
  return false;
}

std::string step_text(const Model& m, const TraceStep& t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "p%d %s", t.pid, m.label_name(t.label));
  return buf;
}

}  // namespace

std::string report_line(const PropertyReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "property=%s verdict=%s states=%llu",
                r.property.c_str(), to_string(r.verdict),
                static_cast<unsigned long long>(r.states));
  return buf;
}

std::string render_trace(const Model& m, const PropertyReport& r) {
  if (r.verdict != Verdict::kViolated) return "";
  std::string out;
  int n = 0;
  for (const auto& t : r.prefix)
    out += "  " + std::to_string(++n) + ". " + step_text(m, t) + "\n";
  if (!r.cycle.empty()) {
    out += "  -- loop --\n";
    for (const auto& t : r.cycle)
      out += "  " + std::to_string(++n) + ". " + step_text(m, t) + "\n";
  }
  if (r.stutter) out += "  -- no fair step required; stutters forever --\n";
  return out;
}

bool CheckResult::all_hold() const {
  for (const auto& r : reports)
    if (!r.informational && r.verdict != Verdict::kHolds) return false;
  return true;
}

namespace {

PropertyReport safety_report(const StateGraph& g, const std::string& name,
                             const Flags& bad) {
  PropertyReport r;
  r.property = name;
  r.states = g.size();
  for (uint32_t s = 0; s < g.size(); ++s) {
    if (!bad[s]) continue;
    r.verdict = Verdict::kViolated;
    r.prefix = tree_prefix(g, s, r.root);
    r.detail = "reached a violating state at depth " +
               std::to_string(r.prefix.size());
    return r;
  }
  r.verdict = Verdict::kHolds;
  if (g.capped) r.detail = "explored prefix only (state cap hit)";
  return r;
}

// Builds the violation report for "from every premise state, every fair
// behavior eventually satisfies q": violated by a premise state inside
// fair_avoid(q).
bool leads_to_violation(const StateGraph& g, const Flags& premise,
                        const FairAvoid& fa, PropertyReport& r) {
  for (uint32_t s = 0; s < g.size(); ++s) {
    if (!premise[s] || !fa.avoid[s]) continue;
    Lasso lasso = build_lasso(g, fa, s);
    r.verdict = Verdict::kViolated;
    r.prefix = tree_prefix(g, s, r.root);
    append_edges(r.prefix, lasso.path);
    append_edges(r.cycle, lasso.cycle);
    r.stutter = lasso.stutter;
    return true;
  }
  return false;
}

struct AlockCodes {
  uint8_t cs = lbl(Label::kCs);
  uint8_t enter = lbl(Label::kEnter);
  uint8_t cwait = lbl(Label::kCwait);
  uint8_t gwait = lbl(Label::kGwait);
  uint8_t c3 = lbl(Label::kC3);
};

// (pc[i]=premise_pc ∧ pc[j]=enter) ⇒ every fair behavior from there that
// reaches pid i's critical section also reaches pid j's — the suffix reading
// of the paired fairness properties.
void check_pairwise_fairness(const StateGraph& g, const std::string& name,
                             uint8_t premise_pc, bool informational,
                             const std::vector<Flags>& cs_of,
                             const std::vector<FairAvoid>& fa_of,
                             std::vector<PropertyReport>& out) {
  const AlockCodes codes;
  PropertyReport r;
  r.property = name;
  r.states = g.size();
  r.informational = informational;
  for (int i = 1; i <= g.np && r.verdict == Verdict::kHolds; ++i) {
    for (int j = 1; j <= g.np; ++j) {
      if (i == j) continue;
      const Flags& qj = cs_of[j];
      const FairAvoid& faj = fa_of[j];
      std::vector<uint32_t> starts;
      for (uint32_t s = 0; s < g.size(); ++s)
        if (g.pc(s, i) == premise_pc && g.pc(s, j) == codes.enter)
          starts.push_back(s);
      if (starts.empty()) continue;
      // hunt a cs_i state, avoiding cs_j throughout, that can then dodge
      // cs_j fairly forever
      Flags allowed = mark(g, [&](uint32_t s) { return !qj[s]; });
      uint32_t t = 0, origin = 0;
      std::vector<Edge> path;
      auto target = [&](uint32_t s) {
        return g.pc(s, i) == codes.cs && faj.avoid[s];
      };
      if (!bfs_path(g, starts, &allowed, target, t, path, origin)) continue;
      Lasso lasso = build_lasso(g, faj, t);
      r.verdict = Verdict::kViolated;
      r.prefix = tree_prefix(g, origin, r.root);
      append_edges(r.prefix, path);
      append_edges(r.prefix, lasso.path);
      append_edges(r.cycle, lasso.cycle);
      r.stutter = lasso.stutter;
      char d[96];
      std::snprintf(d, sizeof(d), "process %d passes while process %d never enters",
                    i, j);
      r.detail = d;
      break;
    }
  }
  out.push_back(std::move(r));
}

void alock_properties(const StateGraph& g, std::vector<PropertyReport>& out) {
  const AlockCodes codes;
  const int np = g.np;

  Flags mutual = mark(g, [&](uint32_t s) {
    return g.model->cs_count(g.states[s]) >= 2;
  });
  out.push_back(safety_report(g, "MutualExclusion", mutual));

  if (g.capped) {
    for (const char* name :
         {"ExecsCriticalSectionInfinitelyOften", "StarvationFree",
          "DeadAndLivelockFree", "CohortFairness", "GlobalFairness",
          "CohortFairnessAtC3"}) {
      PropertyReport r;
      r.property = name;
      r.states = g.size();
      r.verdict = Verdict::kRefused;
      r.informational = std::string_view(name) == "CohortFairnessAtC3";
      r.detail = "liveness needs the full graph; state cap hit";
      out.push_back(std::move(r));
    }
    return;
  }

  std::vector<Flags> cs_of(np + 1);
  std::vector<FairAvoid> fa_of(np + 1);
  for (int i = 1; i <= np; ++i) {
    cs_of[i] = mark(g, [&](uint32_t s) { return g.pc(s, i) == codes.cs; });
    fa_of[i] = fair_avoid(g, cs_of[i]);
  }

  {
    // □◇cs per pid; the fairness-exempt idle section makes this expected to
    // fail — a process may park there forever — so the verdict is reported
    // but the property is not part of the gating set.
    PropertyReport r;
    r.property = "ExecsCriticalSectionInfinitelyOften";
    r.states = g.size();
    r.informational = true;
    Flags everywhere(g.size(), 1);
    for (int i = 1; i <= np; ++i) {
      if (leads_to_violation(g, everywhere, fa_of[i], r)) {
        r.detail = "process " + std::to_string(i) +
                   " may idle outside the critical section forever";
        break;
      }
    }
    out.push_back(std::move(r));
  }

  {
    PropertyReport r;
    r.property = "StarvationFree";
    r.states = g.size();
    for (int i = 1; i <= np; ++i) {
      Flags premise = mark(g, [&](uint32_t s) { return g.pc(s, i) == codes.enter; });
      if (leads_to_violation(g, premise, fa_of[i], r)) {
        r.detail = "process " + std::to_string(i) + " requests but never enters";
        break;
      }
    }
    out.push_back(std::move(r));
  }

  {
    PropertyReport r;
    r.property = "DeadAndLivelockFree";
    r.states = g.size();
    Flags any_cs = mark(g, [&](uint32_t s) {
      return g.model->cs_count(g.states[s]) >= 1;
    });
    Flags any_enter = mark(g, [&](uint32_t s) {
      for (int i = 1; i <= np; ++i)
        if (g.pc(s, i) == codes.enter) return true;
      return false;
    });
    FairAvoid fa = fair_avoid(g, any_cs);
    if (leads_to_violation(g, any_enter, fa, r))
      r.detail = "a request exists but nobody ever enters";
    out.push_back(std::move(r));
  }

  check_pairwise_fairness(g, "CohortFairness", codes.cwait, false, cs_of, fa_of, out);
  check_pairwise_fairness(g, "GlobalFairness", codes.gwait, false, cs_of, fa_of, out);
  // The quoted premise label is a branch point the pc only touches for one
  // step; the blocking wait sits at c3, so the same check anchored there is
  // reported for information.
  check_pairwise_fairness(g, "CohortFairnessAtC3", codes.c3, true, cs_of, fa_of, out);
}

void baseline_properties(const StateGraph& g, uint8_t cs_code,
                         uint8_t enter_code, std::vector<PropertyReport>& out) {
  Flags mutual = mark(g, [&](uint32_t s) {
    return g.model->cs_count(g.states[s]) >= 2;
  });
  out.push_back(safety_report(g, "MutualExclusion", mutual));
  Flags fifo = mark(g, [&](uint32_t s) {
    return g.model->fifo_violated(g.states[s]);
  });
  out.push_back(safety_report(g, "FifoOrder", fifo));

  if (g.capped) {
    for (const char* name : {"StarvationFree", "DeadAndLivelockFree"}) {
      PropertyReport r;
      r.property = name;
      r.states = g.size();
      r.verdict = Verdict::kRefused;
      r.detail = "liveness needs the full graph; state cap hit";
      out.push_back(std::move(r));
    }
    return;
  }

  {
    PropertyReport r;
    r.property = "StarvationFree";
    r.states = g.size();
    for (int i = 1; i <= g.np; ++i) {
      Flags cs_i = mark(g, [&](uint32_t s) { return g.pc(s, i) == cs_code; });
      FairAvoid fa = fair_avoid(g, cs_i);
      Flags premise = mark(g, [&](uint32_t s) { return g.pc(s, i) == enter_code; });
      if (leads_to_violation(g, premise, fa, r)) {
        r.detail = "process " + std::to_string(i) + " requests but never enters";
        break;
      }
    }
    out.push_back(std::move(r));
  }
  {
    PropertyReport r;
    r.property = "DeadAndLivelockFree";
    r.states = g.size();
    Flags any_cs = mark(g, [&](uint32_t s) {
      return g.model->cs_count(g.states[s]) >= 1;
    });
    Flags any_enter = mark(g, [&](uint32_t s) {
      for (int i = 1; i <= g.np; ++i)
        if (g.pc(s, i) == enter_code) return true;
      return false;
    });
    FairAvoid fa = fair_avoid(g, any_cs);
    if (leads_to_violation(g, any_enter, fa, r))
      r.detail = "a request exists but nobody ever enters";
    out.push_back(std::move(r));
  }
}

}  // namespace

CheckResult run_check(const CheckerConfig& cfg) {
  validate(cfg);
  CheckResult res;
  res.config = cfg;
  switch (cfg.algo) {
    case Algo::kAlock: {
      AlockModel m(cfg);
      StateGraph g = explore(m, cfg.max_states);
      res.states_explored = g.size();
      res.capped = g.capped;
      alock_properties(g, res.reports);
      break;
    }
    case Algo::kSpinlock: {
      SpinModel m(cfg);
      StateGraph g = explore(m, cfg.max_states);
      res.states_explored = g.size();
      res.capped = g.capped;
      baseline_properties(g, SpinModel::kCs, SpinModel::kEnter, res.reports);
      break;
    }
    case Algo::kMcs: {
      McsModel m(cfg);
      StateGraph g = explore(m, cfg.max_states);
      res.states_explored = g.size();
      res.capped = g.capped;
      baseline_properties(g, McsModel::kCs, McsModel::kEnter, res.reports);
      break;
    }
  }
  return res;
}

}  // namespace alock::model

#include <algorithm>
#include <cassert>

#include "alock/checker.hpp"

namespace alock::model {

namespace {

// Iterative Tarjan over the subgraph of states with q[s]==0; comp[s] = -1
// outside it.  Component ids are assigned deterministically by DFS order.
void strongly_connected(const StateGraph& g, const std::vector<uint8_t>& q,
                        std::vector<int32_t>& comp, int32_t& ncomp) {
  const auto n = static_cast<uint32_t>(g.size());
  comp.assign(n, -1);
  std::vector<uint32_t> index(n, UINT32_MAX), low(n, 0);
  std::vector<uint8_t> on(n, 0);
  std::vector<uint32_t> stk;
  struct Frame {
    uint32_t v;
    uint32_t ei;
  };
  std::vector<Frame> call;
  uint32_t counter = 0;
  ncomp = 0;
  for (uint32_t r = 0; r < n; ++r) {
    if (q[r] || index[r] != UINT32_MAX) continue;
    index[r] = low[r] = counter++;
    stk.push_back(r);
    on[r] = 1;
    call.push_back({r, 0});
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.ei < g.adj[f.v].size()) {
        uint32_t w = g.adj[f.v][f.ei].to;
        f.ei++;
        if (q[w]) continue;
        if (index[w] == UINT32_MAX) {
          index[w] = low[w] = counter++;
          stk.push_back(w);
          on[w] = 1;
          call.push_back({w, 0});  // f is dead past this point
        } else if (on[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        uint32_t v = f.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        if (low[v] == index[v]) {
          while (true) {
            uint32_t w = stk.back();
            stk.pop_back();
            on[w] = 0;
            comp[w] = ncomp;
            if (w == v) break;
          }
          ncomp++;
        }
      }
    }
  }
}

// BFS path restricted to states where allow(s); returns edges start→target.
template <typename Allow, typename Target>
bool constrained_path(const StateGraph& g, uint32_t start, Allow allow,
                      Target target, uint32_t& end, std::vector<Edge>& path) {
  std::vector<uint32_t> prev(g.size(), StateGraph::kNoParent);
  std::vector<Edge> via(g.size());
  std::vector<uint8_t> seen(g.size(), 0);
  std::vector<uint32_t> queue{start};
  seen[start] = 1;
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    uint32_t v = queue[qi];
    if (target(v)) {
      end = v;
      std::vector<Edge> rev;
      for (uint32_t cur = v; prev[cur] != StateGraph::kNoParent; cur = prev[cur])
        rev.push_back(via[cur]);
      path.assign(rev.rbegin(), rev.rend());
      return true;
    }
    for (const Edge& e : g.adj[v]) {
      if (seen[e.to] || !allow(e.to)) continue;
      seen[e.to] = 1;
      prev[e.to] = v;
      via[e.to] = e;
      queue.push_back(e.to);
    }
  }
  return false;
}

}  // namespace

FairAvoid fair_avoid(const StateGraph& g, const std::vector<uint8_t>& q) {
  const auto n = static_cast<uint32_t>(g.size());
  const int np = g.np;
  FairAvoid fa;
  int32_t ncomp = 0;
  strongly_connected(g, q, fa.comp, ncomp);

  // Per-component fairness witnesses.  A cycle inside a component can be made
  // fair for pid by routing through a state where pid owes no step, or through
  // one of pid's own steps; a component missing both for some pid admits no
  // fair cycle at all.
  std::vector<uint32_t> size(ncomp, 0);
  std::vector<uint8_t> selfloop(ncomp, 0);
  std::vector<uint16_t> unobliged(ncomp, 0), stepped(ncomp, 0);
  fa.quiescent.assign(n, 0);
  for (uint32_t s = 0; s < n; ++s) {
    int32_t c = fa.comp[s];
    if (c < 0) continue;
    size[c]++;
    uint16_t owes = 0;
    for (int pid = 1; pid <= np; ++pid)
      if (g.is_obliged(s, pid)) owes |= static_cast<uint16_t>(1 << (pid - 1));
    unobliged[c] |= static_cast<uint16_t>(~owes);
    if (owes == 0) fa.quiescent[s] = 1;  // no fair step due: stutter forever
    for (const Edge& e : g.adj[s]) {
      if (fa.comp[e.to] != c) continue;
      if (e.to == s) selfloop[c] = 1;
      stepped[c] |= static_cast<uint16_t>(1 << (e.pid - 1));
    }
  }
  const auto all = static_cast<uint16_t>((1u << np) - 1);
  fa.comp_fair.assign(ncomp, 0);
  for (int32_t c = 0; c < ncomp; ++c) {
    bool nontrivial = size[c] >= 2 || selfloop[c];
    fa.comp_fair[c] =
        nontrivial && ((unobliged[c] | stepped[c]) & all) == all ? 1 : 0;
  }

  // Backward closure of the witnesses through ¬q: reverse-CSR then BFS.
  std::vector<uint32_t> indeg(n + 1, 0);
  for (uint32_t s = 0; s < n; ++s) {
    if (q[s]) continue;
    for (const Edge& e : g.adj[s])
      if (!q[e.to]) indeg[e.to + 1]++;
  }
  for (uint32_t i = 0; i < n; ++i) indeg[i + 1] += indeg[i];
  std::vector<uint32_t> rsrc(indeg[n]);
  {
    std::vector<uint32_t> cursor(indeg.begin(), indeg.end() - 1);
    for (uint32_t s = 0; s < n; ++s) {
      if (q[s]) continue;
      for (const Edge& e : g.adj[s])
        if (!q[e.to]) rsrc[cursor[e.to]++] = s;
    }
  }
  fa.avoid.assign(n, 0);
  std::vector<uint32_t> queue;
  for (uint32_t s = 0; s < n; ++s) {
    if (fa.quiescent[s] || (fa.comp[s] >= 0 && fa.comp_fair[fa.comp[s]])) {
      fa.avoid[s] = 1;
      queue.push_back(s);
    }
  }
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    uint32_t v = queue[qi];
    for (uint32_t ri = indeg[v]; ri < indeg[v + 1]; ++ri) {
      uint32_t s = rsrc[ri];
      if (fa.avoid[s]) continue;
      fa.avoid[s] = 1;
      queue.push_back(s);
    }
  }
  return fa;
}

Lasso build_lasso(const StateGraph& g, const FairAvoid& fa, uint32_t from) {
  assert(fa.avoid[from]);
  Lasso out;
  auto in_avoid = [&](uint32_t s) { return fa.avoid[s] != 0; };
  auto is_seed = [&](uint32_t s) {
    return fa.quiescent[s] || (fa.comp[s] >= 0 && fa.comp_fair[fa.comp[s]]);
  };
  uint32_t seed = from;
  bool ok = constrained_path(g, from, in_avoid, is_seed, seed, out.path);
  assert(ok);
  (void)ok;
  if (fa.quiescent[seed] && !(fa.comp[seed] >= 0 && fa.comp_fair[fa.comp[seed]])) {
    out.stutter = true;
    return out;
  }

  // Stitch a genuinely fair cycle: visit, per pid, either a state owing it
  // nothing or one of its own steps, then close back to the entry state.
  const int32_t c = fa.comp[seed];
  auto in_comp = [&](uint32_t s) { return fa.comp[s] == c; };
  uint32_t cur = seed;
  auto route_to = [&](uint32_t dest) {
    if (cur == dest) return;
    std::vector<Edge> hop;
    uint32_t end = dest;
    bool found = constrained_path(g, cur, in_comp,
                                  [&](uint32_t s) { return s == dest; }, end, hop);
    assert(found);
    (void)found;
    out.cycle.insert(out.cycle.end(), hop.begin(), hop.end());
    cur = dest;
  };
  for (int pid = 1; pid <= g.np; ++pid) {
    uint32_t relaxed = UINT32_MAX;
    const Edge* step = nullptr;
    uint32_t step_src = 0;
    for (uint32_t s = 0; s < g.size() && relaxed == UINT32_MAX; ++s) {
      if (fa.comp[s] != c) continue;
      if (!g.is_obliged(s, static_cast<int>(pid))) {
        relaxed = s;
        break;
      }
      if (!step)
        for (const Edge& e : g.adj[s])
          if (e.pid == pid && fa.comp[e.to] == c) {
            step = &e;
            step_src = s;
            break;
          }
    }
    if (relaxed != UINT32_MAX) {
      route_to(relaxed);
    } else {
      assert(step != nullptr);  // the component is fair, so a witness exists
      route_to(step_src);
      out.cycle.push_back(*step);
      cur = step->to;
    }
  }
  route_to(seed);
  if (out.cycle.empty()) {
    // every witness coincided with the entry state; take any in-component hop
    for (const Edge& e : g.adj[seed])
      if (fa.comp[e.to] == c) {
        out.cycle.push_back(e);
        cur = e.to;
        break;
      }
    route_to(seed);
  }
  return out;
}

}  // namespace alock::model

// Python bindings for the main operations: state-space checking, the cost
// simulator (single runs and the allowance sweep), the deterministic trace
// scenarios, and the global-pointer type.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "alock/checker.hpp"
#include "alock/config.hpp"
#include "alock/rdma_ptr.hpp"
#include "alock/scenario.hpp"
#include "alock/sim.hpp"

namespace py = pybind11;

namespace {

alock::model::CheckerConfig make_checker_config(const std::string& algo,
                                                int np, int budget,
                                                uint64_t max_states) {
  alock::model::CheckerConfig cfg;
  if (!alock::model::algo_from_string(algo, cfg.algo))
    throw std::invalid_argument("algo must be alock, spinlock, or mcs");
  cfg.num_processes = np;
  cfg.initial_budget = budget;
  cfg.max_states = max_states;
  alock::model::validate(cfg);
  return cfg;
}

py::dict check(const std::string& algo, int np, int budget,
               uint64_t max_states) {
  alock::model::CheckResult res =
      alock::model::run_check(make_checker_config(algo, np, budget, max_states));
  py::dict props;
  py::list informational;
  for (const auto& r : res.reports) {
    props[py::str(r.property)] = alock::model::to_string(r.verdict);
    if (r.informational) informational.append(r.property);
  }
  py::dict out;
  out["states_explored"] = res.states_explored;
  out["capped"] = res.capped;
  out["all_hold"] = res.all_hold();
  out["properties"] = props;
  out["informational"] = informational;
  return out;
}

py::dict bench(const std::string& config_text) {
  alock::BenchConfig cfg = alock::parse_bench_config(config_text);
  alock::sim::RunMetrics r =
      alock::sim::run(cfg.workload, cfg.model, cfg.algo, cfg.budgets);
  py::dict out;
  out["algo"] = alock::sim::to_string(cfg.algo);
  out["completed_ops"] = r.completed_ops;
  out["simulated_time"] = r.simulated_time;
  out["throughput"] = r.throughput;
  out["p50"] = r.p50;
  out["p99"] = r.p99;
  out["p999"] = r.p999;
  out["remote_steps"] = r.remote_steps;
  out["local_steps"] = r.local_steps;
  out["csv_header"] = alock::sim::csv_header();
  out["csv_row"] = alock::sim::csv_row(cfg.workload, cfg.algo, cfg.budgets, r);
  return out;
}

py::list sweep(const std::string& config_text) {
  alock::BenchConfig cfg = alock::parse_bench_config(config_text);
  if (cfg.algo != alock::sim::SimAlgo::kAlock)
    throw std::invalid_argument(
        "sweep varies hand-off allowances; algo must be alock");
  auto cells = alock::sim::budget_sweep(cfg.workload, cfg.model,
                                        cfg.sweep_local_budgets,
                                        cfg.sweep_remote_budgets);
  py::list out;
  for (const auto& c : cells) {
    py::dict d;
    d["local"] = c.local;
    d["remote"] = c.remote;
    d["speedup_vs_5_5"] = c.ratio;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_alock, m) {
  m.doc() =
      "Asymmetric lock toolkit: exhaustive property checking, a placement-"
      "aware cost simulator, and deterministic walk-through traces.";

  m.def("check", &check, py::arg("algo") = "alock", py::arg("np") = 2,
        py::arg("budget") = 1, py::arg("max_states") = uint64_t{10'000'000},
        "Explore the full state space and evaluate the property suite.");

  m.def("bench", &bench, py::arg("config_text"),
        "Run one simulated workload from a key=value config string.");

  m.def("sweep", &sweep, py::arg("config_text"),
        "Run the hand-off allowance grid; speedups are against (5,5).");

  m.def("default_config",
        [] { return alock::render_bench_config(alock::BenchConfig{}); },
        "The full default bench configuration in the accepted format.");

  m.def("trace", &alock::scenario_trace, py::arg("scenario") = "fig2",
        "The annotated step log of a named deterministic scenario.");

  m.def("scenarios", &alock::scenario_names,
        "Names accepted by trace().");

  py::class_<alock::RdmaPtr>(m, "RdmaPtr",
                             "Global pointer: 4-bit node id, 60-bit offset; "
                             "raw value 0 is the null pointer.")
      .def(py::init<>())
      .def_static("make", &alock::RdmaPtr::make, py::arg("node"),
                  py::arg("addr"))
      .def_static("from_raw", &alock::RdmaPtr::from_raw, py::arg("raw"))
      .def_property_readonly("node", &alock::RdmaPtr::node)
      .def_property_readonly("addr", &alock::RdmaPtr::addr)
      .def_property_readonly("raw", &alock::RdmaPtr::raw)
      .def_property_readonly("null", &alock::RdmaPtr::null)
      .def("plus", &alock::RdmaPtr::plus, py::arg("bytes"))
      .def("__eq__",
           [](alock::RdmaPtr a, alock::RdmaPtr b) { return a == b; })
      .def("__repr__", [](alock::RdmaPtr p) {
        return "RdmaPtr(node=" + std::to_string(p.node()) +
               ", addr=" + std::to_string(p.addr()) + ")";
      });
}

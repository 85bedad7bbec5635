#include "alock/config.hpp"

#include <cctype>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace alock {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void bad(const std::string& key, const std::string& value,
                      const char* why) {
  throw std::invalid_argument("config key '" + key + "': " + why + " ('" +
                              value + "')");
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
  uint64_t out = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || value.empty())
    bad(key, value, "expected an unsigned integer");
  return out;
}

uint32_t parse_u32(const std::string& key, const std::string& value) {
  uint64_t v = parse_u64(key, value);
  if (v > UINT32_MAX) bad(key, value, "value out of range");
  return static_cast<uint32_t>(v);
}

int64_t parse_budget(const std::string& key, const std::string& value) {
  uint64_t v = parse_u64(key, value);
  if (v < 1 || v > INT64_MAX) bad(key, value, "allowance must be at least 1");
  return static_cast<int64_t>(v);
}

std::vector<int64_t> parse_budget_list(const std::string& key,
                                       const std::string& value) {
  std::vector<int64_t> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_budget(key, trim(item)));
  if (out.empty()) bad(key, value, "expected a comma-separated list");
  return out;
}

}  // namespace

BenchConfig parse_bench_config(const std::string& text) {
  BenchConfig c;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (size_t hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");

    if (key == "algo") {
      if (!sim::algo_from_string(value, c.algo))
        bad(key, value, "expected alock, spinlock, or mcs");
    } else if (key == "nodes") {
      c.workload.nodes = parse_u32(key, value);
    } else if (key == "threads_per_node") {
      c.workload.threads_per_node = parse_u32(key, value);
    } else if (key == "lock_count") {
      c.workload.lock_count = parse_u32(key, value);
    } else if (key == "locality_pct") {
      c.workload.locality_pct = parse_u32(key, value);
    } else if (key == "op_count") {
      c.workload.op_count = parse_u64(key, value);
    } else if (key == "max_time") {
      c.workload.max_time = parse_u64(key, value);
    } else if (key == "cs_cost") {
      c.workload.cs_cost = parse_u64(key, value);
    } else if (key == "seed") {
      c.workload.seed = parse_u64(key, value);
    } else if (key == "budget_local") {
      c.budgets.local = parse_budget(key, value);
    } else if (key == "budget_remote") {
      c.budgets.remote = parse_budget(key, value);
    } else if (key == "local_op_cost") {
      c.model.local_op_cost = parse_u64(key, value);
    } else if (key == "remote_op_cost") {
      c.model.remote_op_cost = parse_u64(key, value);
    } else if (key == "loopback_op_cost") {
      c.model.loopback_op_cost = parse_u64(key, value);
    } else if (key == "nic_capacity") {
      c.model.nic_capacity = parse_u64(key, value);
    } else if (key == "poll_backoff") {
      c.model.poll_backoff = parse_u64(key, value);
    } else if (key == "conn_window") {
      c.model.conn_window = parse_u64(key, value);
    } else if (key == "conn_divisor") {
      c.model.conn_divisor = parse_u64(key, value);
    } else if (key == "sweep_local_budgets") {
      c.sweep_local_budgets = parse_budget_list(key, value);
    } else if (key == "sweep_remote_budgets") {
      c.sweep_remote_budgets = parse_budget_list(key, value);
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
    }
  }
  return c;
}

namespace {

std::string join(const std::vector<int64_t>& xs) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(xs[i]);
  }
  return out;
}

}  // namespace

std::string render_bench_config(const BenchConfig& c) {
  std::string out;
  auto kv = [&out](const char* k, const std::string& v) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  };
  kv("algo", sim::to_string(c.algo));
  kv("nodes", std::to_string(c.workload.nodes));
  kv("threads_per_node", std::to_string(c.workload.threads_per_node));
  kv("lock_count", std::to_string(c.workload.lock_count));
  kv("locality_pct", std::to_string(c.workload.locality_pct));
  kv("op_count", std::to_string(c.workload.op_count));
  kv("max_time", std::to_string(c.workload.max_time));
  kv("cs_cost", std::to_string(c.workload.cs_cost));
  kv("seed", std::to_string(c.workload.seed));
  kv("budget_local", std::to_string(c.budgets.local));
  kv("budget_remote", std::to_string(c.budgets.remote));
  kv("local_op_cost", std::to_string(c.model.local_op_cost));
  kv("remote_op_cost", std::to_string(c.model.remote_op_cost));
  kv("loopback_op_cost", std::to_string(c.model.loopback_op_cost));
  kv("nic_capacity", std::to_string(c.model.nic_capacity));
  kv("poll_backoff", std::to_string(c.model.poll_backoff));
  kv("conn_window", std::to_string(c.model.conn_window));
  kv("conn_divisor", std::to_string(c.model.conn_divisor));
  kv("sweep_local_budgets", join(c.sweep_local_budgets));
  kv("sweep_remote_budgets", join(c.sweep_remote_budgets));
  return out;
}

}  // namespace alock

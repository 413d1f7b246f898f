#include "mpsim/planner.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "mpsim/scenario_io.hpp"

namespace mpsim {

StabilityCheck stability_ok(const std::vector<std::vector<double>>& a, double c, const std::vector<int>& t) {
  StabilityCheck r;
  char buf[160];
  std::size_t cols = 0;
  for (const auto& row : a) cols = std::max(cols, row.size());
  for (std::size_t j = 0; j < cols; ++j) {
    double sum = 0.0;
    for (const auto& row : a) sum += j < row.size() ? row[j] : 0.0;
    if (!(sum < c)) {
      std::snprintf(buf, sizeof buf, "multipath %zu: offered %.6g b/s >= channel rate %.6g b/s", j, sum, c);
      r.violated.emplace_back(buf);
    }
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    double sum = 0.0;
    for (double v : a[i]) sum += v;
    const int ti = t.empty() ? 1 : (t.size() == 1 ? t[0] : t[i]);
    const double cap = static_cast<double>(ti) * c;
    if (!(sum < cap)) {
      std::snprintf(buf, sizeof buf, "source %zu: offered %.6g b/s >= %d transmitter(s) x %.6g b/s", i, sum, ti, c);
      r.violated.emplace_back(buf);
    }
  }
  r.ok = r.violated.empty();
  return r;
}

double cluster_traffic(std::int64_t nodes_total, double per_node_rate, std::int64_t src, std::int64_t dst,
                       bool intra, bool include_self) {
  const double spread = static_cast<double>(include_self ? nodes_total : nodes_total - 1);
  if (spread <= 0) return 0.0;
  const double receivers = static_cast<double>(intra ? (include_self ? src : src - 1) : dst);
  return static_cast<double>(src) * per_node_rate * receivers / spread;
}

double peak_throughput(double c, double quantum_bytes, double guard) {
  const double tq = 8.0 * quantum_bytes / c;
  return c * tq / (tq + guard);
}

EnergyInventory EnergyInventory::reference() {
  EnergyInventory inv;
  inv.classes = {{"core", 47'000'000, 8},   {"regional", 44'000'000, 14}, {"metro", 10'000'000, 70},
                 {"edge", 10'000'000, 420}, {"gateway", 45'000'000, 8},   {"peering", 38'000'000, 4}};
  return inv;
}

EnergyReport energy_report(const EnergyInventory& inv) {
  auto nonneg = [](std::int64_t v, const std::string& what) {
    if (v < 0) throw ConfigError(what + " must be non-negative");
  };
  EnergyReport r;
  for (const auto& c : inv.classes) {
    nonneg(c.unit_mw, c.name + " power");
    nonneg(c.count, c.name + " count");
    const std::int64_t total = c.unit_mw * c.count;
    r.class_totals_mw.emplace_back(c.name, total);
    r.network_mw += total;
    if (c.name == "core" || c.name == "regional" || c.name == "metro") r.transit_mw += total;
    if (c.name == "gateway") {
      // Rounded to the nearest milliwatt; exact for whole-watt gateway powers.
      r.gateway_uplift_mw = (total * inv.gateway_uplift_bp + 5000) / 10000;
    }
  }
  nonneg(inv.receiver_mw, "receiver power");
  nonneg(inv.receiver_count, "receiver count");
  nonneg(inv.controller_mw, "controller power");
  nonneg(inv.controller_count, "controller count");
  nonneg(inv.gateway_uplift_bp, "gateway uplift");
  r.receivers_mw = inv.receiver_mw * inv.receiver_count;
  r.controllers_mw = inv.controller_mw * inv.controller_count;
  r.multipath_mw = r.network_mw - r.transit_mw + r.receivers_mw + r.controllers_mw + r.gateway_uplift_mw;
  r.savings = r.network_mw > 0 ? 1.0 - static_cast<double>(r.multipath_mw) / static_cast<double>(r.network_mw) : 0.0;
  return r;
}

namespace {

std::int64_t parse_milliwatts(const std::string& text, const std::string& what) {
  const double w = parse_double(text, what);
  const double mw = std::round(w * 1000.0);
  if (std::fabs(mw - w * 1000.0) > 1e-6) throw ConfigError(what + ": resolution is one milliwatt");
  return static_cast<std::int64_t>(mw);
}

bool parse_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(what + ": expected true or false, got '" + text + "'");
}

}  // namespace

PlanInput parse_plan(const std::string& text) {
  PlanInput in;
  auto& inv = in.inventory;
  for (const auto& [key, entry] : parse_key_values(text)) {
    const std::string& v = entry.value;
    try {
      bool matched = false;
      for (auto& c : inv.classes) {
        if (key == c.name + "_power") {
          c.unit_mw = parse_milliwatts(v, key);
          matched = true;
        } else if (key == c.name + "_count") {
          c.count = parse_int(v, key);
          matched = true;
        }
      }
      if (matched) continue;
      if (key == "receiver_power") inv.receiver_mw = parse_milliwatts(v, key);
      else if (key == "receiver_count") inv.receiver_count = parse_int(v, key);
      else if (key == "controller_power") inv.controller_mw = parse_milliwatts(v, key);
      else if (key == "controller_count") inv.controller_count = parse_int(v, key);
      else if (key == "gateway_uplift") inv.gateway_uplift_bp = std::llround(parse_double(v, key) * 10000.0);
      else if (key == "nodes_total") in.nodes_total = parse_int(v, key);
      else if (key == "per_node_rate") in.per_node_rate = parse_double(v, key);
      else if (key == "src_cluster") in.src_cluster = parse_int(v, key);
      else if (key == "dst_cluster") in.dst_cluster = parse_int(v, key);
      else if (key == "intra") in.intra = parse_bool(v, key);
      else if (key == "include_self") in.include_self = parse_bool(v, key);
      else if (key == "channel_rate") in.channel_rate = parse_double(v, key);
      else if (key == "quantum") in.quantum = parse_double(v, key);
      else if (key == "guard_time") in.guard_time = parse_double(v, key) * 1e-9;
      else throw ConfigError("unknown key '" + key + "'");
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(entry.line) + ": " + e.what());
    }
  }
  return in;
}

PlanInput load_plan_file(const std::string& path) {
  try {
    return parse_plan(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string format_kw(std::int64_t mw) {
  // mW -> kW is a factor 10^6.
  const bool neg = mw < 0;
  const std::int64_t a = neg ? -mw : mw;
  std::string frac = std::to_string(a % 1'000'000);
  frac.insert(0, 6 - frac.size(), '0');
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  std::string out = (neg ? "-" : "") + std::to_string(a / 1'000'000);
  if (!frac.empty()) out += "." + frac;
  return out;
}

std::string plan_text_report(const PlanInput& in) {
  const EnergyReport e = energy_report(in.inventory);
  std::ostringstream os;
  char buf[256];
  os << "energy (kW)\n";
  for (const auto& [name, mw] : e.class_totals_mw) {
    std::snprintf(buf, sizeof buf, "  %-12s %12s\n", name.c_str(), format_kw(mw).c_str());
    os << buf;
  }
  auto line = [&](const char* label, std::int64_t mw) {
    std::snprintf(buf, sizeof buf, "  %-12s %12s\n", label, format_kw(mw).c_str());
    os << buf;
  };
  line("network", e.network_mw);
  line("transit", e.transit_mw);
  line("receivers", e.receivers_mw);
  line("controllers", e.controllers_mw);
  line("gw uplift", e.gateway_uplift_mw);
  line("multipath", e.multipath_mw);
  std::snprintf(buf, sizeof buf, "  savings      %.2f%% computed (claimed %.0f%%)\n", 100.0 * e.savings,
                100.0 * kClaimedSavings);
  os << buf;

  const double t = cluster_traffic(in.nodes_total, in.per_node_rate, in.src_cluster, in.dst_cluster, in.intra,
                                   in.include_self);
  std::snprintf(buf, sizeof buf, "cluster traffic %lld -> %lld of %lld nodes at %.4g b/s (%s%s): %.4f Gb/s\n",
                static_cast<long long>(in.src_cluster), static_cast<long long>(in.intra ? in.src_cluster : in.dst_cluster),
                static_cast<long long>(in.nodes_total), in.per_node_rate, in.intra ? "intra" : "inter",
                in.include_self ? ", self included" : "", t / 1e9);
  os << buf;
  std::snprintf(buf, sizeof buf, "peak throughput at %.4g b/s, quantum %.0f B, guard %.0f ns: %.4f Gb/s\n",
                in.channel_rate, in.quantum, in.guard_time * 1e9,
                peak_throughput(in.channel_rate, in.quantum, in.guard_time) / 1e9);
  os << buf;
  return os.str();
}

std::string plan_csv_report(const PlanInput& in) {
  const EnergyReport e = energy_report(in.inventory);
  std::ostringstream os;
  os << "item,value,unit\n";
  for (const auto& [name, mw] : e.class_totals_mw) os << name << "," << format_kw(mw) << ",kW\n";
  os << "network," << format_kw(e.network_mw) << ",kW\n";
  os << "transit," << format_kw(e.transit_mw) << ",kW\n";
  os << "receivers," << format_kw(e.receivers_mw) << ",kW\n";
  os << "controllers," << format_kw(e.controllers_mw) << ",kW\n";
  os << "gateway_uplift," << format_kw(e.gateway_uplift_mw) << ",kW\n";
  os << "multipath," << format_kw(e.multipath_mw) << ",kW\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "savings_computed,%.6f,fraction\nsavings_claimed,%.2f,fraction\n", e.savings,
                kClaimedSavings);
  os << buf;
  std::snprintf(buf, sizeof buf, "cluster_traffic,%.6e,b/s\n",
                cluster_traffic(in.nodes_total, in.per_node_rate, in.src_cluster, in.dst_cluster, in.intra,
                                in.include_self));
  os << buf;
  std::snprintf(buf, sizeof buf, "peak_throughput,%.6e,b/s\n",
                peak_throughput(in.channel_rate, in.quantum, in.guard_time));
  os << buf;
  return os.str();
}

}  // namespace mpsim

#pragma once

// Closed-form planning arithmetic: necessary stability conditions of a demand
// matrix, cluster traffic sizing, the per-quantum throughput bound, and the
// router-vs-multipath energy comparison.

#include <cstdint>
#include <string>
#include <vector>

#include "mpsim/model.hpp"

namespace mpsim {

struct StabilityCheck {
  bool ok = true;
  std::vector<std::string> violated;  // e.g. "multipath 3: 1.0e10 >= 1.0e10"
};

/// Requires sum_i a_ij < C for every multipath j and sum_j a_ij < t_i C for
/// every source i (both strict).
StabilityCheck stability_ok(const std::vector<std::vector<double>>& demand, double channel_rate,
                            const std::vector<int>& transmitters);

/// Traffic carried from a source cluster to a destination cluster when every
/// node spreads its rate uniformly over the other nodes. With `include_self`
/// the spread is over all nodes, self included (and an intra-cluster flow
/// counts the node itself).
double cluster_traffic(std::int64_t nodes_total, double per_node_rate, std::int64_t src_cluster,
                       std::int64_t dst_cluster, bool intra, bool include_self = false);

/// C T_q / (T_q + guard), T_q = 8 quantum / C.
double peak_throughput(double channel_rate, double quantum_bytes, double guard_seconds);

/// Powers are held in milliwatts so every total is exact.
struct EnergyInventory {
  struct NodeClass {
    std::string name;
    std::int64_t unit_mw = 0;
    std::int64_t count = 0;
  };
  std::vector<NodeClass> classes;  // core, regional, metro, edge, gateway, peering
  std::int64_t receiver_mw = 17'500;
  std::int64_t receiver_count = 4200;
  std::int64_t controller_mw = 100'000;
  std::int64_t controller_count = 7;
  std::int64_t gateway_uplift_bp = 1500;  // basis points of gateway total

  /// The router inventory of the reference ISP network.
  static EnergyInventory reference();
};

struct EnergyReport {
  std::vector<std::pair<std::string, std::int64_t>> class_totals_mw;
  std::int64_t network_mw = 0;
  std::int64_t transit_mw = 0;  // core + regional + metro
  std::int64_t receivers_mw = 0;
  std::int64_t controllers_mw = 0;
  std::int64_t gateway_uplift_mw = 0;
  std::int64_t multipath_mw = 0;
  double savings = 0.0;  // 1 - multipath / network
};

/// Throws ConfigError on negative powers or counts.
EnergyReport energy_report(const EnergyInventory& inventory);

/// Inventory plus optional traffic questions, read from the key-value format.
struct PlanInput {
  EnergyInventory inventory = EnergyInventory::reference();
  // Cluster traffic
  std::int64_t nodes_total = 420;
  double per_node_rate = 1e9;
  std::int64_t src_cluster = 60;
  std::int64_t dst_cluster = 60;
  bool intra = false;
  bool include_self = false;
  // Throughput bound
  double channel_rate = 1e10;
  double quantum = 1000;
  double guard_time = 100e-9;  // seconds
};

PlanInput parse_plan(const std::string& text);
PlanInput load_plan_file(const std::string& path);

/// Milliwatts printed exactly as kW, trailing zeros trimmed.
std::string format_kw(std::int64_t milliwatts);

std::string plan_text_report(const PlanInput& input);
std::string plan_csv_report(const PlanInput& input);

/// Headline savings figure claimed for the reference network.
inline constexpr double kClaimedSavings = 0.27;

}  // namespace mpsim

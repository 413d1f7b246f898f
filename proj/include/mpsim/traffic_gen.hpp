#pragma once

// Flow-level demand: per (source, multipath) cell, independent Poisson
// arrivals of backlogged flows (Exp sizes) and priority flows (fixed rate,
// Exp durations, constant-size packets).

#include <optional>
#include <vector>

#include "mpsim/model.hpp"
#include "mpsim/sim_kernel.hpp"

namespace mpsim {

/// Flow arrival rates, in flows per second, for one cell.
struct ArrivalRates {
  double backlogged = 0.0;
  double priority = 0.0;
};

/// lambda_b = f a / (8 E[size_b]), lambda_p = (1 - f) a / (8 E[size_p]).
ArrivalRates arrival_rates(double demand_bps, double backlogged_fraction);

struct FlowArrival {
  SimTime at = 0;
  FlowClass cls = FlowClass::backlogged;
  Bytes size = 0;
  std::int64_t packets = 0;    // priority: number of packets
  SimTime first_packet = 0;    // priority: time of the first packet
};

class TrafficGenerator {
 public:
  explicit TrafficGenerator(const ClusterScenario& scenario);

  const ArrivalRates& rates(int source, int multipath) const;

  /// The next arrival of class `cls` in the cell after time `after`, or
  /// nothing when the cell has no demand of that class.
  std::optional<FlowArrival> next(int source, int multipath, FlowClass cls, SimTime after);

  /// Priority flows already active at t = 0, drawn from the stationary
  /// distribution (Poisson count, Exp residual durations, uniform phases).
  std::vector<FlowArrival> initial_priority_population(int source, int multipath);

  /// Spacing of packets within a priority flow.
  SimTime packet_interval() const { return packet_interval_; }

 private:
  std::size_t cell(int i, int j) const { return static_cast<std::size_t>(i) * n_multipaths_ + j; }
  FlowArrival priority_flow(RngStream& rng, SimTime at, double mean_duration, bool random_phase);

  int n_multipaths_;
  Bytes packet_size_;
  SimTime packet_interval_;
  std::uint64_t seed_;
  std::vector<ArrivalRates> rates_;
  std::vector<RngStream> backlogged_rng_;
  std::vector<RngStream> priority_rng_;
};

/// Every arrival of one cell in [0, horizon), both classes, in time order.
std::vector<FlowArrival> generate(const ClusterScenario& scenario, int source, int multipath,
                                  SimTime horizon);

}  // namespace mpsim

#include "mpsim/traffic_gen.hpp"

#include <algorithm>
#include <cmath>

namespace mpsim {

ArrivalRates arrival_rates(double demand_bps, double backlogged_fraction) {
  ArrivalRates r;
  r.backlogged = backlogged_fraction * demand_bps / (8.0 * kBackloggedMeanSize);
  r.priority = (1.0 - backlogged_fraction) * demand_bps / (8.0 * kPriorityMeanSize);
  return r;
}

TrafficGenerator::TrafficGenerator(const ClusterScenario& sc)
    : n_multipaths_(sc.n_multipaths),
      packet_size_(sc.packet_size),
      packet_interval_(transmission_time(sc.packet_size, kPriorityFlowRate)),
      seed_(sc.seed) {
  const auto a = sc.demand_matrix();
  const std::size_t cells = static_cast<std::size_t>(sc.n_sources) * sc.n_multipaths;
  rates_.reserve(cells);
  backlogged_rng_.reserve(cells);
  priority_rng_.reserve(cells);
  for (int i = 0; i < sc.n_sources; ++i) {
    for (int j = 0; j < sc.n_multipaths; ++j) {
      rates_.push_back(arrival_rates(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                                     sc.backlogged_fraction));
      const auto ui = static_cast<std::uint32_t>(i);
      const auto uj = static_cast<std::uint32_t>(j);
      backlogged_rng_.emplace_back(seed_, StreamPurpose::backlogged_arrivals, ui, uj);
      priority_rng_.emplace_back(seed_, StreamPurpose::priority_arrivals, ui, uj);
    }
  }
}

const ArrivalRates& TrafficGenerator::rates(int source, int multipath) const {
  return rates_[cell(source, multipath)];
}

FlowArrival TrafficGenerator::priority_flow(RngStream& rng, SimTime at, double mean_duration,
                                            bool random_phase) {
  FlowArrival f;
  f.cls = FlowClass::priority;
  f.at = at;
  const double duration = rng.exponential(mean_duration);
  const double bytes = static_cast<double>(kPriorityFlowRate) * duration / 8.0;
  f.packets = std::llround(bytes / static_cast<double>(packet_size_));
  f.size = f.packets * packet_size_;
  f.first_packet = at;
  if (random_phase) f.first_packet += rng.uniform_int(0, packet_interval_ - 1);
  return f;
}

std::optional<FlowArrival> TrafficGenerator::next(int source, int multipath, FlowClass cls,
                                                  SimTime after) {
  const std::size_t c = cell(source, multipath);
  const double rate = cls == FlowClass::backlogged ? rates_[c].backlogged : rates_[c].priority;
  if (!(rate > 0.0)) return std::nullopt;
  RngStream& rng = cls == FlowClass::backlogged ? backlogged_rng_[c] : priority_rng_[c];
  const double gap_s = rng.exponential(1.0 / rate);
  const SimTime at = after + std::llround(gap_s * static_cast<double>(kNanosPerSecond));
  if (cls == FlowClass::priority) return priority_flow(rng, at, kPriorityMeanDuration, false);
  FlowArrival f;
  f.cls = FlowClass::backlogged;
  f.at = at;
  // Sizes are whole bytes; at least one.
  f.size = std::max<Bytes>(1, std::llround(rng.exponential(kBackloggedMeanSize)));
  return f;
}

std::vector<FlowArrival> TrafficGenerator::initial_priority_population(int source, int multipath) {
  const std::size_t c = cell(source, multipath);
  std::vector<FlowArrival> out;
  if (!(rates_[c].priority > 0.0)) return out;
  RngStream rng(seed_, StreamPurpose::initial_population, static_cast<std::uint32_t>(source),
                static_cast<std::uint32_t>(multipath));
  const std::int64_t n = rng.poisson(rates_[c].priority * kPriorityMeanDuration);
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) out.push_back(priority_flow(rng, 0, kPriorityMeanDuration, true));
  return out;
}

std::vector<FlowArrival> generate(const ClusterScenario& scenario, int source, int multipath,
                                  SimTime horizon) {
  TrafficGenerator gen(scenario);
  std::vector<FlowArrival> out;
  for (FlowClass cls : {FlowClass::backlogged, FlowClass::priority}) {
    SimTime t = 0;
    while (auto a = gen.next(source, multipath, cls, t)) {
      if (a->at >= horizon) break;
      t = a->at;
      out.push_back(*a);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FlowArrival& x, const FlowArrival& y) { return x.at < y.at; });
  return out;
}

}  // namespace mpsim

#include "mpsim/model.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace mpsim {

std::string to_string(Mode mode) {
  return mode == Mode::coordinated ? "coordinated" : "uncoordinated";
}

Mode parse_mode(const std::string& text) {
  if (text == "coordinated") return Mode::coordinated;
  if (text == "uncoordinated") return Mode::uncoordinated;
  throw ConfigError("unknown mode '" + text + "' (expected coordinated|uncoordinated)");
}

std::vector<SimTime> ClusterScenario::propagation() const {
  if (!one_way_prop.fixed.empty()) return one_way_prop.fixed;
  std::vector<SimTime> out(static_cast<std::size_t>(n_sources));
  for (int i = 0; i < n_sources; ++i) {
    RngStream rng(seed, StreamPurpose::propagation, static_cast<std::uint32_t>(i));
    out[static_cast<std::size_t>(i)] = rng.uniform_int(1, one_way_prop.uniform_max);
  }
  return out;
}

std::vector<int> ClusterScenario::transmitter_counts() const {
  if (transmitters.size() == 1) {
    return std::vector<int>(static_cast<std::size_t>(n_sources), transmitters.front());
  }
  return transmitters;
}

std::vector<std::vector<double>> ClusterScenario::demand_matrix() const {
  if (demand.symmetric_load) {
    return symmetric_demand(n_sources, n_multipaths, *demand.symmetric_load, channel_rate);
  }
  return demand.matrix;
}

double ClusterScenario::load() const {
  if (demand.symmetric_load) return *demand.symmetric_load;
  const auto a = demand_matrix();
  double worst = 0.0;
  for (int j = 0; j < n_multipaths; ++j) {
    double col = 0.0;
    for (const auto& row : a) col += row.at(static_cast<std::size_t>(j));
    worst = std::max(worst, col / static_cast<double>(channel_rate));
  }
  return worst;
}

std::vector<std::vector<double>> symmetric_demand(int n_sources, int n_multipaths, double load,
                                                  BitsPerSecond channel_rate) {
  const double cell = load * static_cast<double>(channel_rate) / n_sources;
  return std::vector<std::vector<double>>(static_cast<std::size_t>(n_sources),
                                          std::vector<double>(static_cast<std::size_t>(n_multipaths), cell));
}

std::vector<std::string> validate(const ClusterScenario& sc) {
  std::vector<std::string> bad;
  auto need = [&bad](bool ok, const std::string& what) {
    if (!ok) bad.push_back(what);
  };

  need(sc.n_sources >= 1, "n_sources must be >= 1");
  need(sc.n_multipaths >= 1, "n_multipaths must be >= 1");
  need(sc.channel_rate > 0, "channel_rate must be positive");
  need(sc.guard_time > 0, "guard_time must be positive");
  need(sc.offset > 0, "offset must be positive");
  need(sc.max_grant_delay > 0, "max_grant_delay must be positive");
  need(sc.quantum > 0, "quantum must be positive");
  need(sc.packet_size > 0, "packet_size must be positive");
  need(sc.report_size > 0, "report_size must be positive");
  need(sc.control_rate > 0, "control_rate must be positive");
  need(sc.sim_duration > 0, "sim_duration must be positive");
  need(sc.warmup >= 0, "warmup must be non-negative");
  need(sc.grant_cap > 0, "grant_cap must be positive");
  need(sc.sample_interval > 0, "sample_interval must be positive");
  need(sc.backlogged_fraction >= 0.0 && sc.backlogged_fraction <= 1.0,
       "backlogged_fraction must lie in [0, 1]");
  if (sc.n_sources < 1 || sc.n_multipaths < 1) return bad;

  // Propagation.
  SimTime max_prop = 0;
  if (!sc.one_way_prop.fixed.empty()) {
    need(static_cast<int>(sc.one_way_prop.fixed.size()) == sc.n_sources,
         "one_way_prop list must have n_sources entries");
    for (SimTime p : sc.one_way_prop.fixed) {
      need(p >= 0, "one_way_prop entries must be non-negative");
      max_prop = std::max(max_prop, p);
    }
  } else {
    need(sc.one_way_prop.uniform_max > 0, "one_way_prop uniform maximum must be positive");
    max_prop = sc.one_way_prop.uniform_max;
  }
  const SimTime max_rtt = 2 * max_prop;
  if (sc.offset < max_rtt + sc.max_grant_delay) {
    std::ostringstream os;
    os << "offset " << sc.offset << " ns < max RTT " << max_rtt << " ns + max_grant_delay "
       << sc.max_grant_delay << " ns (grant recursion feasibility)";
    bad.push_back(os.str());
  }

  // Transmitters.
  need(sc.transmitters.size() == 1 || static_cast<int>(sc.transmitters.size()) == sc.n_sources,
       "transmitters must be one count or n_sources counts");
  const auto tx = sc.transmitter_counts();
  for (int t : tx) need(t >= 1, "every source needs at least one transmitter");
  const long total_tx = std::accumulate(tx.begin(), tx.end(), 0L);
  if (sc.mode == Mode::coordinated && total_tx < sc.n_multipaths) {
    bad.push_back("coordinated mode needs total transmitters (" + std::to_string(total_tx) +
                  ") >= n_multipaths (" + std::to_string(sc.n_multipaths) + ")");
  }

  // Demand.
  if (sc.demand.symmetric_load) {
    const double l = *sc.demand.symmetric_load;
    need(l > 0.0, "symmetric load must be positive");
  } else {
    need(static_cast<int>(sc.demand.matrix.size()) == sc.n_sources, "demand must have n_sources rows");
    for (const auto& row : sc.demand.matrix) {
      need(static_cast<int>(row.size()) == sc.n_multipaths, "demand rows must have n_multipaths entries");
      for (double v : row) need(v >= 0.0, "demand entries must be non-negative");
    }
  }
  return bad;
}

SimTime transmission_time(Bytes bytes, BitsPerSecond rate) {
  if (bytes >= 0 && bytes < (std::int64_t{1} << 30)) {
    const std::int64_t n = bytes * 8 * kNanosPerSecond;
    return (n + rate - 1) / rate;
  }
  const __int128 num = static_cast<__int128>(bytes) * 8 * kNanosPerSecond;
  return static_cast<SimTime>((num + rate - 1) / rate);
}

Bytes bytes_in(SimTime duration, BitsPerSecond rate) {
  if (duration >= 0 && duration < (std::int64_t{1} << 29) && rate > 0 && rate < (std::int64_t{1} << 34)) {
    return duration * rate / (8 * kNanosPerSecond);
  }
  const __int128 num = static_cast<__int128>(duration) * rate;
  return static_cast<Bytes>(num / (8 * static_cast<__int128>(kNanosPerSecond)));
}

Bytes Burst::payload_bytes() const {
  Bytes total = 0;
  for (const auto& f : payload) total += f.length;
  return total;
}

}  // namespace mpsim

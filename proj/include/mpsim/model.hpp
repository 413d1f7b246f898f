#pragma once

// Domain types shared by every module: the cluster scenario, flows, reports,
// grants and bursts.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpsim/sim_kernel.hpp"

namespace mpsim {

using Bytes = std::int64_t;
using BitsPerSecond = std::int64_t;

/// Traffic constants of the demand model (1 MB = 10^6 bytes).
inline constexpr double kBackloggedMeanSize = 10e6;      // bytes
inline constexpr BitsPerSecond kPriorityFlowRate = 2'000'000;
inline constexpr double kPriorityMeanDuration = 30.0;    // seconds
inline constexpr double kPriorityMeanSize = kPriorityFlowRate * kPriorityMeanDuration / 8.0;

enum class Mode { coordinated, uncoordinated };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

/// One-way source-to-controller propagation: either an explicit per-source
/// list or a uniform draw on (0, uniform_max] from the run seed.
struct PropagationSpec {
  std::vector<SimTime> fixed;
  SimTime uniform_max = 500 * kNanosPerMicro;

  bool operator==(const PropagationSpec&) const = default;
};

/// Demand a_ij in bits/s: either symmetric at a multipath load fraction or an
/// explicit N x M matrix.
struct DemandSpec {
  std::optional<double> symmetric_load = 0.5;
  std::vector<std::vector<double>> matrix;

  bool operator==(const DemandSpec&) const = default;
};

struct ClusterScenario {
  int n_sources = 10;
  int n_multipaths = 10;
  BitsPerSecond channel_rate = 10'000'000'000;
  SimTime guard_time = 100;
  SimTime offset = 2 * kNanosPerMilli;
  SimTime max_grant_delay = 1 * kNanosPerMilli;
  PropagationSpec one_way_prop;
  std::vector<int> transmitters{1};  // one entry applies to every source
  DemandSpec demand;
  double backlogged_fraction = 1.0;
  Bytes quantum = 1000;
  Bytes packet_size = 1000;
  Bytes report_size = 128;
  BitsPerSecond control_rate = 1'000'000'000;
  Mode mode = Mode::coordinated;
  SimTime sim_duration = 10 * kNanosPerSecond;  // measured span after warmup
  SimTime warmup = 2 * kNanosPerSecond;
  std::uint64_t seed = 1;
  SimTime grant_cap = 100 * kNanosPerMicro;
  SimTime sample_interval = 100 * kNanosPerMilli;

  bool operator==(const ClusterScenario&) const = default;

  SimTime end_time() const { return warmup + sim_duration; }

  /// Per-source one-way propagation, resolved from the spec and the seed.
  std::vector<SimTime> propagation() const;
  std::vector<int> transmitter_counts() const;
  /// a_ij in bits/s, N rows of M entries.
  std::vector<std::vector<double>> demand_matrix() const;
  /// Max over multipaths of sum_i a_ij / C.
  double load() const;
};

/// a_ij = load * C / N for every cell.
std::vector<std::vector<double>> symmetric_demand(int n_sources, int n_multipaths, double load,
                                                  BitsPerSecond channel_rate);

/// Every violated scenario invariant, as a human-readable line. Empty means
/// the scenario is valid.
std::vector<std::string> validate(const ClusterScenario& scenario);

/// Transmission time of `bytes` at `rate`, rounded up to whole nanoseconds.
SimTime transmission_time(Bytes bytes, BitsPerSecond rate);
/// Bytes that fit in `duration` at `rate`, rounded down.
Bytes bytes_in(SimTime duration, BitsPerSecond rate);

enum class FlowClass : std::uint8_t { backlogged, priority };

struct Flow {
  std::uint32_t id = 0;
  FlowClass cls = FlowClass::backlogged;
  Bytes size = 0;
  BitsPerSecond rate = 0;  // priority only
  SimTime arrival = 0;
  Bytes bytes_injected = 0;
  Bytes bytes_delivered = 0;
  std::optional<SimTime> completion;
  SimTime first_delivery = -1;  // root arrival of the first byte
  std::uint16_t source = 0;
  std::uint16_t multipath = 0;
  bool measured = false;  // arrived after warmup
};

struct Report {
  int source = 0;
  int multipath = 0;
  std::int64_t backlogged_count = 0;
  Bytes priority_bytes = 0;
  SimTime sent_at_local = 0;  // t2
};

struct Grant {
  int multipath = 0;
  int source = 0;
  SimTime formulated = 0;  // g, controller clock
  SimTime start = 0;       // s, source-local clock
  SimTime duration = 0;    // d
  std::uint64_t index = 0;
  Bytes priority_share = 0;  // bytes of the grant sized from priority demand
};

struct Fragment {
  std::uint32_t flow = 0;
  Bytes offset = 0;  // byte offset within the flow
  Bytes length = 0;
  FlowClass cls = FlowClass::backlogged;
};

struct Burst {
  int source = 0;
  int multipath = 0;
  SimTime emit_local = 0;
  SimTime duration = 0;  // granted duration
  std::vector<Fragment> payload;

  Bytes payload_bytes() const;
};

}  // namespace mpsim

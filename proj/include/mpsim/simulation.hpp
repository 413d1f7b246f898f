#pragma once

// One source cluster run end to end: traffic, sources, the control channel,
// the controller and the measurement window.

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <queue>
#include <vector>

#include "mpsim/controller.hpp"
#include "mpsim/metrics.hpp"
#include "mpsim/model.hpp"
#include "mpsim/sim_kernel.hpp"
#include "mpsim/source_node.hpp"
#include "mpsim/traffic_gen.hpp"

namespace mpsim {

enum class EventKind : std::uint8_t {
  flow_arrival,
  report_slot,
  report_arrival,
  grant_formulation,
  burst_start,
  burst_end,
  measurement_tick,
};

const char* to_string(EventKind kind);

struct EventPayload {
  EventKind kind = EventKind::flow_arrival;
  FlowClass cls = FlowClass::backlogged;
  std::uint16_t source = 0;
  std::uint16_t multipath = 0;
  std::uint32_t ref = 0;
  std::int64_t a = 0;
  std::int64_t b = 0;
};

/// Optional observation points for tests and tooling.
struct SimulationHooks {
  std::function<void(const Grant&)> on_grant;
  std::function<void(const Report&, SimTime received_at)> on_report;
  /// A burst reaching the controller root; `root_start` is the controller time
  /// of its first bit.
  std::function<void(const Burst&, SimTime root_start)> on_root_arrival;
  /// Called after a source served a grant (`burst` empty when blocked).
  std::function<void(const Grant&, const Burst* burst)> on_service;
  /// Called after every dispatched event.
  std::function<void(SimTime now, EventKind kind)> on_event;
};

struct ByteAudit {
  Bytes injected = 0;
  Bytes delivered = 0;
  Bytes queued = 0;
  Bytes in_flight = 0;
  bool balanced() const { return injected == delivered + queued + in_flight; }
};

class ClusterSimulation {
 public:
  /// Throws ConfigError listing every violation of an invalid scenario.
  explicit ClusterSimulation(ClusterScenario scenario, SimulationHooks hooks = {});

  /// Runs to warmup + sim_duration and returns the metrics. May be called once.
  RunMetrics run();

  /// Running byte counters (cheap; valid at every event boundary).
  ByteAudit audit() const;
  /// Independent recount by scanning every queue and flow.
  ByteAudit recount() const;

  const ClusterScenario& scenario() const { return sc_; }
  const Controller& controller() const { return controller_; }
  const SourceNode& source(int i) const { return sources_[static_cast<std::size_t>(i)]; }
  const std::vector<Flow>& flows() const { return flows_; }
  const std::vector<UtilizationLedger>& utilization() const { return ledgers_; }

 private:
  using Queue = EventQueue<EventPayload>;
  enum class PathState { dormant, scheduled };

  void dispatch(const Queue::Event& ev);
  void on_flow_arrival();
  void on_report_slot(std::uint32_t position, SimTime cycle_start);
  void arm_arrivals();
  void on_report_arrival(int i, int j, const EventPayload& p);
  void on_grant_formulation(int j, std::uint32_t generation);
  void on_burst_start(int source);
  void on_burst_end(int multipath);
  void resolve_root(int multipath, std::uint64_t seq, std::int64_t burst, SimTime end);
  void arm_root(int multipath);
  void on_measurement_tick();

  void schedule_arrival(int i, int j, FlowClass cls, SimTime after);
  void schedule_formulation(int j, SimTime at);
  void wake(int j, int source);
  void materialize(int i, int j);
  void materialize_all();
  std::uint32_t store_grant(const Grant& g);
  std::uint32_t take_burst();
  SimTime next_report_emission(int i, int j, SimTime at) const;
  void record_flow_completion(const Flow& f);
  RunMetrics finish();

  ClusterScenario sc_;
  SimulationHooks hooks_;
  Queue queue_;
  TrafficGenerator traffic_;
  Controller controller_;
  std::vector<SourceNode> sources_;
  std::vector<SimTime> prop_;
  ControlChannelTiming control_;
  Reassembler reassembler_;
  std::vector<RngStream> grant_wait_rng_;

  std::vector<Flow> flows_;
  std::vector<std::optional<FlowArrival>> next_arrival_;  // per cell and class
  // Pending arrivals live in their own heap; the event queue only holds the
  // earliest one. Likewise report slots run as one chain in time order.
  std::priority_queue<std::pair<SimTime, std::uint32_t>, std::vector<std::pair<SimTime, std::uint32_t>>,
                      std::greater<>>
      arrivals_;
  struct SlotEntry {
    SimTime offset;  // within the report cycle, controller clock
    SimTime first;   // first emission
    std::uint16_t source, multipath;
  };
  std::vector<SlotEntry> slot_order_;
  std::vector<Report> last_sent_;           // per cell, last report put on the channel
  std::vector<char> burst_live_;

  std::vector<PathState> path_state_;
  std::vector<SimTime> path_time_;
  std::vector<std::uint32_t> path_generation_;
  std::vector<SimTime> last_root_end_;

  std::vector<Grant> grants_;
  std::vector<std::uint32_t> free_grants_;
  // Grants awaiting their start, per source. A source's starts are in epoch
  // order, so only the head needs a queued event.
  std::vector<std::deque<std::uint32_t>> pending_starts_;
  // Root arrivals per multipath, in epoch order (which is also end order).
  // A slot is resolved when its burst is emitted, blocked or found empty.
  struct RootSlot {
    std::int64_t burst = -1;
    SimTime end = 0;
    bool resolved = false;
  };
  std::vector<std::deque<RootSlot>> root_fifo_;
  std::vector<std::uint64_t> root_base_;
  std::vector<char> root_armed_;
  std::vector<std::uint64_t> grant_root_seq_;  // parallel to grants_
  std::vector<Burst> bursts_;
  std::vector<std::uint32_t> free_bursts_;
  std::vector<PacketDeparture> departures_;

  ByteAudit bytes_;
  std::vector<UtilizationLedger> ledgers_;
  DelayHistogram delay_hist_;
  double delay_wait_sum_ = 0.0, delay_prop_sum_ = 0.0, delay_resid_sum_ = 0.0;
  double flow_size_sum_ = 0.0, flow_transfer_sum_ = 0.0, flow_sojourn_sum_ = 0.0, flow_ratio_sum_ = 0.0;
  std::uint64_t flows_done_ = 0;
  std::uint64_t grants_issued_ = 0;
  std::uint64_t bursts_emitted_ = 0;
  std::vector<double> sample_t_, sample_q_;
  std::uint64_t trace_digest_ = 0xcbf29ce484222325ULL;
  bool ran_ = false;
};

/// Convenience wrapper: construct, run, return metrics.
RunMetrics run_scenario(const ClusterScenario& scenario);

}  // namespace mpsim

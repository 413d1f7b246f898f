#include "mpsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "mpsim/scenario_io.hpp"

namespace mpsim {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::flow_arrival:
      return "flow_arrival";
    case EventKind::report_slot:
      return "report_slot";
    case EventKind::report_arrival:
      return "report_arrival";
    case EventKind::grant_formulation:
      return "grant_formulation";
    case EventKind::burst_start:
      return "burst_start";
    case EventKind::burst_end:
      return "burst_end";
    case EventKind::measurement_tick:
      return "measurement_tick";
  }
  return "?";
}

namespace {

ClusterScenario checked(ClusterScenario sc) {
  const auto problems = validate(sc);
  if (!problems.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  return sc;
}

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t v) {
  // Word-at-a-time FNV step; enough to tell traces apart.
  return (h ^ v) * 0x100000001b3ULL;
}

}  // namespace

ClusterSimulation::ClusterSimulation(ClusterScenario scenario, SimulationHooks hooks)
    : sc_(checked(std::move(scenario))),
      hooks_(std::move(hooks)),
      traffic_(sc_),
      controller_(sc_),
      prop_(sc_.propagation()),
      control_(control_channel_delays(sc_)),
      reassembler_(sc_.packet_size) {
  const auto tx = sc_.transmitter_counts();
  const auto n = static_cast<std::size_t>(sc_.n_sources);
  const auto m = static_cast<std::size_t>(sc_.n_multipaths);
  sources_.reserve(n);
  for (int i = 0; i < sc_.n_sources; ++i) {
    sources_.emplace_back(i, sc_.n_multipaths, tx[static_cast<std::size_t>(i)], prop_[static_cast<std::size_t>(i)],
                          sc_.quantum);
  }
  for (int j = 0; j < sc_.n_multipaths; ++j) {
    grant_wait_rng_.emplace_back(sc_.seed, StreamPurpose::grant_signalling, static_cast<std::uint32_t>(j));
    ledgers_.emplace_back(sc_.warmup, sc_.end_time(), sc_.guard_time);
  }
  next_arrival_.resize(n * m * 2);
  pending_starts_.resize(n);
  root_fifo_.resize(m);
  root_base_.assign(m, 0);
  root_armed_.assign(m, 0);
  last_sent_.assign(n * m, Report{0, 0, -1, -1, 0});
  path_state_.assign(m, PathState::dormant);
  path_time_.assign(m, 0);
  path_generation_.assign(m, 0);
  last_root_end_.assign(m, std::numeric_limits<SimTime>::min() / 2);
}

ByteAudit ClusterSimulation::audit() const { return bytes_; }

ByteAudit ClusterSimulation::recount() const {
  ByteAudit a;
  for (const Flow& f : flows_) {
    a.injected += f.bytes_injected;
    a.delivered += f.bytes_delivered;
  }
  for (const SourceNode& s : sources_) {
    for (int j = 0; j < sc_.n_multipaths; ++j) a.queued += s.queues(j).queued_bytes();
  }
  for (std::size_t k = 0; k < bursts_.size(); ++k) {
    if (burst_live_[k]) a.in_flight += bursts_[k].payload_bytes();
  }
  return a;
}

void ClusterSimulation::schedule_arrival(int i, int j, FlowClass cls, SimTime after) {
  const std::size_t slot = (static_cast<std::size_t>(i) * sc_.n_multipaths + j) * 2 + (cls == FlowClass::priority);
  auto next = traffic_.next(i, j, cls, after);
  if (!next || next->at > sc_.end_time()) {
    next_arrival_[slot].reset();
    return;
  }
  next_arrival_[slot] = *next;
  arrivals_.emplace(next->at, static_cast<std::uint32_t>(slot));
}

void ClusterSimulation::arm_arrivals() {
  if (arrivals_.empty()) return;
  EventPayload p;
  p.kind = EventKind::flow_arrival;
  queue_.schedule(arrivals_.top().first, p);
}

void ClusterSimulation::materialize(int i, int j) {
  sources_[static_cast<std::size_t>(i)].queues(j).materialize(queue_.now(), [&](std::uint32_t flow, Bytes bytes) {
    flows_[flow].bytes_injected += bytes;
    bytes_.injected += bytes;
    bytes_.queued += bytes;
  });
}

void ClusterSimulation::materialize_all() {
  for (int i = 0; i < sc_.n_sources; ++i) {
    for (int j = 0; j < sc_.n_multipaths; ++j) materialize(i, j);
  }
}

std::uint32_t ClusterSimulation::store_grant(const Grant& g) {
  if (!free_grants_.empty()) {
    const std::uint32_t k = free_grants_.back();
    free_grants_.pop_back();
    grants_[k] = g;
    return k;
  }
  grants_.push_back(g);
  grant_root_seq_.push_back(0);
  return static_cast<std::uint32_t>(grants_.size() - 1);
}

std::uint32_t ClusterSimulation::take_burst() {
  if (!free_bursts_.empty()) {
    const std::uint32_t k = free_bursts_.back();
    free_bursts_.pop_back();
    return k;
  }
  bursts_.emplace_back();
  burst_live_.push_back(0);
  return static_cast<std::uint32_t>(bursts_.size() - 1);
}

SimTime ClusterSimulation::next_report_emission(int i, int j, SimTime at) const {
  // Slot of (i, j) on the source clock: k * cycle + (i * M + j) * slot.
  const SimTime phase = (static_cast<SimTime>(i) * sc_.n_multipaths + j) * control_.report_slot +
                        prop_[static_cast<std::size_t>(i)];
  if (at <= phase) return phase;
  const SimTime k = (at - phase + control_.report_cycle - 1) / control_.report_cycle;
  return phase + k * control_.report_cycle;
}

void ClusterSimulation::schedule_formulation(int j, SimTime at) {
  auto ju = static_cast<std::size_t>(j);
  ++path_generation_[ju];
  path_state_[ju] = PathState::scheduled;
  path_time_[ju] = at;
  EventPayload p;
  p.kind = EventKind::grant_formulation;
  p.multipath = static_cast<std::uint16_t>(j);
  p.ref = path_generation_[ju];
  queue_.schedule(at, p);
}

void ClusterSimulation::wake(int j, int source) {
  if (!controller_.has_demand(source, j)) return;
  const auto ju = static_cast<std::size_t>(j);
  SimTime t = std::max(queue_.now(), controller_.epoch_floor(j));
  if (sc_.mode == Mode::coordinated) {
    t = std::max(t, controller_.transmitter_free(source) - sc_.offset + controller_.rtt(source));
  }
  if (path_state_[ju] == PathState::scheduled && path_time_[ju] <= t) return;
  schedule_formulation(j, t);
}

void ClusterSimulation::on_flow_arrival() {
  const std::size_t slot = arrivals_.top().second;
  arrivals_.pop();
  const int i = static_cast<int>(slot / 2 / static_cast<std::size_t>(sc_.n_multipaths));
  const int j = static_cast<int>(slot / 2 % static_cast<std::size_t>(sc_.n_multipaths));
  const FlowClass cls = slot % 2 ? FlowClass::priority : FlowClass::backlogged;
  const FlowArrival a = *next_arrival_[slot];
  const SimTime now = queue_.now();
  if (cls == FlowClass::backlogged || a.packets > 0) {
    Flow f;
    f.id = static_cast<std::uint32_t>(flows_.size());
    f.cls = cls;
    f.size = a.size;
    f.rate = cls == FlowClass::priority ? kPriorityFlowRate : 0;
    f.arrival = now;
    f.source = static_cast<std::uint16_t>(i);
    f.multipath = static_cast<std::uint16_t>(j);
    f.measured = now >= sc_.warmup;
    QueueGroup& q = sources_[static_cast<std::size_t>(i)].queues(j);
    if (cls == FlowClass::backlogged) {
      f.bytes_injected = a.size;
      bytes_.injected += a.size;
      bytes_.queued += a.size;
      flows_.push_back(f);
      q.enqueue_backlog(f.id, a.size);
    } else {
      flows_.push_back(f);
      q.add_priority_source(f.id, a.first_packet, a.packets, sc_.packet_size, traffic_.packet_interval());
      materialize(i, j);
    }
  }
  schedule_arrival(i, j, cls, now);
  arm_arrivals();
}

void ClusterSimulation::on_report_slot(std::uint32_t position, SimTime cycle_start) {
  const SlotEntry& e = slot_order_[position];
  const SimTime now = queue_.now();
  {
    EventPayload next;
    next.kind = EventKind::report_slot;
    SimTime at = 0;
    if (position + 1 < slot_order_.size()) {
      next.ref = position + 1;
      next.a = cycle_start;
      at = cycle_start + slot_order_[position + 1].offset;
    } else {
      next.ref = 0;
      next.a = cycle_start + control_.report_cycle;
      at = next.a + slot_order_[0].offset;
    }
    if (at <= sc_.end_time()) queue_.schedule(at, next);
  }
  if (now < e.first) return;  // before the source's first slot
  const int i = e.source;
  const int j = e.multipath;
  SourceNode& src = sources_[static_cast<std::size_t>(i)];
  materialize(i, j);
  const Report r = src.build_report(j, src.to_local(now));
  Report& last = last_sent_[static_cast<std::size_t>(i) * sc_.n_multipaths + j];
  // A report identical to the last one sent, with no priority bytes, cannot
  // change the controller's picture once the source is ranged; drop it.
  const bool redundant = r.priority_bytes == 0 && last.priority_bytes == 0 &&
                         r.backlogged_count == last.backlogged_count;
  if (!redundant) {
    last = r;
    EventPayload p;
    p.kind = EventKind::report_arrival;
    p.source = static_cast<std::uint16_t>(i);
    p.multipath = static_cast<std::uint16_t>(j);
    p.ref = static_cast<std::uint32_t>(r.backlogged_count);
    p.a = r.priority_bytes;
    p.b = r.sent_at_local;
    queue_.schedule(now + src.one_way_prop(), p);
  }
}

void ClusterSimulation::on_report_arrival(int i, int j, const EventPayload& p) {
  const Report r{i, j, static_cast<std::int64_t>(p.ref), p.a, p.b};
  controller_.on_report(r, queue_.now());
  if (hooks_.on_report) hooks_.on_report(r, queue_.now());
  wake(j, i);
}

void ClusterSimulation::on_grant_formulation(int j, std::uint32_t generation) {
  const auto ju = static_cast<std::size_t>(j);
  if (generation != path_generation_[ju]) return;  // superseded
  path_state_[ju] = PathState::dormant;
  const SimTime g = queue_.now();
  const auto chosen = controller_.select(j, g);
  if (!chosen) {
    if (sc_.mode == Mode::coordinated) {
      if (auto t = controller_.earliest_feasible(j, g)) schedule_formulation(j, *t);
    }
    return;
  }
  const int i = *chosen;
  const Grant grant = controller_.issue(j, i, g);
  if (grant.duration == 0) throw IntegrityFault("selected source without demand");
  ++grants_issued_;
  if (hooks_.on_grant) hooks_.on_grant(grant);

  // The grant reaches the source after the downstream slot wait plus one
  // propagation time and must be there before its start.
  const SimTime p = prop_[static_cast<std::size_t>(i)];
  const SimTime delivered = g + grant_wait_rng_[ju].uniform_int(1, control_.grant_delay_bound) + p;
  const SimTime emit = grant.start + p;
  if (delivered > emit) {
    throw IntegrityFault("grant for source " + std::to_string(i) + " delivered at " + std::to_string(delivered) +
                         " after its start " + std::to_string(emit));
  }
  auto& roots = root_fifo_[ju];
  const std::uint32_t slot = store_grant(grant);
  grant_root_seq_[slot] = root_base_[ju] + roots.size();
  roots.emplace_back();
  auto& fifo = pending_starts_[static_cast<std::size_t>(i)];
  fifo.push_back(slot);
  if (fifo.size() == 1) {
    EventPayload ev;
    ev.kind = EventKind::burst_start;
    ev.source = static_cast<std::uint16_t>(i);
    queue_.schedule(emit, ev);
  }

  schedule_formulation(j, controller_.epoch_floor(j));
}

void ClusterSimulation::on_burst_start(int i) {
  auto& fifo = pending_starts_[static_cast<std::size_t>(i)];
  const std::uint32_t slot = fifo.front();
  fifo.pop_front();
  const Grant grant = grants_[slot];
  const std::uint64_t root_seq = grant_root_seq_[slot];
  free_grants_.push_back(slot);
  SourceNode& src = sources_[static_cast<std::size_t>(i)];
  if (!fifo.empty()) {
    EventPayload next;
    next.kind = EventKind::burst_start;
    next.source = static_cast<std::uint16_t>(i);
    queue_.schedule(src.to_controller(grants_[fifo.front()].start), next);
  }
  const int j = grant.multipath;
  materialize(i, j);
  departures_.clear();
  const std::uint32_t bslot = take_burst();
  Burst& burst = bursts_[bslot];
  const bool served = src.serve_grant(grant, sc_.channel_rate, sc_.guard_time, burst, &departures_);
  if (hooks_.on_service) hooks_.on_service(grant, served ? &burst : nullptr);
  if (!served) {
    free_bursts_.push_back(bslot);
    if (sc_.mode == Mode::coordinated) {
      throw IntegrityFault("coordinated grant to source " + std::to_string(i) + " found every transmitter busy");
    }
    resolve_root(j, root_seq, -1, 0);
    return;
  }
  const SimTime now = queue_.now();
  const Bytes payload = burst.payload_bytes();
  bytes_.queued -= payload;
  bytes_.in_flight += payload;

  for (const PacketDeparture& d : departures_) {
    const SimTime departed = now + transmission_time(d.end_in_burst, sc_.channel_rate);
    if (d.enqueued < sc_.warmup || departed > sc_.end_time()) continue;
    const SimTime delay = departed - d.enqueued;
    const SimTime report_wait = next_report_emission(i, j, d.enqueued) - d.enqueued;
    const SimTime p = src.one_way_prop();
    delay_hist_.add(delay);
    delay_wait_sum_ += static_cast<double>(report_wait);
    delay_prop_sum_ += static_cast<double>(p);
    delay_resid_sum_ += static_cast<double>(delay - report_wait - p);
  }
  if (payload == 0) {
    free_bursts_.push_back(bslot);
    resolve_root(j, root_seq, -1, 0);
    return;
  }
  ++bursts_emitted_;

  const SimTime root_start = now + src.one_way_prop();
  if (root_start != grant.formulated + sc_.offset) {
    throw IntegrityFault("burst from source " + std::to_string(i) + " reaches the root at " +
                         std::to_string(root_start) + ", expected " +
                         std::to_string(grant.formulated + sc_.offset));
  }
  const SimTime data = transmission_time(payload, sc_.channel_rate);
  burst_live_[bslot] = 1;
  resolve_root(j, root_seq, bslot, root_start + data);
}

void ClusterSimulation::resolve_root(int j, std::uint64_t seq, std::int64_t burst, SimTime end) {
  const auto ju = static_cast<std::size_t>(j);
  root_fifo_[ju][seq - root_base_[ju]] = RootSlot{burst, end, true};
  arm_root(j);
}

void ClusterSimulation::arm_root(int j) {
  const auto ju = static_cast<std::size_t>(j);
  if (root_armed_[ju]) return;
  auto& q = root_fifo_[ju];
  while (!q.empty() && q.front().resolved && q.front().burst < 0) {
    q.pop_front();
    ++root_base_[ju];
  }
  if (q.empty() || !q.front().resolved) return;
  root_armed_[ju] = 1;
  EventPayload ev;
  ev.kind = EventKind::burst_end;
  ev.multipath = static_cast<std::uint16_t>(j);
  queue_.schedule(q.front().end, ev);
}

void ClusterSimulation::record_flow_completion(const Flow& f) {
  if (f.cls != FlowClass::backlogged || !f.measured) return;
  const double transfer = static_cast<double>(*f.completion - f.first_delivery) / kNanosPerSecond;
  const double sojourn = static_cast<double>(*f.completion - f.arrival) / kNanosPerSecond;
  const double size = static_cast<double>(f.size);
  ++flows_done_;
  flow_size_sum_ += size;
  flow_transfer_sum_ += transfer;
  flow_sojourn_sum_ += sojourn;
  // A one-byte flow can arrive in under a nanosecond of transfer time.
  flow_ratio_sum_ += 8.0 * size / std::max(transfer, 1e-9);
}

void ClusterSimulation::on_burst_end(int j) {
  const auto ju = static_cast<std::size_t>(j);
  root_armed_[ju] = 0;
  const auto slot = static_cast<std::uint32_t>(root_fifo_[ju].front().burst);
  root_fifo_[ju].pop_front();
  ++root_base_[ju];
  Burst& burst = bursts_[slot];
  const SimTime now = queue_.now();
  const Bytes payload = burst.payload_bytes();
  const SimTime root_start = now - transmission_time(payload, sc_.channel_rate);
  if (root_start < last_root_end_[ju] + sc_.guard_time) {
    throw IntegrityFault("bursts collide at the root of multipath " + std::to_string(j) + ": start " +
                         std::to_string(root_start) + " within a guard of previous end " +
                         std::to_string(last_root_end_[ju]));
  }
  last_root_end_[ju] = now;
  ledgers_[ju].add_burst(root_start, now - root_start);
  if (hooks_.on_root_arrival) hooks_.on_root_arrival(burst, root_start);

  Bytes offset = 0;
  for (const Fragment& frag : burst.payload) {
    Flow& f = flows_[frag.flow];
    reassembler_.accept(frag, f.size);
    if (f.first_delivery < 0) f.first_delivery = root_start + transmission_time(offset, sc_.channel_rate);
    offset += frag.length;
    f.bytes_delivered += frag.length;
    if (f.bytes_delivered == f.size) {
      f.completion = root_start + transmission_time(offset, sc_.channel_rate);
      record_flow_completion(f);
    }
  }
  bytes_.in_flight -= payload;
  bytes_.delivered += payload;
  burst_live_[slot] = 0;
  burst.payload.clear();
  free_bursts_.push_back(slot);
  arm_root(j);
}

void ClusterSimulation::on_measurement_tick() {
  materialize_all();
  const SimTime now = queue_.now();
  sample_t_.push_back(static_cast<double>(now) / kNanosPerSecond);
  sample_q_.push_back(static_cast<double>(bytes_.queued));
  if (now + sc_.sample_interval <= sc_.end_time()) {
    EventPayload p;
    p.kind = EventKind::measurement_tick;
    queue_.schedule(now + sc_.sample_interval, p);
  }
}

void ClusterSimulation::dispatch(const Queue::Event& ev) {
  const EventPayload& p = ev.payload;
  trace_digest_ = fnv_mix(fnv_mix(trace_digest_, static_cast<std::uint64_t>(ev.fire_at)),
                          static_cast<std::uint64_t>(p.kind));
  switch (p.kind) {
    case EventKind::flow_arrival:
      on_flow_arrival();
      break;
    case EventKind::report_slot:
      on_report_slot(p.ref, p.a);
      break;
    case EventKind::report_arrival:
      on_report_arrival(p.source, p.multipath, p);
      break;
    case EventKind::grant_formulation:
      on_grant_formulation(p.multipath, p.ref);
      break;
    case EventKind::burst_start:
      on_burst_start(p.source);
      break;
    case EventKind::burst_end:
      on_burst_end(p.multipath);
      break;
    case EventKind::measurement_tick:
      on_measurement_tick();
      break;
  }
  if (hooks_.on_event) hooks_.on_event(ev.fire_at, p.kind);
}

RunMetrics ClusterSimulation::run() {
  if (ran_) throw std::logic_error("ClusterSimulation::run called twice");
  ran_ = true;

  for (int i = 0; i < sc_.n_sources; ++i) {
    for (int j = 0; j < sc_.n_multipaths; ++j) {
      QueueGroup& q = sources_[static_cast<std::size_t>(i)].queues(j);
      for (const FlowArrival& a : traffic_.initial_priority_population(i, j)) {
        if (a.packets <= 0) continue;
        Flow f;
        f.id = static_cast<std::uint32_t>(flows_.size());
        f.cls = FlowClass::priority;
        f.size = a.size;
        f.rate = kPriorityFlowRate;
        f.arrival = 0;
        f.source = static_cast<std::uint16_t>(i);
        f.multipath = static_cast<std::uint16_t>(j);
        flows_.push_back(f);
        q.add_priority_source(f.id, a.first_packet, a.packets, sc_.packet_size, traffic_.packet_interval());
      }
      schedule_arrival(i, j, FlowClass::backlogged, 0);
      schedule_arrival(i, j, FlowClass::priority, 0);
      const SimTime first = next_report_emission(i, j, 0);
      slot_order_.push_back(SlotEntry{first % control_.report_cycle, first, static_cast<std::uint16_t>(i),
                                      static_cast<std::uint16_t>(j)});
    }
  }
  std::sort(slot_order_.begin(), slot_order_.end(), [](const SlotEntry& x, const SlotEntry& y) {
    return std::tie(x.offset, x.source, x.multipath) < std::tie(y.offset, y.source, y.multipath);
  });
  EventPayload slot;
  slot.kind = EventKind::report_slot;
  queue_.schedule(slot_order_[0].offset, slot);
  arm_arrivals();
  EventPayload tick;
  tick.kind = EventKind::measurement_tick;
  queue_.schedule(sc_.warmup, tick);

  queue_.run_until(sc_.end_time(), [this](const Queue::Event& ev) { dispatch(ev); });
  materialize_all();
  return finish();
}

RunMetrics ClusterSimulation::finish() {
  RunMetrics m;
  m.scenario_hash = scenario_hash(sc_);
  m.seed = sc_.seed;
  m.mode = sc_.mode;
  m.n_sources = sc_.n_sources;
  m.n_multipaths = sc_.n_multipaths;
  m.load = sc_.load();
  m.backlogged_fraction = sc_.backlogged_fraction;

  m.completed_flows = flows_done_;
  for (const Flow& f : flows_) {
    if (f.cls == FlowClass::backlogged && f.measured && !f.completion) ++m.in_progress_flows;
  }
  if (flows_done_ > 0) {
    const double n = static_cast<double>(flows_done_);
    m.mean_flow_size = flow_size_sum_ / n;
    m.mean_response_time = flow_transfer_sum_ / n;
    m.mean_sojourn_time = flow_sojourn_sum_ / n;
    m.mean_of_ratios_bps = flow_ratio_sum_ / n;
    if (m.mean_response_time > 0) m.throughput_bps = 8.0 * m.mean_flow_size / m.mean_response_time;
    if (m.mean_sojourn_time > 0) m.throughput_from_arrival_bps = 8.0 * m.mean_flow_size / m.mean_sojourn_time;
  }

  m.priority_packets = delay_hist_.count();
  if (m.priority_packets > 0) {
    const double n = static_cast<double>(m.priority_packets);
    m.priority_delay_mean = delay_hist_.mean() / kNanosPerSecond;
    m.priority_delay_p99 = static_cast<double>(delay_hist_.quantile(0.99)) / kNanosPerSecond;
    m.delay_report_wait = delay_wait_sum_ / n / kNanosPerSecond;
    m.delay_propagation = delay_prop_sum_ / n / kNanosPerSecond;
    m.delay_residual = delay_resid_sum_ / n / kNanosPerSecond;
  }

  double util_sum = 0.0;
  for (auto& l : ledgers_) {
    l.close();
    m.utilization.push_back(l.utilization());
    util_sum += l.utilization();
  }
  m.mean_utilization = ledgers_.empty() ? 0.0 : util_sum / static_cast<double>(ledgers_.size());
  m.grants_issued = grants_issued_;
  for (const SourceNode& s : sources_) m.blocked_grants += s.blocked_grants();
  m.bursts = bursts_emitted_;

  double offered_bps = 0.0;
  for (const auto& row : sc_.demand_matrix()) {
    for (double a : row) offered_bps += a;
  }
  m.offered_byte_rate = offered_bps / 8.0;
  m.stability = stability_verdict(sample_t_, sample_q_, m.offered_byte_rate, kBackloggedMeanSize);

  const ByteAudit counted = recount();
  if (counted.injected != bytes_.injected || counted.delivered != bytes_.delivered ||
      counted.queued != bytes_.queued || counted.in_flight != bytes_.in_flight || !counted.balanced()) {
    throw IntegrityFault("byte conservation failed: injected " + std::to_string(counted.injected) +
                         ", delivered " + std::to_string(counted.delivered) + ", queued " +
                         std::to_string(counted.queued) + ", in flight " + std::to_string(counted.in_flight));
  }
  m.injected = counted.injected;
  m.delivered = counted.delivered;
  m.queued = counted.queued;
  m.in_flight = counted.in_flight;
  m.events = queue_.dispatched_count();
  m.trace_digest = trace_digest_;
  return m;
}

RunMetrics run_scenario(const ClusterScenario& scenario) { return ClusterSimulation(scenario).run(); }

}  // namespace mpsim

#pragma once

// Source-side MAC: per-multipath PDRR queue groups (strict-priority FIFO for
// non-backlogged packets, deficit round robin over backlogged flows), report
// construction, grant service with fragmentation, and destination-side
// reassembly.

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "mpsim/model.hpp"

namespace mpsim {

/// A priority packet leaving in a burst: `end_in_burst` is the burst byte
/// offset just past its final byte.
struct PacketDeparture {
  std::uint32_t flow = 0;
  SimTime enqueued = 0;
  Bytes end_in_burst = 0;
};

/// Queues of one (source, multipath) pair.
class QueueGroup {
 public:
  explicit QueueGroup(Bytes quantum = 1000) : quantum_(quantum) {}

  void enqueue_priority(std::uint32_t flow, SimTime enqueued, Bytes flow_offset, Bytes size);
  /// Creates the flow's FIFO in the ring, or extends it if already present.
  void enqueue_backlog(std::uint32_t flow, Bytes size);

  /// Registers a fixed-rate priority flow whose packets are materialized on
  /// demand by `materialize`.
  void add_priority_source(std::uint32_t flow, SimTime first_packet, std::int64_t packets,
                           Bytes packet_size, SimTime interval);

  /// Enqueues every pending priority packet due at or before `now`;
  /// `on_packet(flow, bytes)` is called for each one.
  template <typename OnPacket>
  void materialize(SimTime now, OnPacket&& on_packet);

  std::int64_t backlogged_count() const { return static_cast<std::int64_t>(ring_.size()); }
  Bytes priority_bytes() const { return priority_bytes_; }
  Bytes backlog_bytes() const { return backlog_bytes_; }
  Bytes queued_bytes() const { return priority_bytes_ + backlog_bytes_; }
  bool active_priority_sources() const { return !sources_.empty(); }

  /// Fills up to `capacity` bytes: priority FIFO first (the boundary packet
  /// may be fragmented), then backlogged flows in round-robin order starting
  /// at the cursor, one quantum per visit. A quantum cut by the end of the
  /// grant keeps its remaining deficit and the cursor stays on that flow.
  /// Returns the bytes served.
  Bytes serve(Bytes capacity, std::vector<Fragment>& out, std::vector<PacketDeparture>* departures);

  struct RingEntry {
    std::uint32_t flow;
    Bytes remaining;
    Bytes next_offset;
    Bytes deficit;  // bytes left in the quantum currently being served
  };
  const std::vector<RingEntry>& ring() const { return ring_; }
  std::size_t cursor() const { return cursor_; }

 private:
  struct PriorityPacket {
    std::uint32_t flow;
    SimTime enqueued;
    Bytes offset;
    Bytes remaining;
  };
  struct PrioritySource {
    SimTime next;
    std::uint32_t flow;
    std::int64_t packets_left;
    Bytes next_offset;
    Bytes packet_size;
    SimTime interval;
    bool operator>(const PrioritySource& o) const {
      return next != o.next ? next > o.next : flow > o.flow;
    }
  };

  Bytes quantum_;
  std::queue<PriorityPacket> priority_;
  Bytes priority_bytes_ = 0;
  std::vector<RingEntry> ring_;
  std::size_t cursor_ = 0;
  Bytes backlog_bytes_ = 0;
  std::priority_queue<PrioritySource, std::vector<PrioritySource>, std::greater<>> sources_;
};

template <typename OnPacket>
void QueueGroup::materialize(SimTime now, OnPacket&& on_packet) {
  while (!sources_.empty() && sources_.top().next <= now) {
    PrioritySource s = sources_.top();
    sources_.pop();
    enqueue_priority(s.flow, s.next, s.next_offset, s.packet_size);
    on_packet(s.flow, s.packet_size);
    if (--s.packets_left > 0) {
      s.next += s.interval;
      s.next_offset += s.packet_size;
      sources_.push(s);
    }
  }
}

/// Per-source state. Times passed in and out are on the source-local clock,
/// which runs behind the controller clock by the one-way propagation time.
class SourceNode {
 public:
  SourceNode(int index, int n_multipaths, int transmitters, SimTime one_way_prop, Bytes quantum);

  int index() const { return index_; }
  SimTime one_way_prop() const { return one_way_prop_; }
  SimTime to_local(SimTime controller_time) const { return controller_time - one_way_prop_; }
  SimTime to_controller(SimTime local_time) const { return local_time + one_way_prop_; }

  QueueGroup& queues(int multipath) { return groups_[static_cast<std::size_t>(multipath)]; }
  const QueueGroup& queues(int multipath) const { return groups_[static_cast<std::size_t>(multipath)]; }

  Report build_report(int multipath, SimTime now_local) const;

  /// Serves a grant at its start time into `out` (its payload storage is
  /// reused). Returns false when no transmitter is free at grant.start: the
  /// burst is blocked and the queues are untouched.
  bool serve_grant(const Grant& grant, BitsPerSecond channel_rate, SimTime guard_time, Burst& out,
                   std::vector<PacketDeparture>* departures);

  const std::vector<SimTime>& transmitter_free() const { return transmitter_free_; }
  /// Number of transmitters still emitting at local time t.
  int active_emissions(SimTime t, SimTime guard_time) const;
  std::uint64_t blocked_grants() const { return blocked_; }

 private:
  int index_;
  SimTime one_way_prop_;
  std::vector<QueueGroup> groups_;
  std::vector<SimTime> transmitter_free_;
  std::uint64_t blocked_ = 0;
};

/// Destination-side reassembly of one cluster's bursts. Fragments of a flow
/// must arrive contiguously and in order.
class Reassembler {
 public:
  explicit Reassembler(Bytes packet_size = 1000) : packet_size_(packet_size) {}

  struct Result {
    std::int64_t packets_completed = 0;
    bool flow_complete = false;
  };

  /// Throws IntegrityFault on a gap or overlap.
  Result accept(const Fragment& fragment, Bytes flow_size);

  Bytes delivered(std::uint32_t flow) const;

 private:
  Bytes packet_size_;
  std::vector<Bytes> next_offset_;
};

}  // namespace mpsim

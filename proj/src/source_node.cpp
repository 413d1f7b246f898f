#include "mpsim/source_node.hpp"

#include <algorithm>
#include <string>

namespace mpsim {

namespace {

void append_fragment(std::vector<Fragment>& out, std::uint32_t flow, Bytes offset, Bytes length,
                     FlowClass cls) {
  if (!out.empty()) {
    Fragment& last = out.back();
    if (last.flow == flow && last.offset + last.length == offset) {
      last.length += length;
      return;
    }
  }
  out.push_back(Fragment{flow, offset, length, cls});
}

}  // namespace

void QueueGroup::enqueue_priority(std::uint32_t flow, SimTime enqueued, Bytes flow_offset, Bytes size) {
  priority_.push(PriorityPacket{flow, enqueued, flow_offset, size});
  priority_bytes_ += size;
}

void QueueGroup::enqueue_backlog(std::uint32_t flow, Bytes size) {
  backlog_bytes_ += size;
  for (auto& e : ring_) {
    if (e.flow == flow) {
      e.remaining += size;
      return;
    }
  }
  // New flows join at the tail of the current round.
  const RingEntry entry{flow, size, 0, quantum_};
  if (cursor_ == 0) {
    ring_.push_back(entry);
  } else {
    ring_.insert(ring_.begin() + static_cast<std::ptrdiff_t>(cursor_), entry);
    ++cursor_;
  }
}

void QueueGroup::add_priority_source(std::uint32_t flow, SimTime first_packet, std::int64_t packets,
                                     Bytes packet_size, SimTime interval) {
  if (packets <= 0) return;
  sources_.push(PrioritySource{first_packet, flow, packets, 0, packet_size, interval});
}

Bytes QueueGroup::serve(Bytes capacity, std::vector<Fragment>& out,
                        std::vector<PacketDeparture>* departures) {
  Bytes used = 0;
  while (used < capacity && !priority_.empty()) {
    PriorityPacket& pkt = priority_.front();
    const Bytes take = std::min(pkt.remaining, capacity - used);
    append_fragment(out, pkt.flow, pkt.offset, take, FlowClass::priority);
    pkt.offset += take;
    pkt.remaining -= take;
    priority_bytes_ -= take;
    used += take;
    if (pkt.remaining == 0) {
      if (departures) departures->push_back(PacketDeparture{pkt.flow, pkt.enqueued, used});
      priority_.pop();
    }
  }
  while (used < capacity && !ring_.empty()) {
    if (cursor_ >= ring_.size()) cursor_ = 0;
    RingEntry& e = ring_[cursor_];
    const Bytes take = std::min({e.deficit, e.remaining, capacity - used});
    append_fragment(out, e.flow, e.next_offset, take, FlowClass::backlogged);
    e.next_offset += take;
    e.remaining -= take;
    e.deficit -= take;
    backlog_bytes_ -= take;
    used += take;
    if (e.remaining == 0) {
      ring_.erase(ring_.begin() + static_cast<std::ptrdiff_t>(cursor_));
    } else if (e.deficit == 0) {
      e.deficit = quantum_;
      ++cursor_;
    }
  }
  if (cursor_ >= ring_.size()) cursor_ = 0;
  return used;
}

SourceNode::SourceNode(int index, int n_multipaths, int transmitters, SimTime one_way_prop, Bytes quantum)
    : index_(index),
      one_way_prop_(one_way_prop),
      groups_(static_cast<std::size_t>(n_multipaths), QueueGroup(quantum)),
      transmitter_free_(static_cast<std::size_t>(transmitters), 0) {}

Report SourceNode::build_report(int multipath, SimTime now_local) const {
  const QueueGroup& q = queues(multipath);
  return Report{index_, multipath, q.backlogged_count(), q.priority_bytes(), now_local};
}

bool SourceNode::serve_grant(const Grant& grant, BitsPerSecond channel_rate, SimTime guard_time, Burst& burst,
                             std::vector<PacketDeparture>* departures) {
  auto tx = std::min_element(transmitter_free_.begin(), transmitter_free_.end());
  if (*tx > grant.start) {
    ++blocked_;
    return false;
  }
  burst.payload.clear();
  burst.source = index_;
  burst.multipath = grant.multipath;
  burst.emit_local = grant.start;
  burst.duration = grant.duration;
  const Bytes sent = queues(grant.multipath).serve(bytes_in(grant.duration, channel_rate), burst.payload, departures);
  // The transmitter is held for the data actually sent plus the retuning
  // guard; a grant that finds nothing to send leaves it free.
  if (sent > 0) *tx = grant.start + transmission_time(sent, channel_rate) + guard_time;
  return true;
}

int SourceNode::active_emissions(SimTime t, SimTime guard_time) const {
  return static_cast<int>(std::count_if(transmitter_free_.begin(), transmitter_free_.end(),
                                        [&](SimTime free) { return free - guard_time > t; }));
}

Reassembler::Result Reassembler::accept(const Fragment& fragment, Bytes flow_size) {
  if (fragment.flow >= next_offset_.size()) next_offset_.resize(fragment.flow + 1, 0);
  Bytes& next = next_offset_[fragment.flow];
  if (fragment.offset != next || fragment.length <= 0 || next + fragment.length > flow_size) {
    throw IntegrityFault("reassembly: flow " + std::to_string(fragment.flow) + " expected offset " +
                         std::to_string(next) + ", got fragment [" + std::to_string(fragment.offset) +
                         ", +" + std::to_string(fragment.length) + ") of flow size " +
                         std::to_string(flow_size));
  }
  const Bytes before = next;
  next += fragment.length;
  Result r;
  r.packets_completed = next / packet_size_ - before / packet_size_;
  r.flow_complete = next == flow_size;
  if (r.flow_complete && next % packet_size_ != 0) ++r.packets_completed;
  return r;
}

Bytes Reassembler::delivered(std::uint32_t flow) const {
  return flow < next_offset_.size() ? next_offset_[flow] : 0;
}

}  // namespace mpsim

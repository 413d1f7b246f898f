#include "mpsim/controller.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace mpsim {

SimTime range(SimTime t2, SimTime t3) {
  const SimTime rtt = t3 - t2;
  if (rtt < 0) {
    throw IntegrityFault("ranging produced a negative round trip: t2=" + std::to_string(t2) +
                         " t3=" + std::to_string(t3));
  }
  return rtt;
}

SimTime next_grant_epoch(SimTime g_last, SimTime d_last, SimTime guard_time) {
  return g_last + d_last + guard_time;
}

SimTime start_time(SimTime g, SimTime offset, SimTime rtt) { return g + offset - rtt; }

SimTime grant_size(Bytes priority_bytes, std::int64_t backlogged_count, Bytes quantum,
                   BitsPerSecond channel_rate, SimTime cap) {
  const Bytes bytes = priority_bytes + quantum * backlogged_count;
  if (bytes <= 0) return 0;
  return std::min(transmission_time(bytes, channel_rate), cap);
}

ControlChannelTiming control_channel_delays(const ClusterScenario& sc) {
  ControlChannelTiming t;
  t.report_slot = transmission_time(sc.report_size, sc.control_rate);
  t.report_cycle = t.report_slot * sc.n_sources * sc.n_multipaths;
  t.grant_delay_bound = sc.max_grant_delay;
  t.bytes_per_cycle = sc.report_size * sc.n_sources * sc.n_multipaths;
  return t;
}

void SourceSet::set(int i, bool on) {
  const std::uint64_t bit = std::uint64_t{1} << (i & 63);
  auto& w = words_[static_cast<std::size_t>(i) >> 6];
  w = on ? (w | bit) : (w & ~bit);
}

bool SourceSet::any() const {
  return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
}

int SourceSet::next_in_range(int from, int to) const {
  int i = from;
  while (i < to) {
    const std::uint64_t w = words_[static_cast<std::size_t>(i) >> 6] >> (i & 63);
    if (w) {
      const int hit = i + std::countr_zero(w);
      return hit < to ? hit : -1;
    }
    i = (i | 63) + 1;
  }
  return -1;
}

int SourceSet::next_from(int from) const {
  if (n_ == 0) return -1;
  const int hit = next_in_range(from, n_);
  return hit >= 0 ? hit : next_in_range(0, from);
}

Controller::Controller(const ClusterScenario& sc)
    : mode_(sc.mode),
      n_sources_(sc.n_sources),
      n_multipaths_(sc.n_multipaths),
      channel_rate_(sc.channel_rate),
      guard_time_(sc.guard_time),
      offset_(sc.offset),
      quantum_(sc.quantum),
      grant_cap_(sc.grant_cap),
      rtt_(static_cast<std::size_t>(sc.n_sources), -1),
      cells_(static_cast<std::size_t>(sc.n_sources) * sc.n_multipaths),
      chain_(static_cast<std::size_t>(sc.n_multipaths)),
      demanding_(static_cast<std::size_t>(sc.n_multipaths), SourceSet(sc.n_sources)),
      cursor_(static_cast<std::size_t>(sc.n_multipaths), 0) {
  // Bootstrap epochs are staggered by one guard plus one quantum time so the
  // multipaths do not all formulate their first grant at the same instant.
  const SimTime stagger = sc.guard_time + transmission_time(sc.quantum, sc.channel_rate);
  for (int j = 0; j < n_multipaths_; ++j) {
    Chain& c = chain_[static_cast<std::size_t>(j)];
    c.g_last = sc.offset + j * stagger - sc.guard_time;
    c.d_last = 0;
    RngStream rng(sc.seed, StreamPurpose::scan_cursor, static_cast<std::uint32_t>(j));
    cursor_[static_cast<std::size_t>(j)] = static_cast<int>(rng.uniform_int(0, n_sources_ - 1));
  }
  const auto tx = sc.transmitter_counts();
  for (int i = 0; i < n_sources_; ++i) {
    free_.emplace_back(static_cast<std::size_t>(tx[static_cast<std::size_t>(i)]), SimTime{0});
  }
}

void Controller::refresh(int i, int j) {
  demanding_[static_cast<std::size_t>(j)].set(i, has_demand(i, j));
}

bool Controller::has_demand(int source, int multipath) const {
  const Cell& c = cell(source, multipath);
  return ranged(source) && (c.backlogged > 0 || c.priority_pending > 0);
}

void Controller::on_report(const Report& report, SimTime received_at) {
  const int i = report.source;
  const int j = report.multipath;
  rtt_[static_cast<std::size_t>(i)] = range(report.sent_at_local, received_at);
  Cell& c = cell(i, j);
  // Grants that started by the time the report was sent are reflected in it.
  while (!c.outstanding.empty() && c.outstanding.front().first <= report.sent_at_local) {
    c.outstanding_bytes -= c.outstanding.front().second;
    c.outstanding.pop_front();
  }
  c.backlogged = report.backlogged_count;
  c.priority_pending = std::max<Bytes>(0, report.priority_bytes - c.outstanding_bytes);
  refresh(i, j);
}

SimTime Controller::epoch_floor(int multipath) const {
  const Chain& c = chain_[static_cast<std::size_t>(multipath)];
  return next_grant_epoch(c.g_last, c.d_last, guard_time_);
}

SimTime Controller::transmitter_free(int source) const {
  const auto& f = free_[static_cast<std::size_t>(source)];
  return *std::min_element(f.begin(), f.end());
}

bool Controller::feasible(int source, SimTime g) const {
  return start_time(g, offset_, rtt(source)) >= transmitter_free(source);
}

std::optional<int> Controller::select_coordinated(int multipath, SimTime g) const {
  const SourceSet& set = demanding_[static_cast<std::size_t>(multipath)];
  const int start = cursor_[static_cast<std::size_t>(multipath)];
  int i = set.next_from(start);
  if (i < 0) return std::nullopt;
  const int first = i;
  do {
    if (feasible(i, g)) return i;
    i = set.next_from(i + 1 == n_sources_ ? 0 : i + 1);
  } while (i != first);
  return std::nullopt;
}

std::optional<int> Controller::select_uncoordinated(int multipath) const {
  const int i = demanding_[static_cast<std::size_t>(multipath)].next_from(cursor_[static_cast<std::size_t>(multipath)]);
  if (i < 0) return std::nullopt;
  return i;
}

std::optional<int> Controller::select(int multipath, SimTime g) const {
  return mode_ == Mode::coordinated ? select_coordinated(multipath, g) : select_uncoordinated(multipath);
}

std::optional<SimTime> Controller::earliest_feasible(int multipath, SimTime g) const {
  const SourceSet& set = demanding_[static_cast<std::size_t>(multipath)];
  std::optional<SimTime> best;
  for (int i = 0; i < n_sources_; ++i) {
    if (!set.test(i)) continue;
    // s(g') >= Free  <=>  g' >= Free - offset + rtt.
    const SimTime t = std::max(g, transmitter_free(i) - offset_ + rtt(i));
    if (!best || t < *best) best = t;
  }
  return best;
}

Grant Controller::issue(int multipath, int source, SimTime g) {
  Cell& c = cell(source, multipath);
  Chain& chain = chain_[static_cast<std::size_t>(multipath)];
  if (g < epoch_floor(multipath)) {
    throw IntegrityFault("grant epoch " + std::to_string(g) + " precedes recursion floor " +
                         std::to_string(epoch_floor(multipath)) + " on multipath " +
                         std::to_string(multipath));
  }

  Grant grant;
  grant.multipath = multipath;
  grant.source = source;
  grant.formulated = g;
  grant.duration = grant_size(c.priority_pending, c.backlogged, quantum_, channel_rate_, grant_cap_);
  if (grant.duration == 0) return grant;
  grant.start = start_time(g, offset_, rtt(source));
  grant.index = chain.n;
  grant.priority_share = std::min(c.priority_pending, bytes_in(grant.duration, channel_rate_));

  c.priority_pending -= grant.priority_share;
  if (grant.priority_share > 0) {
    c.outstanding.emplace_back(grant.start, grant.priority_share);
    c.outstanding_bytes += grant.priority_share;
  }

  if (mode_ == Mode::coordinated) {
    auto& f = free_[static_cast<std::size_t>(source)];
    auto tx = std::min_element(f.begin(), f.end());
    if (grant.start < *tx) {
      throw IntegrityFault("coordinated grant to source " + std::to_string(source) +
                           " starts before its transmitter is free");
    }
    *tx = grant.start + grant.duration + guard_time_;
  }

  chain.g_last = g;
  chain.d_last = grant.duration;
  ++chain.n;
  cursor_[static_cast<std::size_t>(multipath)] = source + 1 == n_sources_ ? 0 : source + 1;
  refresh(source, multipath);
  return grant;
}

}  // namespace mpsim

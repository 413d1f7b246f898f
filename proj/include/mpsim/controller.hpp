#pragma once

// The cluster controller: ranging, report accounting, grant sizing, the
// per-multipath grant-epoch recursion and source selection (coordinated
// across multipaths, or independent per multipath).

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "mpsim/model.hpp"

namespace mpsim {

/// Round-trip time from a report sent at source-local time t2 and received at
/// controller time t3. The source clock runs behind by one propagation time,
/// so t3 - t2 is the full round trip. Negative results are clock faults.
SimTime range(SimTime t2, SimTime t3);

/// g(n+1) = g(n) + d(n) + guard.
SimTime next_grant_epoch(SimTime g_last, SimTime d_last, SimTime guard_time);

/// s(n+1) = g(n+1) + offset - rtt, on the chosen source's local clock.
SimTime start_time(SimTime g, SimTime offset, SimTime rtt);

/// Transmission time of the priority bytes plus one quantum per backlogged
/// flow, rounded up to whole ns and capped at `cap`. Zero means no grant.
SimTime grant_size(Bytes priority_bytes, std::int64_t backlogged_count, Bytes quantum,
                   BitsPerSecond channel_rate, SimTime cap);

struct ControlChannelTiming {
  SimTime report_slot = 0;       // one report on the upstream OTDM frame
  SimTime report_cycle = 0;      // every (source, multipath) slot once
  SimTime grant_delay_bound = 0;  // wait for a downstream slot is within (0, bound]
  Bytes bytes_per_cycle = 0;
};

ControlChannelTiming control_channel_delays(const ClusterScenario& scenario);

/// Bit set over sources with a cyclic find-next.
class SourceSet {
 public:
  explicit SourceSet(int n = 0) : n_(n), words_((static_cast<std::size_t>(n) + 63) / 64, 0) {}
  void set(int i, bool on);
  bool test(int i) const { return (words_[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1U; }
  bool any() const;
  /// First member at or after `from`, wrapping around; -1 when empty.
  int next_from(int from) const;

 private:
  int next_in_range(int from, int to) const;
  int n_;
  std::vector<std::uint64_t> words_;
};

class Controller {
 public:
  explicit Controller(const ClusterScenario& scenario);

  Mode mode() const { return mode_; }

  /// Ranges the source and replaces its demand picture for the multipath.
  /// Priority bytes already covered by grants that start after the report's
  /// send time are not counted twice.
  void on_report(const Report& report, SimTime received_at);

  bool ranged(int source) const { return rtt_[static_cast<std::size_t>(source)] >= 0; }
  SimTime rtt(int source) const { return rtt_[static_cast<std::size_t>(source)]; }

  bool has_demand(int source, int multipath) const;
  bool any_demand(int multipath) const { return demanding_[static_cast<std::size_t>(multipath)].any(); }
  std::int64_t backlogged_count(int source, int multipath) const { return cell(source, multipath).backlogged; }
  Bytes pending_priority(int source, int multipath) const { return cell(source, multipath).priority_pending; }

  /// Earliest epoch allowed by the recursion for the multipath's next grant.
  SimTime epoch_floor(int multipath) const;

  /// First source in cyclic order from the multipath's cursor with positive
  /// demand whose earliest-free transmitter is free by its start time s(g).
  std::optional<int> select_coordinated(int multipath, SimTime g) const;
  /// First source in cyclic order with positive demand, transmitters ignored.
  std::optional<int> select_uncoordinated(int multipath) const;
  std::optional<int> select(int multipath, SimTime g) const;

  /// Earliest epoch >= g at which some demanding source becomes feasible for
  /// the multipath (coordinated mode); nothing if no source has demand.
  std::optional<SimTime> earliest_feasible(int multipath, SimTime g) const;

  /// Issues the multipath's next grant to `source` at epoch g: sizes it from
  /// the pending demand, applies the recursion, books the transmitter in
  /// coordinated mode and advances the cursor. Returns a grant with zero
  /// duration (not to be sent) if the source has no demand.
  Grant issue(int multipath, int source, SimTime g);

  /// Earliest-free transmitter time of a source (source-local clock).
  SimTime transmitter_free(int source) const;
  const std::vector<SimTime>& transmitter_free_times(int source) const {
    return free_[static_cast<std::size_t>(source)];
  }
  int cursor(int multipath) const { return cursor_[static_cast<std::size_t>(multipath)]; }
  std::uint64_t grants_issued(int multipath) const { return chain_[static_cast<std::size_t>(multipath)].n; }

 private:
  struct Cell {
    std::int64_t backlogged = 0;
    Bytes priority_pending = 0;
    std::deque<std::pair<SimTime, Bytes>> outstanding;  // (s, priority share) of unserved grants
    Bytes outstanding_bytes = 0;
  };
  struct Chain {
    SimTime g_last = 0;
    SimTime d_last = 0;
    std::uint64_t n = 0;
  };

  Cell& cell(int i, int j) { return cells_[static_cast<std::size_t>(i) * n_multipaths_ + j]; }
  const Cell& cell(int i, int j) const { return cells_[static_cast<std::size_t>(i) * n_multipaths_ + j]; }
  void refresh(int i, int j);
  bool feasible(int source, SimTime g) const;

  Mode mode_;
  int n_sources_;
  int n_multipaths_;
  BitsPerSecond channel_rate_;
  SimTime guard_time_;
  SimTime offset_;
  Bytes quantum_;
  SimTime grant_cap_;
  std::vector<SimTime> rtt_;
  std::vector<Cell> cells_;
  std::vector<Chain> chain_;
  std::vector<SourceSet> demanding_;
  std::vector<int> cursor_;
  std::vector<std::vector<SimTime>> free_;
};

}  // namespace mpsim

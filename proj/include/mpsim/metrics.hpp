#pragma once

// Run measurement: flow throughput, priority packet delay, root utilization,
// blocked grants, queue-trend stability, and the per-run CSV row.

#include <cstdint>
#include <string>
#include <vector>

#include "mpsim/model.hpp"

namespace mpsim {

enum class Verdict { stable, unstable, withheld };
std::string to_string(Verdict verdict);

/// Thresholds of the queue-trend stability test.
struct StabilityThresholds {
  double slope_fraction = 0.025;  // of the aggregate offered byte rate
  double backlog_flows = 10.0;    // final backlog, in mean flow sizes
  std::size_t min_samples = 20;
};

struct StabilityResult {
  Verdict verdict = Verdict::withheld;
  double slope = 0.0;          // bytes per second
  double slope_fraction = 0.0;  // slope / offered byte rate
  double final_backlog = 0.0;  // bytes
};

/// Least-squares slope of total queued bytes against time. Unstable iff the
/// slope exceeds the threshold fraction of the offered byte rate and the final
/// backlog exceeds the threshold number of mean flow sizes.
StabilityResult stability_verdict(const std::vector<double>& times_s, const std::vector<double>& queued_bytes,
                                  double offered_byte_rate, double mean_flow_size,
                                  const StabilityThresholds& thresholds = {});

/// Fixed-width histogram with exact mean; values past the last bin are kept
/// individually so high percentiles stay exact.
class DelayHistogram {
 public:
  explicit DelayHistogram(SimTime bin_width = kNanosPerMicro, std::size_t bins = 100'000);
  void add(SimTime value);
  std::uint64_t count() const { return count_; }
  double mean() const { return count_ ? sum_ / static_cast<double>(count_) : 0.0; }
  /// Upper edge of the bin holding the q-quantile (exact beyond the last bin).
  SimTime quantile(double q) const;

 private:
  SimTime width_;
  std::vector<std::uint64_t> bins_;
  std::vector<SimTime> overflow_;
  std::uint64_t count_ = 0;
  double sum_ = 0.0;
};

/// Root-time accounting of one multipath inside the measurement window:
/// data-carrying burst time, the guard after each burst, and idle time.
class UtilizationLedger {
 public:
  UtilizationLedger(SimTime window_start, SimTime window_end, SimTime guard_time)
      : start_(window_start), end_(window_end), guard_(guard_time) {}

  /// Bursts must be added in root-arrival order and must not overlap.
  void add_burst(SimTime root_start, SimTime data_duration);
  void close();

  SimTime burst_time() const { return burst_; }
  SimTime guard_time() const { return guard_total_; }
  SimTime idle_time() const { return idle_; }
  SimTime elapsed() const { return end_ - start_; }
  double utilization() const;

 private:
  SimTime clip(SimTime a, SimTime b) const;
  SimTime start_, end_, guard_;
  SimTime cursor_ = 0;  // end of the last accounted piece
  SimTime burst_ = 0, guard_total_ = 0, idle_ = 0;
  bool closed_ = false;
};

struct RunMetrics {
  std::string scenario_hash;
  std::uint64_t seed = 0;
  Mode mode = Mode::coordinated;
  int n_sources = 0;
  int n_multipaths = 0;
  double load = 0.0;
  double backlogged_fraction = 0.0;

  // Backlogged flows that arrived after warmup and completed.
  std::uint64_t completed_flows = 0;
  std::uint64_t in_progress_flows = 0;
  double mean_flow_size = 0.0;       // bytes
  double mean_response_time = 0.0;   // s, first byte to last byte at the root
  double throughput_bps = 0.0;       // 8 * mean size / mean response time
  double mean_of_ratios_bps = 0.0;
  double mean_sojourn_time = 0.0;    // s, arrival to last byte at the root
  double throughput_from_arrival_bps = 0.0;

  // Priority packets enqueued after warmup and sent before the end.
  std::uint64_t priority_packets = 0;
  double priority_delay_mean = 0.0;  // s
  double priority_delay_p99 = 0.0;   // s
  double delay_report_wait = 0.0;    // s, mean wait for the next report slot
  double delay_propagation = 0.0;    // s, mean report propagation
  double delay_residual = 0.0;       // s, report arrival to departure

  std::vector<double> utilization;   // per multipath
  double mean_utilization = 0.0;
  std::uint64_t grants_issued = 0;
  std::uint64_t blocked_grants = 0;
  std::uint64_t bursts = 0;

  StabilityResult stability;
  double offered_byte_rate = 0.0;

  Bytes injected = 0, delivered = 0, queued = 0, in_flight = 0;
  std::uint64_t events = 0;
  std::uint64_t trace_digest = 0;
};

/// Mandatory header row of the per-run CSV.
std::string csv_header();
std::string csv_row(const RunMetrics& m);

}  // namespace mpsim

#include "mpsim/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace mpsim {

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::stable:
      return "stable";
    case Verdict::unstable:
      return "unstable";
    case Verdict::withheld:
      return "withheld";
  }
  return "withheld";
}

StabilityResult stability_verdict(const std::vector<double>& t, const std::vector<double>& q,
                                  double offered_byte_rate, double mean_flow_size,
                                  const StabilityThresholds& th) {
  StabilityResult r;
  const std::size_t n = std::min(t.size(), q.size());
  if (n < th.min_samples || n < 2) return r;
  double mt = 0.0, mq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mt += t[k];
    mq += q[k];
  }
  mt /= static_cast<double>(n);
  mq /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxy += (t[k] - mt) * (q[k] - mq);
    sxx += (t[k] - mt) * (t[k] - mt);
  }
  if (sxx <= 0.0) return r;
  r.slope = sxy / sxx;
  r.slope_fraction = offered_byte_rate > 0.0 ? r.slope / offered_byte_rate : 0.0;
  r.final_backlog = q[n - 1];
  const bool growing = r.slope > th.slope_fraction * offered_byte_rate;
  const bool large = r.final_backlog > th.backlog_flows * mean_flow_size;
  r.verdict = growing && large ? Verdict::unstable : Verdict::stable;
  return r;
}

DelayHistogram::DelayHistogram(SimTime bin_width, std::size_t bins) : width_(bin_width), bins_(bins, 0) {}

void DelayHistogram::add(SimTime value) {
  ++count_;
  sum_ += static_cast<double>(value);
  const auto b = static_cast<std::size_t>(std::max<SimTime>(0, value) / width_);
  if (b < bins_.size()) {
    ++bins_[b];
  } else {
    overflow_.push_back(value);
  }
}

SimTime DelayHistogram::quantile(double q) const {
  if (count_ == 0) return 0;
  const auto rank = static_cast<std::uint64_t>(std::max(1.0, q * static_cast<double>(count_) + 0.5));
  std::uint64_t seen = 0;
  for (std::size_t b = 0; b < bins_.size(); ++b) {
    seen += bins_[b];
    if (seen >= rank) return static_cast<SimTime>(b + 1) * width_;
  }
  std::vector<SimTime> rest = overflow_;
  std::sort(rest.begin(), rest.end());
  const std::uint64_t k = std::min<std::uint64_t>(rank - seen - 1, rest.size() - 1);
  return rest[k];
}

SimTime UtilizationLedger::clip(SimTime a, SimTime b) const {
  return std::max<SimTime>(0, std::min(b, end_) - std::max(a, start_));
}

void UtilizationLedger::add_burst(SimTime root_start, SimTime data_duration) {
  idle_ += clip(cursor_, root_start);
  burst_ += clip(root_start, root_start + data_duration);
  guard_total_ += clip(root_start + data_duration, root_start + data_duration + guard_);
  cursor_ = std::max(cursor_, root_start + data_duration + guard_);
}

void UtilizationLedger::close() {
  if (closed_) return;
  idle_ += clip(cursor_, end_);
  cursor_ = std::max(cursor_, end_);
  closed_ = true;
}

double UtilizationLedger::utilization() const {
  const SimTime e = elapsed();
  return e > 0 ? static_cast<double>(burst_) / static_cast<double>(e) : 0.0;
}

std::string csv_header() {
  return "scenario_hash,seed,mode,N,M,load,backlogged_fraction,throughput_bps,"
         "priority_delay_ms_mean,priority_delay_ms_p99,utilization,blocked_grants,verdict";
}

std::string csv_row(const RunMetrics& m) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%llu,%s,%d,%d,%.4f,%.4f,%.6e,%.6f,%.6f,%.6f,%llu,%s",
                m.scenario_hash.c_str(), static_cast<unsigned long long>(m.seed), to_string(m.mode).c_str(),
                m.n_sources, m.n_multipaths, m.load, m.backlogged_fraction, m.throughput_bps,
                m.priority_delay_mean * 1e3, m.priority_delay_p99 * 1e3, m.mean_utilization,
                static_cast<unsigned long long>(m.blocked_grants), to_string(m.stability.verdict).c_str());
  return buf;
}

}  // namespace mpsim

#include <algorithm>

#include "doctest.h"
#include "mpsim/metrics.hpp"

using namespace mpsim;

namespace {

std::vector<double> times(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = 0.1 * static_cast<double>(k);
  return t;
}

}  // namespace

TEST_CASE("flat queue series is stable") {
  const auto t = times(100);
  std::vector<double> q(100, 5e6);
  const auto r = stability_verdict(t, q, 1e9, 1e7);
  CHECK(r.verdict == Verdict::stable);
  CHECK(r.slope == doctest::Approx(0.0));
}

TEST_CASE("linearly growing queue with a large backlog is unstable") {
  const auto t = times(100);
  std::vector<double> q(100);
  for (std::size_t k = 0; k < 100; ++k) q[k] = 0.1e9 * t[k];  // 10% of 1 GB/s offered
  const auto r = stability_verdict(t, q, 1e9, 1e7);
  CHECK(r.slope == doctest::Approx(0.1e9));
  CHECK(r.slope_fraction == doctest::Approx(0.1));
  CHECK(r.verdict == Verdict::unstable);
}

TEST_CASE("growth needs both slope and a large final backlog") {
  const auto t = times(100);
  std::vector<double> q(100);
  for (std::size_t k = 0; k < 100; ++k) q[k] = 1e6 * t[k];  // fast relative to a tiny offered rate
  CHECK(stability_verdict(t, q, 1e6, 1e7).verdict == Verdict::stable);  // backlog < 10 flows
  for (std::size_t k = 0; k < 100; ++k) q[k] = 2e8 + 1e6 * t[k];
  CHECK(stability_verdict(t, q, 1e9, 1e7).verdict == Verdict::stable);  // slope 0.1% of offered
}

TEST_CASE("verdict withheld below the minimum sample count") {
  const auto t = times(19);
  std::vector<double> q(19, 0.0);
  CHECK(stability_verdict(t, q, 1e9, 1e7).verdict == Verdict::withheld);
  CHECK(stability_verdict(times(20), std::vector<double>(20, 0.0), 1e9, 1e7).verdict == Verdict::stable);
}

TEST_CASE("threshold is configurable") {
  const auto t = times(50);
  std::vector<double> q(50);
  for (std::size_t k = 0; k < 50; ++k) q[k] = 3e8 + 0.03e9 * t[k];
  StabilityThresholds th;
  th.slope_fraction = 0.05;
  CHECK(stability_verdict(t, q, 1e9, 1e7, th).verdict == Verdict::stable);
  th.slope_fraction = 0.02;
  CHECK(stability_verdict(t, q, 1e9, 1e7, th).verdict == Verdict::unstable);
}

TEST_CASE("delay histogram: mean exact, quantiles at bin resolution") {
  DelayHistogram h(1000, 100);
  for (SimTime v = 1; v <= 1000; ++v) h.add(v * 50);  // 50 ns .. 50 us
  CHECK(h.count() == 1000);
  CHECK(h.mean() == doctest::Approx(25'025.0));
  CHECK(h.quantile(0.5) == 26'000);  // 500th value 25000 lies in bin [25000, 26000)
  CHECK(h.quantile(0.99) == 50'000);
  DelayHistogram over(1000, 10);
  for (SimTime v : {500, 20'000, 30'000, 40'000}) over.add(v);
  CHECK(over.quantile(1.0) == 40'000);
  CHECK(over.quantile(0.25) == 1000);
  CHECK(DelayHistogram().quantile(0.5) == 0);
}

TEST_CASE("utilization ledger tiles the window") {
  UtilizationLedger u(1000, 11'000, 100);
  u.add_burst(500, 1000);    // clipped at the window start: 500 of data, 100 guard
  u.add_burst(3000, 2000);
  u.add_burst(10'500, 1000);  // clipped at the window end
  u.close();
  CHECK(u.burst_time() == 500 + 2000 + 500);
  CHECK(u.guard_time() == 200);
  CHECK(u.burst_time() + u.guard_time() + u.idle_time() == u.elapsed());
  CHECK(u.utilization() == doctest::Approx(3000.0 / 10'000.0));
}

TEST_CASE("csv header and row agree on columns") {
  const std::string header = csv_header();
  CHECK(header ==
        "scenario_hash,seed,mode,N,M,load,backlogged_fraction,throughput_bps,"
        "priority_delay_ms_mean,priority_delay_ms_p99,utilization,blocked_grants,verdict");
  RunMetrics m;
  m.scenario_hash = "00000000deadbeef";
  m.seed = 3;
  m.mode = Mode::uncoordinated;
  m.n_sources = 10;
  m.n_multipaths = 10;
  m.load = 0.5;
  m.backlogged_fraction = 1.0;
  m.throughput_bps = 8.8e9;
  m.priority_delay_mean = 0.0025;
  m.blocked_grants = 12;
  m.stability.verdict = Verdict::stable;
  const std::string row = csv_row(m);
  auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ',') + 1; };
  CHECK(count(row) == count(header));
  CHECK(row.rfind("00000000deadbeef,3,uncoordinated,10,10,", 0) == 0);
  CHECK(row.find(",2.500000,") != std::string::npos);
  CHECK(row.substr(row.size() - 10) == ",12,stable");
}

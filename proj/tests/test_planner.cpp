#include <cmath>

#include "doctest.h"
#include "mpsim/planner.hpp"

using namespace mpsim;

namespace {

std::int64_t total(const EnergyReport& r, const std::string& name) {
  for (const auto& [n, mw] : r.class_totals_mw) {
    if (n == name) return mw;
  }
  return -1;
}

// Direct transcription of the two conditions, checked cell by cell.
bool reference_stable(const std::vector<std::vector<double>>& a, double c, const std::vector<int>& t) {
  for (std::size_t j = 0; j < a[0].size(); ++j) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i][j];
    if (s >= c) return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0;
    for (double v : a[i]) s += v;
    if (s >= t[i] * c) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("reference network energy totals are exact") {
  const EnergyReport r = energy_report(EnergyInventory::reference());
  CHECK(total(r, "core") == 376'000'000);
  CHECK(total(r, "regional") == 616'000'000);
  CHECK(total(r, "metro") == 700'000'000);
  CHECK(total(r, "edge") == 4'200'000'000);
  CHECK(total(r, "gateway") == 360'000'000);
  CHECK(total(r, "peering") == 152'000'000);
  CHECK(r.network_mw == 6'404'000'000);
  CHECK(r.transit_mw == 1'692'000'000);
  CHECK(r.receivers_mw == 73'500'000);
  CHECK(r.controllers_mw == 700'000);
  CHECK(r.gateway_uplift_mw == 54'000'000);
  CHECK(r.multipath_mw == 6'404'000'000 - 1'692'000'000 + 73'500'000 + 700'000 + 54'000'000);
  CHECK(r.savings == doctest::Approx(1.0 - 4'840'200'000.0 / 6'404'000'000.0));
  CHECK(format_kw(r.network_mw) == "6404");
  CHECK(format_kw(r.receivers_mw) == "73.5");
  CHECK(format_kw(1) == "0.000001");
  CHECK(format_kw(-1'500'000) == "-1.5");
}

TEST_CASE("negative inventory values are rejected") {
  EnergyInventory inv = EnergyInventory::reference();
  inv.classes[0].count = -1;
  CHECK_THROWS_AS(energy_report(inv), ConfigError);
  inv = EnergyInventory::reference();
  inv.receiver_mw = -5;
  CHECK_THROWS_AS(energy_report(inv), ConfigError);
}

TEST_CASE("savings fall as receiver power grows") {
  EnergyInventory inv = EnergyInventory::reference();
  double last = 2.0;
  for (std::int64_t mw = 0; mw <= 100'000; mw += 5000) {
    inv.receiver_mw = mw;
    const double s = energy_report(inv).savings;
    CHECK(s < last);
    last = s;
  }
}

TEST_CASE("cluster traffic") {
  CHECK(cluster_traffic(420, 1e9, 60, 60, false) / 1e9 == doctest::Approx(8.5918).epsilon(1e-4));
  CHECK(cluster_traffic(420, 1e9, 60, 60, true) / 1e9 == doctest::Approx(8.4487).epsilon(1e-4));
  CHECK(cluster_traffic(420, 1e9, 60, 60, true, true) / 1e9 == doctest::Approx(8.5714).epsilon(1e-4));
  CHECK(cluster_traffic(420, 1e9, 1, 1, true) == 0.0);
  CHECK(cluster_traffic(1, 1e9, 1, 1, true) == 0.0);
  CHECK(cluster_traffic(400, 2e9, 40, 40, false) / 1e9 == doctest::Approx(8.0201).epsilon(1e-4));
  CHECK(cluster_traffic(400, 2e9, 40, 40, false, true) == doctest::Approx(8e9));
  // 60 -> 56 of 420 with self excluded.
  CHECK(cluster_traffic(420, 1e9, 60, 56, false) / 1e9 == doctest::Approx(8.0191).epsilon(1e-4));
  double last = -1;
  for (int dst = 1; dst <= 100; ++dst) {
    const double t = cluster_traffic(420, 1e9, 60, dst, false);
    CHECK(t > last);
    last = t;
  }
}

TEST_CASE("peak throughput per quantum") {
  CHECK(peak_throughput(1e10, 1000, 100e-9) / 1e9 == doctest::Approx(8.8889).epsilon(1e-4));
  CHECK(peak_throughput(1e10, 1000, 0) == doctest::Approx(1e10));
  double last = 0;
  for (double q = 100; q <= 100'000; q *= 2) {
    const double t = peak_throughput(1e10, q, 100e-9);
    CHECK(t > last);
    CHECK(t < 1e10);
    last = t;
  }
}

TEST_CASE("stability conditions: examples") {
  const double c = 1e10;
  std::vector<std::vector<double>> a(10, std::vector<double>(10, 0.99e9));
  CHECK(stability_ok(a, c, {1}).ok);
  a[0][0] = 1.09e9;  // column 0 and row 0 both sum to exactly C
  CHECK(stability_ok(a, c, {1}).violated.size() == 2);
  const auto r = stability_ok(a, c, {2});
  CHECK_FALSE(r.ok);
  REQUIRE(r.violated.size() == 1);
  CHECK(r.violated[0].find("multipath 0") != std::string::npos);
  std::vector<std::vector<double>> row{{0.6e10, 0.6e10}};
  CHECK_FALSE(stability_ok(row, c, {1}).ok);
  CHECK(stability_ok(row, c, {2}).ok);
  CHECK(stability_ok(row, c, {}).ok == false);
}

TEST_CASE("stability conditions agree with a brute-force check") {
  RngStream rng(17, StreamPurpose::test);
  int agreed = 0, stable = 0;
  for (int k = 0; k < 2000; ++k) {
    const int n = static_cast<int>(rng.uniform_int(1, 5));
    const int m = static_cast<int>(rng.uniform_int(1, 5));
    std::vector<std::vector<double>> a(n, std::vector<double>(m));
    for (auto& row : a) {
      for (auto& v : row) v = std::round(rng.uniform(0, 5)) * 1e9;  // hits the boundaries
    }
    std::vector<int> t(n);
    for (auto& x : t) x = static_cast<int>(rng.uniform_int(1, 3));
    const bool ok = stability_ok(a, 1e10, t).ok;
    agreed += ok == reference_stable(a, 1e10, t);
    stable += ok;
  }
  CHECK(agreed == 2000);
  CHECK(stable > 100);
  CHECK(stable < 1900);
}

TEST_CASE("plan files override inventory and traffic questions") {
  const PlanInput in = parse_plan(
      "edge_power = 5000\nedge_count = 10\nreceiver_power = 20.25\ngateway_uplift = 0.1\n"
      "nodes_total = 100\nsrc_cluster = 10\ndst_cluster = 20\nguard_time = 50\n");
  const EnergyReport r = energy_report(in.inventory);
  CHECK(total(r, "edge") == 50'000'000);
  CHECK(in.inventory.receiver_mw == 20'250);
  CHECK(r.gateway_uplift_mw == 36'000'000);
  CHECK(in.guard_time == doctest::Approx(50e-9));
  CHECK(in.nodes_total == 100);
  CHECK_THROWS_AS(parse_plan("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_plan("edge_power = 0.0001\n"), ConfigError);
  CHECK_THROWS_AS(parse_plan("intra = perhaps\n"), ConfigError);
}

TEST_CASE("reports list every figure") {
  const std::string text = plan_text_report(PlanInput{});
  CHECK(text.find("6404") != std::string::npos);
  CHECK(text.find("73.5") != std::string::npos);
  CHECK(text.find("8.5919") != std::string::npos);
  CHECK(text.find("8.8889") != std::string::npos);
  const std::string csv = plan_csv_report(PlanInput{});
  CHECK(csv.rfind("item,value,unit\n", 0) == 0);
  CHECK(csv.find("network,6404,kW") != std::string::npos);
}

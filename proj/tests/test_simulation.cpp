#include <algorithm>
#include <map>

#include "doctest.h"
#include "mpsim/simulation.hpp"

using namespace mpsim;

namespace {

ClusterScenario small(int n, int m, double load, Mode mode, double f = 1.0) {
  ClusterScenario sc;
  sc.n_sources = n;
  sc.n_multipaths = m;
  sc.demand.symmetric_load = load;
  sc.backlogged_fraction = f;
  sc.mode = mode;
  sc.warmup = 200 * kNanosPerMilli;
  sc.sim_duration = 2 * kNanosPerSecond;
  return sc;
}

// Per-multipath check that every burst begins at least one guard after the
// previous burst's last bit at the root.
struct RootWatch {
  BitsPerSecond rate;
  SimTime guard;
  std::map<int, SimTime> last_end;
  std::uint64_t bursts = 0, collisions = 0;
  void see(const Burst& b, SimTime start) {
    ++bursts;
    auto it = last_end.find(b.multipath);
    if (it != last_end.end() && start < it->second + guard) ++collisions;
    last_end[b.multipath] = start + transmission_time(b.payload_bytes(), rate);
  }
};

}  // namespace

TEST_CASE("coordinated bursts never collide at the root over a million grants") {
  ClusterScenario sc = small(10, 10, 0.95, Mode::coordinated);
  sc.warmup = 0;
  sc.sim_duration = 250 * kNanosPerMilli;
  RootWatch watch{sc.channel_rate, sc.guard_time};
  std::uint64_t grants = 0;
  SimulationHooks hooks;
  hooks.on_grant = [&](const Grant&) { ++grants; };
  hooks.on_root_arrival = [&](const Burst& b, SimTime s) { watch.see(b, s); };
  const RunMetrics m = ClusterSimulation(sc, hooks).run();
  CHECK(grants >= 1'000'000);
  CHECK(watch.bursts > 900'000);
  CHECK(watch.collisions == 0);
  CHECK(m.blocked_grants == 0);
}

TEST_CASE("coordinated grants never overlap on a source's transmitter") {
  ClusterScenario sc = small(6, 4, 0.9, Mode::coordinated, 0.5);
  sc.transmitters = {1};
  std::map<int, SimTime> busy_until;
  std::uint64_t overlaps = 0, blocked = 0;
  SimulationHooks hooks;
  hooks.on_service = [&](const Grant& g, const Burst* b) {
    if (!b) {
      ++blocked;
      return;
    }
    auto it = busy_until.find(g.source);
    if (it != busy_until.end() && g.start < it->second) ++overlaps;
    busy_until[g.source] = g.start + g.duration + sc.guard_time;
  };
  ClusterSimulation(sc, hooks).run();
  CHECK(overlaps == 0);
  CHECK(blocked == 0);
}

TEST_CASE("uncoordinated grants are blocked at high load") {
  const RunMetrics m = run_scenario(small(10, 10, 0.9, Mode::uncoordinated));
  CHECK(m.blocked_grants > 0);
}

TEST_CASE("uncoordinated bursts that are sent still never collide") {
  ClusterScenario sc = small(8, 8, 0.8, Mode::uncoordinated, 0.5);
  sc.sim_duration = kNanosPerSecond;
  RootWatch watch{sc.channel_rate, sc.guard_time};
  SimulationHooks hooks;
  hooks.on_root_arrival = [&](const Burst& b, SimTime s) { watch.see(b, s); };
  ClusterSimulation(sc, hooks).run();
  CHECK(watch.bursts > 0);
  CHECK(watch.collisions == 0);
}

TEST_CASE("bytes are conserved at every event") {
  for (Mode mode : {Mode::coordinated, Mode::uncoordinated}) {
    ClusterScenario sc = small(3, 2, 0.9, mode, 0.5);
    sc.sim_duration = kNanosPerSecond;
    const ClusterSimulation* sim = nullptr;
    std::uint64_t events = 0, unbalanced = 0, mismatched = 0;
    SimulationHooks hooks;
    hooks.on_event = [&](SimTime, EventKind) {
      ++events;
      if (!sim->audit().balanced()) ++unbalanced;
      if (events % 5000 == 0) {
        const ByteAudit a = sim->audit(), r = sim->recount();
        if (a.injected != r.injected || a.delivered != r.delivered || a.queued != r.queued ||
            a.in_flight != r.in_flight)
          ++mismatched;
      }
    };
    ClusterSimulation s(sc, hooks);
    sim = &s;
    const RunMetrics m = s.run();
    CHECK(events > 10'000);
    CHECK(unbalanced == 0);
    CHECK(mismatched == 0);
    CHECK(m.injected == m.delivered + m.queued + m.in_flight);
    CHECK(m.delivered > 0);
  }
}

TEST_CASE("round robin shares a grant stream fairly between backlogged flows") {
  for (Mode mode : {Mode::coordinated, Mode::uncoordinated}) {
    for (auto [n, m] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{3, 2}}) {
      ClusterScenario sc = small(n, m, 0.85, mode);
      sc.warmup = 0;
      const ClusterSimulation* sim = nullptr;
      std::map<std::uint32_t, Bytes> served;
      // For every pair of flows sharing a ring: their served counts when the
      // pair was first seen together.
      using PairKey = std::pair<std::uint32_t, std::uint32_t>;
      std::map<std::pair<int, int>, std::map<PairKey, std::pair<Bytes, Bytes>>> pair_base;
      Bytes worst = 0;
      SimulationHooks hooks;
      hooks.on_service = [&](const Grant& g, const Burst* b) {
        if (!b) return;
        for (const Fragment& fr : b->payload) {
          if (fr.cls == FlowClass::backlogged) served[fr.flow] += fr.length;
        }
        const auto& ring = sim->source(g.source).queues(g.multipath).ring();
        auto& pairs = pair_base[{g.source, g.multipath}];
        std::map<PairKey, std::pair<Bytes, Bytes>> next;
        for (std::size_t x = 0; x < ring.size(); ++x) {
          for (std::size_t y = x + 1; y < ring.size(); ++y) {
            const PairKey key = std::minmax(ring[x].flow, ring[y].flow);
            const auto it = pairs.find(key);
            const auto start = it == pairs.end() ? std::pair{served[key.first], served[key.second]} : it->second;
            const Bytes da = served[key.first] - start.first;
            const Bytes db = served[key.second] - start.second;
            worst = std::max(worst, da > db ? da - db : db - da);
            next[key] = start;
          }
        }
        pairs = std::move(next);
      };
      ClusterSimulation s(sc, hooks);
      sim = &s;
      s.run();
      CHECK(worst <= 2 * sc.quantum);
      CHECK(!served.empty());
    }
  }
}

TEST_CASE("ranging recovers twice the one-way propagation exactly") {
  ClusterScenario sc = small(5, 3, 0.5, Mode::coordinated, 0.5);
  sc.sim_duration = 500 * kNanosPerMilli;
  const auto p = sc.propagation();
  std::uint64_t reports = 0, wrong = 0;
  SimulationHooks hooks;
  hooks.on_report = [&](const Report& r, SimTime at) {
    ++reports;
    if (at - r.sent_at_local != 2 * p[static_cast<std::size_t>(r.source)]) ++wrong;
  };
  ClusterSimulation s(sc, hooks);
  s.run();
  CHECK(reports > 100);
  CHECK(wrong == 0);
  for (int i = 0; i < sc.n_sources; ++i) CHECK(s.controller().rtt(i) == 2 * p[static_cast<std::size_t>(i)]);
}

TEST_CASE("every burst reaches the root exactly one offset after its grant") {
  ClusterScenario sc = small(4, 3, 0.7, Mode::coordinated, 0.5);
  sc.sim_duration = 500 * kNanosPerMilli;
  std::map<std::pair<int, SimTime>, SimTime> formulated;  // (source, local start) -> g
  std::uint64_t wrong = 0, seen = 0;
  const auto p = sc.propagation();
  SimulationHooks hooks;
  hooks.on_grant = [&](const Grant& g) { formulated[{g.source, g.start}] = g.formulated; };
  hooks.on_root_arrival = [&](const Burst& b, SimTime start) {
    ++seen;
    const auto it = formulated.find({b.source, b.emit_local});
    if (it == formulated.end() || start != it->second + sc.offset) ++wrong;
    if (start != b.emit_local + 2 * p[static_cast<std::size_t>(b.source)]) ++wrong;
  };
  ClusterSimulation(sc, hooks).run();
  CHECK(seen > 100);
  CHECK(wrong == 0);
}

TEST_CASE("same seed gives an identical run; another seed does not") {
  ClusterScenario sc = small(4, 3, 0.7, Mode::uncoordinated, 0.5);
  sc.sim_duration = kNanosPerSecond;
  const RunMetrics a = run_scenario(sc);
  const RunMetrics b = run_scenario(sc);
  CHECK(csv_row(a) == csv_row(b));
  CHECK(a.trace_digest == b.trace_digest);
  CHECK(a.events == b.events);
  sc.seed = 2;
  const RunMetrics c = run_scenario(sc);
  CHECK(c.trace_digest != a.trace_digest);
}

TEST_CASE("with one multipath both modes behave identically") {
  ClusterScenario sc = small(5, 1, 0.8, Mode::coordinated, 0.5);
  const RunMetrics a = run_scenario(sc);
  sc.mode = Mode::uncoordinated;
  const RunMetrics b = run_scenario(sc);
  CHECK(a.trace_digest == b.trace_digest);
  CHECK(a.throughput_bps == b.throughput_bps);
  CHECK(a.priority_delay_mean == b.priority_delay_mean);
  CHECK(a.mean_utilization == b.mean_utilization);
  CHECK(b.blocked_grants == 0);
}

TEST_CASE("invalid scenarios are rejected before running") {
  ClusterScenario sc;
  sc.offset = 100;
  CHECK_THROWS_AS(ClusterSimulation{sc}, ConfigError);
}

TEST_CASE("a run may only happen once") {
  ClusterScenario sc = small(2, 1, 0.3, Mode::coordinated);
  sc.sim_duration = 50 * kNanosPerMilli;
  ClusterSimulation s(sc);
  s.run();
  CHECK_THROWS(s.run());
}

TEST_CASE("priority delays are measured and decompose") {
  ClusterScenario sc = small(4, 2, 0.2, Mode::coordinated, 0.0);
  sc.warmup = 100 * kNanosPerMilli;
  sc.sim_duration = kNanosPerSecond;
  const RunMetrics m = run_scenario(sc);
  REQUIRE(m.priority_packets > 1000);
  CHECK(m.delay_report_wait + m.delay_propagation + m.delay_residual ==
        doctest::Approx(m.priority_delay_mean).epsilon(1e-9));
  CHECK(m.priority_delay_mean > sc.offset / 2.0 / kNanosPerSecond);
  CHECK(m.priority_delay_p99 >= m.priority_delay_mean);
}

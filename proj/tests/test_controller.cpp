#include "doctest.h"
#include "mpsim/controller.hpp"

using namespace mpsim;

namespace {

ClusterScenario two_by_two(Mode mode) {
  ClusterScenario sc;
  sc.n_sources = 2;
  sc.n_multipaths = 2;
  sc.one_way_prop.fixed = {100'000, 300'000};
  sc.mode = mode;
  return sc;
}

Report report(int i, int j, std::int64_t count, Bytes prio, SimTime t2) { return Report{i, j, count, prio, t2}; }

}  // namespace

TEST_CASE("ranging") {
  CHECK(range(2'000'000, 3'000'000) == 1'000'000);
  CHECK(range(5, 5) == 0);
  CHECK_THROWS_AS(range(10, 9), IntegrityFault);
}

TEST_CASE("grant epoch recursion") {
  CHECK(next_grant_epoch(0, 800, 100) == 900);
  // Three 10 us grants from epoch 0: the fourth epoch is 30.3 us.
  SimTime g = 0;
  for (int k = 0; k < 3; ++k) g = next_grant_epoch(g, 10'000, 100);
  CHECK(g == 30'300);
}

TEST_CASE("start time on the source clock") {
  CHECK(start_time(0, 2'000'000, 1'000'000) == 1'000'000);
  CHECK(start_time(500, 2'000'000, 0) == 2'000'500);
}

TEST_CASE("grant sizing") {
  const BitsPerSecond c = 10'000'000'000;
  CHECK(grant_size(10'000, 3, 1000, c, 100'000) == 10'400);
  CHECK(grant_size(0, 1, 1000, c, 100'000) == 800);
  CHECK(grant_size(0, 0, 1000, c, 100'000) == 0);
  CHECK(grant_size(100'000'000, 0, 1000, c, 100'000) == 100'000);
  CHECK(grant_size(1, 0, 1000, c, 100'000) == 1);
}

TEST_CASE("control channel timing") {
  ClusterScenario sc;
  sc.n_sources = 60;
  sc.n_multipaths = 16;
  const auto t = control_channel_delays(sc);
  CHECK(t.report_slot == 1024);
  CHECK(t.report_cycle == 983'040);
  CHECK(t.bytes_per_cycle == 122'880);
  CHECK(t.grant_delay_bound == 1'000'000);
}

TEST_CASE("source set cyclic search") {
  SourceSet s(130);
  CHECK(s.next_from(0) == -1);
  CHECK_FALSE(s.any());
  s.set(5, true);
  s.set(70, true);
  s.set(129, true);
  CHECK(s.any());
  CHECK(s.next_from(0) == 5);
  CHECK(s.next_from(6) == 70);
  CHECK(s.next_from(71) == 129);
  CHECK(s.next_from(129) == 129);
  s.set(129, false);
  CHECK(s.next_from(71) == 5);
  CHECK(s.test(70));
  CHECK_FALSE(s.test(71));
}

TEST_CASE("reports range the source and set its demand") {
  Controller c(two_by_two(Mode::coordinated));
  CHECK_FALSE(c.ranged(0));
  CHECK_FALSE(c.has_demand(0, 0));
  c.on_report(report(0, 0, 3, 0, 1'000'000), 1'200'000);
  CHECK(c.ranged(0));
  CHECK(c.rtt(0) == 200'000);
  CHECK(c.has_demand(0, 0));
  CHECK(c.backlogged_count(0, 0) == 3);
  CHECK(c.any_demand(0));
  CHECK_FALSE(c.any_demand(1));
  c.on_report(report(0, 0, 0, 0, 2'000'000), 2'200'000);
  CHECK_FALSE(c.has_demand(0, 0));
}

TEST_CASE("coordinated selection skips a busy transmitter; uncoordinated does not") {
  for (Mode mode : {Mode::coordinated, Mode::uncoordinated}) {
    Controller c(two_by_two(mode));
    const int a = c.cursor(1);
    const int b = 1 - a;
    const SimTime t = 1'000'000;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) c.on_report(report(i, j, 10, 0, t), t + (i == 0 ? 200'000 : 600'000));
    }
    const SimTime g0 = c.epoch_floor(0);
    CHECK(g0 == 2'000'000);
    const Grant first = c.issue(0, a, g0);
    CHECK(first.duration == 8000);
    CHECK(first.start == start_time(g0, 2'000'000, c.rtt(a)));
    const SimTime g1 = c.epoch_floor(1);
    CHECK(g1 == 2'000'900);
    if (mode == Mode::coordinated) {
      CHECK(c.transmitter_free(a) == first.start + 8000 + 100);
      CHECK(c.select(1, g1) == b);
      // With only A demanding, the multipath waits until A is free.
      c.on_report(report(b, 1, 0, 0, t + 1), t + 1 + c.rtt(b));
      CHECK_FALSE(c.select(1, g1).has_value());
      CHECK(c.earliest_feasible(1, g1) == c.transmitter_free(a) - 2'000'000 + c.rtt(a));
      CHECK(c.select(1, *c.earliest_feasible(1, g1)) == a);
    } else {
      CHECK(c.select(1, g1) == a);
    }
  }
}

TEST_CASE("issue applies the recursion and advances the cursor") {
  Controller c(two_by_two(Mode::coordinated));
  c.on_report(report(0, 0, 2, 0, 0), 200'000);
  c.on_report(report(1, 0, 1, 0, 0), 600'000);
  const SimTime g = c.epoch_floor(0);
  CHECK_THROWS_AS(c.issue(0, 0, g - 1), IntegrityFault);
  const Grant x = c.issue(0, 0, g);
  CHECK(x.duration == 1600);
  CHECK(c.cursor(0) == 1);
  CHECK(c.epoch_floor(0) == g + 1600 + 100);
  CHECK(c.grants_issued(0) == 1);
  const Grant y = c.issue(0, 1, c.epoch_floor(0));
  CHECK(y.index == 1);
  CHECK(c.cursor(0) == 0);
}

TEST_CASE("a source without demand gets no grant") {
  Controller c(two_by_two(Mode::coordinated));
  c.on_report(report(0, 0, 0, 0, 0), 200'000);
  const Grant g = c.issue(0, 0, c.epoch_floor(0));
  CHECK(g.duration == 0);
  CHECK(c.grants_issued(0) == 0);
}

TEST_CASE("priority bytes already granted are not counted twice") {
  Controller c(two_by_two(Mode::coordinated));
  c.on_report(report(0, 0, 0, 5000, 0), 200'000);
  const Grant g = c.issue(0, 0, c.epoch_floor(0));
  CHECK(g.priority_share == 5000);
  CHECK(g.duration == 4000);
  CHECK(c.pending_priority(0, 0) == 0);
  // A report sent before the grant starts still counts the granted bytes.
  c.on_report(report(0, 0, 0, 6000, g.start - 10), g.start - 10 + 200'000);
  CHECK(c.pending_priority(0, 0) == 1000);
  // Once the grant has started, the report is authoritative.
  c.on_report(report(0, 0, 0, 1500, g.start), g.start + 200'000);
  CHECK(c.pending_priority(0, 0) == 1500);
}

TEST_CASE("cursor starts are seeded and within range") {
  ClusterScenario sc;
  sc.n_sources = 7;
  Controller c(sc);
  for (int j = 0; j < sc.n_multipaths; ++j) {
    CHECK(c.cursor(j) >= 0);
    CHECK(c.cursor(j) < 7);
  }
  Controller d(sc);
  for (int j = 0; j < sc.n_multipaths; ++j) CHECK(c.cursor(j) == d.cursor(j));
}

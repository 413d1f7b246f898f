#pragma once

// Deterministic discrete-event engine: integer-nanosecond clock, a
// (fire_at, sequence) ordered future-event queue and named RNG substreams.

#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpsim {

/// Nanoseconds since simulation start on the controller reference clock.
using SimTime = std::int64_t;

inline constexpr SimTime kNanosPerMicro = 1'000;
inline constexpr SimTime kNanosPerMilli = 1'000'000;
inline constexpr SimTime kNanosPerSecond = 1'000'000'000;

/// Raised when a run violates one of its own protocol invariants. A run that
/// throws this is aborted; the result must not be used.
class IntegrityFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised for invalid configuration (bad scenario values, bad distribution
/// parameters).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename Payload>
class EventQueue {
 public:
  struct Event {
    SimTime fire_at;
    std::uint64_t sequence;
    Payload payload;
  };

  SimTime now() const { return now_; }
  std::size_t pending() const { return heap_.size(); }
  std::uint64_t scheduled_count() const { return scheduled_; }
  std::uint64_t dispatched_count() const { return dispatched_; }

  /// Returns the event's sequence number, which doubles as its handle.
  std::uint64_t schedule(SimTime fire_at, const Payload& payload) {
    if (fire_at < now_) {
      throw IntegrityFault("event scheduled in the past: fire_at=" + std::to_string(fire_at) +
                           " now=" + std::to_string(now_));
    }
    const std::uint64_t seq = next_sequence_++;
    heap_.push(Event{fire_at, seq, payload});
    ++scheduled_;
    return seq;
  }

  /// Dispatches every event with fire_at <= end in (fire_at, sequence) order,
  /// then leaves the clock at `end`. Handlers may schedule further events.
  template <typename Handler>
  std::uint64_t run_until(SimTime end, Handler&& handler) {
    std::uint64_t count = 0;
    while (!heap_.empty() && heap_.top().fire_at <= end) {
      Event ev = heap_.top();
      heap_.pop();
      now_ = ev.fire_at;
      ++dispatched_;
      ++count;
      handler(static_cast<const Event&>(ev));
    }
    if (end > now_) now_ = end;
    return count;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.sequence > b.sequence;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  SimTime now_ = 0;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t scheduled_ = 0;
  std::uint64_t dispatched_ = 0;
};

/// What a substream is used for. Part of the substream key, so adding a
/// purpose or a source never perturbs existing streams.
enum class StreamPurpose : std::uint32_t {
  backlogged_arrivals = 1,
  priority_arrivals = 2,
  propagation = 3,
  grant_signalling = 4,
  scan_cursor = 5,
  initial_population = 6,
  test = 99,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Derives the seed of the substream (purpose, a, b) from a run seed.
std::uint64_t substream_seed(std::uint64_t seed, StreamPurpose purpose, std::uint32_t a,
                             std::uint32_t b);

/// One named pseudo-random substream. Sampling is done by explicit inverse
/// CDF on the raw 64-bit engine output so results do not depend on the
/// standard library's distribution implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint32_t a = 0, std::uint32_t b = 0)
      : engine_(substream_seed(seed, purpose, a, b)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform_open();

  /// Uniform on [lo, hi]; returns lo when lo == hi.
  double uniform(double lo, double hi);

  /// Uniform integer on [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Strictly positive exponential sample; throws ConfigError unless mean > 0.
  double exponential(double mean);

  /// Poisson count by counting unit-rate exponential arrivals.
  std::int64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

double sample_exponential(RngStream& stream, double mean);
double sample_uniform(RngStream& stream, double lo, double hi);

}  // namespace mpsim

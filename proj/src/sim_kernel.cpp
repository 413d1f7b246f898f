#include "mpsim/sim_kernel.hpp"

#include <cmath>

namespace mpsim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, StreamPurpose purpose, std::uint32_t a,
                             std::uint32_t b) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(a) << 32 | b));
  return h;
}

double RngStream::uniform_open() {
  // 53 random bits, shifted by half an ulp so both 0 and 1 are excluded.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  if (hi < lo) throw ConfigError("uniform: lo > hi");
  if (lo == hi) return lo;
  return lo + (hi - lo) * uniform_open();
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ConfigError("uniform_int: lo > hi");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double RngStream::exponential(double mean) {
  if (!(mean > 0.0)) throw ConfigError("exponential: mean must be positive");
  return -mean * std::log(uniform_open());
}

std::int64_t RngStream::poisson(double mean) {
  if (mean < 0.0) throw ConfigError("poisson: negative mean");
  std::int64_t n = 0;
  double t = exponential(1.0);
  while (t < mean) {
    ++n;
    t += exponential(1.0);
  }
  return n;
}

double sample_exponential(RngStream& stream, double mean) { return stream.exponential(mean); }

double sample_uniform(RngStream& stream, double lo, double hi) { return stream.uniform(lo, hi); }

}  // namespace mpsim

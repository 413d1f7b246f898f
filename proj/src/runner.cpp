#include "mpsim/runner.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "mpsim/scenario_io.hpp"
#include "mpsim/simulation.hpp"

namespace mpsim {

std::vector<double> parse_load_list(const std::string& text) {
  std::vector<double> out;
  const auto parts = split(text, ':');
  if (parts.size() == 3) {
    const double start = parse_double(parts[0], "load range start");
    const double stop = parse_double(parts[1], "load range stop");
    const double step = parse_double(parts[2], "load range step");
    if (!(step > 0) || stop < start) throw ConfigError("load range must be start:stop:step with step > 0, stop >= start");
    const auto n = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::int64_t k = 0; k < n; ++k) {
      // Rounded to 1e-12 so 0.1 + 3 * 0.05 prints as 0.25.
      out.push_back(std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12);
    }
    return out;
  }
  if (parts.size() != 1) throw ConfigError("bad load list '" + text + "'");
  for (const auto& p : split(text, ',')) out.push_back(parse_double(p, "load"));
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text, std::uint64_t base) {
  std::vector<std::uint64_t> out;
  const auto parts = split(text, ',');
  if (parts.size() == 1) {
    const std::int64_t n = parse_int(parts[0], "seed count");
    if (n <= 0) throw ConfigError("seed count must be positive");
    for (std::int64_t k = 0; k < n; ++k) out.push_back(base + static_cast<std::uint64_t>(k));
    return out;
  }
  for (const auto& p : parts) {
    const std::int64_t s = parse_int(p, "seed");
    if (s < 0) throw ConfigError("seeds are non-negative");
    out.push_back(static_cast<std::uint64_t>(s));
  }
  return out;
}

ClusterScenario at_load(ClusterScenario sc, double load) {
  sc.demand.symmetric_load = load;
  sc.demand.matrix.clear();
  return sc;
}

std::vector<ClusterScenario> expand(const ClusterScenario& base, const std::vector<double>& loads,
                                    const std::vector<std::uint64_t>& seeds, const std::vector<Mode>& modes) {
  std::vector<ClusterScenario> out;
  for (double load : loads) {
    for (std::uint64_t seed : seeds) {
      for (Mode mode : modes) {
        ClusterScenario sc = at_load(base, load);
        sc.seed = seed;
        sc.mode = mode;
        out.push_back(std::move(sc));
      }
    }
  }
  return out;
}

std::vector<RunMetrics> run_all(const std::vector<ClusterScenario>& scenarios, int jobs) {
  std::vector<RunMetrics> results(scenarios.size());
  std::vector<std::exception_ptr> errors(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < scenarios.size(); k = next++) {
      try {
        results[k] = run_scenario(scenarios[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const auto n = static_cast<std::size_t>(std::max(1, jobs));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(n, scenarios.size()); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace mpsim

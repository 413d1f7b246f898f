#pragma once

// Batches of independent runs: load ranges, seed lists, mode pairs, and a
// small worker pool. Results come back in (load, seed, mode) order whatever
// the number of workers.

#include <cstdint>
#include <string>
#include <vector>

#include "mpsim/metrics.hpp"
#include "mpsim/model.hpp"

namespace mpsim {

/// "0.5", "0.1,0.5,0.9" or "start:stop:step" (stop included when the range
/// lands on it to within 1e-9 of a step).
std::vector<double> parse_load_list(const std::string& text);

/// "7" -> {base .. base+6} is a count; "1,4,9" is an explicit list.
std::vector<std::uint64_t> parse_seed_list(const std::string& text, std::uint64_t base);

/// The scenario with symmetric demand at `load` (an explicit matrix is dropped).
ClusterScenario at_load(ClusterScenario scenario, double load);

/// Cartesian product in (load, seed, mode) order.
std::vector<ClusterScenario> expand(const ClusterScenario& base, const std::vector<double>& loads,
                                    const std::vector<std::uint64_t>& seeds, const std::vector<Mode>& modes);

/// Runs every scenario on up to `jobs` threads; results are index-aligned
/// with the input. The first failure (in input order) is rethrown after all
/// workers stop.
std::vector<RunMetrics> run_all(const std::vector<ClusterScenario>& scenarios, int jobs);

}  // namespace mpsim

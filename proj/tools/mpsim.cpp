// mpsim: run, sweep and compare cluster simulations; planning arithmetic.
//
// Exit codes: 0 success, 1 usage error, 2 invalid configuration,
// 3 integrity fault during a run.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpsim/metrics.hpp"
#include "mpsim/planner.hpp"
#include "mpsim/runner.hpp"
#include "mpsim/scenario_io.hpp"
#include "mpsim/sim_kernel.hpp"

using namespace mpsim;

namespace {

struct Overrides {
  std::string file;
  std::string mode;
  std::optional<double> load;
  std::string loads;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::optional<double> duration;
  std::optional<double> warmup;
  std::optional<double> backlogged_fraction;
  std::vector<std::string> sets;
  std::string out;
  int jobs = 1;
  bool quiet = false;
  bool detail = false;
};

void add_common(CLI::App* cmd, Overrides& o, bool multi) {
  cmd->add_option("scenario", o.file, "Scenario file (key = value)")->required();
  cmd->add_option("--mode", o.mode, "coordinated | uncoordinated");
  cmd->add_option("--load", o.load, "Symmetric multipath load");
  cmd->add_option("--seed", o.seed, "Run seed (default: file, then MPSIM_SEED, then 1)");
  cmd->add_option("--duration", o.duration, "Measured time after warmup, seconds");
  cmd->add_option("--warmup", o.warmup, "Warmup, seconds");
  cmd->add_option("--backlogged-fraction", o.backlogged_fraction, "Share of demand in backlogged flows");
  cmd->add_option("--set", o.sets, "Any scenario key, as key=value (repeatable)");
  cmd->add_flag("--quiet", o.quiet, "Do not echo the effective scenario to stderr");
  cmd->add_flag("--detail", o.detail, "Print every measured quantity of each run to stderr");
  if (multi) {
    cmd->add_option("--loads", o.loads, "Loads: a,b,c or start:stop:step");
    cmd->add_option("--seeds", o.seeds, "Seed count (from --seed) or explicit list a,b,c");
    cmd->add_option("--out", o.out, "Write CSV here instead of stdout");
    cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  } else {
    cmd->add_option("--out", o.out, "Write CSV here instead of stdout");
  }
}

SimTime seconds(double s) { return static_cast<SimTime>(std::llround(s * 1e9)); }

ClusterScenario effective(const Overrides& o) {
  const std::string text = read_text_file(o.file);
  ClusterScenario sc;
  try {
    sc = parse_scenario(text);
  } catch (const ConfigError& e) {
    throw ConfigError(o.file + ": " + e.what());
  }
  const bool file_seed = parse_key_values(text).count("seed") > 0;
  if (!file_seed) {
    if (const char* env = std::getenv("MPSIM_SEED")) sc.seed = static_cast<std::uint64_t>(parse_int(env, "MPSIM_SEED"));
  }
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_scenario_key(sc, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  if (!o.mode.empty()) sc.mode = parse_mode(o.mode);
  if (o.load) sc = at_load(sc, *o.load);
  if (o.seed) sc.seed = *o.seed;
  if (o.duration) sc.sim_duration = seconds(*o.duration);
  if (o.warmup) sc.warmup = seconds(*o.warmup);
  if (o.backlogged_fraction) sc.backlogged_fraction = *o.backlogged_fraction;
  return sc;
}

void echo(const ClusterScenario& sc, const Overrides& o) {
  if (o.quiet) return;
  std::ostringstream os;
  os << "# scenario " << scenario_hash(sc) << "\n";
  std::istringstream lines(format_scenario(sc));
  for (std::string line; std::getline(lines, line);) os << "#   " << line << "\n";
  std::cerr << os.str();
}

void require_valid(const ClusterScenario& sc) {
  const auto problems = validate(sc);
  if (problems.empty()) return;
  std::string msg = "invalid scenario:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw ConfigError(msg);
}

void print_detail(const RunMetrics& m) {
  std::fprintf(stderr,
               "# run %s seed %llu %s load %.4f f %.3f\n"
               "#   flows completed %llu, in progress %llu, mean size %.0f B\n"
               "#   throughput %.4e b/s (mean of ratios %.4e, from arrival %.4e)\n"
               "#   response %.6f s, sojourn %.6f s\n"
               "#   priority packets %llu, delay mean %.4f ms p99 %.4f ms"
               " (report wait %.4f, propagation %.4f, residual %.4f ms)\n"
               "#   utilization %.4f, grants %llu, bursts %llu, blocked %llu\n"
               "#   stability %s, slope %.4g B/s (%.4f of offered), final backlog %.4g B\n"
               "#   bytes injected %lld delivered %lld queued %lld in flight %lld, events %llu\n",
               m.scenario_hash.c_str(), static_cast<unsigned long long>(m.seed), to_string(m.mode).c_str(), m.load,
               m.backlogged_fraction, static_cast<unsigned long long>(m.completed_flows),
               static_cast<unsigned long long>(m.in_progress_flows), m.mean_flow_size, m.throughput_bps,
               m.mean_of_ratios_bps, m.throughput_from_arrival_bps, m.mean_response_time, m.mean_sojourn_time,
               static_cast<unsigned long long>(m.priority_packets), m.priority_delay_mean * 1e3,
               m.priority_delay_p99 * 1e3, m.delay_report_wait * 1e3, m.delay_propagation * 1e3,
               m.delay_residual * 1e3, m.mean_utilization, static_cast<unsigned long long>(m.grants_issued),
               static_cast<unsigned long long>(m.bursts), static_cast<unsigned long long>(m.blocked_grants),
               to_string(m.stability.verdict).c_str(), m.stability.slope, m.stability.slope_fraction,
               m.stability.final_backlog, static_cast<long long>(m.injected), static_cast<long long>(m.delivered),
               static_cast<long long>(m.queued), static_cast<long long>(m.in_flight),
               static_cast<unsigned long long>(m.events));
}

void write_csv(const std::vector<RunMetrics>& rows, const std::string& out) {
  std::ostringstream os;
  os << csv_header() << "\n";
  for (const auto& r : rows) os << csv_row(r) << "\n";
  if (out.empty()) {
    std::cout << os.str();
    return;
  }
  std::ofstream f(out);
  if (!f) throw ConfigError("cannot write " + out);
  f << os.str();
}

std::vector<RunMetrics> batch(const Overrides& o, const std::vector<Mode>* modes) {
  const ClusterScenario base = effective(o);
  echo(base, o);
  std::vector<double> loads = o.loads.empty() ? std::vector<double>{base.load()} : parse_load_list(o.loads);
  const std::vector<std::uint64_t> seeds =
      o.seeds.empty() ? std::vector<std::uint64_t>{base.seed} : parse_seed_list(o.seeds, base.seed);
  std::vector<ClusterScenario> runs;
  if (o.loads.empty() && !base.demand.matrix.empty()) {
    // Keep an explicit demand matrix when no load is requested.
    for (std::uint64_t s : seeds) {
      for (Mode m : modes ? *modes : std::vector<Mode>{base.mode}) {
        ClusterScenario sc = base;
        sc.seed = s;
        sc.mode = m;
        runs.push_back(sc);
      }
    }
  } else {
    runs = expand(base, loads, seeds, modes ? *modes : std::vector<Mode>{base.mode});
  }
  for (const auto& sc : runs) require_valid(sc);
  auto results = run_all(runs, o.jobs);
  if (o.detail) {
    for (const auto& m : results) print_detail(m);
  }
  return results;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multipath MAC cluster simulator and planner"};
  app.require_subcommand(1);

  Overrides run_o, sweep_o, cmp_o, val_o;
  auto* run = app.add_subcommand("run", "One run (or one per --seeds entry); CSV rows");
  add_common(run, run_o, false);
  run->add_option("--seeds", run_o.seeds, "Seed count (from --seed) or explicit list a,b,c");
  auto* sweep = app.add_subcommand("sweep", "Load x seed sweep in one mode");
  add_common(sweep, sweep_o, true);
  auto* compare = app.add_subcommand("compare", "Load x seed sweep in both modes, same seeds");
  add_common(compare, cmp_o, true);
  auto* valid = app.add_subcommand("validate", "Check a scenario and its demand against the capacity conditions");
  add_common(valid, val_o, false);

  std::string plan_file;
  bool plan_csv = false;
  std::string plan_out;
  auto* plan = app.add_subcommand("plan", "Energy and dimensioning report from an inventory file");
  plan->add_option("inventory", plan_file, "Inventory file; the reference network when omitted");
  plan->add_flag("--csv", plan_csv, "CSV instead of text");
  plan->add_option("--out", plan_out, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      write_csv(batch(run_o, nullptr), run_o.out);
    } else if (*sweep) {
      write_csv(batch(sweep_o, nullptr), sweep_o.out);
    } else if (*compare) {
      const std::vector<Mode> both{Mode::coordinated, Mode::uncoordinated};
      write_csv(batch(cmp_o, &both), cmp_o.out);
    } else if (*valid) {
      const ClusterScenario sc = effective(val_o);
      echo(sc, val_o);
      const auto problems = validate(sc);
      for (const auto& p : problems) std::cout << "invalid: " << p << "\n";
      if (!problems.empty()) return 2;
      const auto cap = stability_ok(sc.demand_matrix(), static_cast<double>(sc.channel_rate), sc.transmitter_counts());
      for (const auto& v : cap.violated) std::cout << "over capacity: " << v << "\n";
      std::cout << (cap.ok ? "ok" : "ok (demand exceeds capacity; runs will be unstable)") << "\n";
    } else if (*plan) {
      const PlanInput in = plan_file.empty() ? PlanInput{} : load_plan_file(plan_file);
      const std::string report = plan_csv ? plan_csv_report(in) : plan_text_report(in);
      if (plan_out.empty()) {
        std::cout << report;
      } else {
        std::ofstream f(plan_out);
        if (!f) throw ConfigError("cannot write " + plan_out);
        f << report;
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IntegrityFault& e) {
    std::cerr << "integrity fault: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

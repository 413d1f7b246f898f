#include "mpsim/scenario_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mpsim {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& xs, char sep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << sep;
    if constexpr (std::is_floating_point_v<T>) {
      os << format_double(xs[i]);
    } else {
      os << xs[i];
    }
  }
  return os.str();
}

}  // namespace

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError(what + ": not a number: '" + text + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (!t.empty() && end == t.c_str() + t.size() && errno == 0) return v;
  // Accept integral values written in scientific notation, e.g. 10e9.
  const double d = parse_double(t, what);
  if (d != std::floor(d) || std::fabs(d) > 9.2e18) {
    throw ConfigError(what + ": not an integer: '" + text + "'");
  }
  return static_cast<std::int64_t>(d);
}

std::map<std::string, KeyValueEntry> parse_key_values(const std::string& text) {
  std::map<std::string, KeyValueEntry> out;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "' has no value");
    }
    if (out.count(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    out.emplace(key, KeyValueEntry{value, line_no});
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void apply_scenario_key(ClusterScenario& sc, const std::string& key, const std::string& value) {
  const std::string& w = key;
  if (key == "n_sources") {
    sc.n_sources = static_cast<int>(parse_int(value, w));
  } else if (key == "n_multipaths") {
    sc.n_multipaths = static_cast<int>(parse_int(value, w));
  } else if (key == "channel_rate") {
    sc.channel_rate = parse_int(value, w);
  } else if (key == "guard_time") {
    sc.guard_time = parse_int(value, w);
  } else if (key == "offset") {
    sc.offset = parse_int(value, w);
  } else if (key == "max_grant_delay") {
    sc.max_grant_delay = parse_int(value, w);
  } else if (key == "one_way_prop") {
    std::istringstream is(value);
    std::string kind, rest;
    is >> kind;
    std::getline(is, rest);
    PropagationSpec spec;
    if (kind == "uniform") {
      spec.uniform_max = parse_int(rest, w);
    } else if (kind == "list") {
      for (const auto& item : split(rest, ',')) spec.fixed.push_back(parse_int(item, w));
      if (spec.fixed.empty()) throw ConfigError("one_way_prop: empty list");
    } else {
      throw ConfigError("one_way_prop: expected 'uniform <max_ns>' or 'list <ns,...>'");
    }
    sc.one_way_prop = spec;
  } else if (key == "transmitters") {
    sc.transmitters.clear();
    for (const auto& item : split(value, ',')) sc.transmitters.push_back(static_cast<int>(parse_int(item, w)));
  } else if (key == "demand") {
    std::istringstream is(value);
    std::string kind, rest;
    is >> kind;
    std::getline(is, rest);
    DemandSpec spec;
    if (kind == "symmetric") {
      spec.symmetric_load = parse_double(rest, w);
    } else if (kind == "matrix") {
      spec.symmetric_load.reset();
      for (const auto& row : split(rest, ';')) {
        std::vector<double> r;
        for (const auto& item : split(row, ',')) r.push_back(parse_double(item, w));
        spec.matrix.push_back(std::move(r));
      }
    } else {
      throw ConfigError("demand: expected 'symmetric <load>' or 'matrix <row;row;...>'");
    }
    sc.demand = spec;
  } else if (key == "backlogged_fraction") {
    sc.backlogged_fraction = parse_double(value, w);
  } else if (key == "quantum") {
    sc.quantum = parse_int(value, w);
  } else if (key == "packet_size") {
    sc.packet_size = parse_int(value, w);
  } else if (key == "report_size") {
    sc.report_size = parse_int(value, w);
  } else if (key == "control_rate") {
    sc.control_rate = parse_int(value, w);
  } else if (key == "mode") {
    sc.mode = parse_mode(value);
  } else if (key == "sim_duration") {
    sc.sim_duration = parse_int(value, w);
  } else if (key == "warmup") {
    sc.warmup = parse_int(value, w);
  } else if (key == "seed") {
    sc.seed = static_cast<std::uint64_t>(parse_int(value, w));
  } else if (key == "grant_cap") {
    sc.grant_cap = parse_int(value, w);
  } else if (key == "sample_interval") {
    sc.sample_interval = parse_int(value, w);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

ClusterScenario parse_scenario(const std::string& text) {
  ClusterScenario sc;
  for (const auto& [key, entry] : parse_key_values(text)) {
    try {
      apply_scenario_key(sc, key, entry.value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(entry.line) + ": " + e.what());
    }
  }
  return sc;
}

ClusterScenario load_scenario_file(const std::string& path) {
  try {
    return parse_scenario(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string format_scenario(const ClusterScenario& sc) {
  std::ostringstream os;
  os << "n_sources = " << sc.n_sources << '\n';
  os << "n_multipaths = " << sc.n_multipaths << '\n';
  os << "channel_rate = " << sc.channel_rate << '\n';
  os << "guard_time = " << sc.guard_time << '\n';
  os << "offset = " << sc.offset << '\n';
  os << "max_grant_delay = " << sc.max_grant_delay << '\n';
  if (sc.one_way_prop.fixed.empty()) {
    os << "one_way_prop = uniform " << sc.one_way_prop.uniform_max << '\n';
  } else {
    os << "one_way_prop = list " << join(sc.one_way_prop.fixed, ',') << '\n';
  }
  os << "transmitters = " << join(sc.transmitters, ',') << '\n';
  if (sc.demand.symmetric_load) {
    os << "demand = symmetric " << format_double(*sc.demand.symmetric_load) << '\n';
  } else {
    os << "demand = matrix ";
    for (std::size_t r = 0; r < sc.demand.matrix.size(); ++r) {
      if (r) os << ';';
      os << join(sc.demand.matrix[r], ',');
    }
    os << '\n';
  }
  os << "backlogged_fraction = " << format_double(sc.backlogged_fraction) << '\n';
  os << "quantum = " << sc.quantum << '\n';
  os << "packet_size = " << sc.packet_size << '\n';
  os << "report_size = " << sc.report_size << '\n';
  os << "control_rate = " << sc.control_rate << '\n';
  os << "mode = " << to_string(sc.mode) << '\n';
  os << "sim_duration = " << sc.sim_duration << '\n';
  os << "warmup = " << sc.warmup << '\n';
  os << "seed = " << sc.seed << '\n';
  os << "grant_cap = " << sc.grant_cap << '\n';
  os << "sample_interval = " << sc.sample_interval << '\n';
  return os.str();
}

std::string scenario_hash(const ClusterScenario& sc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : format_scenario(sc)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mpsim

#pragma once

// Flat `key = value` run configuration with `#` comments.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <utility>
#include <vector>

#include "mzchaos/fourier.hpp"

namespace mzchaos {

inline constexpr const char* kVersion = "1.0.0";

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"full",         "reduced-markov", "reduced-memory",
                                              "quad-oracle",  "mc",             "lindecay",
                                              "select-memory", "tensor",        "compare"};
  return names;
}

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, int line, const std::string& msg)
      : std::invalid_argument(format(key, line, msg)), key_(std::move(key)), line_(line) {}
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& msg) {
    std::ostringstream os;
    if (line > 0) os << "line " << line << ": ";
    os << "'" << key << "': " << msg;
    return os.str();
  }
  std::string key_;
  int line_;
};

struct RunConfig {
  std::string scenario = "full";
  int N = 96;
  int M = 7;
  int Lambda = 1;
  double nu0 = 0.1;
  double nu1 = 0.07;
  double dt = 0.001;
  double T = 2.0;
  int stride = 1;
  std::optional<double> t0;
  std::optional<double> t1;
  int n0 = 1;
  int n1 = 1;
  std::optional<int> kmax;  // select-memory; defaults to N/2
  std::uint64_t seed = 12345;
  int samples = 2000;
  int Q = 16;
  double u0 = 1.0;  // lindecay
  std::string ic = "sin";
  std::string output = "series.csv";
  bool zero_unpaired_mode = true;
  int threads = 0;
  std::string baseline;  // compare
  std::string candidate;

  std::map<std::string, int> lines;  // key -> line it was set on

  bool is_set(const std::string& key) const { return lines.count(key) != 0; }
  int line_of(const std::string& key) const {
    auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  }
  int effective_kmax() const { return kmax.value_or(N / 2); }
};

/// "%.17g": round-trips every double.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, int line, std::string_view v, const char* type) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty())
    throw ConfigError(key, line, "expected " + std::string(type) + ", got '" + std::string(v) + "'");
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(out)) throw ConfigError(key, line, "value must be finite");
  return out;
}

inline bool parse_bool(const std::string& key, int line, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key, line, "expected boolean (true/false), got '" + std::string(v) + "'");
}

}  // namespace detail

/// "sin" or comma-separated "k re im" triples; the result must be real-valued.
inline FourierField parse_initial_condition(const std::string& spec, int modes) {
  if (spec == "sin") return sine_field(modes);
  FourierField f(modes);
  std::stringstream list(spec);
  std::string item;
  while (std::getline(list, item, ',')) {
    std::istringstream fields{std::string(detail::trim(item))};
    int k = 0;
    double re = 0.0, im = 0.0;
    std::string extra;
    if (!(fields >> k >> re >> im) || (fields >> extra))
      throw std::invalid_argument("initial condition entries must be 'k re im', got '" + item + "'");
    if (!f.contains(k)) throw std::invalid_argument("initial condition wavenumber " + std::to_string(k) + " outside F");
    f[k] = cplx(re, im);
  }
  if (!is_real_valued(f))
    throw std::invalid_argument(
        "initial condition is not real-valued (needs u_-k = conj(u_k), Im u_0 = 0, u_-N/2 = 0)");
  return f;
}

inline void validate(const RunConfig& c) {
  auto fail = [&c](const std::string& key, const std::string& msg) {
    throw ConfigError(key, c.line_of(key), msg);
  };
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), c.scenario) == names.end())
    fail("scenario", "unknown scenario '" + c.scenario + "'");
  if (c.N < 2 || c.N % 2 != 0) fail("N", "must be even and >= 2");
  if (c.M < 1) fail("M", "must be >= 1");
  if (c.Lambda != 1) fail("Lambda", "only Lambda = 1 is supported");
  const bool reduced = c.scenario == "reduced-markov" || c.scenario == "reduced-memory";
  if ((reduced || c.scenario == "select-memory") && c.M <= c.Lambda) fail("M", "must exceed Lambda");
  if (c.scenario == "lindecay" && c.M < 2) fail("M", "must be >= 2 for lindecay");
  if (!(c.nu0 > 0.0)) fail("nu0", "must be > 0");
  if (!(c.nu1 >= 0.0) || !(c.nu0 - c.nu1 > 0.0))
    fail("nu1", "must satisfy nu1 >= 0 and nu0 - nu1 > 0 (viscosity positive for all xi)");
  if (!(c.dt > 0.0)) fail("dt", "must be > 0");
  if (!(c.T >= 0.0)) fail("T", "must be >= 0");
  const double steps = std::round(c.T / c.dt);
  if (std::abs(steps * c.dt - c.T) > 1e-9 * std::max(1.0, c.T))
    fail("T", "must be an integer multiple of dt");
  if (c.stride < 1) fail("stride", "must be >= 1");
  if (c.t0 && !(*c.t0 > 0.0)) fail("t0", "must be > 0");
  if (c.t1 && !(*c.t1 > 0.0)) fail("t1", "must be > 0");
  if (c.t0 && c.t1 && *c.t1 > *c.t0) fail("t1", "must not exceed t0");
  if (c.t0.has_value() != c.t1.has_value() && c.scenario == "reduced-memory")
    fail(c.t0 ? "t1" : "t0", "t0 and t1 must be given together (or both omitted for auto-selection)");
  if (c.n0 < 1) fail("n0", "must be >= 1");
  if (c.n1 < 1) fail("n1", "must be >= 1");
  if (c.n0 != c.n1) fail("n1", "must equal n0 (equal subinterval counts on every level)");
  if (c.kmax && *c.kmax < 1) fail("kmax", "must be >= 1");
  if (c.samples < 1) fail("samples", "must be >= 1");
  if (c.Q < 2) fail("Q", "must be >= 2");
  if (c.threads < 0) fail("threads", "must be >= 0");
  if (c.output.empty()) fail("output", "must not be empty");
  try {
    (void)parse_initial_condition(c.ic, c.N);
  } catch (const std::invalid_argument& e) {
    fail("ic", e.what());
  }
  if (c.scenario == "compare") {
    if (c.baseline.empty()) fail("baseline", "required for scenario compare");
    if (c.candidate.empty()) fail("candidate", "required for scenario compare");
  }
}

inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view sv(raw);
    if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = detail::trim(sv);
    if (sv.empty()) continue;
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(std::string(sv), line, "expected 'key = value'");
    const std::string key(detail::trim(sv.substr(0, eq)));
    const std::string_view val = detail::trim(sv.substr(eq + 1));
    if (key.empty()) throw ConfigError("", line, "missing key");
    if (c.is_set(key)) throw ConfigError(key, line, "duplicate key (first set on line " +
                                                        std::to_string(c.line_of(key)) + ")");

    auto as_int = [&] { return detail::parse_number<int>(key, line, val, "integer"); };
    auto as_real = [&] { return detail::parse_number<double>(key, line, val, "real"); };
    if (key == "scenario") c.scenario = std::string(val);
    else if (key == "N") c.N = as_int();
    else if (key == "M") c.M = as_int();
    else if (key == "Lambda") c.Lambda = as_int();
    else if (key == "nu0") c.nu0 = as_real();
    else if (key == "nu1") c.nu1 = as_real();
    else if (key == "dt") c.dt = as_real();
    else if (key == "T") c.T = as_real();
    else if (key == "stride") c.stride = as_int();
    else if (key == "t0") c.t0 = as_real();
    else if (key == "t1") c.t1 = as_real();
    else if (key == "n0") c.n0 = as_int();
    else if (key == "n1") c.n1 = as_int();
    else if (key == "kmax") c.kmax = as_int();
    else if (key == "seed") c.seed = detail::parse_number<std::uint64_t>(key, line, val, "unsigned integer");
    else if (key == "samples") c.samples = as_int();
    else if (key == "Q") c.Q = as_int();
    else if (key == "u0") c.u0 = as_real();
    else if (key == "ic") c.ic = std::string(val);
    else if (key == "output") c.output = std::string(val);
    else if (key == "zero_unpaired_mode") c.zero_unpaired_mode = detail::parse_bool(key, line, val);
    else if (key == "threads") c.threads = as_int();
    else if (key == "baseline") c.baseline = std::string(val);
    else if (key == "candidate") c.candidate = std::string(val);
    else throw ConfigError(key, line, "unknown key");
    c.lines[key] = line;
  }
  validate(c);
  return c;
}

/// Every effective parameter as `# key = value` lines; parse_config on the
/// stripped lines recreates the run.
inline std::vector<std::string> header_lines(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> kv{
      {"scenario", c.scenario},
      {"N", std::to_string(c.N)},
      {"M", std::to_string(c.M)},
      {"Lambda", std::to_string(c.Lambda)},
      {"nu0", format_real(c.nu0)},
      {"nu1", format_real(c.nu1)},
      {"dt", format_real(c.dt)},
      {"T", format_real(c.T)},
      {"stride", std::to_string(c.stride)},
  };
  if (c.t0) kv.emplace_back("t0", format_real(*c.t0));
  if (c.t1) kv.emplace_back("t1", format_real(*c.t1));
  kv.emplace_back("n0", std::to_string(c.n0));
  kv.emplace_back("n1", std::to_string(c.n1));
  if (c.kmax) kv.emplace_back("kmax", std::to_string(*c.kmax));
  kv.emplace_back("seed", std::to_string(c.seed));
  kv.emplace_back("samples", std::to_string(c.samples));
  kv.emplace_back("Q", std::to_string(c.Q));
  kv.emplace_back("u0", format_real(c.u0));
  kv.emplace_back("ic", c.ic);
  kv.emplace_back("output", c.output);
  kv.emplace_back("zero_unpaired_mode", c.zero_unpaired_mode ? "true" : "false");
  kv.emplace_back("threads", std::to_string(c.threads));
  if (c.scenario == "compare") {
    kv.emplace_back("baseline", c.baseline);
    kv.emplace_back("candidate", c.candidate);
  }
  std::vector<std::string> out;
  for (const auto& [k, v] : kv) out.push_back("# " + k + " = " + v);
  return out;
}

/// Parameters recorded in a CSV header (`# key = value`; `#@` meta lines skipped).
inline RunConfig config_from_header(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line, cfg;
  while (std::getline(in, line)) {
    if (line.rfind("#@", 0) == 0) continue;
    if (line.rfind("# ", 0) != 0) break;
    cfg += line.substr(2) + "\n";
  }
  return parse_config(cfg);
}

}  // namespace mzchaos

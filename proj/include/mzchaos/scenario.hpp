#pragma once

// Scenario runners and CSV emission.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mzchaos/chaos.hpp"
#include "mzchaos/config.hpp"
#include "mzchaos/fourier.hpp"
#include "mzchaos/legendre.hpp"
#include "mzchaos/memory_select.hpp"
#include "mzchaos/reduced.hpp"
#include "mzchaos/stats.hpp"
#include "mzchaos/timestep.hpp"
#include "mzchaos/validation.hpp"

namespace mzchaos {

enum ExitCode : int { kOk = 0, kUsageError = 1, kBlowUp = 2, kInfeasible = 3 };

/// E(t), G(t) from the mean (r = 0) coefficients.
struct EnergySeries {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> grad_sq;
  bool blew_up = false;
  std::string diagnostic;

  void push(double t, std::span<const cplx> mean) {
    times.push_back(t);
    energy.push_back(mean_energy(mean));
    grad_sq.push_back(mean_grad_sq(mean));
  }
};

inline ViscosityExpansion viscosity_of(const RunConfig& cfg) {
  ViscosityExpansion nu{cfg.nu0, cfg.nu1};
  nu.validate();
  return nu;
}

inline StepOptions step_options_of(const RunConfig& cfg) { return {cfg.dt, cfg.T, cfg.stride}; }

inline EnergySeries simulate_full(const RunConfig& cfg) {
  const auto nu = viscosity_of(cfg);
  const TripleTensor c = triple_tensor(cfg.M);
  EnergySeries out;
  auto outcome = integrate_observed(
      make_initial(parse_initial_condition(cfg.ic, cfg.N), cfg.M),
      [&](const ChaosState& s) { return full_rhs(s, nu, c); }, step_options_of(cfg),
      [&](double t, const ChaosState& s) { out.push(t, s.slice(0)); },
      [&cfg](ChaosState& s) {
        if (cfg.zero_unpaired_mode) zero_unpaired_mode(s);
      });
  out.blew_up = outcome.blew_up;
  out.diagnostic = outcome.diagnostic;
  return out;
}

inline EnergySeries simulate_markov(const RunConfig& cfg) {
  const auto nu = viscosity_of(cfg);
  const TripleTensor c = triple_tensor(cfg.M);
  EnergySeries out;
  auto outcome = integrate_observed(
      parse_initial_condition(cfg.ic, cfg.N),
      [&](const FourierField& u) { return markovian_only_rhs(u, nu, c); }, step_options_of(cfg),
      [&](double t, const FourierField& u) { out.push(t, u.values()); },
      [&cfg](FourierField& u) {
        if (cfg.zero_unpaired_mode) zero_unpaired_mode(u);
      });
  out.blew_up = outcome.blew_up;
  out.diagnostic = outcome.diagnostic;
  return out;
}

inline ReducedConfig reduced_config_of(const RunConfig& cfg, double t0, double t1) {
  ReducedConfig r;
  r.modes = cfg.N;
  r.polys = cfg.M;
  r.resolved = cfg.Lambda;
  r.lengths = {t0, t1};
  r.subintervals = cfg.n0;
  r.validate();
  return r;
}

inline EnergySeries simulate_memory(const RunConfig& cfg, double t0, double t1) {
  const ReducedConfig rcfg = reduced_config_of(cfg, t0, t1);
  const ReducedModel model(rcfg, viscosity_of(cfg), triple_tensor(cfg.M));
  EnergySeries out;
  auto outcome = integrate_observed(
      make_reduced_initial(parse_initial_condition(cfg.ic, cfg.N), rcfg), model,
      step_options_of(cfg), [&](double t, const ReducedState& s) { out.push(t, s.resolved()); },
      [&cfg](ReducedState& s) {
        if (cfg.zero_unpaired_mode) zero_unpaired_mode(s);
      });
  out.blew_up = outcome.blew_up;
  out.diagnostic = outcome.diagnostic;
  return out;
}

inline EnergySeries energy_series_of(const MomentSeries& m) {
  EnergySeries out;
  out.times = m.times;
  out.energy = m.energy;
  out.grad_sq = m.grad_sq;
  return out;
}

/// Columns of a CSV file written by this tool; `#` lines skipped.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw std::runtime_error("CSV has no column '" + name + "'");
  }
  std::vector<double> values(const std::string& name) const {
    const std::size_t i = column(name);
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r[i]);
    return v;
  }
};

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (t.columns.empty()) {
      t.columns = std::move(cells);
      continue;
    }
    if (cells.size() != t.columns.size()) throw std::runtime_error("CSV row has wrong column count: " + line);
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::stod(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Comparison {
  std::vector<double> times;
  std::vector<double> rel_energy;
  std::vector<double> rel_grad_sq;
  double max_rel_energy = 0.0;
  double max_rel_grad_sq = 0.0;
  double integrated_rel_energy = 0.0;  // trapezoid in t
  double integrated_rel_grad_sq = 0.0;
};

inline double relative_difference(double candidate, double baseline) {
  const double d = std::abs(candidate - baseline);
  return baseline != 0.0 ? d / std::abs(baseline) : d;
}

inline Comparison compare_series(const EnergySeries& baseline, const EnergySeries& candidate) {
  if (baseline.times.size() != candidate.times.size())
    throw std::invalid_argument("compare: series have different lengths");
  Comparison c;
  for (std::size_t i = 0; i < baseline.times.size(); ++i) {
    if (std::abs(baseline.times[i] - candidate.times[i]) > 1e-9 * std::max(1.0, baseline.times[i]))
      throw std::invalid_argument("compare: time grids differ at row " + std::to_string(i));
    c.times.push_back(baseline.times[i]);
    c.rel_energy.push_back(relative_difference(candidate.energy[i], baseline.energy[i]));
    c.rel_grad_sq.push_back(relative_difference(candidate.grad_sq[i], baseline.grad_sq[i]));
    c.max_rel_energy = std::max(c.max_rel_energy, c.rel_energy.back());
    c.max_rel_grad_sq = std::max(c.max_rel_grad_sq, c.rel_grad_sq.back());
    if (i > 0) {
      const double h = c.times[i] - c.times[i - 1];
      c.integrated_rel_energy += 0.5 * h * (c.rel_energy[i] + c.rel_energy[i - 1]);
      c.integrated_rel_grad_sq += 0.5 * h * (c.rel_grad_sq[i] + c.rel_grad_sq[i - 1]);
    }
  }
  return c;
}

inline EnergySeries read_energy_series(const std::string& path) {
  const CsvTable t = parse_csv(read_file(path));
  EnergySeries s;
  s.times = t.values("t");
  s.energy = t.values("E");
  s.grad_sq = t.values("G");
  return s;
}

struct ScenarioResult {
  int exit_code = kOk;
  std::string output_path;
  std::string message;
};

namespace detail {

class CsvDocument {
 public:
  explicit CsvDocument(const RunConfig& cfg) : header_(header_lines(cfg)) {
    meta("version", kVersion);
  }
  void meta(const std::string& key, const std::string& value) {
    meta_.push_back("#@ " + key + " = " + value);
  }
  void columns(std::vector<std::string> names) { columns_ = std::move(names); }
  void row(std::initializer_list<std::string> cells) { rows_.emplace_back(cells); }
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  std::string str() const {
    std::string out;
    for (const auto& h : header_) out += h + "\n";
    for (const auto& m : meta_) out += m + "\n";
    out += join(columns_) + "\n";
    for (const auto& r : rows_) out += join(r) + "\n";
    return out;
  }

  /// "-" writes to standard output.
  void write(const std::string& path) const {
    if (path == "-") {
      std::cout << str() << std::flush;
      return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    const std::string text = str();
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
  }

 private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    return s;
  }
  std::vector<std::string> header_;
  std::vector<std::string> meta_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

inline void emit_energy_rows(CsvDocument& doc, const EnergySeries& s) {
  doc.columns({"t", "E", "G"});
  for (std::size_t i = 0; i < s.times.size(); ++i)
    doc.row({format_real(s.times[i]), format_real(s.energy[i]), format_real(s.grad_sq[i])});
}

inline void emit_report(CsvDocument& doc, const StabilityReport& rep) {
  doc.meta("max_bracket", format_real(rep.max_bracket));
  doc.meta("argmax_k", std::to_string(rep.argmax_k));
  doc.meta("max_abs_z", format_real(rep.max_abs_z));
  doc.meta("non_positive", rep.non_positive ? "true" : "false");
  doc.meta("step_stable", rep.step_stable ? "true" : "false");
  doc.meta("feasible", rep.feasible ? "true" : "false");
  doc.columns({"k", "bracket", "z"});
  for (std::size_t i = 0; i < rep.bracket.size(); ++i)
    doc.row({std::to_string(i + 1), format_real(rep.bracket[i]), format_real(rep.bracket[i] * rep.dt)});
}

inline std::string assumed_defaults(const RunConfig& cfg) {
  std::string s;
  for (const char* key : {"T", "ic"})
    if (!cfg.is_set(key)) s += (s.empty() ? "" : " ") + std::string(key);
  return s;
}

}  // namespace detail

/// Runs `cfg.scenario` and writes the CSV to `cfg.output`. Blow-up writes the
/// rows computed so far and returns kBlowUp.
inline ScenarioResult run_scenario(RunConfig cfg, std::ostream& log) {
  validate(cfg);
  const auto started = std::chrono::steady_clock::now();
  ScenarioResult result;
  result.output_path = cfg.output;
  std::vector<std::pair<std::string, std::string>> extra_meta;

  auto finish_energy = [&](const EnergySeries& s) {
    detail::CsvDocument doc(cfg);
    for (const auto& [k, v] : extra_meta) doc.meta(k, v);
    if (auto a = detail::assumed_defaults(cfg); !a.empty()) doc.meta("assumed_defaults", a);
    if (s.blew_up) {
      doc.meta("status", "blow-up");
      doc.meta("diagnostic", s.diagnostic);
      result.exit_code = kBlowUp;
      result.message = "blow-up: " + s.diagnostic;
    }
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - started;
    doc.meta("wall_seconds", format_real(wall.count()));
    detail::emit_energy_rows(doc, s);
    return doc;
  };

  detail::CsvDocument doc(cfg);
  const std::string& sc = cfg.scenario;
  if (sc == "full") {
    doc = finish_energy(simulate_full(cfg));
  } else if (sc == "reduced-markov") {
    doc = finish_energy(simulate_markov(cfg));
  } else if (sc == "reduced-memory") {
    if (!cfg.t0) {
      try {
        const auto sel = select_memory_lengths(cfg.effective_kmax(), cfg.dt, viscosity_of(cfg),
                                               triple_tensor(cfg.M));
        cfg.t0 = sel.t0;
        cfg.t1 = sel.t1;
        extra_meta.emplace_back("auto_selected", "t0 t1");
        log << "auto-selected memory lengths t0 = " << format_real(sel.t0)
            << ", t1 = " << format_real(sel.t1) << "\n";
      } catch (const MemorySelectionError& e) {
        result.exit_code = kInfeasible;
        result.message = e.what();
        return result;
      }
    }
    doc = finish_energy(simulate_memory(cfg, *cfg.t0, *cfg.t1));
  } else if (sc == "quad-oracle" || sc == "mc") {
    EnergySeries s;
    try {
      const auto ic = parse_initial_condition(cfg.ic, cfg.N);
      const auto threads = static_cast<unsigned>(cfg.threads);
      s = energy_series_of(sc == "mc" ? mc_reference(ic, viscosity_of(cfg),
                                                     static_cast<std::size_t>(cfg.samples), cfg.seed,
                                                     step_options_of(cfg), threads, cfg.zero_unpaired_mode)
                                      : quadrature_reference(ic, viscosity_of(cfg), cfg.Q,
                                                             step_options_of(cfg), threads,
                                                             cfg.zero_unpaired_mode));
    } catch (const BlowUpError& e) {
      s.blew_up = true;
      s.diagnostic = e.what();
    }
    doc = finish_energy(s);
  } else if (sc == "lindecay") {
    const TimeSeries mean = linear_decay_gpc(cfg.u0, cfg.M, cfg.dt, cfg.T, cfg.stride);
    doc.columns({"t", "mean", "exact", "abs_error"});
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double ex = linear_decay_exact_mean(cfg.u0, mean.times[i]);
      doc.row({format_real(mean.times[i]), format_real(mean.values[i]), format_real(ex),
               format_real(std::abs(mean.values[i] - ex))});
    }
  } else if (sc == "select-memory") {
    const auto nu = viscosity_of(cfg);
    const TripleTensor c = triple_tensor(cfg.M);
    const int kmax = cfg.effective_kmax();
    doc.meta("t0_min", format_real(t0_min(kmax, nu, c)));
    if (cfg.t0 && cfg.t1) {
      const auto rep = assess_memory_lengths(kmax, cfg.dt, *cfg.t0, *cfg.t1, nu, c);
      doc.meta("mode", "assess");
      detail::emit_report(doc, rep);
      if (!rep.feasible) {
        result.exit_code = kInfeasible;
        result.message = "the given (t0, t1) is not feasible";
      }
    } else {
      try {
        const auto sel = select_memory_lengths(kmax, cfg.dt, nu, c);
        doc.meta("mode", "select");
        doc.meta("selected_t0", format_real(sel.t0));
        doc.meta("selected_t1", format_real(sel.t1));
        detail::emit_report(doc, sel.report);
      } catch (const MemorySelectionError& e) {
        doc.meta("mode", "select");
        doc.meta("status", "infeasible");
        detail::emit_report(doc, e.report());
        result.exit_code = kInfeasible;
        result.message = e.what();
      }
    }
  } else if (sc == "tensor") {
    const TripleTensor c = triple_tensor(cfg.M);
    doc.meta("nonzero_count", std::to_string(c.nonzero_count()));
    doc.columns({"l", "m", "r", "c"});
    for (int l = 0; l < cfg.M; ++l)
      for (int m = 0; m < cfg.M; ++m)
        for (int r = 0; r < cfg.M; ++r)
          if (c.nonzero(l, m, r))
            doc.row({std::to_string(l), std::to_string(m), std::to_string(r), format_real(c(l, m, r))});
  } else if (sc == "compare") {
    const auto cmp = compare_series(read_energy_series(cfg.baseline), read_energy_series(cfg.candidate));
    doc.meta("max_rel_E", format_real(cmp.max_rel_energy));
    doc.meta("max_rel_G", format_real(cmp.max_rel_grad_sq));
    doc.meta("integrated_rel_E", format_real(cmp.integrated_rel_energy));
    doc.meta("integrated_rel_G", format_real(cmp.integrated_rel_grad_sq));
    doc.columns({"t", "rel_E", "rel_G"});
    for (std::size_t i = 0; i < cmp.times.size(); ++i)
      doc.row({format_real(cmp.times[i]), format_real(cmp.rel_energy[i]), format_real(cmp.rel_grad_sq[i])});
    log << "max_rel_E = " << format_real(cmp.max_rel_energy)
        << "\nmax_rel_G = " << format_real(cmp.max_rel_grad_sq)
        << "\nintegrated_rel_E = " << format_real(cmp.integrated_rel_energy)
        << "\nintegrated_rel_G = " << format_real(cmp.integrated_rel_grad_sq) << "\n";
  }
  doc.write(cfg.output);
  return result;
}

}  // namespace mzchaos

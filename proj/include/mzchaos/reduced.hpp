#pragma once

// Mori-Zwanzig reduced model for the mean chaos coefficients (one resolved
// Legendre order). The projection P sets every unresolved coefficient u_{kr},
// r >= 1, to zero. The memory integral is replaced by a chain of auxiliary
// variables w^{(i)}_{jk} (hierarchy level j, subinterval i) obtained from the
// trapezoidal rule on each subinterval of width dt_j = t_j / n_j.
//
// Every propagated term P e^{tL} F(u0) is closed as F(u_hat(t), 0).

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mzchaos/chaos.hpp"
#include "mzchaos/fourier.hpp"
#include "mzchaos/legendre.hpp"

namespace mzchaos {

struct ReducedConfig {
  int modes = 96;
  int polys = 7;
  int resolved = 1;                         // Legendre orders kept
  std::vector<double> lengths{0.2, 0.01632};  // memory length t_j per level
  int subintervals = 1;                     // n_j, equal on every level

  int levels() const noexcept { return static_cast<int>(lengths.size()); }
  double width(int level) const noexcept {
    return lengths[static_cast<std::size_t>(level)] / subintervals;
  }

  void validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("ReducedConfig: " + msg); };
    if (modes < 2 || modes % 2 != 0) fail("N must be even and >= 2");
    if (resolved != 1) fail("only one resolved Legendre order (Lambda = 1) is supported");
    if (polys <= resolved) fail("M must exceed Lambda");
    if (levels() < 1 || levels() > 2) fail("hierarchy depth must be 1 or 2");
    if (subintervals < 1) fail("subinterval count must be >= 1");
    for (std::size_t j = 0; j < lengths.size(); ++j) {
      if (!(lengths[j] > 0.0)) fail("memory lengths must be > 0");
      if (j > 0 && lengths[j] > lengths[j - 1]) fail("memory lengths must be non-increasing");
    }
  }
};

/// Resolved coefficients u_{k0} followed by w^{(i)}_{jk}, level-major.
class ReducedState {
 public:
  ReducedState() = default;
  ReducedState(int modes, int levels, int subintervals)
      : modes_(modes), levels_(levels), subs_(subintervals),
        data_(static_cast<std::size_t>(modes) *
              (1 + static_cast<std::size_t>(levels) * static_cast<std::size_t>(subintervals))) {
    if (modes < 2 || modes % 2 != 0) throw std::invalid_argument("ReducedState: bad mode count");
  }
  explicit ReducedState(const ReducedConfig& cfg)
      : ReducedState(cfg.modes, cfg.levels(), cfg.subintervals) {}

  int modes() const noexcept { return modes_; }
  int levels() const noexcept { return levels_; }
  int subintervals() const noexcept { return subs_; }

  std::span<cplx> resolved() noexcept { return block(0); }
  std::span<const cplx> resolved() const noexcept { return block(0); }

  /// w^{(sub+1)}_{level,k}; `sub` is zero-based.
  std::span<cplx> memory(int level, int sub) noexcept { return block(1 + level * subs_ + sub); }
  std::span<const cplx> memory(int level, int sub) const noexcept {
    return block(1 + level * subs_ + sub);
  }
  /// All memory variables, level-major then subinterval.
  std::span<cplx> memory_block() noexcept { return std::span<cplx>(data_).subspan(modes_); }
  std::span<const cplx> memory_block() const noexcept {
    return std::span<const cplx>(data_).subspan(modes_);
  }

  FourierField resolved_field() const {
    FourierField f(modes_);
    std::ranges::copy(resolved(), f.values().begin());
    return f;
  }
  /// w_{jk} = sum_i w^{(i)}_{jk}.
  FourierField memory_term(int level) const {
    FourierField f(modes_);
    for (int i = 0; i < subs_; ++i) {
      const auto w = memory(level, i);
      for (int n = 0; n < modes_; ++n) f.values()[n] += w[n];
    }
    return f;
  }

  std::span<cplx> values() noexcept { return data_; }
  std::span<const cplx> values() const noexcept { return data_; }

  friend bool operator==(const ReducedState&, const ReducedState&) = default;

 private:
  std::span<cplx> block(int b) noexcept {
    return std::span<cplx>(data_).subspan(static_cast<std::size_t>(b) * modes_, modes_);
  }
  std::span<const cplx> block(int b) const noexcept {
    return std::span<const cplx>(data_).subspan(static_cast<std::size_t>(b) * modes_, modes_);
  }

  int modes_ = 0;
  int levels_ = 0;
  int subs_ = 0;
  std::vector<cplx> data_;
};

/// Resolved part from a real-valued initial datum; all memory variables zero.
inline ReducedState make_reduced_initial(const FourierField& ic, const ReducedConfig& cfg) {
  if (ic.modes() != cfg.modes) throw std::invalid_argument("initial condition mode count mismatch");
  if (!is_real_valued(ic)) throw std::invalid_argument("initial condition must be real-valued");
  ReducedState s(cfg);
  std::ranges::copy(ic.values(), s.resolved().begin());
  return s;
}

namespace detail {

/// out_k = -(i k) * in_k  (the factor -(ik/2) times the symmetric pair factor 2)
inline void apply_minus_ik(FourierField& f, double scale = 1.0) noexcept {
  for (int k = f.kmin(); k <= f.kmax(); ++k) f[k] *= cplx(0.0, -scale * k);
}

}  // namespace detail

/// PLu_{kl} for every Legendre order l: the full right-hand side evaluated at
/// (u_hat, 0). Entry 0 is the Markovian term.
inline std::vector<FourierField> projected_rhs(const FourierField& u_hat,
                                               const ViscosityExpansion& nu,
                                               const TripleTensor& c) {
  const int M = c.polys();
  const FourierField quad = convolve(u_hat, u_hat);
  std::vector<FourierField> out;
  out.reserve(static_cast<std::size_t>(M));
  for (int l = 0; l < M; ++l) {
    FourierField f(u_hat.modes());
    const double visc = nu.coeff(0) * c(0, 0, l) + (M > 1 ? nu.coeff(1) * c(1, 0, l) : 0.0);
    for (int k = f.kmin(); k <= f.kmax(); ++k) {
      const double kk = k;
      f[k] = cplx(0.0, -0.5 * kk) * (c(0, 0, l) * quad[k]) - kk * kk * visc * u_hat[k];
    }
    out.push_back(std::move(f));
  }
  return out;
}

/// -(ik/2) sum_{p+q=k} u_p u_q c_000 - k^2 nu_0 c_000 u_k.
inline FourierField markovian(const FourierField& u_hat, const ViscosityExpansion& nu,
                              const TripleTensor& c) {
  const FourierField quad = convolve(u_hat, u_hat);
  const double c000 = c(0, 0, 0);
  const double visc = nu.coeff(0) * c000 + (c.polys() > 1 ? nu.coeff(1) * c(1, 0, 0) : 0.0);
  FourierField out(u_hat.modes());
  for (int k = out.kmin(); k <= out.kmax(); ++k) {
    const double kk = k;
    out[k] = cplx(0.0, -0.5 * kk) * (c000 * quad[k]) - kk * kk * visc * u_hat[k];
  }
  return out;
}

inline FourierField markovian_only_rhs(const FourierField& u_hat, const ViscosityExpansion& nu,
                                       const TripleTensor& c) {
  return markovian(u_hat, nu, c);
}

/// PLQLu_{kr} for every r, given pl = projected_rhs(u_hat):
///   -ik sum_{l>=1} sum_{p+q=k} PLu_{pl} u_{q0} c_{l0r}
///   - k^2 sum_{l in {0,1}} sum_{m>=1} nu_l PLu_{km} c_{lmr}.
inline std::vector<FourierField> plql_components(const FourierField& u_hat,
                                                 const std::vector<FourierField>& pl,
                                                 const ViscosityExpansion& nu,
                                                 const TripleTensor& c) {
  const int M = c.polys();
  const int N = u_hat.modes();
  std::vector<FourierField> out(static_cast<std::size_t>(M), FourierField(N));
  for (int l = 1; l < M; ++l) {
    bool used = false;
    for (int r = 0; r < M && !used; ++r) used = c.nonzero(l, 0, r);
    if (!used) continue;
    FourierField prod = convolve(pl[static_cast<std::size_t>(l)], u_hat);
    detail::apply_minus_ik(prod);
    for (int r = 0; r < M; ++r) {
      if (!c.nonzero(l, 0, r)) continue;
      out[static_cast<std::size_t>(r)] += c(l, 0, r) * prod;
    }
  }
  for (int r = 0; r < M; ++r) {
    auto& f = out[static_cast<std::size_t>(r)];
    for (int m = 1; m < M; ++m) {
      double visc = 0.0;
      for (int l = 0; l < 2; ++l)
        if (c.nonzero(l, m, r)) visc += nu.coeff(l) * c(l, m, r);
      if (visc == 0.0) continue;
      const auto& a = pl[static_cast<std::size_t>(m)];
      for (int k = f.kmin(); k <= f.kmax(); ++k) f[k] -= double(k) * k * visc * a[k];
    }
  }
  return out;
}

/// First memory kernel P L Q L u_{0k0} at the resolved state.
inline FourierField kernel_plql(const FourierField& u_hat, const ViscosityExpansion& nu,
                                const TripleTensor& c) {
  return plql_components(u_hat, projected_rhs(u_hat, nu, c), nu, c)[0];
}

namespace detail {

inline FourierField plqlql_from(const FourierField& u_hat, const std::vector<FourierField>& pl,
                                const std::vector<FourierField>& plql,
                                const ViscosityExpansion& nu, const TripleTensor& c) {
  const int M = c.polys();
  FourierField out(u_hat.modes());
  // -ik sum_{l>=1} (PLQLu_l * u_hat) c_{l00}
  for (int l = 1; l < M; ++l) {
    if (!c.nonzero(l, 0, 0)) continue;
    out += c(l, 0, 0) * convolve(plql[static_cast<std::size_t>(l)], u_hat);
  }
  // -ik sum_{l>=1} sum_m (PLu_l * PLu_m) c_{lm0}
  for (int l = 1; l < M; ++l)
    for (int m = 0; m < M; ++m) {
      if (!c.nonzero(l, m, 0)) continue;
      out += c(l, m, 0) * convolve(pl[static_cast<std::size_t>(l)], pl[static_cast<std::size_t>(m)]);
    }
  apply_minus_ik(out);
  // -k^2 sum_{l in {0,1}} sum_{m>=1} nu_l PLQLu_m c_{lm0}
  for (int m = 1; m < M; ++m) {
    double visc = 0.0;
    for (int l = 0; l < 2; ++l)
      if (c.nonzero(l, m, 0)) visc += nu.coeff(l) * c(l, m, 0);
    if (visc == 0.0) continue;
    const auto& b = plql[static_cast<std::size_t>(m)];
    for (int k = out.kmin(); k <= out.kmax(); ++k) out[k] -= double(k) * k * visc * b[k];
  }
  return out;
}

}  // namespace detail

/// Second memory kernel P L Q L Q L u_{0k0} at the resolved state.
inline FourierField kernel_plqlql(const FourierField& u_hat, const ViscosityExpansion& nu,
                                  const TripleTensor& c) {
  const auto pl = projected_rhs(u_hat, nu, c);
  const auto plql = plql_components(u_hat, pl, nu, c);
  return detail::plqlql_from(u_hat, pl, plql, nu, c);
}

/// Time derivative of the memory variables for any element type.
///
///   dw^{(i)}_j/dt = -(2/dt_j) w^{(i)}_j + (-1)^{i+1} 2 K_j
///                   + sum_{l<i} (4/dt_j) (-1)^{i+l+1} w^{(l)}_j + w^{(i)}_{j+1},
///
/// with w_{n} = 0 closing the last level. Layout of `w` and `dw`:
/// ((level * subs + sub) * len + element); `forcing` is (level * len + element).
template <class T>
void memory_chain_derivative(std::span<const T> w, std::span<const T> forcing,
                             std::span<const double> widths, int subs, std::size_t len,
                             std::span<T> dw) {
  const auto levels = widths.size();
  const auto ns = static_cast<std::size_t>(subs);
  if (w.size() != levels * ns * len || dw.size() != w.size() || forcing.size() != levels * len)
    throw std::invalid_argument("memory_chain_derivative: inconsistent sizes");
  auto at = [&](std::size_t j, std::size_t i, std::size_t e) { return (j * ns + i) * len + e; };
  for (std::size_t j = 0; j < levels; ++j) {
    const double decay = 2.0 / widths[j];
    const double couple = 4.0 / widths[j];
    const bool has_next = j + 1 < levels;
    for (std::size_t e = 0; e < len; ++e) {
      const T kern = forcing[j * len + e];
      T alternating{};  // sum_{l<i} (-1)^{i+l+1} w^{(l)}
      for (std::size_t i = 0; i < ns; ++i) {
        const T wi = w[at(j, i, e)];
        T d = i % 2 == 0 ? -decay * wi + 2.0 * kern : -decay * wi - 2.0 * kern;
        if (i > 0) d += couple * alternating;
        if (has_next) d += w[at(j + 1, i, e)];
        dw[at(j, i, e)] = d;
        alternating = wi - alternating;
      }
    }
  }
}

/// Full reduced derivative from an evaluated Markovian term and kernel forcings K_1..K_n.
inline ReducedState memory_hierarchy_rhs(const ReducedState& s, const ReducedConfig& cfg,
                                         const FourierField& markov,
                                         std::span<const FourierField> kernel_values) {
  if (static_cast<int>(kernel_values.size()) != cfg.levels()) {
    std::ostringstream msg;
    msg << "memory_hierarchy_rhs: " << kernel_values.size() << " kernels supplied for "
        << cfg.levels() << " hierarchy levels";
    throw std::invalid_argument(msg.str());
  }
  const auto len = static_cast<std::size_t>(s.modes());
  ReducedState d(s.modes(), s.levels(), s.subintervals());
  auto res = d.resolved();
  std::ranges::copy(markov.values(), res.begin());
  for (int i = 0; i < s.subintervals(); ++i) {
    const auto w = s.memory(0, i);
    for (std::size_t n = 0; n < len; ++n) res[n] += w[n];
  }
  std::vector<cplx> forcing(kernel_values.size() * len);
  for (std::size_t j = 0; j < kernel_values.size(); ++j)
    std::ranges::copy(kernel_values[j].values(), forcing.begin() + static_cast<std::ptrdiff_t>(j * len));
  std::vector<double> widths(static_cast<std::size_t>(cfg.levels()));
  for (int j = 0; j < cfg.levels(); ++j) widths[static_cast<std::size_t>(j)] = cfg.width(j);
  memory_chain_derivative<cplx>(s.memory_block(), forcing, widths, s.subintervals(), len,
                                d.memory_block());
  return d;
}

using KernelEvaluator = std::function<FourierField(const FourierField&)>;

/// Kernel evaluators for the first `levels` memory terms: PLQL, PLQLQL.
inline std::vector<KernelEvaluator> standard_kernels(const ViscosityExpansion& nu,
                                                     const TripleTensor& c, int levels) {
  std::vector<KernelEvaluator> ks;
  if (levels >= 1) ks.emplace_back([nu, c](const FourierField& u) { return kernel_plql(u, nu, c); });
  if (levels >= 2) ks.emplace_back([nu, c](const FourierField& u) { return kernel_plqlql(u, nu, c); });
  if (levels > 2) throw std::invalid_argument("only the first two memory kernels are available");
  return ks;
}

inline ReducedState memory_hierarchy_rhs(const ReducedState& s, const ReducedConfig& cfg,
                                         const ViscosityExpansion& nu, const TripleTensor& c,
                                         std::span<const KernelEvaluator> kernels) {
  if (static_cast<int>(kernels.size()) != cfg.levels()) {
    std::ostringstream msg;
    msg << "memory_hierarchy_rhs: " << kernels.size() << " kernel evaluators for "
        << cfg.levels() << " hierarchy levels";
    throw std::invalid_argument(msg.str());
  }
  const FourierField u_hat = s.resolved_field();
  std::vector<FourierField> values;
  values.reserve(kernels.size());
  for (const auto& k : kernels) values.push_back(k(u_hat));
  return memory_hierarchy_rhs(s, cfg, markovian(u_hat, nu, c), values);
}

/// The two-level, single-subinterval model written out term by term:
///   du/dt = markov + w0,  dw0/dt = 2 K1 - (2/t0) w0 + w1,  dw1/dt = 2 K2 - (2/t1) w1.
inline ReducedState three_equation_rhs(const ReducedState& s, double t0, double t1,
                                       const ViscosityExpansion& nu, const TripleTensor& c) {
  if (s.levels() != 2 || s.subintervals() != 1)
    throw std::invalid_argument("three_equation_rhs: needs 2 levels with 1 subinterval");
  const FourierField u_hat = s.resolved_field();
  const FourierField mk = markovian(u_hat, nu, c);
  const FourierField k1 = kernel_plql(u_hat, nu, c);
  const FourierField k2 = kernel_plqlql(u_hat, nu, c);
  ReducedState d(s.modes(), 2, 1);
  const auto w0 = s.memory(0, 0);
  const auto w1 = s.memory(1, 0);
  auto du = d.resolved();
  auto dw0 = d.memory(0, 0);
  auto dw1 = d.memory(1, 0);
  for (int n = 0; n < s.modes(); ++n) {
    du[n] = mk.values()[n] + w0[n];
    dw0[n] = 2.0 * k1.values()[n] - (2.0 / t0) * w0[n] + w1[n];
    dw1[n] = 2.0 * k2.values()[n] - (2.0 / t1) * w1[n];
  }
  return d;
}

/// Reduced model right-hand side with the standard kernels; shares the
/// projected intermediates between the two kernels.
class ReducedModel {
 public:
  ReducedModel(ReducedConfig cfg, ViscosityExpansion nu, TripleTensor c)
      : cfg_(std::move(cfg)), nu_(nu), c_(std::move(c)) {
    cfg_.validate();
    nu_.validate();
    if (c_.polys() != cfg_.polys) throw std::invalid_argument("ReducedModel: tensor M mismatch");
  }

  const ReducedConfig& config() const noexcept { return cfg_; }

  ReducedState operator()(const ReducedState& s) const {
    const FourierField u_hat = s.resolved_field();
    const auto pl = projected_rhs(u_hat, nu_, c_);
    const auto plql = plql_components(u_hat, pl, nu_, c_);
    std::vector<FourierField> kernels{plql[0]};
    if (cfg_.levels() >= 2) kernels.push_back(detail::plqlql_from(u_hat, pl, plql, nu_, c_));
    return memory_hierarchy_rhs(s, cfg_, pl[0], kernels);
  }

 private:
  ReducedConfig cfg_;
  ViscosityExpansion nu_;
  TripleTensor c_;
};

inline void zero_unpaired_mode(ReducedState& s) noexcept {
  const int blocks = 1 + s.levels() * s.subintervals();
  auto v = s.values();
  for (int b = 0; b < blocks; ++b) v[static_cast<std::size_t>(b) * s.modes()] = 0.0;
}

inline void zero_unpaired_mode(ChaosState& s) noexcept {
  for (int r = 0; r < s.polys(); ++r) s.slice(r)[0] = 0.0;
}

}  // namespace mzchaos

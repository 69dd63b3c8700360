#pragma once

// Independent references for the Galerkin and reduced models:
//  - non-intrusive moments (Gauss-Legendre nodes or Monte Carlo draws in xi),
//  - the Galerkin system of du/dt = -k u with k ~ U[0, 1],
//  - exact finite-memory integrals of a small linear system via matrix
//    exponentials, compared against the memory hierarchy.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "mzchaos/chaos.hpp"
#include "mzchaos/fourier.hpp"
#include "mzchaos/legendre.hpp"
#include "mzchaos/reduced.hpp"
#include "mzchaos/stats.hpp"
#include "mzchaos/timestep.hpp"

namespace mzchaos {

/// Moments of u_k(t; xi) on the snapshot grid.
struct MomentSeries {
  std::vector<double> times;
  std::vector<FourierField> mean;             // E[u_k]
  std::vector<std::vector<double>> variance;  // Var[u_k], indexed by k + N/2
  std::vector<double> energy;                 // mean_energy(E[u])
  std::vector<double> grad_sq;                // mean_grad_sq(E[u])
};

namespace detail {

struct EnsembleAccumulator {
  std::vector<std::vector<cplx>> sum;
  std::vector<std::vector<double>> sum_sq;

  EnsembleAccumulator(std::size_t snaps, std::size_t modes)
      : sum(snaps, std::vector<cplx>(modes)), sum_sq(snaps, std::vector<double>(modes)) {}

  void merge(const EnsembleAccumulator& o) {
    for (std::size_t s = 0; s < sum.size(); ++s)
      for (std::size_t i = 0; i < sum[s].size(); ++i) {
        sum[s][i] += o.sum[s][i];
        sum_sq[s][i] += o.sum_sq[s][i];
      }
  }
};

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Weighted ensemble of deterministic Burgers solves. Samples are grouped in
/// fixed blocks; each block is summed in sample order and blocks are merged in
/// block order, so the result does not depend on the thread count.
inline MomentSeries ensemble_moments(const FourierField& ic, const std::vector<double>& viscosity,
                                     const std::vector<double>& weight, const StepOptions& opt,
                                     unsigned threads, bool zero_unpaired) {
  constexpr std::size_t kBlock = 16;
  const std::size_t steps = step_count(opt.dt, opt.t_end);
  const std::size_t snaps = steps / static_cast<std::size_t>(opt.stride) + 1;
  const auto modes = static_cast<std::size_t>(ic.modes());
  const std::size_t samples = viscosity.size();
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;

  EnsembleAccumulator total(snaps, modes);
  std::vector<double> times;
  std::map<std::size_t, EnsembleAccumulator> pending;
  std::size_t next_merge = 0;
  std::mutex mu;
  std::atomic<std::size_t> next_block{0};
  std::optional<std::string> failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t b = next_block.fetch_add(1);
      if (b >= blocks) return;
      EnsembleAccumulator acc(snaps, modes);
      std::vector<double> local_times;
      const std::size_t end = std::min(samples, (b + 1) * kBlock);
      for (std::size_t q = b * kBlock; q < end; ++q) {
        const double nu = viscosity[q];
        const double w = weight[q];
        std::size_t snap = 0;
        const bool record_times = q == 0;
        auto outcome = integrate_observed(
            ic, [nu](const FourierField& u) { return burgers_rhs(u, nu); }, opt,
            [&](double t, const FourierField& u) {
              if (record_times) local_times.push_back(t);
              auto v = u.values();
              for (std::size_t i = 0; i < modes; ++i) {
                acc.sum[snap][i] += w * v[i];
                acc.sum_sq[snap][i] += w * std::norm(v[i]);
              }
              ++snap;
            },
            [zero_unpaired](FourierField& u) {
              if (zero_unpaired) zero_unpaired_mode(u);
            });
        if (outcome.blew_up) {
          std::lock_guard lock(mu);
          std::ostringstream msg;
          msg << "ensemble member " << q << " (nu=" << nu << ") blew up: " << outcome.diagnostic;
          failure = msg.str();
          return;
        }
      }
      std::lock_guard lock(mu);
      if (!local_times.empty()) times = std::move(local_times);
      pending.emplace(b, std::move(acc));
      while (!pending.empty() && pending.begin()->first == next_merge) {
        total.merge(pending.begin()->second);
        pending.erase(pending.begin());
        ++next_merge;
      }
    }
  };

  const unsigned nthreads = std::min<unsigned>(resolve_threads(threads),
                                               static_cast<unsigned>(std::max<std::size_t>(1, blocks)));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  }
  if (failure) throw BlowUpError(*failure, 0.0);

  MomentSeries out;
  out.times = std::move(times);
  for (std::size_t s = 0; s < snaps; ++s) {
    FourierField mean(ic.modes());
    std::vector<double> var(modes);
    for (std::size_t i = 0; i < modes; ++i) {
      mean.values()[i] = total.sum[s][i];
      var[i] = std::max(0.0, total.sum_sq[s][i] - std::norm(total.sum[s][i]));
    }
    out.energy.push_back(mean_energy(mean));
    out.grad_sq.push_back(mean_grad_sq(mean));
    out.mean.push_back(std::move(mean));
    out.variance.push_back(std::move(var));
  }
  return out;
}

}  // namespace detail

/// Moments from deterministic solves at the Gauss-Legendre nodes of xi,
/// weighted by w_q / 2.
inline MomentSeries quadrature_reference(const FourierField& ic, const ViscosityExpansion& nu,
                                         int nodes, const StepOptions& opt, unsigned threads = 0,
                                         bool zero_unpaired = true) {
  if (nodes < 2) throw std::invalid_argument("quadrature_reference: need at least 2 nodes");
  const QuadratureRule rule = gauss_legendre(nodes);
  std::vector<double> visc, weight;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double v = nu.at(rule.nodes[q]);
    if (!(v > 0.0)) {
      std::ostringstream msg;
      msg << "quadrature_reference: viscosity " << v << " <= 0 at node xi=" << rule.nodes[q];
      throw std::invalid_argument(msg.str());
    }
    visc.push_back(v);
    weight.push_back(0.5 * rule.weights[q]);
  }
  return detail::ensemble_moments(ic, visc, weight, opt, threads, zero_unpaired);
}

/// xi ~ U[-1, 1] from mt19937_64, mapped through the top 53 bits so the draws
/// are identical on every platform.
inline std::vector<double> uniform_draws(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<double> xi(samples);
  for (auto& x : xi) {
    const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    x = 2.0 * unit - 1.0;
  }
  return xi;
}

inline MomentSeries mc_reference(const FourierField& ic, const ViscosityExpansion& nu,
                                 std::size_t samples, std::uint64_t seed, const StepOptions& opt,
                                 unsigned threads = 0, bool zero_unpaired = true) {
  if (samples < 1) throw std::invalid_argument("mc_reference: need at least 1 sample");
  nu.validate();
  const auto xi = uniform_draws(samples, seed);
  std::vector<double> visc(samples), weight(samples, 1.0 / static_cast<double>(samples));
  for (std::size_t q = 0; q < samples; ++q) visc[q] = nu.at(xi[q]);
  return detail::ensemble_moments(ic, visc, weight, opt, threads, zero_unpaired);
}

/// Galerkin mean of du/dt = -k u, k = (1 + xi)/2, xi ~ U[-1, 1]:
///   du_r/dt = -sum_{l in {0,1}} sum_m (1/2) u_m c_{lmr}.
inline TimeSeries linear_decay_gpc(double u0, int polys, double dt, double t_end, int stride = 1) {
  if (polys < 2) throw std::invalid_argument("linear_decay_gpc: M must be >= 2");
  const TripleTensor c = triple_tensor(polys);
  std::vector<double> state(static_cast<std::size_t>(polys), 0.0);
  state[0] = u0;
  auto rhs = [&c, polys](const std::vector<double>& u) {
    std::vector<double> d(u.size(), 0.0);
    for (int r = 0; r < polys; ++r) {
      double acc = 0.0;
      for (int l = 0; l < 2; ++l)
        for (int m = 0; m < polys; ++m)
          if (c.nonzero(l, m, r)) acc += 0.5 * u[static_cast<std::size_t>(m)] * c(l, m, r);
      d[static_cast<std::size_t>(r)] = -acc;
    }
    return d;
  };
  TimeSeries mean;
  integrate_observed(state, rhs, StepOptions{dt, t_end, stride},
                     [&](double t, const std::vector<double>& u) { mean.push(t, u[0]); });
  return mean;
}

/// E[u0 e^{-kt}] = u0 (1 - e^{-t}) / t for k ~ U[0, 1].
inline double linear_decay_exact_mean(double u0, double t) {
  return t == 0.0 ? u0 : u0 * (-std::expm1(-t)) / t;
}

template <class Scalar>
struct LinearSystemSpec {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix A;
  std::vector<int> resolved;  // coordinate indices kept by P
  Vector initial;             // must vanish on unresolved coordinates

  int dim() const { return static_cast<int>(A.rows()); }

  /// Diagonal indicator of the resolved coordinates.
  Matrix projector() const {
    Matrix p = Matrix::Zero(dim(), dim());
    for (int i : resolved) p(i, i) = Scalar(1);
    return p;
  }

  void validate() const {
    if (A.rows() != A.cols() || A.rows() < 1 || A.rows() > 8)
      throw std::invalid_argument("LinearSystemSpec: A must be square with dimension 1..8");
    if (initial.size() != A.rows()) throw std::invalid_argument("LinearSystemSpec: initial size");
    for (int i : resolved)
      if (i < 0 || i >= dim()) throw std::invalid_argument("LinearSystemSpec: resolved index");
    const Matrix q = Matrix::Identity(dim(), dim()) - projector();
    if ((q * initial).norm() != 0.0)
      throw std::invalid_argument("LinearSystemSpec: initial condition outside the range of P");
  }
};

/// Row of P L (QL)^level Q L u_{0k} on the resolved space: e_k A Q (A Q)^level A P.
template <class Scalar>
Eigen::Matrix<Scalar, 1, Eigen::Dynamic> kernel_row(const LinearSystemSpec<Scalar>& spec, int k,
                                                    int level = 0) {
  using Matrix = typename LinearSystemSpec<Scalar>::Matrix;
  const Matrix p = spec.projector();
  const Matrix q = Matrix::Identity(spec.dim(), spec.dim()) - p;
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> row = spec.A.row(k) * q;
  for (int j = 0; j < level; ++j) row = row * spec.A * q;
  return row * spec.A * p;
}

/// w_{0k}(t) = P int_{max(0, t - t0)}^t e^{sL} P L e^{(t-s)QL} Q L u_{0k} ds, by the
/// composite trapezoid rule on `panels` panels. For a linear system the
/// integrand is e_k A Q exp((t-s) A Q) A P exp(s A) u0.
template <class Scalar>
class MemoryIntegralOracle {
 public:
  using Matrix = typename LinearSystemSpec<Scalar>::Matrix;
  using Vector = typename LinearSystemSpec<Scalar>::Vector;
  using Row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  MemoryIntegralOracle(LinearSystemSpec<Scalar> spec, int k, double t0, int panels = 10000)
      : spec_(std::move(spec)), k_(k), t0_(t0), panels_(panels) {
    spec_.validate();
    if (!(t0 > 0.0)) throw std::invalid_argument("MemoryIntegralOracle: t0 must be > 0");
    if (panels < 2 || panels % 2 != 0)
      throw std::invalid_argument("MemoryIntegralOracle: panel count must be even and >= 2");
    const Matrix p = spec_.projector();
    aq_ = spec_.A * (Matrix::Identity(spec_.dim(), spec_.dim()) - p);
    head_ = spec_.A.row(k_) * (Matrix::Identity(spec_.dim(), spec_.dim()) - p);
    tail_ = spec_.A * p;
    // Fixed lag nodes tau_j = j t0 / panels for windows of full length.
    const double h = t0_ / panels_;
    rows_.reserve(static_cast<std::size_t>(panels_) + 1);
    back_.reserve(static_cast<std::size_t>(panels_) + 1);
    for (int j = 0; j <= panels_; ++j) {
      const double tau = j * h;
      const Matrix lag = (Scalar(tau) * aq_).exp();
      rows_.push_back(head_ * lag * tail_);
      back_.push_back((Scalar(-tau) * spec_.A).exp() * spec_.initial);
      check_finite(rows_.back().norm() + back_.back().norm());
    }
  }

  double t0() const noexcept { return t0_; }

  /// Exact resolved trajectory P e^{tA} u0.
  Vector resolved_state(double t) const {
    return spec_.projector() * ((Scalar(t) * spec_.A).exp() * spec_.initial);
  }

  Scalar value(double t) const { return integrate(t, 1); }

  /// |I_h - I_{2h}| / 3, the Richardson estimate of the trapezoid error.
  double quadrature_error(double t) const { return std::abs(integrate(t, 1) - integrate(t, 2)) / 3.0; }

 private:
  static void check_finite(double v) {
    if (!std::isfinite(v)) throw std::runtime_error("MemoryIntegralOracle: non-finite matrix exponential");
  }

  Scalar integrate(double t, int skip) const {
    if (t <= 0.0) return Scalar(0);
    if (t >= t0_) {
      const Matrix fwd = (Scalar(t) * spec_.A).exp();
      const double h = skip * t0_ / panels_;
      Scalar sum(0);
      for (int j = 0; j <= panels_; j += skip) {
        const Scalar f = (rows_[static_cast<std::size_t>(j)] * (fwd * back_[static_cast<std::size_t>(j)]))(0);
        sum += (j == 0 || j == panels_) ? Scalar(0.5) * f : f;
      }
      return Scalar(h) * sum;
    }
    // Clamped window [0, t]: lag nodes tau in [0, t].
    const int n = panels_ / skip;
    const double h = t / n;
    Scalar sum(0);
    for (int j = 0; j <= n; ++j) {
      const double tau = j * h;
      const Scalar f = (head_ * (Scalar(tau) * aq_).exp() * tail_ *
                        ((Scalar(t - tau) * spec_.A).exp() * spec_.initial))(0);
      sum += (j == 0 || j == n) ? Scalar(0.5) * f : f;
    }
    return Scalar(h) * sum;
  }

  LinearSystemSpec<Scalar> spec_;
  int k_;
  double t0_;
  int panels_;
  Matrix aq_;
  Row head_;
  Matrix tail_;
  std::vector<Row> rows_;
  std::vector<Vector> back_;
};

template <class Scalar>
struct HierarchyComparison {
  std::vector<double> times;
  std::vector<Scalar> hierarchy;  // sum_i w^{(i)}_{0k}
  std::vector<Scalar> exact;
  double max_rel_deviation = 0.0;  // max |hierarchy - exact| / max |exact| over the window
  double max_quadrature_error = 0.0;
};

struct HierarchyOracleOptions {
  double t_end = 6.0;
  double t_begin = -1.0;  // start of the comparison window; negative means t0
  double dt = 1e-4;        // Heun step for the hierarchy
  int sample_stride = 500;  // compare every `sample_stride` steps
  int panels = 10000;
};

/// Single-level hierarchy for resolved coordinate k, forced by the exact
/// P e^{tL} PLQL u_{0k}, against the exact finite-memory integral.
template <class Scalar>
HierarchyComparison<Scalar> hierarchy_oracle(const LinearSystemSpec<Scalar>& spec, int k, double t0,
                                             int subintervals, const HierarchyOracleOptions& opt = {}) {
  if (subintervals < 1) throw std::invalid_argument("hierarchy_oracle: subintervals must be >= 1");
  const MemoryIntegralOracle<Scalar> oracle(spec, k, t0, opt.panels);
  const auto row = kernel_row(spec, k, 0);
  const double width = t0 / subintervals;
  const std::vector<double> widths{width};
  const double t_begin = opt.t_begin < 0.0 ? t0 : opt.t_begin;

  auto rhs = [&](double t, const std::vector<Scalar>& w) {
    const std::vector<Scalar> forcing{(row * oracle.resolved_state(t))(0)};
    std::vector<Scalar> dw(w.size());
    memory_chain_derivative<Scalar>(w, forcing, widths, subintervals, 1, dw);
    return dw;
  };

  HierarchyComparison<Scalar> out;
  double max_diff = 0.0;
  double max_exact = 0.0;
  auto outcome = integrate_observed(
      std::vector<Scalar>(static_cast<std::size_t>(subintervals), Scalar(0)), rhs,
      StepOptions{opt.dt, opt.t_end, opt.sample_stride}, [&](double t, const std::vector<Scalar>& w) {
        if (t < t_begin - 1e-12) return;
        Scalar total(0);
        for (const auto& v : w) total += v;
        const Scalar ex = oracle.value(t);
        out.times.push_back(t);
        out.hierarchy.push_back(total);
        out.exact.push_back(ex);
        max_diff = std::max(max_diff, static_cast<double>(std::abs(total - ex)));
        max_exact = std::max(max_exact, static_cast<double>(std::abs(ex)));
        out.max_quadrature_error = std::max(out.max_quadrature_error, oracle.quadrature_error(t));
      });
  if (outcome.blew_up) throw BlowUpError("hierarchy_oracle: " + outcome.diagnostic, 0.0);
  out.max_rel_deviation = max_exact > 0.0 ? max_diff / max_exact : max_diff;
  return out;
}

}  // namespace mzchaos

#pragma once

// Fourier-Legendre Galerkin system for Burgers with viscosity nu0 + nu1 * xi.

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mzchaos/fourier.hpp"
#include "mzchaos/legendre.hpp"

namespace mzchaos {

struct ViscosityExpansion {
  double nu0 = 0.1;   // mean
  double nu1 = 0.07;  // coefficient of L_1(xi) = xi

  void validate() const {
    if (!(nu0 > 0.0)) throw std::invalid_argument("viscosity: nu0 must be > 0");
    if (!(nu1 >= 0.0)) throw std::invalid_argument("viscosity: nu1 must be >= 0");
    if (!(nu0 - nu1 > 0.0))
      throw std::invalid_argument("viscosity: nu0 - nu1 must be > 0 so nu(xi) > 0 on [-1, 1]");
  }
  /// Legendre coefficient nu_l; zero for l >= 2.
  double coeff(int l) const noexcept { return l == 0 ? nu0 : (l == 1 ? nu1 : 0.0); }
  double at(double xi) const noexcept { return nu0 + nu1 * xi; }
};

/// u_{kr} for k in F and r in [0, M); slice r is contiguous.
class ChaosState {
 public:
  ChaosState() = default;
  ChaosState(int modes, int polys)
      : modes_(modes), polys_(polys), data_(checked_modes(modes) * checked_polys(polys)) {}

  int modes() const noexcept { return modes_; }
  int polys() const noexcept { return polys_; }

  std::span<cplx> slice(int r) noexcept {
    return std::span<cplx>(data_).subspan(static_cast<std::size_t>(r) * modes_, modes_);
  }
  std::span<const cplx> slice(int r) const noexcept {
    return std::span<const cplx>(data_).subspan(static_cast<std::size_t>(r) * modes_, modes_);
  }

  FourierField field(int r) const {
    FourierField f(modes_);
    std::ranges::copy(slice(r), f.values().begin());
    return f;
  }
  void set_field(int r, const FourierField& f) {
    if (f.modes() != modes_) throw std::invalid_argument("ChaosState: mode count mismatch");
    std::ranges::copy(f.values(), slice(r).begin());
  }

  cplx& operator()(int k, int r) noexcept { return slice(r)[static_cast<std::size_t>(k + modes_ / 2)]; }
  const cplx& operator()(int k, int r) const noexcept {
    return slice(r)[static_cast<std::size_t>(k + modes_ / 2)];
  }

  std::span<cplx> values() noexcept { return data_; }
  std::span<const cplx> values() const noexcept { return data_; }

  friend bool operator==(const ChaosState&, const ChaosState&) = default;

 private:
  static std::size_t checked_modes(int modes) {
    if (modes < 2 || modes % 2 != 0)
      throw std::invalid_argument("ChaosState: mode count must be even and >= 2");
    return static_cast<std::size_t>(modes);
  }
  static std::size_t checked_polys(int polys) {
    if (polys < 1) throw std::invalid_argument("ChaosState: M must be >= 1");
    return static_cast<std::size_t>(polys);
  }

  int modes_ = 0;
  int polys_ = 0;
  std::vector<cplx> data_;
};

enum class TensorSparsity { exploit, ignore };

/// d_{kr} = -(ik/2) sum_{l,m} sum_{p+q=k} u_{pl} u_{qm} c_{lmr}
///          - k^2 sum_{l in {0,1}} sum_m nu_l u_{km} c_{lmr}.
///
/// Each product u_l * u_m is convolved once for l <= m and reused for every r;
/// c is symmetric in (l, m), so off-diagonal pairs carry a factor 2.
inline ChaosState full_rhs(const ChaosState& s, const ViscosityExpansion& nu,
                           const TripleTensor& c,
                           TensorSparsity sparsity = TensorSparsity::exploit) {
  const int M = s.polys();
  const int N = s.modes();
  if (c.polys() != M) {
    throw std::invalid_argument("full_rhs: tensor built for M=" + std::to_string(c.polys()) +
                                ", state has M=" + std::to_string(M));
  }
  const bool exploit = sparsity == TensorSparsity::exploit;
  ChaosState d(N, M);
  std::vector<cplx> pair(static_cast<std::size_t>(N));
  for (int l = 0; l < M; ++l) {
    for (int m = l; m < M; ++m) {
      bool used = !exploit;
      for (int r = 0; r < M && !used; ++r) used = c.nonzero(l, m, r);
      if (!used) continue;
      std::ranges::fill(pair, cplx{});
      convolve_accumulate(s.slice(l), s.slice(m), pair);
      const double mult = l == m ? 1.0 : 2.0;
      for (int r = 0; r < M; ++r) {
        if (exploit && !c.nonzero(l, m, r)) continue;
        const double w = mult * c(l, m, r);
        auto out = d.slice(r);
        for (int i = 0; i < N; ++i) out[i] += w * pair[i];
      }
    }
  }
  for (int r = 0; r < M; ++r) {
    auto out = d.slice(r);
    for (int i = 0; i < N; ++i) {
      const double k = i - N / 2;
      cplx visc = 0.0;
      for (int l = 0; l < 2 && l < M; ++l) {
        for (int m = 0; m < M; ++m) {
          if (exploit && !c.nonzero(l, m, r)) continue;
          visc += nu.coeff(l) * c(l, m, r) * s.slice(m)[i];
        }
      }
      out[i] = cplx(0.0, -0.5 * k) * out[i] - k * k * visc;
    }
  }
  return d;
}

/// Deterministic initial datum in slice 0, higher chaos slices zero.
inline ChaosState make_initial(const FourierField& ic, int polys) {
  if (!is_real_valued(ic)) {
    throw std::invalid_argument(
        "make_initial: initial condition must be real-valued (Hermitian with u_{-N/2} = 0)");
  }
  ChaosState s(ic.modes(), polys);
  s.set_field(0, ic);
  return s;
}

}  // namespace mzchaos

#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "mzchaos/mzchaos.hpp"

namespace oracle {

using mzchaos::ChaosState;
using mzchaos::cplx;
using mzchaos::FourierField;

/// out_k = sum over every (p, q) in F x F with p + q = k.
inline FourierField convolve(const FourierField& u, const FourierField& v) {
  FourierField out(u.modes());
  for (int p = u.kmin(); p <= u.kmax(); ++p)
    for (int q = v.kmin(); q <= v.kmax(); ++q)
      if (out.contains(p + q)) out[p + q] += u[p] * v[q];
  return out;
}

/// (2n-1)!! / n!
inline double adams_a(int n) {
  double a = 1.0;
  for (int i = 1; i <= n; ++i) a *= (2.0 * i - 1.0) / i;
  return a;
}

/// Closed form E[L_l L_m L_r] (r + 1/2 normalisation) via Adams' product formula.
inline double triple_coefficient(int l, int m, int r) {
  const int sum = l + m + r;
  if (sum % 2 != 0) return 0.0;
  const int s = sum / 2;
  if (s < l || s < m || s < r) return 0.0;
  const double integral = 2.0 / (2.0 * s + 1.0) * adams_a(s - l) * adams_a(s - m) * adams_a(s - r) / adams_a(s);
  return 0.5 * integral * (2.0 * r + 1.0);
}

/// Dense reference tensor, independent of the library's quadrature.
struct DenseTensor {
  int M;
  std::vector<double> v;
  explicit DenseTensor(int polys) : M(polys), v(static_cast<std::size_t>(polys * polys * polys)) {
    for (int l = 0; l < M; ++l)
      for (int m = 0; m < M; ++m)
        for (int r = 0; r < M; ++r) v[static_cast<std::size_t>((l * M + m) * M + r)] = triple_coefficient(l, m, r);
  }
  double operator()(int l, int m, int r) const { return v[static_cast<std::size_t>((l * M + m) * M + r)]; }
};

/// Loops over every (l, m, p, q); no symmetry or sparsity shortcuts.
inline ChaosState full_rhs(const ChaosState& s, const mzchaos::ViscosityExpansion& nu, const DenseTensor& c) {
  const int N = s.modes(), M = s.polys();
  ChaosState d(N, M);
  const int half = N / 2;
  for (int r = 0; r < M; ++r)
    for (int k = -half; k < half; ++k) {
      cplx conv = 0.0;
      for (int l = 0; l < M; ++l)
        for (int m = 0; m < M; ++m)
          for (int p = -half; p < half; ++p) {
            const int q = k - p;
            if (q < -half || q >= half) continue;
            conv += s(p, l) * s(q, m) * c(l, m, r);
          }
      cplx visc = 0.0;
      for (int l = 0; l < 2; ++l)
        for (int m = 0; m < M; ++m) visc += nu.coeff(l) * s(k, m) * c(l, m, r);
      d(k, r) = cplx(0.0, -0.5 * k) * conv - double(k) * k * visc;
    }
  return d;
}

inline ChaosState add(const ChaosState& a, const ChaosState& b, double sb = 1.0) {
  ChaosState out = a;
  for (std::size_t i = 0; i < out.values().size(); ++i) out.values()[i] += sb * b.values()[i];
  return out;
}

inline ChaosState unresolved_part(const ChaosState& a) {
  ChaosState out = a;
  for (auto& z : out.slice(0)) z = 0.0;
  return out;
}

/// The full right-hand side R is quadratic, so its derivatives are exact
/// finite differences:
///   DR(u)[v] = (R(u + v) - R(u - v)) / 2,   D2R[v, w] = R(v + w) - R(v) - R(w).
struct KernelOracle {
  mzchaos::ViscosityExpansion nu;
  DenseTensor c;

  ChaosState R(const ChaosState& s) const { return full_rhs(s, nu, c); }
  ChaosState DR(const ChaosState& u, const ChaosState& v) const {
    ChaosState out = add(R(add(u, v)), R(add(u, v, -1.0)), -1.0);
    for (auto& z : out.values()) z *= 0.5;
    return out;
  }
  ChaosState D2R(const ChaosState& v, const ChaosState& w) const {
    return add(add(R(add(v, w)), R(v), -1.0), R(w), -1.0);
  }

  ChaosState padded(const FourierField& u_hat) const {
    ChaosState s(u_hat.modes(), c.M);
    s.set_field(0, u_hat);
    return s;
  }

  /// PLQL u_0 = [DR(u*)[R(u*)_G]]_0 with u* = (u_hat, 0).
  FourierField k1(const FourierField& u_hat) const {
    const ChaosState u = padded(u_hat);
    return DR(u, unresolved_part(R(u))).field(0);
  }

  /// PLQLQL u_0 = [DR(u*)[(DR(u*)[a_G])_G] + D2R[a, a_G]]_0 with a = R(u*).
  FourierField k2(const FourierField& u_hat) const {
    const ChaosState u = padded(u_hat);
    const ChaosState a = R(u);
    const ChaosState aG = unresolved_part(a);
    const ChaosState b = DR(u, aG);
    return add(DR(u, unresolved_part(b)), D2R(a, aG)).field(0);
  }
};

inline FourierField random_field(int modes, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> g;
  FourierField f(modes);
  for (auto& z : f.values()) z = scale * cplx(g(gen), g(gen));
  return f;
}

/// Real-valued random field: u_-k = conj(u_k), Im u_0 = 0, u_-N/2 = 0, decaying in k.
inline FourierField random_real_field(int modes, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> g;
  FourierField f(modes);
  f[0] = scale * g(gen);
  for (int k = 1; k <= f.kmax(); ++k) {
    const cplx z = scale / (1.0 + k * k) * cplx(g(gen), g(gen));
    f[k] = z;
    f[-k] = std::conj(z);
  }
  return f;
}

inline double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const cplx> a) {
  double m = 0.0;
  for (const auto& z : a) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace oracle

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mzchaos {

using cplx = std::complex<double>;

/// Complex amplitudes u_k for k in F = [-N/2, N/2 - 1], stored with offset N/2.
class FourierField {
 public:
  FourierField() = default;

  explicit FourierField(int modes) : modes_(modes), amp_(checked_size(modes)) {}

  FourierField(int modes, std::initializer_list<std::pair<int, cplx>> entries)
      : FourierField(modes) {
    for (const auto& [k, v] : entries) at(k) = v;
  }

  int modes() const noexcept { return modes_; }
  int kmin() const noexcept { return -modes_ / 2; }
  int kmax() const noexcept { return modes_ / 2 - 1; }
  bool contains(int k) const noexcept { return k >= kmin() && k <= kmax(); }

  cplx& operator[](int k) noexcept { return amp_[offset(k)]; }
  const cplx& operator[](int k) const noexcept { return amp_[offset(k)]; }

  cplx& at(int k) {
    if (!contains(k)) throw std::out_of_range("FourierField: wavenumber " + std::to_string(k));
    return (*this)[k];
  }
  const cplx& at(int k) const {
    if (!contains(k)) throw std::out_of_range("FourierField: wavenumber " + std::to_string(k));
    return (*this)[k];
  }

  std::span<cplx> values() noexcept { return amp_; }
  std::span<const cplx> values() const noexcept { return amp_; }

  FourierField& operator*=(cplx s) noexcept {
    for (auto& a : amp_) a *= s;
    return *this;
  }
  FourierField& operator+=(const FourierField& o) {
    require_same(o);
    for (std::size_t i = 0; i < amp_.size(); ++i) amp_[i] += o.amp_[i];
    return *this;
  }

  void require_same(const FourierField& o) const {
    if (o.modes_ != modes_) {
      throw std::invalid_argument("FourierField: mode count mismatch (" + std::to_string(modes_) +
                                  " vs " + std::to_string(o.modes_) + ")");
    }
  }

  friend bool operator==(const FourierField&, const FourierField&) = default;

 private:
  static std::size_t checked_size(int modes) {
    if (modes < 2 || modes % 2 != 0) {
      throw std::invalid_argument("FourierField: mode count must be even and >= 2, got " +
                                  std::to_string(modes));
    }
    return static_cast<std::size_t>(modes);
  }
  std::size_t offset(int k) const noexcept { return static_cast<std::size_t>(k + modes_ / 2); }

  int modes_ = 0;
  std::vector<cplx> amp_;
};

inline FourierField operator*(cplx s, FourierField f) { return f *= s; }
inline FourierField operator+(FourierField a, const FourierField& b) { return a += b; }

/// Coefficients of sin(x): u_1 = -i/2, u_{-1} = i/2.
inline FourierField sine_field(int modes) {
  FourierField f(modes);
  f.at(1) = cplx(0.0, -0.5);
  f.at(-1) = cplx(0.0, 0.5);
  return f;
}

/// out_k += scale * sum_{p+q=k, p,q in F} u_p v_q over raw storage of length N
/// (index i holds wavenumber i - N/2). No wrap-around, no dealiasing.
inline void convolve_accumulate(std::span<const cplx> u, std::span<const cplx> v,
                                std::span<cplx> out, cplx scale = 1.0) noexcept {
  const int n = static_cast<int>(u.size());
  const int half = n / 2;
  // p index i, q index j: (i - half) + (j - half) = o - half  =>  j = o + half - i
  for (int o = 0; o < n; ++o) {
    const int i_lo = std::max(0, o + half - (n - 1));
    const int i_hi = std::min(n - 1, o + half);
    // Terms (i, j) and (j, i) are added as a pair, so convolve(u, v) and
    // convolve(v, u) round identically.
    cplx acc = 0.0;
    int a = i_lo, b = i_hi;
    for (; a < b; ++a, --b) acc += u[a] * v[b] + u[b] * v[a];
    if (a == b) acc += u[a] * v[a];
    out[o] += scale * acc;
  }
}

inline FourierField convolve(const FourierField& u, const FourierField& v) {
  u.require_same(v);
  FourierField out(u.modes());
  convolve_accumulate(u.values(), v.values(), out.values());
  return out;
}

/// -(ik/2) (u * u)_k - nu k^2 u_k.
inline FourierField burgers_rhs(const FourierField& u, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("burgers_rhs: viscosity must be > 0");
  FourierField out = convolve(u, u);
  for (int k = u.kmin(); k <= u.kmax(); ++k) {
    const double kk = k;
    out[k] = cplx(0.0, -0.5 * kk) * out[k] - nu * kk * kk * u[k];
  }
  return out;
}

/// sum_k u_k e^{ikx}.
inline cplx eval_physical(const FourierField& u, double x) {
  cplx sum = 0.0;
  for (int k = u.kmin(); k <= u.kmax(); ++k) sum += u[k] * std::polar(1.0, k * x);
  return sum;
}

/// Largest of |u_{-k} - conj(u_k)| over k in [1, N/2-1] and |Im u_0|.
inline double hermitian_defect(std::span<const cplx> amp) noexcept {
  const int n = static_cast<int>(amp.size());
  const int half = n / 2;
  double defect = std::abs(amp[half].imag());
  for (int k = 1; k < half; ++k)
    defect = std::max(defect, std::abs(amp[half - k] - std::conj(amp[half + k])));
  return defect;
}
inline double hermitian_defect(const FourierField& u) noexcept { return hermitian_defect(u.values()); }

/// The amplitudes represent a real signal: Hermitian on paired modes and u_{-N/2} = 0.
inline bool is_real_valued(const FourierField& u, double tol = 1e-10) noexcept {
  return hermitian_defect(u) <= tol && std::abs(u[u.kmin()]) <= tol;
}

/// Zero k = -N/2, which has no partner in F.
inline void zero_unpaired_mode(std::span<cplx> amp) noexcept {
  if (!amp.empty()) amp[0] = 0.0;
}
inline void zero_unpaired_mode(FourierField& u) noexcept { zero_unpaired_mode(u.values()); }

}  // namespace mzchaos

#pragma once

// A-priori memory lengths (t0, t1) from the linear part of the reduced model.
//
// Replacing the two memory integrals by their short-memory values
// (t0/2) 2 K1 and (t0 t1 / 4) 2 K2 groups every term linear in u_k into
//
//   b(k) = -k^2 nu0 c000 + t0 k^4 nu1^2 c101 c110 - (t0 t1 / 2) k^6 nu0 nu1^2 c011 c101 c110.
//
// b(k) <= 0 for all k gives linear stability; b(k) dt in [-2, 0] keeps the
// second-order explicit step (amplification 1 + z + z^2/2) stable.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mzchaos/chaos.hpp"
#include "mzchaos/legendre.hpp"

namespace mzchaos {

/// Real stability interval of Heun / explicit midpoint on the negative axis.
inline constexpr double kSecondOrderStabilityLimit = 2.0;

inline double stability_bracket(int k, double t0, double t1, const ViscosityExpansion& nu,
                                const TripleTensor& c) {
  const double k2 = static_cast<double>(k) * k;
  const double k4 = k2 * k2;
  const double k6 = k4 * k2;
  const double nu1sq = nu.nu1 * nu.nu1;
  return -k2 * nu.nu0 * c(0, 0, 0) + t0 * k4 * nu1sq * c(1, 0, 1) * c(1, 1, 0) -
         0.5 * t0 * t1 * k6 * nu.nu0 * nu1sq * c(0, 1, 1) * c(1, 0, 1) * c(1, 1, 0);
}

/// Memory length at which the k^4 term cancels viscous decay at k_max.
inline double t0_min(int kmax, const ViscosityExpansion& nu, const TripleTensor& c) {
  if (!(nu.nu1 > 0.0))
    throw std::domain_error("t0_min: undefined for nu1 = 0 (no destabilizing memory term)");
  if (kmax < 1) throw std::invalid_argument("t0_min: k_max must be >= 1");
  const double k2 = static_cast<double>(kmax) * kmax;
  return (nu.nu0 * c(0, 0, 0)) / (k2 * nu.nu1 * nu.nu1 * c(1, 0, 1) * c(1, 1, 0));
}

struct StabilityReport {
  double t0 = 0.0;
  double t1 = 0.0;
  double dt = 0.0;
  std::vector<double> bracket;  // bracket[k - 1] for k = 1..k_max
  double max_bracket = 0.0;
  int argmax_k = 0;
  double max_abs_z = 0.0;       // max_k |b(k)| dt
  bool non_positive = false;    // b(k) <= 0 for every k
  bool step_stable = false;     // max_abs_z <= 2
  bool feasible = false;
};

inline StabilityReport assess_memory_lengths(int kmax, double dt, double t0, double t1,
                                             const ViscosityExpansion& nu, const TripleTensor& c) {
  StabilityReport rep;
  rep.t0 = t0;
  rep.t1 = t1;
  rep.dt = dt;
  rep.bracket.reserve(static_cast<std::size_t>(kmax));
  rep.max_bracket = -INFINITY;
  for (int k = 1; k <= kmax; ++k) {
    const double b = stability_bracket(k, t0, t1, nu, c);
    rep.bracket.push_back(b);
    if (b > rep.max_bracket) {
      rep.max_bracket = b;
      rep.argmax_k = k;
    }
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(b) * dt);
  }
  rep.non_positive = rep.max_bracket <= 0.0;
  rep.step_stable = rep.max_abs_z <= kSecondOrderStabilityLimit;
  rep.feasible = rep.non_positive && rep.step_stable;
  return rep;
}

struct SelectionGrid {
  double t0_low = 1.05;   // multiples of t0_min
  double t0_high = 16.0;
  int t0_points = 64;     // geometric
};

/// Smallest t1 with b(k) <= 0 for k = 1..k_max at fixed t0 (b is linear and decreasing in t1).
inline double minimal_t1(int kmax, double t0, const ViscosityExpansion& nu, const TripleTensor& c) {
  double t1 = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    const double at_zero = stability_bracket(k, t0, 0.0, nu, c);
    const double slope = stability_bracket(k, t0, 1.0, nu, c) - at_zero;
    if (at_zero > 0.0) t1 = slope < 0.0 ? std::max(t1, -at_zero / slope) : INFINITY;
  }
  return t1;
}

struct MemorySelection {
  double t0 = 0.0;
  double t1 = 0.0;
  double t0_min = 0.0;
  StabilityReport report;
};

class MemorySelectionError : public std::runtime_error {
 public:
  MemorySelectionError(const std::string& what, StabilityReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const StabilityReport& report() const noexcept { return report_; }

 private:
  StabilityReport report_;
};

/// Grid search: for each t0 on a geometric grid above t0_min, the smallest t1
/// on the linear grid that makes b(k) <= 0 for every k; among those, pairs
/// whose stiffness passes max |b| dt <= 2. Returns the largest feasible t0
/// (ties: smaller t1, which the scan order gives for free).
inline MemorySelection select_memory_lengths(int kmax, double dt, const ViscosityExpansion& nu,
                                             const TripleTensor& c, const SelectionGrid& grid = {}) {
  if (!(dt > 0.0)) throw std::invalid_argument("select_memory_lengths: dt must be > 0");
  const double base = t0_min(kmax, nu, c);
  const double ratio =
      grid.t0_points > 1 ? std::pow(grid.t0_high / grid.t0_low, 1.0 / (grid.t0_points - 1)) : 1.0;

  bool found = false;
  MemorySelection best;
  StabilityReport least_stiff;
  least_stiff.max_abs_z = INFINITY;
  for (int i = 0; i < grid.t0_points; ++i) {
    const double t0 = base * grid.t0_low * std::pow(ratio, i);
    double t1 = minimal_t1(kmax, t0, nu, c);
    if (!(t1 > 0.0) || t1 > t0) continue;
    StabilityReport rep = assess_memory_lengths(kmax, dt, t0, t1, nu, c);
    for (int nudge = 0; !rep.non_positive && nudge < 8; ++nudge) {
      t1 = std::nextafter(t1, INFINITY);
      rep = assess_memory_lengths(kmax, dt, t0, t1, nu, c);
    }
    if (!rep.non_positive) continue;
    if (rep.feasible) {
      if (!found || t0 > best.t0) {
        best = MemorySelection{t0, t1, base, rep};
        found = true;
      }
    } else if (rep.max_abs_z < least_stiff.max_abs_z) {
      least_stiff = std::move(rep);
    }
  }
  if (!found) {
    if (std::isinf(least_stiff.max_abs_z))
      least_stiff = assess_memory_lengths(kmax, dt, base * grid.t0_low, base * grid.t0_low, nu, c);
    throw MemorySelectionError(
        "select_memory_lengths: no (t0, t1) on the grid is linearly stable with max |b| dt <= 2",
        std::move(least_stiff));
  }
  return best;
}

struct HigherOrderCoefficients {
  double k8_term = 0.0;   // contribution of the viscous term to PL(QL)^3 u, times u_k
  double k10_term = 0.0;  // contribution to PL(QL)^4 u (negative)
};

/// Linear viscous contributions of the third and fourth memory terms at wavenumber k
/// (k^8 and k^10 powers included).
inline HigherOrderCoefficients higher_order_linear_coeffs(int k, const ViscosityExpansion& nu,
                                                          const TripleTensor& c) {
  if (c.polys() < 3)
    throw std::invalid_argument("higher_order_linear_coeffs: tensor needs M >= 3");
  const double k2 = static_cast<double>(k) * k;
  const double k8 = k2 * k2 * k2 * k2;
  const double k10 = k8 * k2;
  const double n0 = nu.nu0;
  const double n1 = nu.nu1;
  const double c110 = c(1, 1, 0), c011 = c(0, 1, 1), c101 = c(1, 0, 1);
  const double c121 = c(1, 2, 1), c112 = c(1, 1, 2), c022 = c(0, 2, 2);
  HigherOrderCoefficients out;
  out.k8_term = k8 * (n0 * n0 * n1 * n1 * c110 * c011 * c011 * c101 +
                      n1 * n1 * n1 * n1 * c110 * c121 * c101 * c112);
  out.k10_term = -k10 * (n0 * n0 * n0 * n1 * n1 * c110 * c011 * c011 * c011 * c101 +
                         n0 * n1 * n1 * n1 * n1 * c110 * c011 * c121 * c101 * c112 +
                         n0 * n1 * n1 * n1 * n1 * c110 * c121 * c022 * c101 * c112 +
                         n0 * n1 * n1 * n1 * n1 * c110 * c121 * c112 * c011 * c101);
  return out;
}

}  // namespace mzchaos

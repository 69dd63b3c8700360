#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "mzchaos/chaos.hpp"
#include "mzchaos/fourier.hpp"

namespace mzchaos {

struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;

  std::size_t size() const noexcept { return times.size(); }
  void push(double t, double v) {
    times.push_back(t);
    values.push_back(v);
  }
};

/// E = (1/2) sum_k 2 pi |u_k|^2 of the mean (r = 0) coefficients.
inline double mean_energy(std::span<const cplx> mean) noexcept {
  double sum = 0.0;
  for (const auto& u : mean) sum += std::norm(u);
  return std::numbers::pi * sum;
}
inline double mean_energy(const FourierField& mean) noexcept { return mean_energy(mean.values()); }

/// G = sum_k 2 pi k^2 |u_k|^2.
inline double mean_grad_sq(std::span<const cplx> mean) noexcept {
  const int half = static_cast<int>(mean.size()) / 2;
  double sum = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double k = static_cast<double>(static_cast<int>(i) - half);
    sum += k * k * std::norm(mean[i]);
  }
  return 2.0 * std::numbers::pi * sum;
}
inline double mean_grad_sq(const FourierField& mean) noexcept { return mean_grad_sq(mean.values()); }

/// Var_k = sum_{r >= 1} |u_{kr}|^2 / (2r + 1), indexed by k + N/2.
inline std::vector<double> variance_per_mode(const ChaosState& s) {
  std::vector<double> var(static_cast<std::size_t>(s.modes()), 0.0);
  for (int r = 1; r < s.polys(); ++r) {
    const auto slice = s.slice(r);
    for (std::size_t i = 0; i < var.size(); ++i) var[i] += std::norm(slice[i]) / (2.0 * r + 1.0);
  }
  return var;
}

}  // namespace mzchaos

#pragma once

// Legendre polynomials, Gauss-Legendre rules and the normalized triple-product
// tensor c_{lmr} = E[L_l L_m L_r] / E[L_r^2] for xi ~ U[-1, 1].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace mzchaos {

/// L_i(x) by the three-term recurrence (i+1) L_{i+1} = (2i+1) x L_i - i L_{i-1}.
constexpr double legendre_eval(int order, double x) noexcept {
  if (order <= 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int i = 1; i < order; ++i) {
    const double next = ((2.0 * i + 1.0) * x * cur - i * prev) / (i + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace detail {

struct LegendrePair {
  double value;  // L_n(x)
  double lower;  // L_{n-1}(x)
};

constexpr LegendrePair legendre_pair(int n, double x) noexcept {
  double prev = 1.0;
  double cur = x;
  if (n == 0) return {1.0, 0.0};
  for (int i = 1; i < n; ++i) {
    const double next = ((2.0 * i + 1.0) * x * cur - i * prev) / (i + 1.0);
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

}  // namespace detail

struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing in (-1, 1)
  std::vector<double> weights;  // positive, sum to 2

  std::size_t size() const noexcept { return nodes.size(); }
  /// Polynomials up to this degree are integrated exactly.
  int exactness_degree() const noexcept {
    return 2 * static_cast<int>(nodes.size()) - 1;
  }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) sum += weights[q] * f(nodes[q]);
    return sum;
  }
};

/// n-point Gauss-Legendre rule on [-1, 1].
///
/// The i-th largest root of L_n has angle theta in
/// ((i - 1/2) pi / (n + 1/2), i pi / (n + 1/2)); these disjoint brackets are
/// refined with Newton steps that fall back to bisection when a step leaves
/// the bracket.
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: node count must be >= 1");
  QuadratureRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);

  const double h = std::numbers::pi / (n + 0.5);
  const int half = n / 2;
  for (int i = 1; i <= half; ++i) {
    double lo = std::cos(i * h);          // L_n changes sign in [lo, hi]
    double hi = std::cos((i - 0.5) * h);
    double f_lo = detail::legendre_pair(n, lo).value;
    double x = std::cos((i - 0.25) * std::numbers::pi / (n + 0.5));
    for (int iter = 0; iter < 200; ++iter) {
      const auto [p, p1] = detail::legendre_pair(n, x);
      if (p == 0.0) break;
      if ((p < 0.0) == (f_lo < 0.0)) {
        lo = x;
        f_lo = p;
      } else {
        hi = x;
      }
      const double dp = n * (x * p - p1) / (x * x - 1.0);
      double next = x - p / dp;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - x);
      x = next;
      if (step <= 1e-15 || hi - lo <= 1e-15) break;
    }
    const auto [p, p1] = detail::legendre_pair(n, x);
    const double dp = n * (x * p - p1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto upper = static_cast<std::size_t>(n - i);
    const auto lower = static_cast<std::size_t>(i - 1);
    rule.nodes[upper] = x;
    rule.nodes[lower] = -x;
    rule.weights[upper] = w;
    rule.weights[lower] = w;
  }
  if (n % 2 == 1) {
    const auto mid = static_cast<std::size_t>(half);
    const double dp = n * detail::legendre_pair(n, 0.0).lower;  // L_n'(0) = n L_{n-1}(0)
    rule.nodes[mid] = 0.0;
    rule.weights[mid] = 2.0 / (dp * dp);
  }
  return rule;
}

/// True when E[L_l L_m L_r] vanishes identically: the triangle inequality
/// fails or l + m + r is odd.
constexpr bool sparsity_predicate(int l, int m, int r) noexcept {
  return l + m < r || l + r < m || m + r < l || (l + m + r) % 2 == 1;
}

/// Smallest node count whose rule integrates the degree 3(M-1) triple products.
constexpr int required_nodes(int polys) noexcept {
  return (3 * polys - 2 + 1) / 2;
}

/// max(M + 2, ceil((3M - 2) / 2)).
constexpr int default_node_count(int polys) noexcept {
  return std::max(polys + 2, required_nodes(polys));
}

/// E[L_l L_m L_r] under the uniform density (weight 1/2) by quadrature.
/// The product is formed in sorted index order so the result is exactly
/// symmetric under permutations.
inline double triple_expectation(int l, int m, int r, const QuadratureRule& rule) {
  std::array<int, 3> idx{l, m, r};
  std::sort(idx.begin(), idx.end());
  return 0.5 * rule.integrate([&](double x) {
    return legendre_eval(idx[0], x) * legendre_eval(idx[1], x) * legendre_eval(idx[2], x);
  });
}

class TripleTensor {
 public:
  TripleTensor() = default;

  TripleTensor(int polys, std::vector<double> values, std::vector<char> nonzero)
      : polys_(polys), values_(std::move(values)), nonzero_(std::move(nonzero)) {}

  int polys() const noexcept { return polys_; }

  double operator()(int l, int m, int r) const noexcept { return values_[index(l, m, r)]; }
  bool nonzero(int l, int m, int r) const noexcept { return nonzero_[index(l, m, r)] != 0; }

  std::size_t nonzero_count() const noexcept {
    return static_cast<std::size_t>(std::count(nonzero_.begin(), nonzero_.end(), char{1}));
  }

 private:
  std::size_t index(int l, int m, int r) const noexcept {
    const auto n = static_cast<std::size_t>(polys_);
    return (static_cast<std::size_t>(l) * n + static_cast<std::size_t>(m)) * n +
           static_cast<std::size_t>(r);
  }

  int polys_ = 0;
  std::vector<double> values_;
  std::vector<char> nonzero_;
};

/// c_{lmr} for l, m, r in [0, M). Entries selected by sparsity_predicate are
/// stored as exact zeros; the denominator 1/(2r+1) is applied analytically.
inline TripleTensor triple_tensor(int polys, const QuadratureRule& rule) {
  if (polys < 1) throw std::invalid_argument("triple_tensor: M must be >= 1");
  if (static_cast<int>(rule.size()) < required_nodes(polys)) {
    throw std::invalid_argument("triple_tensor: rule with " + std::to_string(rule.size()) +
                                " nodes is not exact to degree " +
                                std::to_string(3 * (polys - 1)) + "; need " +
                                std::to_string(required_nodes(polys)));
  }
  const auto n = static_cast<std::size_t>(polys);
  std::vector<double> values(n * n * n, 0.0);
  std::vector<char> mask(n * n * n, 0);
  for (int l = 0; l < polys; ++l)
    for (int m = 0; m < polys; ++m)
      for (int r = 0; r < polys; ++r) {
        if (sparsity_predicate(l, m, r)) continue;
        const auto at = (static_cast<std::size_t>(l) * n + static_cast<std::size_t>(m)) * n +
                        static_cast<std::size_t>(r);
        values[at] = triple_expectation(l, m, r, rule) * (2.0 * r + 1.0);
        mask[at] = 1;
      }
  return TripleTensor(polys, std::move(values), std::move(mask));
}

inline TripleTensor triple_tensor(int polys) {
  return triple_tensor(polys, gauss_legendre(default_node_count(polys)));
}

}  // namespace mzchaos

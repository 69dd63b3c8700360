#include <gtest/gtest.h>

#include <cmath>

#include "mzchaos/chaos.hpp"
#include "mzchaos/stats.hpp"
#include "mzchaos/validation.hpp"
#include "oracles.hpp"

using namespace mzchaos;

namespace {

const ViscosityExpansion kNu{0.1, 0.07};

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]) / std::abs(b[i]));
  return m;
}

FourierField deterministic_solve(double nu, const StepOptions& opt) {
  auto tr = integrate(sine_field(32), [nu](const FourierField& u) { return burgers_rhs(u, nu); }, opt,
                      [](FourierField& u) { zero_unpaired_mode(u); });
  return tr.states.back();
}

LinearSystemSpec<double> two_by_two() {
  LinearSystemSpec<double> spec;
  spec.A.resize(2, 2);
  spec.A << -1.0, 1.0, -1.0, 0.0;
  spec.resolved = {0};
  spec.initial.resize(2);
  spec.initial << 1.0, 0.0;
  return spec;
}

}  // namespace

TEST(QuadratureReference, NoUncertaintyReproducesSingleSolve) {
  const StepOptions opt{1e-3, 0.2, 200};
  const auto ref = deterministic_solve(0.1, opt);
  for (int q : {2, 5}) {
    const auto m = quadrature_reference(sine_field(32), ViscosityExpansion{0.1, 0.0}, q, opt, 1);
    EXPECT_LE(oracle::max_abs_diff(m.mean.back().values(), ref.values()), 1e-14);
    const auto& mean = m.mean.back().values();
    for (std::size_t k = 0; k < mean.size(); ++k) EXPECT_LE(m.variance.back()[k], 1e-14 * std::norm(mean[k]) + 1e-300);
  }
}

TEST(QuadratureReference, ConvergedInNodeCount) {
  const StepOptions opt{1e-3, 0.5, 10};
  const auto a = quadrature_reference(sine_field(32), kNu, 16, opt);
  const auto b = quadrature_reference(sine_field(32), kNu, 24, opt);
  EXPECT_LE(max_rel(a.energy, b.energy), 1e-6);
}

TEST(QuadratureReference, RejectsNonPositiveNodeViscosity) {
  EXPECT_THROW(quadrature_reference(sine_field(8), ViscosityExpansion{0.1, 0.2}, 4, StepOptions{1e-3, 0.01, 1}),
               std::invalid_argument);
  EXPECT_THROW(quadrature_reference(sine_field(8), kNu, 1, StepOptions{1e-3, 0.01, 1}), std::invalid_argument);
}

TEST(QuadratureReference, GalerkinMomentsAgree) {
  const StepOptions opt{1e-3, 0.5, 50};
  const auto q = quadrature_reference(sine_field(32), kNu, 16, opt);
  const auto c = triple_tensor(7);
  auto tr = integrate(make_initial(sine_field(32), 7), [&](const ChaosState& s) { return full_rhs(s, kNu, c); },
                      opt, [](ChaosState& s) { zero_unpaired_mode(s); });
  ASSERT_EQ(tr.states.size(), q.times.size());
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    EXPECT_LE(std::abs(mean_energy(tr.states[i].slice(0)) - q.energy[i]), 1e-3 * q.energy[i]);
    const auto var = variance_per_mode(tr.states[i]);
    double scale = 0.0, diff = 0.0;
    for (std::size_t k = 0; k < var.size(); ++k) {
      scale = std::max(scale, q.variance[i][k]);
      diff = std::max(diff, std::abs(var[k] - q.variance[i][k]));
    }
    if (scale > 0.0) {
      EXPECT_LE(diff, 1e-3 * scale) << "t=" << q.times[i];
    }
  }
}

TEST(UniformDraws, RangeAndDeterminism) {
  const auto a = uniform_draws(1000, 99), b = uniform_draws(1000, 99), c = uniform_draws(1000, 100);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  double mean = 0.0;
  for (double x : a) {
    EXPECT_GE(x, -1.0);
    EXPECT_LT(x, 1.0);
    mean += x / 1000;
  }
  EXPECT_LT(std::abs(mean), 0.1);
}

TEST(McReference, OneSampleIsOneSolve) {
  const StepOptions opt{1e-3, 0.2, 200};
  const double xi = uniform_draws(1, 5)[0];
  const auto m = mc_reference(sine_field(32), kNu, 1, 5, opt);
  const auto ref = deterministic_solve(kNu.at(xi), opt);
  EXPECT_EQ(oracle::max_abs_diff(m.mean.back().values(), ref.values()), 0.0);
}

TEST(McReference, ThreadCountDoesNotChangeResult) {
  const StepOptions opt{1e-3, 0.1, 20};
  const auto a = mc_reference(sine_field(16), kNu, 70, 17, opt, 1);
  const auto b = mc_reference(sine_field(16), kNu, 70, 17, opt, 4);
  EXPECT_EQ(a.energy, b.energy);
  EXPECT_EQ(a.grad_sq, b.grad_sq);
  for (std::size_t i = 0; i < a.mean.size(); ++i) EXPECT_EQ(a.mean[i], b.mean[i]);
}

TEST(McReference, AgreesWithQuadratureWithinSamplingError) {
  const StepOptions opt{1e-3, 0.5, 50};
  const auto mc = mc_reference(sine_field(32), kNu, 2000, 2024, opt);
  const auto q = quadrature_reference(sine_field(32), kNu, 16, opt);
  EXPECT_LE(max_rel(mc.energy, q.energy), 0.02);
}

TEST(LinearDecay, InitialMean) {
  const auto m = linear_decay_gpc(2.5, 4, 1e-3, 0.0);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.values[0], 2.5);
  EXPECT_EQ(linear_decay_exact_mean(2.5, 0.0), 2.5);
}

TEST(LinearDecay, MeanAtUnitTime) {
  const auto m = linear_decay_gpc(1.0, 8, 1e-3, 1.0);
  EXPECT_NEAR(m.values.back(), 1.0 - std::exp(-1.0), 1e-4);
  EXPECT_NEAR(linear_decay_exact_mean(1.0, 1.0), 0.6321206, 1e-7);
}

TEST(LinearDecay, MoreChaosOrdersReduceError) {
  auto err = [](int M) {
    return std::abs(linear_decay_gpc(1.0, M, 1e-3, 2.0).values.back() - linear_decay_exact_mean(1.0, 2.0));
  };
  EXPECT_LT(err(8), err(2));
  EXPECT_THROW(linear_decay_gpc(1.0, 1, 1e-3, 1.0), std::invalid_argument);
}

TEST(HierarchyOracle, FullyResolvedSystemHasNoMemory) {
  LinearSystemSpec<double> spec;
  spec.A = Eigen::MatrixXd::Zero(3, 3);
  spec.A.diagonal() << -1.0, -2.0, -0.5;
  spec.resolved = {0, 1, 2};
  spec.initial = Eigen::VectorXd::Ones(3);
  const auto cmp = hierarchy_oracle(spec, 0, 0.5, 1, HierarchyOracleOptions{2.0, -1.0, 1e-3, 100, 100});
  for (double w : cmp.hierarchy) EXPECT_EQ(w, 0.0);
  for (double w : cmp.exact) EXPECT_EQ(w, 0.0);
  EXPECT_EQ(cmp.max_rel_deviation, 0.0);
}

TEST(HierarchyOracle, SecondOrderInSubintervalWidth) {
  const HierarchyOracleOptions opt{6.0, 3.0, 1e-4, 500, 10000};
  const double e1 = hierarchy_oracle(two_by_two(), 0, 0.5, 1, opt).max_rel_deviation;
  const double e2 = hierarchy_oracle(two_by_two(), 0, 0.5, 2, opt).max_rel_deviation;
  EXPECT_GE(e1 / e2, 3.0);
  EXPECT_LE(e1 / e2, 5.0);
}

TEST(HierarchyOracle, QuadratureErrorBelowCertificationLevel) {
  const auto cmp = hierarchy_oracle(two_by_two(), 0, 0.5, 1, HierarchyOracleOptions{6.0, 3.0, 1e-4, 500, 10000});
  EXPECT_LT(cmp.max_quadrature_error, 1e-8);
}

TEST(HierarchyOracle, ComplexSystem) {
  LinearSystemSpec<std::complex<double>> spec;
  spec.A.resize(2, 2);
  spec.A << std::complex<double>(-1.0, 0.5), 1.0, -1.0, 0.0;
  spec.resolved = {0};
  spec.initial.resize(2);
  spec.initial << 1.0, 0.0;
  const HierarchyOracleOptions opt{6.0, 3.0, 1e-4, 500, 10000};
  const double e1 = hierarchy_oracle(spec, 0, 0.5, 1, opt).max_rel_deviation;
  const double e2 = hierarchy_oracle(spec, 0, 0.5, 2, opt).max_rel_deviation;
  EXPECT_GE(e1 / e2, 3.0);
  EXPECT_LE(e1 / e2, 5.0);
}

TEST(MemoryIntegral, LongMemoryConvergesToInfiniteMemory) {
  // Real spectrum and fast orthogonal decay: the integrand keeps one sign and decays in the lag.
  auto spec = two_by_two();
  spec.A << 0.0, 1.0, -1.0, -4.0;
  const double t = 6.0;
  const MemoryIntegralOracle<double> infinite(spec, 0, t, 10000);
  const double w_inf = infinite.value(t);  // window [0, t]
  double prev = INFINITY;
  for (double t0 : {0.5, 1.0, 2.0, 3.0}) {
    const double d = std::abs(MemoryIntegralOracle<double>(spec, 0, t0, 10000).value(t) - w_inf);
    EXPECT_LT(d, prev) << t0;
    prev = d;
  }
  EXPECT_LT(prev, 1e-4 * std::abs(w_inf));
}

TEST(MemoryIntegral, RejectsBadInput) {
  auto spec = two_by_two();
  spec.initial << 1.0, 1.0;  // not in the range of P
  EXPECT_THROW(MemoryIntegralOracle<double>(spec, 0, 0.5), std::invalid_argument);
  spec = two_by_two();
  spec.A << -800.0, 1.0, -1.0, 0.0;
  EXPECT_THROW(MemoryIntegralOracle<double>(spec, 0, 1.0), std::runtime_error);
}

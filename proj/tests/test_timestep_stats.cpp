#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "mzchaos/chaos.hpp"
#include "mzchaos/stats.hpp"
#include "mzchaos/timestep.hpp"
#include "oracles.hpp"

using namespace mzchaos;

TEST(Heun, ZeroRhsKeepsState) {
  EXPECT_EQ(heun_step(3.25, [](double) { return 0.0; }, 0.1), 3.25);
}

TEST(Heun, LinearAmplificationFactor) {
  for (double lambda : {-3.0, -0.5, 0.7, 2.0})
    for (double dt : {0.1, 0.01}) {
      const double z = lambda * dt;
      const double got = heun_step(1.0, [lambda](double u) { return lambda * u; }, dt);
      EXPECT_NEAR(got, 1 + z + z * z / 2, 4 * std::numeric_limits<double>::epsilon());
    }
  const std::complex<double> lam(-1.0, 2.0);
  const double dt = 0.05;
  const auto z = lam * dt;
  const auto got = heun_step(std::complex<double>(1.0), [lam](std::complex<double> u) { return lam * u; }, dt);
  EXPECT_LE(std::abs(got - (1.0 + z + z * z / 2.0)), 4 * std::numeric_limits<double>::epsilon());
}

TEST(Heun, RealStabilityInterval) {
  for (double z = -3.0; z <= 1.0; z += 1.0 / 64) {
    const double g = std::abs(1 + z + z * z / 2);
    if (z >= -2.0 && z <= 0.0) {
      EXPECT_LE(g, 1.0) << z;
    } else {
      EXPECT_GT(g, 1.0) << z;
    }
  }
}

TEST(Heun, SecondOrderGlobalConvergence) {
  auto error = [](double dt) {
    Trajectory<double> tr = integrate(1.0, [](double u) { return -u; }, StepOptions{dt, 1.0, 1});
    return std::abs(tr.states.back() - std::exp(-1.0));
  };
  for (double dt : {0.02, 0.01, 0.005}) {
    const double ratio = error(dt) / error(dt / 2);
    EXPECT_GE(ratio, 3.5);
    EXPECT_LE(ratio, 4.5);
  }
}

TEST(Heun, RejectsNonPositiveStep) {
  EXPECT_THROW(heun_step(1.0, [](double u) { return u; }, 0.0), std::invalid_argument);
}

TEST(Heun, BlowUpIsDetected) {
  EXPECT_THROW(heun_step(1e200, [](double u) { return u * u; }, 1.0), BlowUpError);
  auto tr = integrate(1.0, [](double u) { return u * u * u; }, StepOptions{0.5, 20.0, 1});
  EXPECT_TRUE(tr.blew_up);
  EXPECT_FALSE(tr.diagnostic.empty());
  EXPECT_LT(tr.times.size(), 41u);
  for (double v : tr.states) EXPECT_TRUE(std::isfinite(v));
}

TEST(Integrate, SnapshotsAndStride) {
  auto tr = integrate(1.0, [](double u) { return -u; }, StepOptions{0.1, 0.0, 1});
  ASSERT_EQ(tr.times.size(), 1u);
  EXPECT_EQ(tr.states[0], 1.0);
  tr = integrate(1.0, [](double u) { return -u; }, StepOptions{0.01, 1.0, 25});
  ASSERT_EQ(tr.times.size(), 5u);
  for (std::size_t i = 0; i < tr.times.size(); ++i) EXPECT_NEAR(tr.times[i], 0.25 * i, 1e-14);
  EXPECT_THROW(integrate(1.0, [](double u) { return -u; }, StepOptions{0.3, 1.0, 1}), std::invalid_argument);
  EXPECT_THROW(integrate(1.0, [](double u) { return -u; }, StepOptions{0.1, 1.0, 0}), std::invalid_argument);
}

TEST(Integrate, TimeDependentRhs) {
  // du/dt = t, u(0) = 0: Heun is exact for linear-in-t sources.
  auto tr = integrate(0.0, [](double t, double) { return t; }, StepOptions{0.1, 1.0, 10});
  EXPECT_NEAR(tr.states.back(), 0.5, 1e-14);
}

TEST(Integrate, BurgersDecaysAndIsDeterministic) {
  auto run = [] {
    return integrate(sine_field(96), [](const FourierField& u) { return burgers_rhs(u, 0.1); },
                     StepOptions{1e-3, 1.0, 100}, [](FourierField& u) { zero_unpaired_mode(u); });
  };
  const auto a = run(), b = run();
  ASSERT_FALSE(a.blew_up);
  EXPECT_LT(mean_energy(a.states.back()), mean_energy(a.states.front()));
  ASSERT_EQ(a.states.size(), b.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i) EXPECT_EQ(a.states[i], b.states[i]);
}

TEST(Stats, EnergyExamples) {
  EXPECT_EQ(mean_energy(FourierField(8)), 0.0);
  EXPECT_NEAR(mean_energy(sine_field(8)), std::numbers::pi / 2, 1e-15);
  FourierField u = sine_field(8);
  u *= 3.0;
  EXPECT_NEAR(mean_energy(u), 9 * std::numbers::pi / 2, 1e-14);
}

TEST(Stats, GradientExamples) {
  EXPECT_EQ(mean_grad_sq(FourierField(8)), 0.0);
  EXPECT_NEAR(mean_grad_sq(sine_field(8)), std::numbers::pi, 1e-15);
  EXPECT_EQ(mean_grad_sq(FourierField(8, {{0, 4.0}})), 0.0);
}

TEST(Stats, ParsevalTypeBound) {
  std::mt19937_64 gen(2);
  for (int n : {8, 32, 96}) {
    const auto u = oracle::random_field(n, gen);
    const double kmax = n / 2;
    EXPECT_LE(mean_grad_sq(u), kmax * kmax * 2.0 * mean_energy(u) * (1 + 1e-15));
    EXPECT_GE(mean_energy(u), 0.0);
  }
}

TEST(Stats, VariancePerMode) {
  ChaosState s(8, 4);
  s.set_field(0, sine_field(8));
  for (double v : variance_per_mode(s)) EXPECT_EQ(v, 0.0);
  const cplx a(0.3, -0.4);
  s(2, 1) = a;
  const auto var = variance_per_mode(s);
  EXPECT_NEAR(var[2 + 4], std::norm(a) / 3.0, 1e-16);
  s(2, 3) = 1.0;
  EXPECT_NEAR(variance_per_mode(s)[6], std::norm(a) / 3.0 + 1.0 / 7.0, 1e-16);
}

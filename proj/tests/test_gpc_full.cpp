#include <gtest/gtest.h>

#include <random>

#include "mzchaos/chaos.hpp"
#include "mzchaos/timestep.hpp"
#include "oracles.hpp"

using namespace mzchaos;

namespace {

ChaosState random_state(int N, int M, std::mt19937_64& gen) {
  ChaosState s(N, M);
  for (int r = 0; r < M; ++r) s.set_field(r, oracle::random_field(N, gen, 1.0 / (1 + r)));
  return s;
}

}  // namespace

TEST(Viscosity, Validation) {
  EXPECT_NO_THROW((ViscosityExpansion{0.1, 0.07}.validate()));
  EXPECT_THROW((ViscosityExpansion{0.1, 0.1}.validate()), std::invalid_argument);
  EXPECT_THROW((ViscosityExpansion{0.1, -0.01}.validate()), std::invalid_argument);
  EXPECT_THROW((ViscosityExpansion{0.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_EQ((ViscosityExpansion{0.1, 0.07}.coeff(2)), 0.0);
}

TEST(FullRhs, DeterministicCollapseWhenNu1Zero) {
  std::mt19937_64 gen(11);
  const ViscosityExpansion nu{0.1, 0.0};
  const auto c = triple_tensor(5);
  ChaosState s(16, 5);
  const auto u = oracle::random_real_field(16, gen);
  s.set_field(0, u);
  const auto d = full_rhs(s, nu, c);
  const auto det = burgers_rhs(u, 0.1);
  EXPECT_LE(oracle::max_abs_diff(d.slice(0), det.values()), 1e-14 * oracle::max_abs(det.values()));
  for (int r = 1; r < 5; ++r)
    for (const auto& z : d.slice(r)) EXPECT_EQ(z, cplx(0.0));
}

TEST(FullRhs, SingleModeFeedsFirstChaosOrder) {
  const cplx a(0.7, -0.2);
  const ViscosityExpansion nu{0.1, 0.07};
  ChaosState s(16, 4);
  s(1, 0) = a;
  const auto d = full_rhs(s, nu, triple_tensor(4));
  // Projection of -k^2 nu1 xi a onto L1: E[xi L1] / E[L1^2] = 1, i.e. c101 = 1.
  EXPECT_NEAR(std::abs(d(1, 1) - (-nu.nu1 * a)), 0.0, 1e-15);
}

TEST(FullRhs, MatchesBruteForceEvaluator) {
  std::mt19937_64 gen(5);
  const ViscosityExpansion nu{0.1, 0.07};
  const int N = 8, M = 3;
  const auto s = random_state(N, M, gen);
  const auto fast = full_rhs(s, nu, triple_tensor(M));
  const auto ref = oracle::full_rhs(s, nu, oracle::DenseTensor(M));
  EXPECT_LE(oracle::max_abs_diff(fast.values(), ref.values()), 1e-12);
}

TEST(FullRhs, SparsityShortcutChangesNothing) {
  std::mt19937_64 gen(6);
  const ViscosityExpansion nu{0.1, 0.07};
  const auto s = random_state(32, 7, gen);
  const auto c = triple_tensor(7);
  const auto a = full_rhs(s, nu, c, TensorSparsity::exploit);
  const auto b = full_rhs(s, nu, c, TensorSparsity::ignore);
  EXPECT_LE(oracle::max_abs_diff(a.values(), b.values()), 1e-15 * (1.0 + oracle::max_abs(a.values())));
}

TEST(FullRhs, RejectsTensorMismatch) {
  EXPECT_THROW(full_rhs(ChaosState(8, 3), ViscosityExpansion{}, triple_tensor(4)), std::invalid_argument);
}

TEST(MakeInitial, SineFieldInSliceZero) {
  const auto s = make_initial(sine_field(96), 7);
  EXPECT_EQ(s(1, 0), cplx(0.0, -0.5));
  EXPECT_EQ(s(-1, 0), cplx(0.0, 0.5));
  for (int r = 0; r < 7; ++r)
    for (int k = -48; k < 48; ++k)
      if (!(r == 0 && (k == 1 || k == -1))) {
        EXPECT_EQ(s(k, r), cplx(0.0));
      }
}

TEST(MakeInitial, ZeroAndNonRealInput) {
  const auto out = make_initial(FourierField(8), 3);
  for (const auto& z : out.values()) EXPECT_EQ(z, cplx(0.0));
  auto u = sine_field(8);
  u[-4] = 0.5;
  EXPECT_THROW(make_initial(u, 3), std::invalid_argument);
}

TEST(FullSystem, DegenerateTrajectoryEqualsDeterministicBurgers) {
  const ViscosityExpansion nu{0.1, 0.0};
  const auto c = triple_tensor(4);
  ChaosState s = make_initial(sine_field(32), 4);
  FourierField u = sine_field(32);
  for (int n = 0; n < 200; ++n) {
    s = heun_step(s, [&](const ChaosState& x) { return full_rhs(x, nu, c); }, 1e-3);
    u = heun_step(u, [](const FourierField& f) { return burgers_rhs(f, 0.1); }, 1e-3);
    ASSERT_LE(oracle::max_abs_diff(s.slice(0), u.values()), 1e-12) << "step " << n;
    for (int r = 1; r < 4; ++r) ASSERT_EQ(oracle::max_abs(s.slice(r)), 0.0);
  }
}

#include "ddc/oracles.hpp"

#include <gtest/gtest.h>

#include "ddc/errors.hpp"
#include "ddc/model.hpp"
#include "support/reference.hpp"

namespace ddc {
namespace {

TEST(LyapunovOracle, ScalarHandValue) {
  // 2 a p + q = 0 with a = -1, q = 2.
  const Matrix P = solve_lyapunov_direct(Matrix::Constant(1, 1, -1.0),
                                         Matrix::Constant(1, 1, 2.0));
  EXPECT_NEAR(P(0, 0), 1.0, 1e-15);
}

TEST(LyapunovOracle, AgreesWithSignFunction) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 5;
    const Matrix A = testing::random_hurwitz(n, rng);
    const Matrix Q = testing::random_spd(n, rng);
    const Matrix P = solve_lyapunov_direct(A, Q);
    const Matrix ref = testing::care_by_sign(A, Matrix::Zero(n, n), Q);
    EXPECT_LE((P - ref).norm(), 1e-8 * ref.norm()) << "trial " << trial;
    EXPECT_LE(lyapunov_residual(A, Q, P), 1e-10 * std::max(1.0, P.norm()));
    EXPECT_EQ(P, P.transpose());
  }
}

TEST(LyapunovOracle, SingularOperatorThrows) {
  Matrix A(2, 2);
  A << 0, 1, -1, 0;  // eigenvalues +-i sum to zero
  EXPECT_THROW(solve_lyapunov_direct(A, Matrix::Identity(2, 2)), NumericalError);
}

TEST(AreOracle, ScalarHandValue) {
  // 2 a p + q - p^2 b^2 / r = 0 with a = 0, b = q = r = 1.
  const AreSolution s = solve_are_newton(Matrix::Zero(1, 1), Matrix::Ones(1, 1),
                                         Matrix::Ones(1, 1), Matrix::Ones(1, 1));
  EXPECT_NEAR(s.P(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(s.K(0, 0), -1.0, 1e-12);
}

TEST(AreOracle, AgreesWithSignFunctionOnUnstableSystems) {
  Rng rng(2);
  int unstable = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 4;
    const Eigen::Index m = 1 + trial % 2;
    const Matrix A = rng.uniform_matrix(n, n, -1, 1) + 0.3 * Matrix::Identity(n, n);
    const Matrix B = rng.uniform_matrix(n, m, -1, 1);
    const Matrix Q = Matrix::Identity(n, n);
    const Matrix R = Matrix::Identity(m, m);
    unstable += hurwitz(A) ? 0 : 1;
    const AreSolution s = solve_are_newton(A, B, Q, R);
    const Matrix ref = testing::care_by_sign(A, input_weight(B, R), Q);
    EXPECT_LE((s.P - ref).norm(), 1e-7 * ref.norm()) << "trial " << trial;
    EXPECT_LE(s.residual, 1e-10 * std::max(1.0, s.P.norm()));
    EXPECT_TRUE(hurwitz(A + B * s.K));
    // Newton-Kleinman is monotone from the second iterate on.
    for (std::size_t k = 2; k < s.trace_history.size(); ++k) {
      EXPECT_LE(s.trace_history[k], s.trace_history[k - 1] * (1 + 1e-10));
    }
  }
  EXPECT_GT(unstable, 0);
}

TEST(AreOracle, AutonomousCaseIsLyapunov) {
  Rng rng(3);
  const Matrix A = testing::random_hurwitz(3, rng);
  const AreSolution s = solve_are_newton(A, Matrix::Zero(3, 0), Matrix::Identity(3, 3),
                                         Matrix::Zero(0, 0));
  EXPECT_LE((s.P - solve_lyapunov_direct(A, Matrix::Identity(3, 3))).norm(), 1e-12);
}

TEST(AreOracle, UnstabilizablePairThrows) {
  Matrix A(2, 2);
  A << 1, 0, 0, -1;
  Matrix B(2, 1);
  B << 0, 1;  // the unstable mode is not actuated
  EXPECT_THROW(solve_are_newton(A, B, Matrix::Identity(2, 2), Matrix::Identity(1, 1)),
               NumericalError);
}

TEST(LqrCost, EqualsTraceOfRiccatiSolution) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix A = rng.uniform_matrix(4, 4, -1, 1);
    const Matrix B = rng.uniform_matrix(4, 2, -1, 1);
    const Matrix Q = testing::random_spd(4, rng);
    const Matrix R = testing::random_spd(2, rng);
    const AreSolution s = solve_are_newton(A, B, Q, R);
    EXPECT_NEAR(lqr_cost(A, B, s.K, Q, R), s.P.trace(), 1e-8 * s.P.trace());
  }
}

TEST(LqrCost, UnstableClosedLoopThrows) {
  EXPECT_THROW(lqr_cost(Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1),
                        Matrix::Ones(1, 1), Matrix::Ones(1, 1)),
               ValidationError);
}

TEST(Oracles, InputWeightValidation) {
  EXPECT_THROW(input_weight(Matrix::Ones(2, 1), -Matrix::Ones(1, 1)), ValidationError);
  EXPECT_THROW(input_weight(Matrix::Ones(2, 2), Matrix::Ones(1, 1)), ValidationError);
  Matrix B(2, 1);
  B << 1, 2;
  const Matrix D = input_weight(B, 2 * Matrix::Ones(1, 1));
  EXPECT_NEAR(D(1, 1), 2.0, 1e-15);
}

TEST(Oracles, ResidualsVanishAtSolutions) {
  Matrix A(2, 2);
  A << 0, 1, 0, 0;
  Matrix B(2, 1);
  B << 0, 1;
  // Double integrator with Q = I, R = 1: P = [[sqrt3, 1], [1, sqrt3]].
  Matrix P(2, 2);
  P << std::sqrt(3.0), 1, 1, std::sqrt(3.0);
  EXPECT_LE(riccati_residual(A, input_weight(B, Matrix::Ones(1, 1)),
                             Matrix::Identity(2, 2), P),
            1e-14);
  EXPECT_GT(riccati_residual(A, Matrix(), Matrix::Identity(2, 2), P), 1.0);
}

}  // namespace
}  // namespace ddc

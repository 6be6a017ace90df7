// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#include "versal/newton.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <gtest/gtest.h>

#include "versal/errors.hpp"
#include "versal/families.hpp"
#include "versal/invariant_subspace.hpp"
#include "versal/versal_core.hpp"
#include "test_support.hpp"

namespace versal {
namespace {

VersalLinearization example1_linearization() {
  const MatrixFamily family = family_example1();
  Vector p0(2);
  p0 << -0.03, 8.99;
  const Matrix A = family.evaluate(p0);
  const auto [Q, T] = schur_decompose(A);
  std::vector<int> pair;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(T(i, i).imag()) > 1e-8) pair.push_back(i);
  }
  const InvariantTriple triple =
      block_diagonalize_schur(Q, T, ClusterSelection{pair});
  const VersalValues values = versal_values(triple.S);
  return versal_jacobian(triple, values, family.derivatives(p0));
}

TEST(AssembleLinearSystem, ConjugateSymmetricClusterGivesOneRealRow) {
  const VersalLinearization lin = example1_linearization();
  NewtonConfig config;
  config.real_parameters = true;
  const LinearSystem system = assemble_linear_system(lin, config);
  ASSERT_EQ(system.M.rows(), 1);
  ASSERT_EQ(system.M.cols(), 2);
  EXPECT_TRUE(system.real_unknowns);
  EXPECT_NEAR(system.M(0, 0).real(), 1.0008256642, 1e-9);
  EXPECT_NEAR(system.M(0, 1).real(), 0.3333622754, 1e-9);
  EXPECT_EQ(system.M(0, 0).imag(), 0.0);
  EXPECT_NEAR(system.rhs(0).real(), 0.0333458474, 1e-9);
}

TEST(AssembleLinearSystem, ComplexRowsSplitInRealMode) {
  VersalLinearization lin;
  lin.values.q = Vector(3);
  lin.values.q << Complex(1.0, 0.0), Complex(0.3, 0.4), Complex(-0.1, 0.2);
  lin.jacobian = Matrix(3, 2);
  lin.jacobian << Complex(1, 0), Complex(0, 0),
                  Complex(1, 2), Complex(3, -1),
                  Complex(0, 1), Complex(2, 0);
  NewtonConfig config;
  config.real_parameters = true;
  const LinearSystem system = assemble_linear_system(lin, config);
  ASSERT_EQ(system.M.rows(), 4);
  EXPECT_TRUE(system.real_unknowns);
  EXPECT_EQ(system.M.imag().norm(), 0.0);
  EXPECT_NEAR(system.M(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(system.M(1, 0).real(), 2.0, 1e-15);
  EXPECT_NEAR(system.rhs(0).real(), -0.3, 1e-15);
  EXPECT_NEAR(system.rhs(1).real(), -0.4, 1e-15);
  EXPECT_NEAR(system.rhs(2).real(), 0.1, 1e-15);
  EXPECT_NEAR(system.rhs(3).real(), -0.2, 1e-15);
}

TEST(AssembleLinearSystem, ComplexModeKeepsOneRowPerCoefficient) {
  const VersalLinearization lin = example1_linearization();
  NewtonConfig config;
  config.real_parameters = false;
  const LinearSystem system = assemble_linear_system(lin, config);
  ASSERT_EQ(system.M.rows(), 1);
  EXPECT_FALSE(system.real_unknowns);
}

TEST(AssembleLinearSystem, TargetEigenvalueAddsARow) {
  const VersalLinearization lin = example1_linearization();
  NewtonConfig config;
  config.real_parameters = true;
  config.target_eigenvalue = Complex(-2.0, 0.0);
  const LinearSystem system = assemble_linear_system(lin, config);
  ASSERT_EQ(system.M.rows(), 2);
  // rhs of the target row is target - q(0).
  EXPECT_NEAR(system.rhs(1).real(), -2.0 + 1.9951820116, 1e-9);
}

TEST(AssembleLinearSystem, ComplexTargetSplitsInRealMode) {
  const VersalLinearization lin = example1_linearization();
  NewtonConfig config;
  config.real_parameters = true;
  config.target_eigenvalue = Complex(-2.0, 0.5);
  const LinearSystem system = assemble_linear_system(lin, config);
  // One stratum row plus a split target row.
  ASSERT_EQ(system.M.rows(), 3);
}

TEST(SolveStep, MinimumNormSolution) {
  LinearSystem system;
  system.M = Matrix(1, 2);
  system.M << Complex(1, 0), Complex(1, 0);
  system.rhs = Vector(1);
  system.rhs << Complex(1, 0);
  const Vector step =
      solve_step(system, Vector::Zero(2), SolveStrategy::MinimumNorm);
  EXPECT_LT(std::abs(step(0) - Complex(0.5, 0.0)), 1e-14);
  EXPECT_LT(std::abs(step(1) - Complex(0.5, 0.0)), 1e-14);
}

TEST(SolveStep, NearestToReferencePmaterial) {
  LinearSystem system;
  system.M = Matrix(1, 2);
  system.M << Complex(1, 0), Complex(1, 0);
  system.rhs = Vector(1);
  system.rhs << Complex(1, 0);
  Vector r(2);
  r << Complex(1, 0), Complex(0, 0);
  // r already satisfies the equation, so the nearest solution is r itself.
  const Vector step = solve_step(system, r, SolveStrategy::NearestToReference);
  EXPECT_LT((step - r).norm(), 1e-14);
  // And the minimum-norm answer differs.
  const Vector mn =
      solve_step(system, Vector::Zero(2), SolveStrategy::MinimumNorm);
  EXPECT_GT((step - mn).norm(), 0.1);
}

TEST(SolveStep, RankDeficiencyIsReported) {
  LinearSystem system;
  system.M = Matrix::Zero(1, 2);
  system.rhs = Vector(1);
  system.rhs << Complex(0.5, 0.0);
  try {
    solve_step(system, Vector::Zero(2), SolveStrategy::MinimumNorm);
    FAIL() << "expected RankDeficientError";
  } catch (const RankDeficientError& e) {
    EXPECT_EQ(e.rank, 0);
    EXPECT_EQ(e.rows, 1);
    EXPECT_NE(std::string(e.what()).find("multiplicity"), std::string::npos);
  }
}

TEST(ApproximateEigenvalue, FirstOrderPrediction) {
  VersalLinearization lin;
  lin.values.q = Vector(2);
  lin.values.q << Complex(2.0, 0.0), Complex(0.1, 0.0);
  lin.jacobian = Matrix(2, 2);
  lin.jacobian << Complex(1, 0), Complex(0, 2),
                  Complex(0, 0), Complex(1, 0);
  Vector step(2);
  step << Complex(0.1, 0.0), Complex(0.2, 0.0);
  const Complex lam = approximate_eigenvalue(lin, step);
  EXPECT_LT(std::abs(lam - Complex(2.1, 0.4)), 1e-15);
}

TEST(SelectCluster, NearestWithTiesToTheLowerIndex) {
  Vector eigs(3);
  eigs << Complex(0.0, 0.0), Complex(1.0, 0.0), Complex(3.0, 0.0);
  const ClusterSelection sel =
      select_cluster(eigs, Complex(0.6, 0.0), 2, false);
  ASSERT_EQ(sel.size(), 2);
  EXPECT_EQ(sel.indices[0], 1);
  EXPECT_EQ(sel.indices[1], 0);

  Vector tie(2);
  tie << Complex(1.0, 0.0), Complex(2.0, 0.0);
  const ClusterSelection tied = select_cluster(tie, Complex(1.5, 0.0), 1, false);
  EXPECT_EQ(tied.indices[0], 0);
}

TEST(SelectCluster, RealModeAdmitsConjugatePairsTogether) {
  Vector eigs(4);
  eigs << Complex(1.0, 1.0), Complex(1.0, -1.0), Complex(4.0, 0.0),
      Complex(5.0, 0.0);
  const ClusterSelection sel = select_cluster(eigs, Complex(1.0, 0.0), 3, true);
  ASSERT_EQ(sel.size(), 3);
  // The pair is admitted together, then the nearest real completes.
  EXPECT_EQ(sel.indices[0], 0);
  EXPECT_EQ(sel.indices[1], 1);
  EXPECT_EQ(sel.indices[2], 2);
}

TEST(SelectCluster, RealModeBacktracksOverAStrandedReal) {
  Vector eigs(3);
  eigs << Complex(0.9, 0.0), Complex(1.0, 1.0), Complex(1.0, -1.0);
  const ClusterSelection sel = select_cluster(eigs, Complex(1.0, 0.0), 2, true);
  ASSERT_EQ(sel.size(), 2);
  EXPECT_EQ(sel.indices[0], 1);
  EXPECT_EQ(sel.indices[1], 2);
}

TEST(SelectCluster, ComplexTargetIgnoresConjugationEvenInRealMode) {
  Vector eigs(3);
  eigs << Complex(1.0, 1.0), Complex(1.0, -1.0), Complex(0.9, 0.0);
  const ClusterSelection sel = select_cluster(eigs, Complex(1.0, 1.0), 2, true);
  ASSERT_EQ(sel.size(), 2);
  EXPECT_EQ(sel.indices[0], 0);
  EXPECT_EQ(sel.indices[1], 2);
}

TEST(SelectCluster, ImpossibleRealSelectionThrows) {
  Vector eigs(2);
  eigs << Complex(1.0, 1.0), Complex(1.0, -1.0);
  EXPECT_THROW(select_cluster(eigs, Complex(1.0, 0.0), 1, true),
               ClusterSelectionError);
  EXPECT_THROW(select_cluster(eigs, Complex(1.0, 0.0), 3, true), InputError);
}

NewtonConfig default_config() {
  NewtonConfig config;
  return config;
}

TEST(NewtonIterate, FindsTheKnownDoublePoint) {
  const MatrixFamily family = family_example1();
  Vector p0(2);
  p0 << -0.03, 8.99;
  const NewtonResult result =
      newton_iterate(family, p0, 2, std::nullopt, default_config());
  ASSERT_TRUE(result.converged);
  EXPECT_LE(result.iterations.size(), 5u);
  Vector expected(2);
  expected << 0.0, 9.0;
  EXPECT_LT((result.p_star - expected).norm(), 1e-10);
  EXPECT_LT(std::abs(result.lambda - Complex(-2.0, 0.0)), 1e-12);
  EXPECT_NEAR(result.distance, (result.p_star - p0).norm(), 1e-16);
  ASSERT_TRUE(result.chain.has_value());
  EXPECT_LT(result.chain->residual, 1e-13);
  EXPECT_EQ(result.stop_reason, "step tolerance reached");

  // First iteration: recorded coefficients are the start-point values and
  // the post-step point matches the one-step solution.
  ASSERT_GE(result.iterations.size(), 1u);
  const IterationRecord& first = result.iterations.front();
  EXPECT_NEAR(first.q(0).real(), -1.9951820116, 1e-9);
  EXPECT_NEAR(first.q(1).real(), -0.0333458474, 1e-9);
  EXPECT_NEAR(first.p(0).real(), -9.0697478795e-6, 1e-9);
  EXPECT_NEAR(first.p(1).real(), 8.9999895967, 1e-8);
  EXPECT_LT(std::abs(first.lambda_app - Complex(-2.0, 0.0)), 1e-3);
  EXPECT_EQ(first.cluster.size(), 2u);
}

TEST(NewtonIterate, MinimumNormConvergesToADifferentPoint) {
  const MatrixFamily family = family_example1();
  Vector p0(2);
  p0 << -0.03, 8.99;
  NewtonConfig config;
  config.strategy = SolveStrategy::MinimumNorm;
  const NewtonResult result =
      newton_iterate(family, p0, 2, std::nullopt, config);
  ASSERT_TRUE(result.converged);
  Vector corner(2);
  corner << 0.0, 9.0;
  EXPECT_GT((result.p_star - corner).norm(), 1e-7);
  EXPECT_LT((result.p_star - corner).norm(), 1e-4);
}

TEST(NewtonIterate, StartingOnTheStratumTakesOneTinyStep) {
  const MatrixFamily family = family_example1();
  Vector p0(2);
  p0 << 0.0, 9.0;
  const NewtonResult result =
      newton_iterate(family, p0, 2, std::nullopt, default_config());
  ASSERT_TRUE(result.converged);
  EXPECT_EQ(result.iterations.size(), 1u);
  EXPECT_LT(result.iterations.front().step_norm, 1e-10);
  EXPECT_LT(result.distance, 1e-10);
}

TEST(NewtonIterate, QuadrupleRootAtTheOrigin) {
  const MatrixFamily family = family_swallow_tail();
  const NewtonResult result = newton_iterate(family, Vector::Zero(3), 4,
                                             std::nullopt, default_config());
  ASSERT_TRUE(result.converged);
  EXPECT_EQ(result.iterations.size(), 1u);
  EXPECT_LT(result.distance, 1e-12);
  EXPECT_LT(std::abs(result.lambda), 1e-10);
}

TEST(NewtonIterate, TargetEigenvaluePinsTheDoubleRoot) {
  // A defective zero splits by the square root of the perturbation, so the
  // start must keep that splitting well inside the outer-root spacing.
  const MatrixFamily family = family_swallow_tail();
  Vector p0(3);
  p0 << 0.5, 0.01, 0.01;
  NewtonConfig config;
  config.target_eigenvalue = Complex(0.0, 0.0);
  const Matrix A0 = family.evaluate(p0);
  const auto [Q, T] = schur_decompose(A0);
  // The conjugate pair is the one that coalesces into the real double root.
  ClusterSelection initial;
  for (int i = 0; i < 4; ++i) {
    if (std::abs(T.diagonal()(i).imag()) > 0.05) initial.indices.push_back(i);
  }
  ASSERT_EQ(initial.size(), 2);
  const NewtonResult result = newton_iterate(family, p0, 2, initial, config);
  ASSERT_TRUE(result.converged);
  EXPECT_LT(std::abs(result.lambda), 1e-8);
  // The double root at zero forces the last two coefficients to vanish.
  EXPECT_LT(std::abs(result.p_star(1)), 1e-8);
  EXPECT_LT(std::abs(result.p_star(2)), 1e-8);
  EXPECT_NEAR(result.p_star(0).real(), 0.5, 1e-6);
}

TEST(NewtonIterate, DampingStillConverges) {
  const MatrixFamily family = family_example1();
  Vector p0(2);
  p0 << -0.03, 8.99;
  NewtonConfig config;
  config.damping = true;
  const NewtonResult result =
      newton_iterate(family, p0, 2, std::nullopt, config);
  ASSERT_TRUE(result.converged);
  EXPECT_LE(result.iterations.size(), 7u);
  Vector expected(2);
  expected << 0.0, 9.0;
  EXPECT_LT((result.p_star - expected).norm(), 1e-10);
}

TEST(NewtonIterate, SeparationWarningFires) {
  const MatrixFamily family = family_example1();
  Vector p0(2);
  p0 << -0.03, 8.99;
  NewtonConfig config;
  config.separation_warning_threshold = 10.0;
  const NewtonResult result =
      newton_iterate(family, p0, 2, std::nullopt, config);
  ASSERT_TRUE(result.converged);
  ASSERT_GE(result.warnings.size(), 1u);
  EXPECT_NE(result.warnings.front().find("separation"), std::string::npos);
}

TEST(NewtonIterate, IterationLimitReportsNonconvergence) {
  const MatrixFamily family = family_example1();
  Vector p0(2);
  p0 << -0.4, 7.0;
  NewtonConfig config;
  config.max_iterations = 1;
  config.step_tolerance = 1e-15;
  const NewtonResult result =
      newton_iterate(family, p0, 2, std::nullopt, config);
  EXPECT_FALSE(result.converged);
  EXPECT_EQ(result.stop_reason, "iteration limit reached");
  EXPECT_EQ(result.iterations.size(), 1u);
}

TEST(NewtonIterate, RejectsBadArguments) {
  const MatrixFamily family = family_example1();
  Vector p0(2);
  p0 << -0.03, 8.99;
  EXPECT_THROW(
      newton_iterate(family, p0, 1, std::nullopt, default_config()),
      InputError);
  EXPECT_THROW(
      newton_iterate(family, p0, 4, std::nullopt, default_config()),
      InputError);
  EXPECT_THROW(
      newton_iterate(family, Vector::Zero(3), 2, std::nullopt, default_config()),
      InputError);
  EXPECT_THROW(newton_iterate(family, p0, 2, ClusterSelection{{0}},
                              default_config()),
               InputError);
  Vector complex_start(2);
  complex_start << Complex(0.0, 0.5), Complex(9.0, 0.0);
  EXPECT_THROW(newton_iterate(family, complex_start, 2, std::nullopt,
                              default_config()),
               InputError);
}

TEST(NearestDefectiveMatrix, AlreadyDefectiveInputStays) {
  Matrix A(2, 2);
  A << 1, 1,
       0, 1;
  const NewtonResult result =
      nearest_defective_matrix(A, 2, std::nullopt, default_config());
  ASSERT_TRUE(result.converged);
  EXPECT_LT(result.distance, 1e-14);
  EXPECT_LT((result.A_star - A).norm(), 1e-14);
  EXPECT_LT(std::abs(result.lambda - Complex(1.0, 0.0)), 1e-12);
}

TEST(NearestDefectiveMatrix, FrankTwelveDoubleEigenvalue) {
  const Matrix F = matrix_frank(12);
  const NewtonResult result =
      nearest_defective_matrix(F, 2, std::nullopt, default_config());
  ASSERT_TRUE(result.converged);
  EXPECT_NEAR(result.distance, 1.8499e-10, 0.02 * 1.8499e-10);
  EXPECT_LE(result.iterations.size(), 8u);
  EXPECT_EQ(result.delta_A.rows(), 12);
  EXPECT_NEAR((result.A_star - F).norm(), result.distance, 1e-14);
}

TEST(NearestDefectiveMatrix, DerogatoryIdentityIsRankDeficient) {
  const Matrix I2 = Matrix::Identity(2, 2);
  EXPECT_THROW(nearest_defective_matrix(I2, 2, ClusterSelection{{0, 1}},
                                        default_config()),
               RankDeficientError);
  const Matrix I3 = Matrix::Identity(3, 3);
  EXPECT_THROW(nearest_defective_matrix(I3, 2, ClusterSelection{{0, 1}},
                                        default_config()),
               SeparationError);
  EXPECT_THROW(
      nearest_defective_matrix(I3, 2, std::nullopt, default_config()),
      ClusterSelectionError);
}

TEST(NearestDefectiveMatrix, RealModeRequiresARealMatrix) {
  Matrix A(2, 2);
  A << Complex(1, 1), Complex(0, 0),
       Complex(0, 0), Complex(2, 0);
  NewtonConfig config;
  config.real_parameters = true;
  EXPECT_THROW(nearest_defective_matrix(A, 2, std::nullopt, config),
               InputError);
}

}  // namespace
}  // namespace versal

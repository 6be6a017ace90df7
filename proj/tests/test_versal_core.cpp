// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#include "versal/versal_core.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "versal/families.hpp"
#include "versal/invariant_subspace.hpp"
#include "test_support.hpp"

namespace versal {
namespace {

Matrix jordan_block(int d, Complex lambda) {
  Matrix J = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) J(i, i) = lambda;
  for (int i = 0; i + 1 < d; ++i) J(i, i + 1) = 1.0;
  return J;
}

TEST(VersalValues, JordanBlockGivesExactZeros) {
  const VersalValues v = versal_values(jordan_block(3, Complex(-2.0, 0.0)));
  ASSERT_EQ(v.multiplicity(), 3);
  EXPECT_EQ(v.q(0), Complex(-2.0, 0.0));
  EXPECT_EQ(v.q(1), Complex(0.0, 0.0));
  EXPECT_EQ(v.q(2), Complex(0.0, 0.0));
}

TEST(VersalValues, JordanBlockNonRepresentableEigenvalue) {
  const VersalValues v = versal_values(jordan_block(4, Complex(0.3, -0.7)));
  EXPECT_LT(std::abs(v.q(0) - Complex(0.3, -0.7)), 1e-15);
  for (int i = 1; i < 4; ++i) EXPECT_LT(std::abs(v.q(i)), 1e-28);
}

TEST(VersalValues, DiagonalPair) {
  Matrix S = Matrix::Zero(2, 2);
  S(0, 0) = 2.0;
  S(1, 1) = 3.0;
  const VersalValues v = versal_values(S);
  EXPECT_LT(std::abs(v.q(0) - Complex(2.5, 0.0)), 1e-15);
  // ((a - b) / 2)^2
  EXPECT_LT(std::abs(v.q(1) - Complex(0.25, 0.0)), 1e-15);
}

TEST(VersalValues, MatchesRootExpansionOracle) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + trial % 4;
    const Matrix S = testing::random_complex_matrix(rng, d);
    Eigen::ComplexEigenSolver<Matrix> eig(S, false);
    const Vector expected = testing::q_from_roots(eig.eigenvalues());
    const VersalValues v = versal_values(S);
    EXPECT_LT((v.q - expected).norm(), 1e-12 * std::max(1.0, expected.norm()));
  }
}

TEST(Companion, StructureAndCharacteristicPolynomial) {
  std::mt19937 rng(17);
  VersalValues values;
  values.q = Vector(4);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < 4; ++i) values.q(i) = Complex(dist(rng), dist(rng));
  const Matrix C = companion_matrix(values);
  ASSERT_EQ(C.rows(), 4);
  EXPECT_EQ(C(0, 0), Complex(0.0, 0.0));
  EXPECT_EQ(C(1, 0), values.q(1));
  EXPECT_EQ(C(2, 0), values.q(2));
  EXPECT_EQ(C(3, 0), values.q(3));
  EXPECT_EQ(C(0, 1), Complex(1.0, 0.0));
  EXPECT_EQ(C(1, 2), Complex(1.0, 0.0));
  EXPECT_EQ(C(2, 3), Complex(1.0, 0.0));
  for (const Complex z :
       {Complex(0.5, 0.0), Complex(-1.3, 0.4), Complex(0.9, -0.2)}) {
    const Complex det =
        (z * Matrix::Identity(4, 4) - C).determinant();
    const Complex poly = z * z * z * z - values.q(1) * z * z -
                         values.q(2) * z - values.q(3);
    EXPECT_LT(std::abs(det - poly), 1e-12 * std::max(1.0, std::abs(poly)));
  }
}

TEST(Companion, PowerTopRowIdentities) {
  std::mt19937 rng(19);
  VersalValues values;
  values.q = Vector(6);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < 6; ++i) values.q(i) = Complex(dist(rng), dist(rng));
  const Matrix C = companion_matrix(values);
  Matrix power = Matrix::Identity(6, 6);
  for (int i = 1; i <= 6; ++i) {
    // power = C^(i-1): top-row entry at column i-1 is exactly one, and all
    // columns beyond are exactly zero (structural, no rounding).
    EXPECT_EQ(power(0, i - 1), Complex(1.0, 0.0)) << "i = " << i;
    for (int k = i; k < 6; ++k) {
      EXPECT_EQ(power(0, k), Complex(0.0, 0.0)) << "i = " << i << " k = " << k;
    }
    power = power * C;
  }
}

InvariantTriple identity_triple(const Matrix& S) {
  const int d = static_cast<int>(S.rows());
  InvariantTriple t;
  t.S = S;
  t.X = Matrix::Identity(d, d);
  t.Y = t.X;
  std::vector<int> idx(d);
  for (int i = 0; i < d; ++i) idx[i] = i;
  t.cluster = ClusterSelection{idx};
  t.separation = std::numeric_limits<double>::infinity();
  return t;
}

TEST(VersalJacobian, NormalFormFamilyHasIdentityJacobian) {
  const int d = 4;
  const MatrixFamily family = family_versal_form(d);
  Vector p(d);
  p << 0.3, 0.1, -0.2, 0.05;
  const Matrix B = family.evaluate(p);
  const InvariantTriple triple = identity_triple(B);
  const VersalValues values = versal_values(B);
  EXPECT_LT((values.q - p).norm(), 1e-14);
  const VersalLinearization lin =
      versal_jacobian(triple, values, family.derivatives(p));
  EXPECT_FALSE(lin.matrix_mode);
  EXPECT_LT((lin.jacobian - Matrix::Identity(d, d)).norm(), 1e-12);
}

TEST(VersalJacobian, MatchesFiniteDifferencesOnRandomAffineFamilies) {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    const int m = 5;
    const int d = 2 + trial % 3;
    const Matrix A0 = testing::well_separated_matrix(rng, m, 1.0, 0.4);
    std::vector<Matrix> derivs;
    for (int j = 0; j < 2; ++j) {
      derivs.push_back(testing::random_complex_matrix(rng, m));
    }
    const MatrixFamily family = affine_family(A0, derivs, false);
    const Vector p0 = Vector::Zero(2);

    std::vector<int> indices(d);
    for (int i = 0; i < d; ++i) indices[i] = i;
    const auto [Q, T] = schur_decompose(A0);
    const InvariantTriple triple =
        block_diagonalize_schur(Q, T, ClusterSelection{indices});
    const VersalValues values = versal_values(triple.S);
    const VersalLinearization lin =
        versal_jacobian(triple, values, family.derivatives(p0));

    Vector reference(d);
    for (int i = 0; i < d; ++i) reference(i) = T(i, i);
    const Matrix J_fd = testing::fd_jacobian(family, p0, reference);
    EXPECT_LT((lin.jacobian - J_fd).norm(), 1e-5 * std::max(1.0, J_fd.norm()))
        << "trial " << trial;
  }
}

TEST(VersalJacobian, KnownValuesForTheThreeByThreeFamily) {
  const MatrixFamily family = family_example1();
  Vector p0(2);
  p0 << -0.03, 8.99;
  const Matrix A = family.evaluate(p0);
  const auto [Q, T] = schur_decompose(A);
  // The complex-conjugate pair on the Schur diagonal.
  std::vector<int> pair;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(T(i, i).imag()) > 1e-8) pair.push_back(i);
  }
  ASSERT_EQ(pair.size(), 2u);
  const InvariantTriple triple =
      block_diagonalize_schur(Q, T, ClusterSelection{pair});
  const VersalValues values = versal_values(triple.S);
  EXPECT_NEAR(values.q(0).real(), -1.9951820116, 1e-9);
  EXPECT_NEAR(values.q(0).imag(), 0.0, 1e-12);
  EXPECT_NEAR(values.q(1).real(), -0.0333458474, 1e-9);
  EXPECT_NEAR(values.q(1).imag(), 0.0, 1e-12);
  const VersalLinearization lin =
      versal_jacobian(triple, values, family.derivatives(p0));
  EXPECT_NEAR(lin.jacobian(0, 0).real(), -0.1112438981, 1e-9);
  EXPECT_NEAR(lin.jacobian(0, 1).real(), -0.1483848457, 1e-9);
  EXPECT_NEAR(lin.jacobian(1, 0).real(), 1.0008256642, 1e-9);
  EXPECT_NEAR(lin.jacobian(1, 1).real(), 0.3333622754, 1e-9);
  EXPECT_LT(lin.jacobian.imag().norm(), 1e-12);
}

TEST(MatrixGradients, ContractionMatchesJacobianChainRule) {
  std::mt19937 rng(37);
  const int m = 5;
  const Matrix A0 = testing::well_separated_matrix(rng, m, 1.0, 0.4);
  std::vector<Matrix> derivs;
  for (int j = 0; j < 3; ++j) {
    derivs.push_back(testing::random_complex_matrix(rng, m));
  }
  const int d = 3;
  std::vector<int> indices{0, 1, 2};
  const auto [Q, T] = schur_decompose(A0);
  const InvariantTriple triple =
      block_diagonalize_schur(Q, T, ClusterSelection{indices});
  const VersalValues values = versal_values(triple.S);
  const MatrixFamily family = affine_family(A0, derivs, false);
  const VersalLinearization jac =
      versal_jacobian(triple, values, family.derivatives(Vector::Zero(3)));
  const VersalLinearization grad = versal_matrix_gradients(triple, values);
  EXPECT_TRUE(grad.matrix_mode);
  ASSERT_EQ(grad.gradients.size(), static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Complex via_grad = (grad.gradients[i].array() *
                                derivs[j].array()).sum();
      EXPECT_LT(std::abs(via_grad - jac.jacobian(i, j)),
                1e-10 * std::max(1.0, std::abs(jac.jacobian(i, j))))
          << "i = " << i << " j = " << j;
    }
  }
}

TEST(MatrixGradients, FullSpaceTwoByTwoClosedForm) {
  std::mt19937 rng(41);
  const Matrix A = testing::random_real_matrix(rng, 2);
  const auto [Q, T] = schur_decompose(A);
  const InvariantTriple triple =
      block_diagonalize_schur(Q, T, ClusterSelection{{0, 1}});
  const VersalValues values = versal_values(triple.S);
  const VersalLinearization grad = versal_matrix_gradients(triple, values);
  // Mean gradient is I/2; the second coefficient has gradient (A - q1 I)^T.
  EXPECT_LT((grad.gradients[0] - 0.5 * Matrix::Identity(2, 2)).norm(), 1e-13);
  const Matrix expected = (A - values.q(0) * Matrix::Identity(2, 2)).transpose();
  EXPECT_LT((grad.gradients[1] - expected).norm(), 1e-13);
}

}  // namespace
}  // namespace versal

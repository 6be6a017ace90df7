// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#include "versal/jordan_chain.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "versal/errors.hpp"

namespace versal {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTieTol = 1e-8;

// Lowest index whose magnitude is within relative kTieTol of the maximum.
int dominant_index(const Vector& v) {
  double vmax = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    vmax = std::max(vmax, std::abs(v(i)));
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= (1.0 - kTieTol) * vmax) return static_cast<int>(i);
  }
  return 0;
}

Matrix jordan_block(Complex lambda, int d) {
  Matrix J = lambda * Matrix::Identity(d, d);
  for (int i = 0; i + 1 < d; ++i) J(i, i + 1) = 1.0;
  return J;
}

}  // namespace

Complex multiple_eigenvalue(const Matrix& S) {
  if (S.rows() != S.cols() || S.rows() < 1) {
    throw InputError("cluster block must be square and nonempty");
  }
  return S.trace() / static_cast<double>(S.rows());
}

JordanChain jordan_chain(const Matrix& A, const InvariantTriple& triple) {
  const int d = static_cast<int>(triple.S.rows());
  const int m = static_cast<int>(triple.X.rows());
  if (A.rows() != m || A.cols() != m) {
    throw InputError("matrix shape does not match the triple");
  }
  const Complex lambda = multiple_eigenvalue(triple.S);
  const Matrix M = triple.S - lambda * Matrix::Identity(d, d);

  std::vector<Matrix> XP;  // XP[t] = X M^t
  XP.reserve(d);
  XP.push_back(triple.X);
  for (int t = 1; t < d; ++t) XP.push_back(XP.back() * M);

  const Matrix& P = XP[d - 1];
  Vector col_norms(d);
  for (int j = 0; j < d; ++j) col_norms(j) = P.col(j).norm();
  const int head_col = dominant_index(col_norms);
  const double head_norm = col_norms(head_col).real();
  const double head_scale =
      triple.X.norm() * std::pow(1.0 + M.norm(), d - 1);
  if (head_norm <= 1e3 * kEps * head_scale) {
    std::ostringstream msg;
    msg << "chain head power is numerically zero (norm " << head_norm
        << "); the cluster is derogatory or no longer defective";
    throw DegenerateChainError(msg.str(), head_norm);
  }

  Vector head = P.col(head_col) / head_norm;
  const int phase_entry = dominant_index(head);
  const Complex ph = head(phase_entry);
  head *= std::abs(ph) / ph;

  // r_i k = delta_{1 i} with r_i = head^H X M^(d-i) fixes the chain uniquely.
  Matrix R(d, d);
  for (int i = 1; i <= d; ++i) {
    R.row(i - 1) = head.adjoint() * XP[d - i];
  }
  Vector e1 = Vector::Zero(d);
  e1(0) = 1.0;
  Eigen::FullPivLU<Matrix> lu(R);
  if (!lu.isInvertible()) {
    throw DegenerateChainError(
        "chain normalization system is singular; the cluster is derogatory",
        head_norm);
  }
  const Vector k = lu.solve(e1);

  JordanChain chain;
  chain.lambda = lambda;
  chain.U = Matrix(m, d);
  for (int i = 1; i <= d; ++i) chain.U.col(i - 1) = XP[d - i] * k;
  chain.residual = chain_residual(A, chain);
  return chain;
}

double chain_residual(const Matrix& A, const JordanChain& chain) {
  const int d = static_cast<int>(chain.U.cols());
  const Matrix J = jordan_block(chain.lambda, d);
  return (A * chain.U - chain.U * J).norm() / chain.U.norm();
}

double chain_condition(const JordanChain& chain) {
  Eigen::JacobiSVD<Matrix> svd(chain.U);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

}  // namespace versal

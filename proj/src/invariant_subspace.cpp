// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#include "versal/invariant_subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "versal/errors.hpp"

namespace versal {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_cluster(const ClusterSelection& cluster, int m) {
  if (cluster.size() < 1) {
    throw InputError("cluster selection must not be empty");
  }
  std::vector<int> seen;
  for (int idx : cluster.indices) {
    if (idx < 0 || idx >= m) {
      std::ostringstream msg;
      msg << "cluster index " << idx << " out of range for dimension " << m;
      throw InputError(msg.str());
    }
    if (std::find(seen.begin(), seen.end(), idx) != seen.end()) {
      std::ostringstream msg;
      msg << "cluster index " << idx << " repeated";
      throw InputError(msg.str());
    }
    seen.push_back(idx);
  }
}

// Unitary swap of the adjacent diagonal entries k, k+1 of the triangular T,
// accumulating the rotation into Q.
void swap_adjacent(Matrix& Q, Matrix& T, int k) {
  const Complex a = T(k, k);
  const Complex b = T(k, k + 1);
  const Complex c = T(k + 1, k + 1);
  if (a == c) {
    if (b == Complex(0.0, 0.0)) return;  // identical decoupled entries
    std::ostringstream msg;
    msg << "eigenvalues at positions " << k << " and " << k + 1
        << " are numerically inseparable (equal values, coupled)";
    throw InseparableClusterError(msg.str(), k, k + 1);
  }
  // First column of the rotation is the unit eigenvector (b, c - a) of the
  // 2x2 block for eigenvalue c.
  const double norm = std::sqrt(std::norm(b) + std::norm(c - a));
  const Complex g0 = b / norm;
  const Complex g1 = (c - a) / norm;
  Matrix G(2, 2);
  G << g0, -std::conj(g1),
       g1, std::conj(g0);
  T.block(k, 0, 2, T.cols()) = G.adjoint() * T.block(k, 0, 2, T.cols());
  T.block(0, k, T.rows(), 2) = T.block(0, k, T.rows(), 2) * G;
  Q.block(0, k, Q.rows(), 2) = Q.block(0, k, Q.rows(), 2) * G;
  T(k + 1, k) = Complex(0.0, 0.0);
}

// Column-by-column back-substitution for S11 Z - Z S22 = C with S11, S22
// upper triangular.
Matrix solve_triangular_sylvester(const Matrix& S11, const Matrix& S22,
                                  const Matrix& C) {
  const int d = static_cast<int>(S11.rows());
  const int k = static_cast<int>(S22.rows());
  Matrix Z = Matrix::Zero(d, k);
  const double scale = S11.norm() + S22.norm();
  for (int j = 0; j < k; ++j) {
    Vector rhs = C.col(j);
    for (int i = 0; i < j; ++i) rhs += Z.col(i) * S22(i, j);
    Matrix shifted = S11 - S22(j, j) * Matrix::Identity(d, d);
    double min_diag = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) {
      min_diag = std::min(min_diag, std::abs(shifted(i, i)));
    }
    if (min_diag <= 1e3 * kEps * std::max(1.0, scale)) {
      const double sep = separation_estimate(S11, S22);
      std::ostringstream msg;
      msg << "cluster block and complement share an eigenvalue "
          << "(separation estimate " << sep << "); the cluster cannot be "
          << "decoupled, consider including the shared eigenvalue";
      throw SeparationError(msg.str(), sep);
    }
    Z.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return Z;
}

}  // namespace

std::pair<Matrix, Matrix> schur_decompose(const Matrix& A) {
  if (A.rows() != A.cols()) throw InputError("matrix must be square");
  if (!A.allFinite()) throw InputError("matrix has non-finite entries");
  Eigen::ComplexSchur<Matrix> schur(A, /*computeU=*/true);
  if (schur.info() != Eigen::Success) {
    throw Error("Schur decomposition failed to converge");
  }
  return {schur.matrixU(), schur.matrixT()};
}

std::pair<Matrix, Matrix> reorder_cluster(const Matrix& Q, const Matrix& T,
                                          const ClusterSelection& cluster) {
  const int m = static_cast<int>(T.rows());
  check_cluster(cluster, m);
  Matrix Qr = Q;
  Matrix Tr = T;
  std::vector<int> pos = cluster.indices;
  for (size_t target = 0; target < pos.size(); ++target) {
    int cur = pos[target];
    while (cur > static_cast<int>(target)) {
      swap_adjacent(Qr, Tr, cur - 1);
      for (size_t i = target + 1; i < pos.size(); ++i) {
        if (pos[i] == cur - 1) pos[i] = cur;
      }
      --cur;
    }
    pos[target] = static_cast<int>(target);
  }
  return {Qr, Tr};
}

InvariantTriple block_diagonalize(const Matrix& A,
                                  const ClusterSelection& cluster) {
  auto [Q, T] = schur_decompose(A);
  return block_diagonalize_schur(Q, T, cluster);
}

InvariantTriple block_diagonalize_schur(const Matrix& Q, const Matrix& T,
                                        const ClusterSelection& cluster) {
  const int m = static_cast<int>(T.rows());
  check_cluster(cluster, m);
  const int d = cluster.size();
  auto [Qr, Tr] = reorder_cluster(Q, T, cluster);

  InvariantTriple t;
  t.cluster = cluster;
  t.S = Tr.topLeftCorner(d, d);
  if (d == m) {
    t.X = Qr;
    t.Y = Qr;
    t.separation = std::numeric_limits<double>::infinity();
  } else {
    const Matrix S22 = Tr.bottomRightCorner(m - d, m - d);
    const Matrix S12 = Tr.topRightCorner(d, m - d);
    const Matrix Z = solve_triangular_sylvester(t.S, S22, -S12);
    const Matrix Q1 = Qr.leftCols(d);
    const Matrix Q2 = Qr.rightCols(m - d);
    t.X = Q1;
    t.Y = Q1 - Q2 * Z.adjoint();
    t.separation = separation_estimate(t.S, S22);
  }
  const double biorth =
      (t.Y.adjoint() * t.X - Matrix::Identity(d, d)).norm();
  if (biorth > 1e-8 * std::max(1.0, t.Y.norm())) {
    throw Error("invariant pair lost bi-orthogonality; the cluster is too "
                "ill-separated to decouple reliably");
  }
  return t;
}

double separation_estimate(const Matrix& S, const Matrix& Sc) {
  const int d = static_cast<int>(S.rows());
  const int k = static_cast<int>(Sc.rows());
  if (d == 0 || k == 0) return std::numeric_limits<double>::infinity();
  Matrix K = Matrix::Zero(d * k, d * k);
  // vec(S Z - Z Sc) = (I (x) S - Sc^T (x) I) vec(Z), column-major vec.
  for (int j = 0; j < k; ++j) {
    K.block(j * d, j * d, d, d) += S;
    for (int i = 0; i < k; ++i) {
      K.block(j * d, i * d, d, d) -=
          Sc(i, j) * Matrix::Identity(d, d);
    }
  }
  Eigen::JacobiSVD<Matrix> svd(K);
  return svd.singularValues()(d * k - 1);
}

InvariantTriple diagonalize_cluster(const Matrix& A,
                                    const ClusterSelection& cluster) {
  const int m = static_cast<int>(A.rows());
  check_cluster(cluster, m);
  const int d = cluster.size();
  Eigen::ComplexEigenSolver<Matrix> eig(A, /*computeEigenvectors=*/true);
  if (eig.info() != Eigen::Success) {
    throw Error("eigendecomposition failed to converge");
  }
  const Vector lambdas = eig.eigenvalues();
  const double scale = std::max(1.0, A.norm());
  for (int a = 0; a < d; ++a) {
    const int ia = cluster.indices[a];
    for (int b = 0; b < m; ++b) {
      if (b == ia) continue;
      if (std::abs(lambdas(ia) - lambdas(b)) <= 1e3 * kEps * scale) {
        std::ostringstream msg;
        msg << "selected eigenvalue at position " << ia
            << " is numerically repeated; use the Schur-based path for "
            << "clustered eigenvalues";
        throw ClusterSelectionError(msg.str());
      }
    }
  }
  // Rows of V^{-1} are the bi-orthogonal left eigenvectors.
  const Matrix V = eig.eigenvectors();
  Eigen::FullPivLU<Matrix> lu(V);
  if (!lu.isInvertible()) {
    throw ClusterSelectionError(
        "eigenvector basis is numerically singular; use the Schur-based path");
  }
  const Matrix W = lu.inverse();
  InvariantTriple t;
  t.cluster = cluster;
  t.S = Matrix::Zero(d, d);
  t.X = Matrix(m, d);
  t.Y = Matrix(m, d);
  for (int a = 0; a < d; ++a) {
    const int ia = cluster.indices[a];
    t.S(a, a) = lambdas(ia);
    t.X.col(a) = V.col(ia);
    t.Y.col(a) = W.row(ia).adjoint();
  }
  Vector rest(m - d);
  {
    int r = 0;
    for (int b = 0; b < m; ++b) {
      if (std::find(cluster.indices.begin(), cluster.indices.end(), b) ==
          cluster.indices.end()) {
        rest(r++) = lambdas(b);
      }
    }
  }
  if (m == d) {
    t.separation = std::numeric_limits<double>::infinity();
  } else {
    Matrix Sc = Matrix::Zero(m - d, m - d);
    for (int b = 0; b < m - d; ++b) Sc(b, b) = rest(b);
    t.separation = separation_estimate(t.S, Sc);
  }
  const double biorth =
      (t.Y.adjoint() * t.X - Matrix::Identity(d, d)).norm();
  if (biorth > 1e-8 * std::max(1.0, t.Y.norm() * t.X.norm())) {
    throw Error("eigenvector pair lost bi-orthogonality; use the Schur-based "
                "path for this cluster");
  }
  return t;
}

TripleResiduals triple_residuals(const Matrix& A, const InvariantTriple& t) {
  const double scale = std::max(1.0, A.norm());
  TripleResiduals r;
  r.right = (A * t.X - t.X * t.S).norm() / scale;
  r.left = (t.Y.adjoint() * A - t.S * t.Y.adjoint()).norm() / scale;
  r.biorthogonal =
      (t.Y.adjoint() * t.X - Matrix::Identity(t.S.rows(), t.S.cols())).norm();
  return r;
}

}  // namespace versal

// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#include "versal/diag_approx.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "versal/errors.hpp"
#include "versal/invariant_subspace.hpp"
#include "versal/versal_core.hpp"

namespace versal {

std::vector<EigenSensitivity> eigen_sensitivities(const MatrixFamily& family,
                                                  const Vector& p0,
                                                  const ClusterSelection& cluster) {
  const Matrix A = family.evaluate(p0);
  const InvariantTriple triple = diagonalize_cluster(A, cluster);
  const std::vector<Matrix> dA = family.derivatives(p0);
  const int d = cluster.size();
  const int n = family.params();

  std::vector<EigenSensitivity> out(d);
  for (int a = 0; a < d; ++a) {
    out[a].lambda = triple.S(a, a);
    out[a].gradient = Vector(n);
    for (int j = 0; j < n; ++j) {
      out[a].gradient(j) =
          (triple.Y.col(a).adjoint() * dA[j] * triple.X.col(a))(0, 0);
    }
  }
  return out;
}

VersalLinearization versal_jacobian_diag(const std::vector<EigenSensitivity>& sens,
                                         const InvariantTriple& triple,
                                         const VersalValues& values) {
  const int d = static_cast<int>(sens.size());
  if (d < 1) throw InputError("sensitivity list must be nonempty");
  if (values.multiplicity() != d || triple.S.rows() != d) {
    throw InputError("sensitivities, triple and coefficients disagree on size");
  }
  const int n = static_cast<int>(sens[0].gradient.size());
  for (const auto& s : sens) {
    if (s.gradient.size() != n) {
      throw InputError("sensitivity gradients have inconsistent sizes");
    }
  }

  // Shifted eigenvalues take the place of the cluster block powers.
  Vector mu(d);
  for (int a = 0; a < d; ++a) mu(a) = sens[a].lambda - values.q(0);
  const Matrix C = companion_matrix(values);
  std::vector<Matrix> Cp;
  Cp.push_back(Matrix::Identity(d, d));
  for (int t = 1; t < d; ++t) Cp.push_back(Cp.back() * C);

  VersalLinearization lin;
  lin.values = values;
  lin.matrix_mode = false;
  lin.jacobian = Matrix::Zero(d, n);
  for (int j = 0; j < n; ++j) {
    Complex mean(0.0, 0.0);
    for (int a = 0; a < d; ++a) mean += sens[a].gradient(j);
    lin.jacobian(0, j) = mean / static_cast<double>(d);
    for (int i = 2; i <= d; ++i) {
      Complex v(0.0, 0.0);
      for (int a = 0; a < d; ++a) {
        v += std::pow(mu(a), i - 1) * sens[a].gradient(j);
      }
      v -= Cp[i - 1].trace() * lin.jacobian(0, j);
      for (int k = 2; k < i; ++k) {
        v -= Cp[i - 1](0, k - 1) * lin.jacobian(k - 1, j);
      }
      lin.jacobian(i - 1, j) = v;
    }
  }
  return lin;
}

namespace {

Vector crossing_step(const EigenSensitivity& first,
                     const EigenSensitivity& second, const Vector& p0,
                     double gap_factor) {
  const Vector g = second.gradient - first.gradient;
  const double gnorm2 = g.squaredNorm();
  const double ref = first.gradient.norm() + second.gradient.norm();
  if (gnorm2 <= 1e-28 * std::max(1.0, ref * ref)) {
    throw Error(
        "the two eigenvalues have equal gradients; their gap has no "
        "first-order control along the parameters");
  }
  const Complex delta = 0.5 * (second.lambda - first.lambda);
  return p0 - g.conjugate() * (gap_factor * delta) / gnorm2;
}

}  // namespace

Vector nearest_double_step(const EigenSensitivity& first,
                           const EigenSensitivity& second, const Vector& p0) {
  return crossing_step(first, second, p0, 1.0);
}

Vector naive_crossing_step(const EigenSensitivity& first,
                           const EigenSensitivity& second, const Vector& p0) {
  return crossing_step(first, second, p0, 2.0);
}

}  // namespace versal

// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#include "versal/versal_core.hpp"

#include <vector>

#include "versal/errors.hpp"

namespace versal {

namespace {

void check_block(const Matrix& S) {
  if (S.rows() != S.cols() || S.rows() < 1) {
    throw InputError("cluster block must be square and nonempty");
  }
  if (!S.allFinite()) throw InputError("cluster block has non-finite entries");
}

// Powers M^0 .. M^(count-1).
std::vector<Matrix> powers(const Matrix& M, int count) {
  std::vector<Matrix> out;
  out.reserve(count);
  out.push_back(Matrix::Identity(M.rows(), M.cols()));
  for (int t = 1; t < count; ++t) out.push_back(out.back() * M);
  return out;
}

void check_triple_dims(const InvariantTriple& triple, const VersalValues& values) {
  const int d = values.multiplicity();
  if (triple.S.rows() != d || triple.S.cols() != d) {
    throw InputError("triple block size does not match coefficient count");
  }
  if (triple.X.cols() != d || triple.Y.cols() != d ||
      triple.X.rows() != triple.Y.rows()) {
    throw InputError("triple basis shapes are inconsistent");
  }
}

}  // namespace

VersalValues versal_values(const Matrix& S) {
  check_block(S);
  const int d = static_cast<int>(S.rows());
  const Complex q1 = S.trace() / static_cast<double>(d);
  VersalValues out;
  out.q = Vector::Zero(d);
  out.q(0) = q1;
  if (d == 1) return out;

  const Matrix M = S - q1 * Matrix::Identity(d, d);
  // Newton's identities: power sums of the shifted block to elementary
  // symmetric functions; exact when the shifted block is nilpotent.
  std::vector<Complex> s(d + 1, Complex(0.0, 0.0));
  Matrix Mk = M;
  for (int k = 1; k <= d; ++k) {
    s[k] = Mk.trace();
    if (k < d) Mk = Mk * M;
  }
  std::vector<Complex> e(d + 1, Complex(0.0, 0.0));
  e[0] = Complex(1.0, 0.0);
  for (int k = 1; k <= d; ++k) {
    Complex acc(0.0, 0.0);
    double sign = 1.0;
    for (int j = 1; j <= k; ++j) {
      acc += sign * e[k - j] * s[j];
      sign = -sign;
    }
    e[k] = acc / static_cast<double>(k);
  }
  for (int i = 2; i <= d; ++i) {
    const double sign = (i % 2 == 0) ? -1.0 : 1.0;
    out.q(i - 1) = sign * e[i];
  }
  return out;
}

Matrix companion_matrix(const VersalValues& values) {
  const int d = values.multiplicity();
  if (d < 1) throw InputError("coefficient vector must be nonempty");
  Matrix C = Matrix::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) C(i, i + 1) = 1.0;
  for (int i = 1; i < d; ++i) C(i, 0) = values.q(i);
  return C;
}

VersalLinearization versal_jacobian(const InvariantTriple& triple,
                                    const VersalValues& values,
                                    const std::vector<Matrix>& dA) {
  check_triple_dims(triple, values);
  const int d = values.multiplicity();
  const int n = static_cast<int>(dA.size());
  const int m = static_cast<int>(triple.X.rows());
  for (const Matrix& D : dA) {
    if (D.rows() != m || D.cols() != m) {
      throw InputError("family direction has wrong shape");
    }
  }

  const Matrix M =
      triple.S - values.q(0) * Matrix::Identity(d, d);
  const std::vector<Matrix> Mp = powers(M, d);
  const std::vector<Matrix> Cp = powers(companion_matrix(values), d);

  VersalLinearization lin;
  lin.values = values;
  lin.matrix_mode = false;
  lin.jacobian = Matrix::Zero(d, n);
  for (int j = 0; j < n; ++j) {
    const Matrix W = triple.Y.adjoint() * dA[j] * triple.X;
    lin.jacobian(0, j) = W.trace() / static_cast<double>(d);
    for (int i = 2; i <= d; ++i) {
      Complex v = (Mp[i - 1] * W).trace();
      v -= Cp[i - 1].trace() * lin.jacobian(0, j);
      for (int k = 2; k < i; ++k) {
        v -= Cp[i - 1](0, k - 1) * lin.jacobian(k - 1, j);
      }
      lin.jacobian(i - 1, j) = v;
    }
  }
  return lin;
}

VersalLinearization versal_matrix_gradients(const InvariantTriple& triple,
                                            const VersalValues& values) {
  check_triple_dims(triple, values);
  const int d = values.multiplicity();

  const Matrix M =
      triple.S - values.q(0) * Matrix::Identity(d, d);
  const std::vector<Matrix> Mp = powers(M, d);
  const std::vector<Matrix> Cp = powers(companion_matrix(values), d);

  VersalLinearization lin;
  lin.values = values;
  lin.matrix_mode = true;
  lin.gradients.reserve(d);
  lin.gradients.push_back(
      (triple.X * triple.Y.adjoint()).transpose() / static_cast<double>(d));
  for (int i = 2; i <= d; ++i) {
    Matrix G = (triple.X * Mp[i - 1] * triple.Y.adjoint()).transpose();
    G -= Cp[i - 1].trace() * lin.gradients[0];
    for (int k = 2; k < i; ++k) {
      G -= Cp[i - 1](0, k - 1) * lin.gradients[k - 1];
    }
    lin.gradients.push_back(G);
  }
  return lin;
}

}  // namespace versal

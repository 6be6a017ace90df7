// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "versal/types.hpp"

namespace versal {

// Smooth matrix family A(p): m x m matrices over an n-dimensional real or
// complex parameter domain. Analytic derivatives are optional; when absent,
// derivative() falls back to central finite differences.
class MatrixFamily {
 public:
  using Evaluator = std::function<Matrix(const Vector&)>;
  using Derivative = std::function<Matrix(const Vector&, int)>;

  MatrixFamily(int rows, int params, Evaluator evaluate,
               Derivative derivative = nullptr, bool real_domain = true);

  int rows() const { return rows_; }
  int params() const { return params_; }
  bool real_domain() const { return real_domain_; }
  bool has_analytic_derivative() const { return derivative_ != nullptr; }

  Matrix evaluate(const Vector& p) const;
  Matrix derivative(const Vector& p, int j) const;
  std::vector<Matrix> derivatives(const Vector& p) const;

 private:
  int rows_;
  int params_;
  Evaluator evaluate_;
  Derivative derivative_;
  bool real_domain_;
};

// Central finite-difference derivative with step h = sqrt(eps) * (1 + |p_j|).
Matrix finite_difference_derivative(const MatrixFamily& family, const Vector& p,
                                    int j);

// Affine family A0 + sum_j p_j D_j with analytic derivatives D_j.
MatrixFamily affine_family(const Matrix& A0, const std::vector<Matrix>& derivs,
                           bool real_domain = true);

// 4x4 family whose characteristic polynomial is z^4 - p1 z^2 - p2 z - p3;
// the origin carries a single 4x4 Jordan block at zero.
MatrixFamily family_swallow_tail();

// 3x3 two-parameter real family with a double eigenvalue -2 at p = (0, 9).
MatrixFamily family_example1();

// d x d family in local normal form: p1 on the diagonal, ones on the
// superdiagonal, (p2, ..., pd) below the top of the first column.
MatrixFamily family_versal_form(int d);

// 3x3 test matrix: a nilpotent-like pencil with superdiagonal (1, delta)
// perturbed by eps * E for a fixed integer matrix E.
Matrix matrix_example2(double eps, double delta);

// Frank matrix of order n: upper Hessenberg, det = 1, ill-conditioned small
// eigenvalues.
Matrix matrix_frank(int n);

// JSON (de)serialization. Families load from either the affine schema
//   {"m","n","domain","A0","derivs"}
// or the finite-difference stencil schema
//   {"m","n","domain","p0","fd_step","A_center","A_plus","A_minus"}
// which yields the local affine model around p0. Complex entries serialize
// as [re, im]; bare numbers are accepted on input. Matrices load from
//   {"m","entries"}.
MatrixFamily load_family_json(const std::string& text);
MatrixFamily load_family_file(const std::string& path);
std::string family_to_json(const Matrix& A0, const std::vector<Matrix>& derivs,
                           bool real_domain);
Matrix load_matrix_json(const std::string& text);
Matrix load_matrix_file(const std::string& path);
std::string matrix_to_json(const Matrix& A);

}  // namespace versal

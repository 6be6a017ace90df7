// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace versal {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Positions of the selected eigenvalues, 0-based, into a Schur diagonal or
// eigenvalue list. Distinct, order preserved as given.
struct ClusterSelection {
  std::vector<int> indices;

  int size() const { return static_cast<int>(indices.size()); }
};

// Right/left invariant subspace pair for an eigenvalue cluster:
//   A X = X S,  Y^H A = S Y^H,  Y^H X = I_d.
// S is the d x d restriction of A to the cluster subspace. `separation`
// estimates the gap between the cluster block and the complementary block
// (+inf when the cluster is the whole spectrum).
struct InvariantTriple {
  Matrix S;
  Matrix X;
  Matrix Y;
  ClusterSelection cluster;
  double separation = 0.0;
};

// Residuals of the defining equations, each relative to ||A||_F.
struct TripleResiduals {
  double right;      // ||A X - X S|| / ||A||
  double left;       // ||Y^H A - S Y^H|| / ||A||
  double biorthogonal;  // ||Y^H X - I||
};

// Local normal-form coefficients of the cluster: q(0) is the mean eigenvalue,
// q(1..d-1) are the coefficients whose simultaneous vanishing makes the mean
// an eigenvalue of multiplicity d with a single Jordan block.
struct VersalValues {
  Vector q;

  int multiplicity() const { return static_cast<int>(q.size()); }
};

// First-order model of the normal-form coefficients around the current point.
// Exactly one of `jacobian` (family mode, rows q_i, columns parameters) or
// `gradients` (matrix mode, gradients[i] contracts bilinearly with a matrix
// perturbation: dq_i = sum_jk gradients[i](j,k) dA(j,k)) is populated.
struct VersalLinearization {
  VersalValues values;
  Matrix jacobian;                // d x n, family mode
  std::vector<Matrix> gradients;  // d entries of m x m, matrix mode
  bool matrix_mode = false;

  int multiplicity() const { return values.multiplicity(); }
};

// Jordan chain u_1, ..., u_d for eigenvalue `lambda`: A u_1 = lambda u_1 and
// A u_i = lambda u_i + u_{i-1}. Columns of U are the chain vectors, ||u_1|| = 1,
// phase fixed so the largest-magnitude entry of u_1 is real positive.
// `residual` is ||A U - U J||_F / ||U||_F against the matrix the chain was
// computed from.
struct JordanChain {
  Complex lambda;
  Matrix U;
  double residual = 0.0;
};

enum class SolveStrategy {
  MinimumNorm,         // least-squares minimum-norm step from the current point
  NearestToReference,  // solution nearest to the reference point (the start)
};

struct NewtonConfig {
  int max_iterations = 20;
  double step_tolerance = 1e-12;  // relative to max(1, ||p0||)
  SolveStrategy strategy = SolveStrategy::NearestToReference;
  bool real_parameters = false;
  std::optional<Complex> target_eigenvalue;
  // Below this, the cluster/complement separation triggers a warning.
  // Negative means auto: 1e3 * eps * ||A0||_F.
  double separation_warning_threshold = -1.0;
  bool damping = false;  // halve steps that increase ||q||
};

struct IterationRecord {
  Vector p;            // point after the step (family mode; empty in matrix mode)
  Vector q;            // coefficients at the point the step was computed from
  double step_norm = 0.0;
  std::vector<int> cluster;
  double separation = 0.0;
  Complex lambda_app;  // first-order prediction of the multiple eigenvalue
};

struct NewtonResult {
  bool converged = false;
  Vector p_star;       // family mode
  Matrix A_star;       // matrix mode: nearest matrix found
  Matrix delta_A;      // matrix mode: A_star - A0
  double distance = 0.0;
  Complex lambda;
  std::optional<JordanChain> chain;
  std::vector<IterationRecord> iterations;
  std::vector<std::string> warnings;
  std::string stop_reason;
};

}  // namespace versal

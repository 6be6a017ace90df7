// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#pragma once

#include <vector>

#include "versal/families.hpp"
#include "versal/types.hpp"

namespace versal {

// Simple eigenvalue with its parameter gradient d lambda / d p_j =
// y^H (dA/dp_j) x for the bi-normalized eigenvector pair.
struct EigenSensitivity {
  Complex lambda;
  Vector gradient;
};

// Sensitivities of the selected simple eigenvalues of A(p0). Cluster indices
// refer to the dense eigensolver's eigenvalue order.
std::vector<EigenSensitivity> eigen_sensitivities(const MatrixFamily& family,
                                                  const Vector& p0,
                                                  const ClusterSelection& cluster);

// Jacobian of the normal-form coefficients built directly from eigenvalue
// sensitivities (diagonal cluster block), bypassing the Schur path. Agrees
// with versal_jacobian on the same cluster for simple eigenvalues.
VersalLinearization versal_jacobian_diag(const std::vector<EigenSensitivity>& sens,
                                         const InvariantTriple& triple,
                                         const VersalValues& values);

// First-order step from p0 to the nearest point where the two eigenvalues
// coalesce: p = p0 - conj(g) * delta / ||g||^2 with g the gradient difference
// and delta half the eigenvalue gap. Throws Error when the gradients agree
// (no first-order control over the gap).
Vector nearest_double_step(const EigenSensitivity& first,
                           const EigenSensitivity& second, const Vector& p0);

// The naive estimate that moves each eigenvalue onto the other's position;
// exactly twice as far from p0 as nearest_double_step.
Vector naive_crossing_step(const EigenSensitivity& first,
                           const EigenSensitivity& second, const Vector& p0);

}  // namespace versal

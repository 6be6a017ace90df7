// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#pragma once

#include <optional>

#include "versal/families.hpp"
#include "versal/types.hpp"

namespace versal {

// Linear model of the stratum equations at the current point: M * step = rhs.
// Unknowns are the n parameters (family mode) or the m*m entries of the
// perturbation in column-major order (matrix mode). When `real_unknowns` is
// set the rows have been projected/split to real equations and M, rhs carry
// zero imaginary parts.
struct LinearSystem {
  Matrix M;
  Vector rhs;
  bool real_unknowns = false;
};

// Rows: one per vanishing coefficient q_i (i >= 2), plus an optional row
// pinning the predicted eigenvalue to config.target_eigenvalue. In real mode
// a row whose coefficients and rhs are real (relative to the row scale)
// contributes one real equation, otherwise its real and imaginary parts
// contribute separately.
LinearSystem assemble_linear_system(const VersalLinearization& lin,
                                    const NewtonConfig& config);

// Solves M * step = rhs. MinimumNorm returns the least-squares minimum-norm
// step; NearestToReference returns the solution closest to
// current + reference_shift, i.e. step = r + pinv(M) (rhs - M r) with
// r = reference_shift. Throws RankDeficientError when M loses row rank.
Vector solve_step(const LinearSystem& system, const Vector& reference_shift,
                  SolveStrategy strategy);

// First-order prediction of the multiple eigenvalue after the step:
// q(0) + <dq(0), step>.
Complex approximate_eigenvalue(const VersalLinearization& lin,
                               const Vector& step);

// d eigenvalue positions nearest to lambda_app, ties to the lower index.
// In real mode with a real target the selection is closed under conjugation
// (complex eigenvalues are admitted in conjugate pairs); throws
// ClusterSelectionError if no admissible subset exists.
ClusterSelection select_cluster(const Vector& eigenvalues, Complex lambda_app,
                                int d, bool real_mode);

// Newton iteration on the vanishing of q(1..d-1) over family parameters.
// The initial cluster is auto-selected when absent (minimal eigenvalue
// spread; for m <= 8 every admissible d-subset is tried and the smallest
// one-step norm wins). The cluster re-selects each iteration around the
// predicted eigenvalue. Real-domain families always iterate in real mode,
// regardless of config.real_parameters.
NewtonResult newton_iterate(const MatrixFamily& family, const Vector& p0,
                            int multiplicity,
                            const std::optional<ClusterSelection>& cluster,
                            const NewtonConfig& config);

// Same iteration over all matrix entries: finds the nearest matrix (in the
// Frobenius sense, via nearest-to-reference steps) with an eigenvalue of
// the requested multiplicity.
NewtonResult nearest_defective_matrix(const Matrix& A0, int multiplicity,
                                      const std::optional<ClusterSelection>& cluster,
                                      const NewtonConfig& config);

}  // namespace versal

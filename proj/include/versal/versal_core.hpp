// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#pragma once

#include <vector>

#include "versal/types.hpp"

namespace versal {

// Normal-form coefficients of the d x d cluster block S:
//   q(0) = trace(S) / d, and q(1..d-1) are minus the non-leading coefficients
//   of det(z I - (S - q(0) I)) = z^d - q(1) z^(d-2) - ... - q(d-1).
// Computed from trace power sums, exact for exact Jordan blocks.
VersalValues versal_values(const Matrix& S);

// Companion-form matrix of the coefficients: ones on the superdiagonal,
// first column (0, q(1), ..., q(d-1))^T. Nilpotent iff all q(1..) vanish.
Matrix companion_matrix(const VersalValues& values);

// Derivatives of the coefficients along family directions dA[j] at the
// current point, via the trace recurrence on the invariant triple.
// Row 0 is dq(0)/dp_j = trace(Y^H dA[j] X) / d; subsequent rows subtract the
// companion-power corrections of the lower rows.
VersalLinearization versal_jacobian(const InvariantTriple& triple,
                                    const VersalValues& values,
                                    const std::vector<Matrix>& dA);

// Matrix-space gradients of the coefficients: gradients[i] contracts
// bilinearly (no conjugation) with a perturbation dA to give dq(i).
VersalLinearization versal_matrix_gradients(const InvariantTriple& triple,
                                            const VersalValues& values);

}  // namespace versal

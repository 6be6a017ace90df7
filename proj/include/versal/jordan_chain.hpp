// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#pragma once

#include "versal/types.hpp"

namespace versal {

// Multiple eigenvalue of a (near-)defective cluster block: trace(S) / d.
Complex multiple_eigenvalue(const Matrix& S);

// Jordan chain of length d for the cluster described by the triple, against
// the matrix A the triple was computed from. The chain head is the dominant
// column of X (S - lambda I)^(d-1), normalized to unit length with its
// largest-magnitude entry real positive; ties resolve to the lowest index
// within relative 1e-8. Throws DegenerateChainError when the selecting power
// is numerically zero (derogatory structure).
JordanChain jordan_chain(const Matrix& A, const InvariantTriple& triple);

// ||A U - U J_lambda||_F / ||U||_F for a d-column chain U.
double chain_residual(const Matrix& A, const JordanChain& chain);

// Spectral condition number of the chain basis U.
double chain_condition(const JordanChain& chain);

}  // namespace versal

// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#pragma once

#include <utility>

#include "versal/types.hpp"

namespace versal {

// Complex Schur decomposition A = Q T Q^H with T upper triangular.
// Returns (Q, T).
std::pair<Matrix, Matrix> schur_decompose(const Matrix& A);

// Reorders the Schur form so the selected eigenvalues occupy the leading
// diagonal positions, preserving their relative order. Unitary similarity:
// Q' T' Q'^H = Q T Q^H. Throws InseparableClusterError if two numerically
// identical coupled eigenvalues must be swapped.
std::pair<Matrix, Matrix> reorder_cluster(const Matrix& Q, const Matrix& T,
                                          const ClusterSelection& cluster);

// Invariant triple (S, X, Y) for the selected cluster: A X = X S,
// Y^H A = S Y^H, Y^H X = I. Decouples the reordered Schur form with a
// triangular Sylvester solve. Throws SeparationError when the cluster and
// its complement share an eigenvalue.
InvariantTriple block_diagonalize(const Matrix& A,
                                  const ClusterSelection& cluster);

// Same, from a precomputed Schur form (Q, T) of A.
InvariantTriple block_diagonalize_schur(const Matrix& Q, const Matrix& T,
                                        const ClusterSelection& cluster);

// Smallest singular value of Z -> S Z - Z Sc, the separation between the
// spectra of S and Sc. Returns +inf if either block is empty.
double separation_estimate(const Matrix& S, const Matrix& Sc);

// Eigenvector-based triple for a cluster of simple eigenvalues: S is
// diagonal, columns of X are right eigenvectors, Y^H X = I. Cluster indices
// refer to the eigensolver's eigenvalue order. Throws ClusterSelectionError
// when a selected eigenvalue is (numerically) repeated.
InvariantTriple diagonalize_cluster(const Matrix& A,
                                    const ClusterSelection& cluster);

// Relative residuals of the triple equations against A.
TripleResiduals triple_residuals(const Matrix& A, const InvariantTriple& t);

}  // namespace versal

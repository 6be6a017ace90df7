// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#pragma once

#include <stdexcept>
#include <string>

namespace versal {

// Base class for all numerical/structural failures raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad user input (malformed JSON, inconsistent dimensions, invalid flags).
struct InputError : Error {
  explicit InputError(const std::string& what) : Error(what) {}
};

// Adjacent eigenvalues could not be swapped in the Schur form because they
// are numerically identical with nonzero coupling.
struct InseparableClusterError : Error {
  InseparableClusterError(const std::string& what, int first, int second)
      : Error(what), first_index(first), second_index(second) {}
  int first_index;
  int second_index;
};

// The cluster block and its complement share an eigenvalue; the decoupling
// Sylvester equation is singular.
struct SeparationError : Error {
  SeparationError(const std::string& what, double separation)
      : Error(what), separation_estimate(separation) {}
  double separation_estimate;
};

// The linearized stratum equations lost row rank; the point is likely on a
// more degenerate stratum (higher multiplicity or a derogatory eigenvalue).
struct RankDeficientError : Error {
  RankDeficientError(const std::string& what, int rank, int rows)
      : Error(what), rank(rank), rows(rows) {}
  int rank;
  int rows;
};

// The Jordan chain construction collapsed: the matrix power selecting the
// chain head is numerically zero (derogatory structure or a lost cluster).
struct DegenerateChainError : Error {
  DegenerateChainError(const std::string& what, double norm)
      : Error(what), head_norm(norm) {}
  double head_norm;
};

// No admissible cluster could be selected (e.g. conjugation-closed subset of
// the requested size does not exist in real mode).
struct ClusterSelectionError : Error {
  explicit ClusterSelectionError(const std::string& what) : Error(what) {}
};

}  // namespace versal

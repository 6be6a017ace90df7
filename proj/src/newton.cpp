// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#include "versal/newton.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/SVD>

#include "versal/errors.hpp"
#include "versal/families.hpp"
#include "versal/invariant_subspace.hpp"
#include "versal/jordan_chain.hpp"
#include "versal/versal_core.hpp"

namespace versal {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kRealRowTol = 1e-8;
constexpr double kPairTol = 1e-8;

// One row of the linear model: coefficient vector over the unknowns.
Vector linearization_row(const VersalLinearization& lin, int i) {
  if (lin.matrix_mode) {
    const Matrix& G = lin.gradients[i];
    return Eigen::Map<const Vector>(G.data(), G.size());
  }
  return lin.jacobian.row(i).transpose();
}

Complex row_dot(const Vector& row, const Vector& step) {
  // Bilinear contraction, no conjugation.
  return (row.transpose() * step)(0, 0);
}

// Coefficients q of a cluster given only its eigenvalues (similarity
// invariant); used for cheap damping checks.
Vector q_from_eigenvalues(const Vector& mus) {
  const int d = static_cast<int>(mus.size());
  const Complex q1 = mus.sum() / static_cast<double>(d);
  Vector q = Vector::Zero(d);
  q(0) = q1;
  if (d == 1) return q;
  std::vector<Complex> coeff(d + 1, Complex(0.0, 0.0));
  coeff[0] = 1.0;
  int deg = 0;
  for (int i = 0; i < d; ++i) {
    const Complex root = mus(i) - q1;
    for (int k = deg + 1; k >= 1; --k) {
      coeff[k] = coeff[k - 1] - root * coeff[k];
    }
    coeff[0] = -root * coeff[0];
    ++deg;
  }
  // q_i is minus the coefficient of z^(d-i), i >= 2.
  for (int i = 2; i <= d; ++i) q(i - 1) = -coeff[d - i];
  return q;
}

double tail_norm(const Vector& q) {
  if (q.size() <= 1) return 0.0;
  return q.tail(q.size() - 1).norm();
}

bool conjugation_closed(const Vector& eigs, const std::vector<int>& subset,
                        double tol) {
  for (int i : subset) {
    double best = std::numeric_limits<double>::infinity();
    for (int j : subset) {
      best = std::min(best, std::abs(eigs(j) - std::conj(eigs(i))));
    }
    if (best > tol) return false;
  }
  return true;
}

// Everything the generic Newton loop needs from a concrete problem. The
// unknown vector is the parameter step (family mode) or the column-major
// entries of the matrix step (matrix mode).
struct StepProblem {
  int unknowns = 0;
  double matrix_scale = 1.0;  // ||A at start||_F
  double point_scale = 1.0;   // max(1, ||start point||)
  std::function<Matrix()> current_matrix;
  std::function<Matrix(const Vector&)> probe_matrix;  // A at current + step
  std::function<VersalLinearization(const InvariantTriple&)> linearize;
  std::function<Vector()> reference_shift;  // start - current, vec space
  std::function<void(const Vector&)> apply_step;
  std::function<Vector()> echo_point;  // may return empty
};

double one_step_norm(const StepProblem& problem, const Matrix& Q,
                     const Matrix& T, const ClusterSelection& sel,
                     const NewtonConfig& config) {
  const InvariantTriple triple = block_diagonalize_schur(Q, T, sel);
  const VersalLinearization lin = problem.linearize(triple);
  const LinearSystem system = assemble_linear_system(lin, config);
  const Vector r = config.strategy == SolveStrategy::NearestToReference
                       ? problem.reference_shift()
                       : Vector(Vector::Zero(problem.unknowns));
  return solve_step(system, r, config.strategy).norm();
}

ClusterSelection auto_initial_cluster(const StepProblem& problem,
                                      const Matrix& A0, int d,
                                      const NewtonConfig& config) {
  auto [Q, T] = schur_decompose(A0);
  const Vector eigs = T.diagonal();
  const int m = static_cast<int>(eigs.size());
  const double scale = std::max(1.0, eigs.cwiseAbs().maxCoeff());

  if (m <= 8) {
    // Try every admissible subset; smallest one-step norm wins.
    std::vector<int> comb(d);
    for (int i = 0; i < d; ++i) comb[i] = i;
    std::optional<ClusterSelection> best;
    double best_norm = std::numeric_limits<double>::infinity();
    bool done = false;
    while (!done) {
      bool admissible = true;
      if (config.real_parameters) {
        admissible = conjugation_closed(eigs, comb, 1e-6 * scale);
      }
      if (admissible) {
        ClusterSelection sel{comb};
        try {
          const double norm = one_step_norm(problem, Q, T, sel, config);
          if (norm < best_norm) {
            best_norm = norm;
            best = sel;
          }
        } catch (const Error&) {
          // Subset cannot be decoupled or solved; skip it.
        }
      }
      int i = d - 1;
      while (i >= 0 && comb[i] == m - d + i) --i;
      if (i < 0) {
        done = true;
      } else {
        ++comb[i];
        for (int j = i + 1; j < d; ++j) comb[j] = comb[j - 1] + 1;
      }
    }
    if (!best) {
      throw ClusterSelectionError(
          "no admissible initial cluster of the requested multiplicity; "
          "every candidate subset failed to decouple or solve");
    }
    return *best;
  }

  // Large case: the d-subset of minimal eigenvalue spread, built around each
  // eigenvalue in turn.
  std::optional<ClusterSelection> best;
  double best_spread = std::numeric_limits<double>::infinity();
  for (int c = 0; c < m; ++c) {
    ClusterSelection sel;
    try {
      sel = select_cluster(eigs, eigs(c), d, config.real_parameters);
    } catch (const ClusterSelectionError&) {
      continue;
    }
    double spread = 0.0;
    for (int a : sel.indices) {
      for (int b : sel.indices) {
        spread = std::max(spread, std::abs(eigs(a) - eigs(b)));
      }
    }
    if (spread < best_spread) {
      best_spread = spread;
      best = sel;
    }
  }
  if (!best) {
    throw ClusterSelectionError(
        "no admissible initial cluster of the requested multiplicity");
  }
  return *best;
}

// Halves the step while the coefficient tail grows, probing without moving
// the state. Cluster tracking uses the linear eigenvalue prediction.
Vector damp_step(const StepProblem& problem, const VersalLinearization& lin,
                 Vector step, int d, const NewtonConfig& config) {
  const double cur_tail = tail_norm(lin.values.q);
  if (cur_tail == 0.0) return step;
  for (int h = 0; h < 5; ++h) {
    const Complex lam = approximate_eigenvalue(lin, step);
    const Matrix Ac = problem.probe_matrix(step);
    auto [Qc, Tc] = schur_decompose(Ac);
    ClusterSelection sel;
    try {
      sel = select_cluster(Tc.diagonal(), lam, d, config.real_parameters);
    } catch (const ClusterSelectionError&) {
      break;
    }
    Vector mus(d);
    for (int a = 0; a < d; ++a) mus(a) = Tc.diagonal()(sel.indices[a]);
    if (tail_norm(q_from_eigenvalues(mus)) <= cur_tail) break;
    step /= 2.0;
  }
  return step;
}

NewtonResult newton_core(const StepProblem& problem, int d,
                         const std::optional<ClusterSelection>& initial,
                         const NewtonConfig& config) {
  if (d < 2) throw InputError("multiplicity must be at least 2");
  if (config.max_iterations < 1) {
    throw InputError("max_iterations must be positive");
  }
  const Matrix A0 = problem.current_matrix();
  const int m = static_cast<int>(A0.rows());
  if (d > m) throw InputError("multiplicity exceeds the matrix dimension");

  const double sep_threshold =
      config.separation_warning_threshold >= 0.0
          ? config.separation_warning_threshold
          : 1e3 * kEps * std::max(1.0, problem.matrix_scale);
  const double step_tol = config.step_tolerance * problem.point_scale;
  const double q_tol = 1e-10 * std::max(1.0, problem.matrix_scale);

  ClusterSelection cluster =
      initial ? *initial : auto_initial_cluster(problem, A0, d, config);
  if (cluster.size() != d) {
    throw InputError("cluster size does not match the requested multiplicity");
  }

  NewtonResult result;
  bool sep_warned = false;
  std::optional<Complex> lambda_app;

  for (int it = 0; it < config.max_iterations; ++it) {
    const Matrix A = problem.current_matrix();
    auto [Q, T] = schur_decompose(A);
    if (lambda_app) {
      cluster =
          select_cluster(T.diagonal(), *lambda_app, d, config.real_parameters);
    }
    const InvariantTriple triple = block_diagonalize_schur(Q, T, cluster);
    if (!sep_warned && triple.separation < sep_threshold) {
      std::ostringstream w;
      w << "cluster separation " << triple.separation
        << " is below the warning threshold " << sep_threshold
        << "; the invariant pair is ill-conditioned";
      result.warnings.push_back(w.str());
      sep_warned = true;
    }
    const VersalLinearization lin = problem.linearize(triple);
    const LinearSystem system = assemble_linear_system(lin, config);
    const Vector r = config.strategy == SolveStrategy::NearestToReference
                         ? problem.reference_shift()
                         : Vector(Vector::Zero(problem.unknowns));
    Vector step = solve_step(system, r, config.strategy);
    if (config.real_parameters) step = step.real().cast<Complex>();
    if (config.damping) step = damp_step(problem, lin, step, d, config);

    lambda_app = approximate_eigenvalue(lin, step);
    problem.apply_step(step);

    IterationRecord rec;
    rec.p = problem.echo_point();
    rec.q = lin.values.q;
    rec.step_norm = step.norm();
    rec.cluster = cluster.indices;
    rec.separation = triple.separation;
    rec.lambda_app = *lambda_app;
    result.iterations.push_back(rec);

    if (rec.step_norm <= step_tol) {
      // Stall guard: the coefficients themselves must have vanished.
      const Matrix As = problem.current_matrix();
      auto [Qs, Ts] = schur_decompose(As);
      const ClusterSelection final_cluster = select_cluster(
          Ts.diagonal(), *lambda_app, d, config.real_parameters);
      const InvariantTriple final_triple =
          block_diagonalize_schur(Qs, Ts, final_cluster);
      const VersalValues final_values = versal_values(final_triple.S);
      if (tail_norm(final_values.q) <= q_tol) {
        result.converged = true;
        result.stop_reason = "step tolerance reached";
        result.lambda = multiple_eigenvalue(final_triple.S);
        result.chain = jordan_chain(As, final_triple);
        break;
      }
    }
  }
  if (!result.converged) {
    result.stop_reason = result.iterations.empty()
                             ? "no iterations performed"
                             : "iteration limit reached";
  }
  return result;
}

}  // namespace

LinearSystem assemble_linear_system(const VersalLinearization& lin,
                                    const NewtonConfig& config) {
  const int d = lin.multiplicity();
  if (d < 1) throw InputError("linearization has no coefficients");
  const int unknowns = lin.matrix_mode
                           ? static_cast<int>(lin.gradients[0].size())
                           : static_cast<int>(lin.jacobian.cols());

  std::vector<Vector> rows;
  std::vector<Complex> rhs;
  for (int i = 2; i <= d; ++i) {
    rows.push_back(linearization_row(lin, i - 1));
    rhs.push_back(-lin.values.q(i - 1));
  }
  if (config.target_eigenvalue) {
    rows.push_back(linearization_row(lin, 0));
    rhs.push_back(*config.target_eigenvalue - lin.values.q(0));
  }
  if (rows.empty()) throw InputError("no equations to assemble");

  LinearSystem system;
  if (!config.real_parameters) {
    system.M = Matrix(rows.size(), unknowns);
    system.rhs = Vector(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) {
      system.M.row(r) = rows[r].transpose();
      system.rhs(r) = rhs[r];
    }
    system.real_unknowns = false;
    return system;
  }

  // Real unknowns: rows that are real (relative to their scale) contribute
  // one equation; genuinely complex rows split into real and imaginary parts.
  std::vector<Eigen::RowVectorXd> real_rows;
  std::vector<double> real_rhs;
  for (size_t r = 0; r < rows.size(); ++r) {
    const Vector& v = rows[r];
    const Complex b = rhs[r];
    double scale = std::abs(b);
    double imag_mag = std::abs(b.imag());
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      scale = std::max(scale, std::abs(v(j)));
      imag_mag = std::max(imag_mag, std::abs(v(j).imag()));
    }
    scale = std::max(scale, 1e-300);
    if (imag_mag <= kRealRowTol * scale) {
      real_rows.push_back(v.real().transpose());
      real_rhs.push_back(b.real());
    } else {
      real_rows.push_back(v.real().transpose());
      real_rhs.push_back(b.real());
      real_rows.push_back(v.imag().transpose());
      real_rhs.push_back(b.imag());
    }
  }
  system.M = Matrix(real_rows.size(), unknowns);
  system.rhs = Vector(real_rows.size());
  for (size_t r = 0; r < real_rows.size(); ++r) {
    system.M.row(r) = real_rows[r].cast<Complex>();
    system.rhs(r) = Complex(real_rhs[r], 0.0);
  }
  system.real_unknowns = true;
  return system;
}

Vector solve_step(const LinearSystem& system, const Vector& reference_shift,
                  SolveStrategy strategy) {
  const int rows = static_cast<int>(system.M.rows());
  const int cols = static_cast<int>(system.M.cols());
  if (rows < 1) throw InputError("linear system has no rows");
  if (strategy == SolveStrategy::NearestToReference &&
      reference_shift.size() != cols) {
    throw InputError("reference shift dimension mismatch");
  }

  Eigen::JacobiSVD<Matrix> svd(system.M,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double rank_tol = std::max(rows, cols) * kEps * smax;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rank_tol && sv(i) > 0.0) ++rank;
  }
  if (rank < rows) {
    std::ostringstream msg;
    msg << "linearized equations are rank deficient (rank " << rank << " of "
        << rows << " rows); the point may lie on a derogatory or "
        << "higher-multiplicity stratum; consider a larger multiplicity "
        << "target";
    throw RankDeficientError(msg.str(), rank, rows);
  }

  auto pinv_apply = [&](const Vector& b) {
    Vector coeff = svd.matrixU().adjoint() * b;
    for (int i = 0; i < rank; ++i) coeff(i) /= sv(i);
    for (Eigen::Index i = rank; i < coeff.size(); ++i) coeff(i) = 0.0;
    return Vector(svd.matrixV() * coeff);
  };

  Vector step;
  if (strategy == SolveStrategy::MinimumNorm) {
    step = pinv_apply(system.rhs);
  } else {
    const Vector& r = reference_shift;
    step = r + pinv_apply(system.rhs - system.M * r);
  }
  if (system.real_unknowns) step = step.real().cast<Complex>();
  return step;
}

Complex approximate_eigenvalue(const VersalLinearization& lin,
                               const Vector& step) {
  const Vector row = linearization_row(lin, 0);
  if (row.size() != step.size()) {
    throw InputError("step dimension does not match the linearization");
  }
  return lin.values.q(0) + row_dot(row, step);
}

ClusterSelection select_cluster(const Vector& eigenvalues, Complex lambda_app,
                                int d, bool real_mode) {
  const int m = static_cast<int>(eigenvalues.size());
  if (d < 1 || d > m) {
    throw InputError("cluster size must be between 1 and the dimension");
  }
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = std::abs(eigenvalues(a) - lambda_app);
    const double db = std::abs(eigenvalues(b) - lambda_app);
    if (da != db) return da < db;
    return a < b;
  });

  const double scale = std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
  const bool real_target =
      std::abs(lambda_app.imag()) <= kPairTol * (1.0 + std::abs(lambda_app));
  ClusterSelection sel;
  if (!real_mode || !real_target) {
    sel.indices.assign(order.begin(), order.begin() + d);
    return sel;
  }

  // Real target over a real family: keep the selection conjugation-closed by
  // admitting complex eigenvalues only together with their partners. If the
  // greedy pass strands an odd budget, drop its farthest real pick and retry
  // so that a pair farther out can still complete the cluster.
  std::vector<bool> excluded(m, false);
  for (int attempt = 0; attempt <= m; ++attempt) {
    std::vector<bool> picked(m, false);
    std::vector<int> chosen;
    std::vector<int> singles;
    int budget = d;
    for (int idx : order) {
      if (budget == 0) break;
      if (picked[idx] || excluded[idx]) continue;
      const Complex lam = eigenvalues(idx);
      if (std::abs(lam.imag()) <= kPairTol * scale) {
        picked[idx] = true;
        chosen.push_back(idx);
        singles.push_back(idx);
        --budget;
        continue;
      }
      if (budget < 2) continue;
      int partner = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < m; ++j) {
        if (j == idx || picked[j] || excluded[j]) continue;
        const double dist = std::abs(eigenvalues(j) - std::conj(lam));
        if (dist < best) {
          best = dist;
          partner = j;
        }
      }
      if (partner < 0 || best > 1e-6 * scale) continue;
      picked[idx] = true;
      picked[partner] = true;
      chosen.push_back(idx);
      chosen.push_back(partner);
      budget -= 2;
    }
    if (budget == 0) {
      sel.indices = chosen;
      return sel;
    }
    if (singles.empty()) break;
    excluded[singles.back()] = true;
  }
  throw ClusterSelectionError(
      "no conjugation-closed cluster of the requested size exists around "
      "the target eigenvalue; try an even multiplicity or a complex target");
}

NewtonResult newton_iterate(const MatrixFamily& family, const Vector& p0,
                            int multiplicity,
                            const std::optional<ClusterSelection>& cluster,
                            const NewtonConfig& config_in) {
  if (p0.size() != family.params()) {
    throw InputError("start point dimension does not match the family");
  }
  NewtonConfig config = config_in;
  // A real-domain family cannot be evaluated off the real axis, so its
  // parameters always iterate in real mode.
  if (family.real_domain()) config.real_parameters = true;
  if (config.real_parameters) {
    for (Eigen::Index j = 0; j < p0.size(); ++j) {
      if (p0(j).imag() != 0.0) {
        throw InputError("real mode requires a real start point");
      }
    }
  }

  Vector p = p0;
  StepProblem problem;
  problem.unknowns = family.params();
  problem.matrix_scale = family.evaluate(p0).norm();
  problem.point_scale = std::max(1.0, p0.norm());
  problem.current_matrix = [&family, &p]() { return family.evaluate(p); };
  problem.probe_matrix = [&family, &p](const Vector& step) {
    return family.evaluate(p + step);
  };
  problem.linearize = [&family, &p](const InvariantTriple& triple) {
    return versal_jacobian(triple, versal_values(triple.S),
                           family.derivatives(p));
  };
  problem.reference_shift = [&p0, &p]() { return Vector(p0 - p); };
  problem.apply_step = [&p](const Vector& step) { p += step; };
  problem.echo_point = [&p]() { return p; };

  NewtonResult result = newton_core(problem, multiplicity, cluster, config);
  result.p_star = p;
  result.distance = (p - p0).norm();
  result.A_star = family.evaluate(p);
  return result;
}

NewtonResult nearest_defective_matrix(const Matrix& A0, int multiplicity,
                                      const std::optional<ClusterSelection>& cluster,
                                      const NewtonConfig& config) {
  if (A0.rows() != A0.cols()) throw InputError("matrix must be square");
  const int m = static_cast<int>(A0.rows());
  if (config.real_parameters && A0.imag().norm() != 0.0) {
    throw InputError("real mode requires a real matrix");
  }

  Matrix A = A0;
  StepProblem problem;
  problem.unknowns = m * m;
  problem.matrix_scale = A0.norm();
  problem.point_scale = std::max(1.0, A0.norm());
  problem.current_matrix = [&A]() { return A; };
  problem.probe_matrix = [&A, m](const Vector& step) {
    return Matrix(A + Eigen::Map<const Matrix>(step.data(), m, m));
  };
  problem.linearize = [](const InvariantTriple& triple) {
    return versal_matrix_gradients(triple, versal_values(triple.S));
  };
  problem.reference_shift = [&A0, &A]() {
    const Matrix diff = A0 - A;
    return Vector(Eigen::Map<const Vector>(diff.data(), diff.size()));
  };
  problem.apply_step = [&A, m](const Vector& step) {
    A += Eigen::Map<const Matrix>(step.data(), m, m);
  };
  problem.echo_point = []() { return Vector(); };

  NewtonResult result = newton_core(problem, multiplicity, cluster, config);
  result.A_star = A;
  result.delta_A = A - A0;
  result.distance = result.delta_A.norm();
  return result;
}

}  // namespace versal

// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "versal/errors.hpp"
#include "versal/families.hpp"
#include "versal/invariant_subspace.hpp"
#include "versal/jordan_chain.hpp"
#include "versal/newton.hpp"
#include "versal/report.hpp"
#include "versal/versal_core.hpp"

namespace {

using namespace versal;

constexpr int kExitConverged = 0;
constexpr int kExitInput = 1;
constexpr int kExitSolver = 2;

double parse_double(const std::string& text, const std::string& what) {
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InputError(what + ": cannot parse number from \"" + text + "\"");
  }
}

// "re" or "re:im".
Complex parse_complex(const std::string& text, const std::string& what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    return Complex(parse_double(text, what), 0.0);
  }
  return Complex(parse_double(text.substr(0, colon), what),
                 parse_double(text.substr(colon + 1), what));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

Vector parse_point(const std::string& text) {
  const std::vector<std::string> parts = split(text, ',');
  if (parts.empty()) throw InputError("--p0 must list parameter components");
  Vector p(parts.size());
  for (size_t i = 0; i < parts.size(); ++i) {
    p(i) = parse_complex(parts[i], "--p0");
  }
  return p;
}

std::optional<ClusterSelection> parse_cluster(const std::string& text) {
  if (text == "auto") return std::nullopt;
  ClusterSelection sel;
  for (const std::string& part : split(text, ',')) {
    try {
      size_t used = 0;
      const int idx = std::stoi(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      sel.indices.push_back(idx);
    } catch (const std::exception&) {
      throw InputError("--cluster: cannot parse index from \"" + part + "\"");
    }
  }
  if (sel.indices.empty()) {
    throw InputError("--cluster must be \"auto\" or a list of indices");
  }
  return sel;
}

std::vector<int> parse_multiplicities(const std::string& text) {
  std::vector<int> out;
  auto push = [&out](const std::string& part) {
    try {
      size_t used = 0;
      const int d = std::stoi(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      out.push_back(d);
    } catch (const std::exception&) {
      throw InputError("--multiplicities: cannot parse \"" + part + "\"");
    }
  };
  for (const std::string& part : split(text, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      push(part);
      continue;
    }
    int lo = 0;
    int hi = 0;
    try {
      lo = std::stoi(part.substr(0, colon));
      hi = std::stoi(part.substr(colon + 1));
    } catch (const std::exception&) {
      throw InputError("--multiplicities: cannot parse range \"" + part + "\"");
    }
    if (hi < lo) throw InputError("--multiplicities: empty range \"" + part + "\"");
    for (int d = lo; d <= hi; ++d) out.push_back(d);
  }
  if (out.empty()) throw InputError("--multiplicities must not be empty");
  return out;
}

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
};

GridAxis parse_axis(const std::string& text) {
  const std::vector<std::string> parts = split(text, ':');
  if (parts.size() != 3) {
    throw InputError("--grid axis must be \"lo:hi:count\", got \"" + text + "\"");
  }
  GridAxis axis;
  axis.lo = parse_double(parts[0], "--grid");
  axis.hi = parse_double(parts[1], "--grid");
  try {
    axis.count = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw InputError("--grid: cannot parse count from \"" + parts[2] + "\"");
  }
  if (axis.count < 1) throw InputError("--grid count must be positive");
  return axis;
}

int thread_count() {
  const char* env = std::getenv("VERSAL_THREADS");
  if (!env) return 1;
  try {
    const int n = std::stoi(env);
    return n >= 1 ? n : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output);
  if (!out) throw InputError("cannot open output file: " + output);
  out << text;
}

struct SolveOptions {
  std::string input_path;
  int multiplicity = 2;
  std::string p0_text;
  std::string cluster_text = "auto";
  int max_iter = 20;
  double tol = 1e-12;
  bool real_mode = false;
  std::string target_text;
  std::string strategy_text = "nearest";
  std::string format = "json";
  bool timings = false;
  std::string output;
};

NewtonConfig build_config(const SolveOptions& opt) {
  NewtonConfig config;
  config.max_iterations = opt.max_iter;
  config.step_tolerance = opt.tol;
  config.real_parameters = opt.real_mode;
  if (opt.strategy_text == "nearest") {
    config.strategy = SolveStrategy::NearestToReference;
  } else if (opt.strategy_text == "min-norm") {
    config.strategy = SolveStrategy::MinimumNorm;
  } else {
    throw InputError("--strategy must be \"nearest\" or \"min-norm\"");
  }
  if (!opt.target_text.empty()) {
    config.target_eigenvalue = parse_complex(opt.target_text, "--target-eigenvalue");
  }
  return config;
}

void add_solve_flags(CLI::App* cmd, SolveOptions& opt, bool family_mode) {
  cmd->add_option("input", opt.input_path,
                  family_mode ? "family JSON file" : "matrix JSON file")
      ->required();
  cmd->add_option("--multiplicity", opt.multiplicity,
                  "target eigenvalue multiplicity (>= 2)");
  if (family_mode) {
    cmd->add_option("--p0", opt.p0_text,
                    "start point, comma-separated components (re or re:im)")
        ->required();
  }
  cmd->add_option("--cluster", opt.cluster_text,
                  "\"auto\" or comma-separated 0-based eigenvalue positions");
  cmd->add_option("--max-iter", opt.max_iter, "iteration limit");
  cmd->add_option("--tol", opt.tol,
                  "step tolerance, relative to max(1, start norm)");
  cmd->add_flag("--real", opt.real_mode, "restrict the step to real values");
  cmd->add_option("--target-eigenvalue", opt.target_text,
                  "pin the multiple eigenvalue (re or re:im)");
  cmd->add_option("--strategy", opt.strategy_text,
                  "\"nearest\" (to the start) or \"min-norm\"");
  cmd->add_flag("--timings", opt.timings, "include wall-clock timings");
  cmd->add_option("--output", opt.output, "write the report to a file");
}

int run_solve_family(const SolveOptions& opt) {
  const MatrixFamily family = load_family_file(opt.input_path);
  const Vector p0 = parse_point(opt.p0_text);
  const NewtonConfig config = build_config(opt);
  const std::optional<ClusterSelection> cluster = parse_cluster(opt.cluster_text);

  const auto t0 = std::chrono::steady_clock::now();
  const NewtonResult result =
      newton_iterate(family, p0, opt.multiplicity, cluster, config);
  const auto t1 = std::chrono::steady_clock::now();

  SolveInputEcho echo;
  echo.mode = "family";
  echo.m = family.rows();
  echo.n = family.params();
  echo.multiplicity = opt.multiplicity;
  echo.p0 = p0;
  echo.cluster_spec = opt.cluster_text;
  echo.real_mode = opt.real_mode;
  echo.target_eigenvalue = config.target_eigenvalue;
  echo.strategy = opt.strategy_text;

  ReportOptions ropt;
  ropt.timings = opt.timings;
  ropt.elapsed_seconds = std::chrono::duration<double>(t1 - t0).count();
  emit(solve_report(echo, result, ropt), opt.output);
  return result.converged ? kExitConverged : kExitSolver;
}

int run_solve_matrix(const SolveOptions& opt) {
  const Matrix A0 = load_matrix_file(opt.input_path);
  const NewtonConfig config = build_config(opt);
  const std::optional<ClusterSelection> cluster = parse_cluster(opt.cluster_text);

  const auto t0 = std::chrono::steady_clock::now();
  const NewtonResult result =
      nearest_defective_matrix(A0, opt.multiplicity, cluster, config);
  const auto t1 = std::chrono::steady_clock::now();

  SolveInputEcho echo;
  echo.mode = "matrix";
  echo.m = static_cast<int>(A0.rows());
  echo.multiplicity = opt.multiplicity;
  echo.cluster_spec = opt.cluster_text;
  echo.real_mode = opt.real_mode;
  echo.target_eigenvalue = config.target_eigenvalue;
  echo.strategy = opt.strategy_text;

  ReportOptions ropt;
  ropt.timings = opt.timings;
  ropt.elapsed_seconds = std::chrono::duration<double>(t1 - t0).count();
  emit(solve_report(echo, result, ropt), opt.output);
  return result.converged ? kExitConverged : kExitSolver;
}

struct TableOptions {
  std::string input_path;
  std::string multiplicities_text = "2:6";
  int max_iter = 20;
  double tol = 1e-12;
  bool real_mode = false;
  std::string format = "json";
  bool timings = false;
  std::string output;
};

int run_distance_table(const TableOptions& opt) {
  const Matrix A0 = load_matrix_file(opt.input_path);
  const std::vector<int> mults = parse_multiplicities(opt.multiplicities_text);

  NewtonConfig config;
  config.max_iterations = opt.max_iter;
  config.step_tolerance = opt.tol;
  config.real_parameters = opt.real_mode;

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<DistanceTableRow> rows;
  bool all_converged = true;
  for (int d : mults) {
    const NewtonResult result =
        nearest_defective_matrix(A0, d, std::nullopt, config);
    DistanceTableRow row;
    row.multiplicity = d;
    row.one_step_distance =
        result.iterations.empty() ? 0.0 : result.iterations.front().step_norm;
    row.converged_distance = result.distance;
    row.iterations = static_cast<int>(result.iterations.size());
    row.converged = result.converged;
    if (result.chain) {
      row.chain_condition = chain_condition(*result.chain);
      row.chain_residual = result.chain->residual;
    }
    all_converged = all_converged && result.converged;
    rows.push_back(row);
  }
  const auto t1 = std::chrono::steady_clock::now();

  ReportOptions ropt;
  ropt.format = opt.format;
  ropt.timings = opt.timings;
  ropt.elapsed_seconds = std::chrono::duration<double>(t1 - t0).count();
  emit(distance_table_report(rows, ropt), opt.output);
  return all_converged ? kExitConverged : kExitSolver;
}

struct FieldOptions {
  std::string input_path;
  std::string grid_text;
  std::string multiplicities_text = "2";
  bool real_mode = false;
  std::string format = "json";
  bool timings = false;
  std::string output;
};

// Minimal-spread cluster of size d built around each eigenvalue in turn.
ClusterSelection spread_cluster(const Vector& eigs, int d, bool real_mode) {
  std::optional<ClusterSelection> best;
  double best_spread = std::numeric_limits<double>::infinity();
  for (int c = 0; c < eigs.size(); ++c) {
    ClusterSelection sel;
    try {
      sel = select_cluster(eigs, eigs(c), d, real_mode);
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
        "no admissible cluster of the requested multiplicity at this point");
  }
  return *best;
}

FieldStep field_step_at(const MatrixFamily& family, const Vector& p, int d,
                        bool real_mode) {
  FieldStep out;
  out.multiplicity = d;
  try {
    const Matrix A = family.evaluate(p);
    auto [Q, T] = schur_decompose(A);
    const ClusterSelection sel = spread_cluster(T.diagonal(), d, real_mode);
    const InvariantTriple triple = block_diagonalize_schur(Q, T, sel);
    const VersalValues values = versal_values(triple.S);
    const VersalLinearization lin =
        versal_jacobian(triple, values, family.derivatives(p));
    NewtonConfig config;
    config.real_parameters = real_mode;
    const LinearSystem system = assemble_linear_system(lin, config);
    Vector step =
        solve_step(system, Vector::Zero(family.params()), SolveStrategy::MinimumNorm);
    if (real_mode) step = step.real().cast<Complex>();
    out.step = step;
    out.q = values.q;
    out.cluster = sel.indices;
    out.ok = true;
  } catch (const Error& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

int run_onestep_field(const FieldOptions& opt) {
  const MatrixFamily family = load_family_file(opt.input_path);
  if (family.params() != 2) {
    throw InputError("onestep-field requires a two-parameter family");
  }
  const std::vector<std::string> axes_text = split(opt.grid_text, ',');
  if (axes_text.size() != 2) {
    throw InputError("--grid must be \"lo:hi:count,lo:hi:count\"");
  }
  const GridAxis ax0 = parse_axis(axes_text[0]);
  const GridAxis ax1 = parse_axis(axes_text[1]);
  const std::vector<int> mults = parse_multiplicities(opt.multiplicities_text);
  for (int d : mults) {
    if (d < 2 || d > family.rows()) {
      throw InputError("--multiplicities entries must be in [2, m]");
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Vector> points;
  for (int i = 0; i < ax0.count; ++i) {
    const double x = ax0.count == 1
                         ? ax0.lo
                         : ax0.lo + (ax0.hi - ax0.lo) * i / (ax0.count - 1);
    for (int j = 0; j < ax1.count; ++j) {
      const double y = ax1.count == 1
                           ? ax1.lo
                           : ax1.lo + (ax1.hi - ax1.lo) * j / (ax1.count - 1);
      Vector p(2);
      p << Complex(x, 0.0), Complex(y, 0.0);
      points.push_back(p);
    }
  }

  std::vector<FieldRecord> records(points.size());
  const int threads =
      std::min(thread_count(), static_cast<int>(points.size()));
  auto worker = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      records[i].p0 = points[i];
      for (int d : mults) {
        records[i].steps.push_back(
            field_step_at(family, points[i], d, opt.real_mode));
      }
    }
  };
  if (threads <= 1) {
    worker(0, points.size());
  } else {
    std::vector<std::thread> pool;
    const size_t chunk = (points.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const size_t begin = t * chunk;
      const size_t end = std::min(points.size(), begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (std::thread& th : pool) th.join();
  }
  const auto t1 = std::chrono::steady_clock::now();

  ReportOptions ropt;
  ropt.format = opt.format;
  ropt.timings = opt.timings;
  ropt.elapsed_seconds = std::chrono::duration<double>(t1 - t0).count();
  emit(onestep_field_report(records, ropt), opt.output);
  return kExitConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nearest multiple-eigenvalue finder"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  SolveOptions family_opt;
  CLI::App* solve_family =
      app.add_subcommand("solve-family",
                         "find the nearest parameter point with a multiple "
                         "eigenvalue of a matrix family");
  add_solve_flags(solve_family, family_opt, /*family_mode=*/true);

  SolveOptions matrix_opt;
  CLI::App* solve_matrix =
      app.add_subcommand("solve-matrix",
                         "find the nearest matrix with a multiple eigenvalue");
  add_solve_flags(solve_matrix, matrix_opt, /*family_mode=*/false);

  TableOptions table_opt;
  CLI::App* table =
      app.add_subcommand("distance-table",
                         "distances to the nearest matrices with eigenvalues "
                         "of increasing multiplicity");
  table->add_option("input", table_opt.input_path, "matrix JSON file")->required();
  table->add_option("--multiplicities", table_opt.multiplicities_text,
                    "list or range, e.g. \"2,3\" or \"2:6\"");
  table->add_option("--max-iter", table_opt.max_iter, "iteration limit");
  table->add_option("--tol", table_opt.tol, "step tolerance");
  table->add_flag("--real", table_opt.real_mode, "restrict steps to real values");
  table->add_option("--format", table_opt.format, "\"json\" or \"csv\"");
  table->add_flag("--timings", table_opt.timings, "include wall-clock timings");
  table->add_option("--output", table_opt.output, "write the report to a file");

  FieldOptions field_opt;
  CLI::App* field =
      app.add_subcommand("onestep-field",
                         "one-step displacement field toward the nearest "
                         "multiple-eigenvalue point over a parameter grid");
  field->add_option("input", field_opt.input_path, "family JSON file")->required();
  field->add_option("--grid", field_opt.grid_text,
                    "\"lo:hi:count,lo:hi:count\" over the two parameters")
      ->required();
  field->add_option("--multiplicities", field_opt.multiplicities_text,
                    "multiplicities to emit per grid point, e.g. \"2,3\"");
  field->add_flag("--real", field_opt.real_mode, "restrict steps to real values");
  field->add_option("--format", field_opt.format, "\"json\" or \"csv\"");
  field->add_flag("--timings", field_opt.timings, "include wall-clock timings");
  field->add_option("--output", field_opt.output, "write the report to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (solve_family->parsed()) return run_solve_family(family_opt);
    if (solve_matrix->parsed()) return run_solve_matrix(matrix_opt);
    if (table->parsed()) return run_distance_table(table_opt);
    if (field->parsed()) return run_onestep_field(field_opt);
    std::cerr << "no subcommand selected\n";
    return kExitInput;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}

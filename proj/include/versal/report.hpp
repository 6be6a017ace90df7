// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "versal/types.hpp"

namespace versal {

inline constexpr const char* kToolName = "versal";
inline constexpr const char* kToolVersion = "0.1.0";

// Deterministic JSON emitter: insertion-ordered keys, floats printed with 17
// significant digits so reports are byte-identical across runs and round-trip
// exactly. Complex numbers serialize as [re, im].
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& name);
  JsonWriter& value(double v);
  JsonWriter& value(int v);
  JsonWriter& value(bool v);
  JsonWriter& value(const char* v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const Complex& v);
  JsonWriter& value(const Vector& v);
  JsonWriter& value(const Matrix& v);
  JsonWriter& value(const std::vector<int>& v);

  std::string str() const { return out_; }

 private:
  void separator();
  std::string out_;
  std::vector<int> counts_;
  bool pending_key_ = false;
};

std::string format_double(double v);

struct ReportOptions {
  std::string format = "json";  // "json" or "csv" where supported
  bool timings = false;
  double elapsed_seconds = 0.0;
};

struct SolveInputEcho {
  std::string mode;  // "family" or "matrix"
  int m = 0;
  int n = 0;
  int multiplicity = 0;
  Vector p0;                   // family mode
  std::string cluster_spec;    // "auto" or the index list as given
  bool real_mode = false;
  std::optional<Complex> target_eigenvalue;
  std::string strategy;
};

// Full solve report (family and matrix modes), JSON only.
std::string solve_report(const SolveInputEcho& input, const NewtonResult& result,
                         const ReportOptions& options);

struct DistanceTableRow {
  int multiplicity = 0;
  double one_step_distance = 0.0;
  double converged_distance = 0.0;
  int iterations = 0;
  bool converged = false;
  double chain_condition = 0.0;
  double chain_residual = 0.0;
};

std::string distance_table_report(const std::vector<DistanceTableRow>& rows,
                                  const ReportOptions& options);

struct FieldStep {
  int multiplicity = 0;
  Vector step;  // one-step displacement from the grid point
  Vector q;
  std::vector<int> cluster;
  bool ok = false;
  std::string error;
};

struct FieldRecord {
  Vector p0;
  std::vector<FieldStep> steps;
};

std::string onestep_field_report(const std::vector<FieldRecord>& records,
                                 const ReportOptions& options);

}  // namespace versal

// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#include "versal/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "versal/errors.hpp"
#include "versal/jordan_chain.hpp"

namespace versal {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string escape_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string complex_text(const Complex& v) {
  return "[" + format_double(v.real()) + "," + format_double(v.imag()) + "]";
}

}  // namespace

void JsonWriter::separator() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!counts_.empty()) {
    if (counts_.back() > 0) out_ += ',';
    ++counts_.back();
  }
}

JsonWriter& JsonWriter::begin_object() {
  separator();
  out_ += '{';
  counts_.push_back(0);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  counts_.pop_back();
  out_ += '}';
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  separator();
  out_ += '[';
  counts_.push_back(0);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  counts_.pop_back();
  out_ += ']';
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& name) {
  if (counts_.empty()) throw Error("JSON writer: key outside an object");
  if (counts_.back() > 0) out_ += ',';
  ++counts_.back();
  out_ += escape_string(name);
  out_ += ':';
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  separator();
  out_ += format_double(v);
  return *this;
}

JsonWriter& JsonWriter::value(int v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separator();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(const char* v) { return value(std::string(v)); }

JsonWriter& JsonWriter::value(const std::string& v) {
  separator();
  out_ += escape_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(const Complex& v) {
  separator();
  out_ += complex_text(v);
  return *this;
}

JsonWriter& JsonWriter::value(const Vector& v) {
  begin_array();
  for (Eigen::Index i = 0; i < v.size(); ++i) value(v(i));
  return end_array();
}

JsonWriter& JsonWriter::value(const Matrix& v) {
  begin_array();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    begin_array();
    for (Eigen::Index j = 0; j < v.cols(); ++j) value(v(i, j));
    end_array();
  }
  return end_array();
}

JsonWriter& JsonWriter::value(const std::vector<int>& v) {
  begin_array();
  for (int x : v) value(x);
  return end_array();
}

namespace {

void emit_header(JsonWriter& w, const std::string& mode) {
  w.key("tool").value(kToolName);
  w.key("version").value(kToolVersion);
  w.key("mode").value(mode);
}

void emit_timings(JsonWriter& w, const ReportOptions& options) {
  if (!options.timings) return;
  w.key("timings").begin_object();
  w.key("elapsed_seconds").value(options.elapsed_seconds);
  w.end_object();
}

void emit_iterations(JsonWriter& w, const NewtonResult& result) {
  w.key("iterations").begin_array();
  for (const IterationRecord& rec : result.iterations) {
    w.begin_object();
    if (rec.p.size() > 0) w.key("p").value(rec.p);
    w.key("q").value(rec.q);
    w.key("step_norm").value(rec.step_norm);
    w.key("cluster").value(rec.cluster);
    w.key("separation").value(rec.separation);
    w.key("lambda_app").value(rec.lambda_app);
    w.end_object();
  }
  w.end_array();
}

void emit_chain(JsonWriter& w, const NewtonResult& result) {
  if (!result.chain) return;
  const JordanChain& chain = *result.chain;
  w.key("chain").begin_object();
  w.key("lambda").value(chain.lambda);
  // One outer array per chain vector.
  w.key("columns").value(Matrix(chain.U.transpose()));
  w.key("residual").value(chain.residual);
  w.key("condition").value(chain_condition(chain));
  w.end_object();
}

}  // namespace

std::string solve_report(const SolveInputEcho& input, const NewtonResult& result,
                         const ReportOptions& options) {
  JsonWriter w;
  w.begin_object();
  emit_header(w, input.mode);
  w.key("input").begin_object();
  w.key("m").value(input.m);
  if (input.mode == "family") {
    w.key("n").value(input.n);
    w.key("p0").value(input.p0);
  }
  w.key("multiplicity").value(input.multiplicity);
  w.key("cluster").value(input.cluster_spec);
  w.key("real").value(input.real_mode);
  if (input.target_eigenvalue) {
    w.key("target_eigenvalue").value(*input.target_eigenvalue);
  }
  w.key("strategy").value(input.strategy);
  w.end_object();

  w.key("result").begin_object();
  w.key("converged").value(result.converged);
  w.key("stop_reason").value(result.stop_reason);
  w.key("distance").value(result.distance);
  if (input.mode == "family") {
    w.key("p_star").value(result.p_star);
  } else {
    w.key("A_star").value(result.A_star);
    w.key("delta_A").value(result.delta_A);
  }
  if (result.converged) w.key("lambda").value(result.lambda);
  emit_iterations(w, result);
  emit_chain(w, result);
  w.key("warnings").begin_array();
  for (const std::string& warning : result.warnings) w.value(warning);
  w.end_array();
  w.end_object();

  emit_timings(w, options);
  w.end_object();
  return w.str() + "\n";
}

std::string distance_table_report(const std::vector<DistanceTableRow>& rows,
                                  const ReportOptions& options) {
  if (options.format == "csv") {
    std::string out =
        "multiplicity,one_step_distance,converged_distance,iterations,"
        "converged,chain_condition,chain_residual\n";
    for (const DistanceTableRow& row : rows) {
      out += std::to_string(row.multiplicity) + ",";
      out += format_double(row.one_step_distance) + ",";
      out += format_double(row.converged_distance) + ",";
      out += std::to_string(row.iterations) + ",";
      out += row.converged ? "true," : "false,";
      out += format_double(row.chain_condition) + ",";
      out += format_double(row.chain_residual) + "\n";
    }
    return out;
  }
  JsonWriter w;
  w.begin_object();
  emit_header(w, "distance-table");
  w.key("rows").begin_array();
  for (const DistanceTableRow& row : rows) {
    w.begin_object();
    w.key("multiplicity").value(row.multiplicity);
    w.key("one_step_distance").value(row.one_step_distance);
    w.key("converged_distance").value(row.converged_distance);
    w.key("iterations").value(row.iterations);
    w.key("converged").value(row.converged);
    w.key("chain_condition").value(row.chain_condition);
    w.key("chain_residual").value(row.chain_residual);
    w.end_object();
  }
  w.end_array();
  emit_timings(w, options);
  w.end_object();
  return w.str() + "\n";
}

std::string onestep_field_report(const std::vector<FieldRecord>& records,
                                 const ReportOptions& options) {
  if (options.format == "csv") {
    std::string out = "p0_0,p0_1,multiplicity,ok,step_re_0,step_im_0,step_re_1,step_im_1\n";
    for (const FieldRecord& rec : records) {
      for (const FieldStep& step : rec.steps) {
        out += format_double(rec.p0.size() > 0 ? rec.p0(0).real() : 0.0) + ",";
        out += format_double(rec.p0.size() > 1 ? rec.p0(1).real() : 0.0) + ",";
        out += std::to_string(step.multiplicity) + ",";
        out += step.ok ? "true" : "false";
        for (int j = 0; j < 2; ++j) {
          if (step.ok && step.step.size() > j) {
            out += "," + format_double(step.step(j).real());
            out += "," + format_double(step.step(j).imag());
          } else {
            out += ",,";
          }
        }
        out += "\n";
      }
    }
    return out;
  }
  JsonWriter w;
  w.begin_object();
  emit_header(w, "onestep-field");
  w.key("records").begin_array();
  for (const FieldRecord& rec : records) {
    w.begin_object();
    w.key("p0").value(rec.p0);
    w.key("steps").begin_array();
    for (const FieldStep& step : rec.steps) {
      w.begin_object();
      w.key("multiplicity").value(step.multiplicity);
      w.key("ok").value(step.ok);
      if (step.ok) {
        w.key("step").value(step.step);
        w.key("q").value(step.q);
        w.key("cluster").value(step.cluster);
      } else {
        w.key("error").value(step.error);
      }
      w.end_object();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();
  emit_timings(w, options);
  w.end_object();
  return w.str() + "\n";
}

}  // namespace versal

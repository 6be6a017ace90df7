// Copyright (c) 2026 versal contributors
// SPDX-License-Identifier: MIT

#include "versal/families.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "versal/errors.hpp"
#include "versal/report.hpp"

namespace versal {

namespace {

using nlohmann::json;

void check_param_vector(const Vector& p, int params, bool real_domain) {
  if (p.size() != params) {
    std::ostringstream msg;
    msg << "parameter vector has " << p.size() << " entries, family expects "
        << params;
    throw InputError(msg.str());
  }
  if (real_domain) {
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      if (p(j).imag() != 0.0) {
        std::ostringstream msg;
        msg << "real-domain family evaluated at complex parameter " << j;
        throw InputError(msg.str());
      }
    }
  }
}

Complex parse_entry(const json& v, const char* where) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return Complex(v[0].get<double>(), v[1].get<double>());
  }
  throw InputError(std::string(where) +
                   ": matrix entry must be a number or [re, im] pair");
}

Matrix parse_matrix(const json& rows, int m, const char* where) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != m) {
    throw InputError(std::string(where) + ": expected " + std::to_string(m) +
                     " rows");
  }
  Matrix A(m, m);
  for (int i = 0; i < m; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != m) {
      throw InputError(std::string(where) + ": row " + std::to_string(i) +
                       " must have " + std::to_string(m) + " entries");
    }
    for (int j = 0; j < m; ++j) A(i, j) = parse_entry(row[j], where);
  }
  return A;
}

void emit_matrix(JsonWriter& w, const Matrix& A) { w.value(A); }

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("JSON parse error: ") + e.what());
  }
}

bool parse_domain(const json& doc) {
  std::string domain = doc.value("domain", std::string("real"));
  if (domain == "real") return true;
  if (domain == "complex") return false;
  throw InputError("domain must be \"real\" or \"complex\"");
}

}  // namespace

MatrixFamily::MatrixFamily(int rows, int params, Evaluator evaluate,
                           Derivative derivative, bool real_domain)
    : rows_(rows),
      params_(params),
      evaluate_(std::move(evaluate)),
      derivative_(std::move(derivative)),
      real_domain_(real_domain) {
  if (rows_ < 1) throw InputError("family dimension must be positive");
  if (params_ < 0) throw InputError("parameter count must be nonnegative");
  if (!evaluate_) throw InputError("family evaluator must be callable");
}

Matrix MatrixFamily::evaluate(const Vector& p) const {
  check_param_vector(p, params_, real_domain_);
  Matrix A = evaluate_(p);
  if (A.rows() != rows_ || A.cols() != rows_) {
    throw InputError("family evaluator returned a matrix of wrong shape");
  }
  return A;
}

Matrix MatrixFamily::derivative(const Vector& p, int j) const {
  check_param_vector(p, params_, real_domain_);
  if (j < 0 || j >= params_) {
    throw InputError("derivative index out of range");
  }
  if (derivative_) {
    Matrix D = derivative_(p, j);
    if (D.rows() != rows_ || D.cols() != rows_) {
      throw InputError("family derivative returned a matrix of wrong shape");
    }
    return D;
  }
  return finite_difference_derivative(*this, p, j);
}

std::vector<Matrix> MatrixFamily::derivatives(const Vector& p) const {
  std::vector<Matrix> out;
  out.reserve(params_);
  for (int j = 0; j < params_; ++j) out.push_back(derivative(p, j));
  return out;
}

Matrix finite_difference_derivative(const MatrixFamily& family, const Vector& p,
                                    int j) {
  const double h = std::sqrt(std::numeric_limits<double>::epsilon()) *
                   (1.0 + std::abs(p(j)));
  Vector pp = p;
  Vector pm = p;
  pp(j) += h;
  pm(j) -= h;
  return (family.evaluate(pp) - family.evaluate(pm)) / (2.0 * h);
}

MatrixFamily affine_family(const Matrix& A0, const std::vector<Matrix>& derivs,
                           bool real_domain) {
  const int m = static_cast<int>(A0.rows());
  if (A0.cols() != m) throw InputError("A0 must be square");
  for (const Matrix& D : derivs) {
    if (D.rows() != m || D.cols() != m) {
      throw InputError("derivative matrices must match A0's shape");
    }
  }
  const int n = static_cast<int>(derivs.size());
  auto eval = [A0, derivs](const Vector& p) {
    Matrix A = A0;
    for (size_t j = 0; j < derivs.size(); ++j) A += p(j) * derivs[j];
    return A;
  };
  auto deriv = [derivs](const Vector&, int j) { return derivs[j]; };
  return MatrixFamily(m, n, eval, deriv, real_domain);
}

MatrixFamily family_swallow_tail() {
  Matrix A0 = Matrix::Zero(4, 4);
  A0(0, 1) = 1.0;
  A0(1, 2) = 1.0;
  A0(2, 3) = 1.0;
  std::vector<Matrix> derivs(3, Matrix::Zero(4, 4));
  derivs[0](1, 0) = 1.0;
  derivs[1](2, 0) = 1.0;
  derivs[2](3, 0) = 1.0;
  return affine_family(A0, derivs, true);
}

MatrixFamily family_example1() {
  Matrix A0(3, 3);
  A0 << 1.0, 3.0, 0.0,
        0.0, 1.0, 0.0,
        2.0, 3.0, 1.0;
  std::vector<Matrix> derivs(2, Matrix::Zero(3, 3));
  derivs[0](1, 0) = 1.0;
  derivs[1](1, 2) = 1.0;
  return affine_family(A0, derivs, true);
}

MatrixFamily family_versal_form(int d) {
  if (d < 1) throw InputError("normal-form dimension must be positive");
  Matrix A0 = Matrix::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) A0(i, i + 1) = 1.0;
  std::vector<Matrix> derivs;
  derivs.push_back(Matrix::Identity(d, d));
  for (int i = 1; i < d; ++i) {
    Matrix D = Matrix::Zero(d, d);
    D(i, 0) = 1.0;
    derivs.push_back(D);
  }
  return affine_family(A0, derivs, true);
}

Matrix matrix_example2(double eps, double delta) {
  Matrix A = Matrix::Zero(3, 3);
  A(0, 1) = 1.0;
  A(1, 2) = delta;
  Matrix E(3, 3);
  E << 3.0, 4.0, 2.0,
       8.0, 3.0, 6.0,
       4.0, 9.0, 6.0;
  return A + eps * E;
}

Matrix matrix_frank(int n) {
  if (n < 1) throw InputError("Frank matrix order must be positive");
  Matrix F = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j >= i) {
        F(i, j) = static_cast<double>(n - j);
      } else if (j == i - 1) {
        F(i, j) = static_cast<double>(n - j - 1);
      }
    }
  }
  return F;
}

MatrixFamily load_family_json(const std::string& text) {
  json doc = parse_document(text);
  if (!doc.is_object()) throw InputError("family document must be an object");
  if (!doc.contains("m") || !doc["m"].is_number_integer()) {
    throw InputError("family document needs integer field \"m\"");
  }
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw InputError("family document needs integer field \"n\"");
  }
  const int m = doc["m"].get<int>();
  const int n = doc["n"].get<int>();
  if (m < 1) throw InputError("\"m\" must be positive");
  if (n < 1) throw InputError("\"n\" must be positive");
  const bool real_domain = parse_domain(doc);

  if (doc.contains("A0")) {
    Matrix A0 = parse_matrix(doc["A0"], m, "A0");
    if (!doc.contains("derivs") || !doc["derivs"].is_array() ||
        static_cast<int>(doc["derivs"].size()) != n) {
      throw InputError("affine family needs \"derivs\" with n matrices");
    }
    std::vector<Matrix> derivs;
    derivs.reserve(n);
    for (int j = 0; j < n; ++j) {
      derivs.push_back(parse_matrix(doc["derivs"][j], m, "derivs"));
    }
    return affine_family(A0, derivs, real_domain);
  }

  if (doc.contains("A_center")) {
    // Finite-difference stencil: local affine model around p0.
    if (!doc.contains("p0") || !doc["p0"].is_array() ||
        static_cast<int>(doc["p0"].size()) != n) {
      throw InputError("stencil family needs \"p0\" with n entries");
    }
    if (!doc.contains("fd_step") || !doc["fd_step"].is_number()) {
      throw InputError("stencil family needs numeric \"fd_step\"");
    }
    const double h = doc["fd_step"].get<double>();
    if (!(h > 0.0)) throw InputError("\"fd_step\" must be positive");
    Vector p0(n);
    for (int j = 0; j < n; ++j) p0(j) = parse_entry(doc["p0"][j], "p0");
    Matrix Ac = parse_matrix(doc["A_center"], m, "A_center");
    auto read_list = [&](const char* key) {
      if (!doc.contains(key) || !doc[key].is_array() ||
          static_cast<int>(doc[key].size()) != n) {
        throw InputError(std::string("stencil family needs \"") + key +
                         "\" with n matrices");
      }
      std::vector<Matrix> out;
      out.reserve(n);
      for (int j = 0; j < n; ++j) out.push_back(parse_matrix(doc[key][j], m, key));
      return out;
    };
    std::vector<Matrix> plus = read_list("A_plus");
    std::vector<Matrix> minus = read_list("A_minus");
    std::vector<Matrix> derivs;
    derivs.reserve(n);
    Matrix A0 = Ac;
    for (int j = 0; j < n; ++j) {
      derivs.push_back((plus[j] - minus[j]) / (2.0 * h));
      A0 -= p0(j) * derivs[j];
    }
    return affine_family(A0, derivs, real_domain);
  }

  throw InputError("family document needs \"A0\"+\"derivs\" or a stencil");
}

MatrixFamily load_family_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open family file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_family_json(buf.str());
}

std::string family_to_json(const Matrix& A0, const std::vector<Matrix>& derivs,
                           bool real_domain) {
  JsonWriter w;
  w.begin_object();
  w.key("m").value(static_cast<int>(A0.rows()));
  w.key("n").value(static_cast<int>(derivs.size()));
  w.key("domain").value(real_domain ? "real" : "complex");
  w.key("A0");
  emit_matrix(w, A0);
  w.key("derivs").begin_array();
  for (const Matrix& D : derivs) emit_matrix(w, D);
  w.end_array();
  w.end_object();
  return w.str();
}

Matrix load_matrix_json(const std::string& text) {
  json doc = parse_document(text);
  if (!doc.is_object()) throw InputError("matrix document must be an object");
  if (!doc.contains("m") || !doc["m"].is_number_integer()) {
    throw InputError("matrix document needs integer field \"m\"");
  }
  const int m = doc["m"].get<int>();
  if (m < 1) throw InputError("\"m\" must be positive");
  if (!doc.contains("entries")) {
    throw InputError("matrix document needs field \"entries\"");
  }
  return parse_matrix(doc["entries"], m, "entries");
}

Matrix load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_matrix_json(buf.str());
}

std::string matrix_to_json(const Matrix& A) {
  JsonWriter w;
  w.begin_object();
  w.key("m").value(static_cast<int>(A.rows()));
  w.key("entries");
  emit_matrix(w, A);
  w.end_object();
  return w.str();
}

}  // namespace versal

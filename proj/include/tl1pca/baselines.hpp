#pragma once

// Comparison methods: classical l2 PCA, greedy PCA-l1 and greedy PCA-lp.

#include <Eigen/Eigenvalues>

#include <string>

#include "tl1pca/deflation.hpp"

namespace tl1pca {

/// Top-m eigenvectors of X X^T in descending eigenvalue order, canonical signs.
/// Directions whose eigenvalue is negligible relative to the largest are dropped
/// and the result is flagged truncated.
inline FitResult pca_l2(const DataMatrix& data, int m) {
  const Eigen::Index d = data.dim();
  if (m < 1 || m > d) fail(ErrorKind::config, "m must be in [1, d]");
  const Matrix scatter = data.values() * data.values().transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(scatter);
  if (eig.info() != Eigen::Success) fail(ErrorKind::numeric, "scatter eigendecomposition failed");

  // Eigen sorts ascending.
  const Vector& values = eig.eigenvalues();
  const double top = values[d - 1];
  if (!(top > 0.0)) fail(ErrorKind::data, "all samples are zero; nothing to fit");
  const double floor = top * static_cast<double>(d) * 1e-14;

  Matrix w(d, m);
  Eigen::Index got = 0;
  for (; got < m; ++got) {
    const Eigen::Index k = d - 1 - got;
    if (values[k] <= floor) break;
    Vector v = eig.eigenvectors().col(k);
    canonicalize_sign(v);
    w.col(got) = v;
  }
  return FitResult{ProjectionMatrix(w.leftCols(got)), {}, got < m};
}

inline FitResult pca_l1_greedy(const DataMatrix& data, int m, const SolverConfig& cfg) {
  return fit(data, m, ObjectiveSpec::l1(), cfg);
}

inline FitResult pca_lp(const DataMatrix& data, int m, PNormExponent p, const SolverConfig& cfg) {
  return fit(data, m, ObjectiveSpec::lp(p), cfg);
}

inline FitResult pca_tl1(const DataMatrix& data, int m, ShapeParamA a, const SolverConfig& cfg) {
  return fit(data, m, ObjectiveSpec::tl1(a), cfg);
}

enum class Method { tl1, l1, lp, l2 };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::tl1: return "tl1";
    case Method::l1: return "l1";
    case Method::lp: return "lp";
    case Method::l2: return "l2";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "tl1") return Method::tl1;
  if (s == "l1") return Method::l1;
  if (s == "lp") return Method::lp;
  if (s == "l2") return Method::l2;
  fail(ErrorKind::config, "unknown method '" + s + "' (expected tl1, l1, lp or l2)");
}

/// A method plus its parameter (a for tl1, p for lp; ignored otherwise).
struct MethodConfig {
  Method method = Method::tl1;
  double param = 1.0;
  SolverConfig solver;

  std::string label() const {
    std::string out = to_string(method);
    if (method == Method::tl1 || method == Method::lp) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", param);
      out += method == Method::tl1 ? "(a=" : "(p=";
      out += buf;
      out += ')';
    }
    return out;
  }
};

inline FitResult fit_method(const DataMatrix& data, int m, const MethodConfig& mc) {
  switch (mc.method) {
    case Method::tl1: return pca_tl1(data, m, ShapeParamA(mc.param), mc.solver);
    case Method::l1: return pca_l1_greedy(data, m, mc.solver);
    case Method::lp: return pca_lp(data, m, PNormExponent(mc.param), mc.solver);
    case Method::l2: return pca_l2(data, m);
  }
  fail(ErrorKind::config, "unknown method");
}

}  // namespace tl1pca

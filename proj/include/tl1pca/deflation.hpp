#pragma once

// Greedy extraction of m orthonormal projection vectors. Component j is found by
// running the sphere solver on the data expressed in an orthonormal basis T of
// the complement of the components found so far, then lifted back as T w.

#include <ostream>
#include <string>
#include <vector>

#include "tl1pca/core.hpp"
#include "tl1pca/objective.hpp"
#include "tl1pca/random.hpp"
#include "tl1pca/solver.hpp"

namespace tl1pca {

/// d x (d - j) matrix with orthonormal columns spanning the null space of W_j^T.
struct ComplementBasis {
  Matrix basis;
};

/// Extends W by e_1..e_d and runs modified Gram-Schmidt (two passes per vector),
/// dropping candidates whose residual norm falls below 1e-10. The first d - j
/// survivors, in index order, form the basis.
inline ComplementBasis nullspace_basis(const Matrix& w) {
  const Eigen::Index d = w.rows();
  const Eigen::Index j = w.cols();
  if (j >= d) fail(ErrorKind::shape, "complement of a full-rank W is empty");

  Matrix q(d, d);
  q.leftCols(j) = w;
  Eigen::Index kept = j;
  for (Eigen::Index e = 0; e < d && kept < d; ++e) {
    Vector v = Vector::Unit(d, e);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index c = 0; c < kept; ++c) v -= q.col(c).dot(v) * q.col(c);
    }
    const double len = v.norm();
    if (len < 1e-10) continue;
    q.col(kept++) = v / len;
  }
  if (kept != d) fail(ErrorKind::numeric, "Gram-Schmidt could not complete the complement basis");
  return ComplementBasis{q.rightCols(d - j)};
}

inline ComplementBasis nullspace_basis(const ProjectionMatrix& w) {
  return nullspace_basis(w.columns());
}

struct FitResult {
  ProjectionMatrix w;
  std::vector<SolverTrace> traces;
  /// Fewer columns than requested because the remaining data was all zero
  /// (or, for the l2 baseline, the scatter matrix ran out of rank).
  bool truncated = false;
};

template <DispersionObjective Obj>
FitResult fit(const DataMatrix& data, int m, const Obj& obj, const SolverConfig& cfg) {
  const Eigen::Index d = data.dim();
  if (m < 1 || m > d) {
    fail(ErrorKind::config, "m must be in [1, d] (m = " + std::to_string(m) +
                                ", d = " + std::to_string(d) + ")");
  }
  const Matrix& x0 = data.values();
  Matrix found(d, m);
  Matrix t = Matrix::Identity(d, d);
  std::vector<SolverTrace> traces;
  bool truncated = false;
  const double scale = x0.cwiseAbs().maxCoeff();

  for (int j = 0; j < m; ++j) {
    if (j > 0) t = nullspace_basis(Matrix(found.leftCols(j))).basis;
    Matrix reduced = t.transpose() * x0;
    if (scale == 0.0 || reduced.cwiseAbs().maxCoeff() <= 1e-12 * scale) {
      if (j == 0) fail(ErrorKind::data, "all samples are zero; nothing to fit");
      truncated = true;
      break;
    }
    // Rotating centered columns keeps them centered; no re-centering needed.
    const DataMatrix xj(std::move(reduced), false, Vector());
    SolverConfig component_cfg = cfg;
    if (j > 0) component_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(j));
    AscentResult res = ascend(xj, obj, component_cfg);
    Vector lifted = t * res.w;
    canonicalize_sign(lifted);
    found.col(j) = lifted;
    traces.push_back(std::move(res.trace));
  }
  const auto got = static_cast<Eigen::Index>(traces.size());
  return FitResult{ProjectionMatrix(found.leftCols(got)), std::move(traces), truncated};
}

/// d rows, m columns, 17 significant digits.
inline void write_projection_csv(std::ostream& os, const ProjectionMatrix& w) {
  const Matrix& c = w.columns();
  char buf[40];
  for (Eigen::Index r = 0; r < c.rows(); ++r) {
    for (Eigen::Index k = 0; k < c.cols(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", c(r, k));
      if (k) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace tl1pca

#pragma once

// Column-sample data matrices, orthonormal projection matrices and centering.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "tl1pca/error.hpp"

namespace tl1pca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A d x n matrix whose columns are samples. Immutable once built.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values) : DataMatrix(std::move(values), false, Vector()) {}

  /// `feature_means` may be empty when the matrix was never centered by us.
  DataMatrix(Matrix values, bool centered, Vector feature_means)
      : values_(std::move(values)), centered_(centered), means_(std::move(feature_means)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
      fail(ErrorKind::data, "data matrix must have at least one row and one column");
    }
    if (!values_.allFinite()) fail(ErrorKind::data, "data matrix contains non-finite entries");
    if (means_.size() != 0 && means_.size() != values_.rows()) {
      fail(ErrorKind::shape, "feature_means length must equal the row count");
    }
    if (centered_) {
      const double tol = 1e-9 * static_cast<double>(values_.cols()) *
                         std::max(1.0, values_.cwiseAbs().maxCoeff());
      if ((values_.rowwise().sum().cwiseAbs().array() > tol).any()) {
        fail(ErrorKind::data, "matrix flagged as centered has non-zero row sums");
      }
    }
  }

  const Matrix& values() const noexcept { return values_; }
  bool centered() const noexcept { return centered_; }
  const Vector& feature_means() const noexcept { return means_; }

  Eigen::Index dim() const noexcept { return values_.rows(); }
  Eigen::Index samples() const noexcept { return values_.cols(); }

 private:
  Matrix values_;
  bool centered_;
  Vector means_;
};

/// d x m matrix with orthonormal columns, 1 <= m <= d.
class ProjectionMatrix {
 public:
  static constexpr double kOrthonormalTol = 1e-10;

  explicit ProjectionMatrix(Matrix columns) : columns_(std::move(columns)) {
    if (columns_.cols() < 1 || columns_.cols() > columns_.rows()) {
      fail(ErrorKind::shape, "projection matrix needs 1 <= m <= d columns");
    }
    if (!columns_.allFinite()) fail(ErrorKind::numeric, "projection matrix is not finite");
    const double err = orthonormality_error(columns_);
    if (err > kOrthonormalTol) {
      fail(ErrorKind::numeric,
           "projection columns are not orthonormal (max |W^T W - I| = " + std::to_string(err) + ")");
    }
  }

  const Matrix& columns() const noexcept { return columns_; }
  Eigen::Index dim() const noexcept { return columns_.rows(); }
  Eigen::Index count() const noexcept { return columns_.cols(); }
  Vector column(Eigen::Index j) const { return columns_.col(j); }

  /// The first k columns.
  ProjectionMatrix leading(Eigen::Index k) const {
    if (k < 1 || k > count()) fail(ErrorKind::shape, "leading(k) out of range");
    return ProjectionMatrix(columns_.leftCols(k));
  }

  static double orthonormality_error(const Matrix& w) {
    const Matrix gram = w.transpose() * w;
    return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  }

 private:
  Matrix columns_;
};

/// Subtracts row means. Already-centered input is returned unchanged.
inline DataMatrix center(const DataMatrix& data) {
  if (data.centered()) return data;
  const Vector means = data.values().rowwise().mean();
  Matrix shifted = data.values().colwise() - means;
  // Exact zeros for n = 1 instead of rounding residue.
  if (data.samples() == 1) shifted.setZero();
  return DataMatrix(std::move(shifted), true, means);
}

/// Shifts `data` by externally supplied means, e.g. test samples by training means.
/// The result is not flagged centered: its own row sums need not vanish.
inline DataMatrix center_with(const DataMatrix& data, const Vector& means) {
  if (means.size() != data.dim()) fail(ErrorKind::shape, "means length must equal data dimension");
  return DataMatrix(data.values().colwise() - means, false, means);
}

/// Returns W^T X (m x n).
inline Matrix project(const DataMatrix& data, const ProjectionMatrix& w) {
  if (data.dim() != w.dim()) {
    fail(ErrorKind::shape, "project: data has " + std::to_string(data.dim()) +
                               " rows but W has " + std::to_string(w.dim()));
  }
  return w.columns().transpose() * data.values();
}

/// Flips `v` so that its largest-magnitude entry (first on ties) is positive.
inline void canonicalize_sign(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (v[best] < 0) v = -v;
}

inline void require_unit(const Vector& w, const char* who) {
  if (std::abs(w.norm() - 1.0) > 1e-10) {
    fail(ErrorKind::contract, std::string(who) + ": w must have unit length (|w| = " +
                                  std::to_string(w.norm()) + ")");
  }
}

}  // namespace tl1pca

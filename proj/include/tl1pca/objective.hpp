#pragma once

// Dispersion objectives f(w) = sum_i phi(x_i^T w) and their gradients.
//
// Any type with a per-projection `component(t)` and a one-sided `slope(s)` for
// s = |t| > 0 can drive the sphere solver; the gradient is assembled as
// sum_i sign(x_i^T w) * slope(|x_i^T w|) * x_i.

#include <cmath>
#include <concepts>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "tl1pca/core.hpp"
#include "tl1pca/norms.hpp"

namespace tl1pca {

template <typename T>
concept DispersionObjective = requires(const T& obj, double t) {
  { obj.component(t) } -> std::convertible_to<double>;
  { obj.slope(t) } -> std::convertible_to<double>;
  { obj.label() } -> std::convertible_to<std::string>;
};

enum class ObjectiveKind { tl1, l1, lp };

inline std::string_view to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::tl1: return "tl1";
    case ObjectiveKind::l1: return "l1";
    case ObjectiveKind::lp: return "lp";
  }
  return "?";
}

/// One of the three dispersion objectives handled by the sphere solver.
class ObjectiveSpec {
 public:
  static ObjectiveSpec tl1(ShapeParamA a) { return {ObjectiveKind::tl1, a.value()}; }
  static ObjectiveSpec l1() { return {ObjectiveKind::l1, 1.0}; }
  static ObjectiveSpec lp(PNormExponent p) { return {ObjectiveKind::lp, p.value()}; }

  ObjectiveKind kind() const noexcept { return kind_; }
  /// a for tl1, p for lp, unused (1) for l1.
  double param() const noexcept { return param_; }

  double component(double t) const {
    const double s = std::abs(t);
    switch (kind_) {
      case ObjectiveKind::tl1: return (param_ + 1.0) * s / (param_ + s);
      case ObjectiveKind::l1: return s;
      case ObjectiveKind::lp: return s == 0.0 ? 0.0 : std::pow(s, param_);
    }
    return 0.0;
  }

  /// d phi / d|t| at |t| = s.
  double slope(double s) const {
    switch (kind_) {
      case ObjectiveKind::tl1: {
        const double q = param_ + s;
        return param_ * (param_ + 1.0) / (q * q);
      }
      case ObjectiveKind::l1: return 1.0;
      case ObjectiveKind::lp: return param_ * std::pow(s, param_ - 1.0);
    }
    return 0.0;
  }

  std::string label() const {
    std::string out(to_string(kind_));
    if (kind_ != ObjectiveKind::l1) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", param_);
      out += kind_ == ObjectiveKind::tl1 ? "(a=" : "(p=";
      out += buf;
      out += ')';
    }
    return out;
  }

 private:
  ObjectiveSpec(ObjectiveKind k, double p) : kind_(k), param_(p) {}

  ObjectiveKind kind_;
  double param_;
};

namespace detail {

// Neither routine checks |w| = 1 so that finite differences can leave the sphere.
template <DispersionObjective Obj>
double sum_components(const Matrix& x, const Vector& w, const Obj& obj) {
  const Vector t = x.transpose() * w;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) sum += obj.component(t[i]);
  return sum;
}

inline double sign_of(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

/// Gradient with sign(0) = 0, so exact kinks contribute nothing.
template <DispersionObjective Obj>
Vector raw_gradient(const Matrix& x, const Vector& w, const Obj& obj) {
  const Vector t = x.transpose() * w;
  Vector weights(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    weights[i] = t[i] == 0.0 ? 0.0 : sign_of(t[i]) * obj.slope(std::abs(t[i]));
  }
  return x * weights;
}

}  // namespace detail

template <DispersionObjective Obj>
double objective_value(const DataMatrix& data, const Vector& w, const Obj& obj) {
  if (w.size() != data.dim()) fail(ErrorKind::shape, "objective: w dimension mismatch");
  require_unit(w, "objective");
  return detail::sum_components(data.values(), w, obj);
}

template <DispersionObjective Obj>
Vector objective_gradient(const DataMatrix& data, const Vector& w, const Obj& obj) {
  if (w.size() != data.dim()) fail(ErrorKind::shape, "gradient: w dimension mismatch");
  require_unit(w, "gradient");
  return detail::raw_gradient(data.values(), w, obj);
}

/// sum_i rho_a(x_i^T w).
inline double tl1_objective(const DataMatrix& data, const Vector& w, ShapeParamA a) {
  return objective_value(data, w, ObjectiveSpec::tl1(a));
}

/// sum_i a(a+1) sign(x_i^T w) x_i / (a + |x_i^T w|)^2.
inline Vector tl1_gradient(const DataMatrix& data, const Vector& w, ShapeParamA a) {
  return objective_gradient(data, w, ObjectiveSpec::tl1(a));
}

}  // namespace tl1pca

#pragma once

// Transformed-l1 (Tl1) and lp penalties on vectors.
//
// rho_a(t) = (a+1)|t| / (a+|t|) is bounded by a+1, Lipschitz with constant 1+1/a,
// and tends to the l0 indicator as a -> 0+ and to |t| as a -> infinity.

#include <cmath>
#include <span>
#include <string>

#include "tl1pca/error.hpp"

namespace tl1pca {

/// Positive, finite Tl1 shape parameter.
class ShapeParamA {
 public:
  explicit ShapeParamA(double a) : a_(a) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      fail(ErrorKind::config, "a must be positive and finite (got " + std::to_string(a) + ")");
    }
  }
  double value() const noexcept { return a_; }

 private:
  double a_;
};

/// lp exponent restricted to (0, 1].
class PNormExponent {
 public:
  explicit PNormExponent(double p) : p_(p) {
    if (!(p > 0.0 && p <= 1.0)) fail(ErrorKind::config, "p must be in (0,1]");
  }
  double value() const noexcept { return p_; }

 private:
  double p_;
};

inline double rho_a(double t, ShapeParamA a) {
  const double s = std::abs(t);
  const double av = a.value();
  return (av + 1.0) * s / (av + s);
}

inline double tl1_norm(std::span<const double> x, ShapeParamA a) {
  double sum = 0.0;
  for (double v : x) sum += rho_a(v, a);
  return sum;
}

/// Sum of |x_i|^p, no root. This is the form maximized by the lp baseline.
inline double lp_dispersion(std::span<const double> x, PNormExponent p) {
  double sum = 0.0;
  for (double v : x) {
    if (v != 0.0) sum += std::pow(std::abs(v), p.value());
  }
  return sum;
}

/// (sum |x_i|^p)^(1/p). Reporting only.
inline double lp_norm(std::span<const double> x, PNormExponent p) {
  return std::pow(lp_dispersion(x, p), 1.0 / p.value());
}

}  // namespace tl1pca

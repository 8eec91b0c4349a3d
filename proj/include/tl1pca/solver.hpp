#pragma once

// Gradient ascent of a dispersion objective on the unit sphere.
//
// Each iteration projects the gradient onto the tangent plane at w, moves along
// the great circle w cos(theta) + g0 sin(theta), halves theta until the objective
// does not decrease, and then doubles theta (capped at pi/2) for the next step.
// The accepted objective sequence is therefore non-decreasing.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "tl1pca/core.hpp"
#include "tl1pca/objective.hpp"
#include "tl1pca/random.hpp"

namespace tl1pca {

struct SolverConfig {
  double theta0 = std::numbers::pi / 4;
  /// Draw theta0 uniformly from (0, pi/2] using `seed` instead of using `theta0`.
  bool random_theta0 = false;
  double theta_min = 1e-10;
  double rel_tol = 1e-8;
  int max_iter = 500;
  double perturb_scale = 1e-6;
  /// |x_i^T w| <= zero_margin * |x_i| counts as an exact kink.
  double zero_margin = 1e-12;
  std::uint64_t seed = 0;
  int max_halvings = 60;
  int max_zero_retries = 5;

  void validate() const {
    if (!(theta0 > 0.0 && theta0 <= std::numbers::pi / 2)) {
      fail(ErrorKind::config, "theta0 must be in (0, pi/2]");
    }
    if (!(theta_min > 0.0)) fail(ErrorKind::config, "theta_min must be positive");
    if (!(rel_tol >= 0.0)) fail(ErrorKind::config, "rel_tol must be non-negative");
    if (max_iter < 1) fail(ErrorKind::config, "max_iter must be at least 1");
    if (!(perturb_scale > 0.0)) fail(ErrorKind::config, "perturb_scale must be positive");
    if (!(zero_margin >= 0.0)) fail(ErrorKind::config, "zero_margin must be non-negative");
    if (max_halvings < 1) fail(ErrorKind::config, "max_halvings must be at least 1");
  }
};

enum class HaltReason { tolerance, theta_floor, max_iter };

inline const char* to_string(HaltReason r) {
  switch (r) {
    case HaltReason::tolerance: return "tolerance";
    case HaltReason::theta_floor: return "theta_floor";
    case HaltReason::max_iter: return "max_iter";
  }
  return "?";
}

/// objectives[0] is f(w0); entry k > 0 is the objective after the k-th accepted
/// step, taken with angle thetas[k] (thetas[0] is 0).
struct SolverTrace {
  std::vector<double> objectives;
  std::vector<double> thetas;
  int iterations = 0;
  bool converged = false;
  HaltReason halt_reason = HaltReason::max_iter;
};

inline void write_trace_csv(std::ostream& os, const SolverTrace& trace) {
  os << "iter,objective,theta\n";
  char buf[96];
  for (std::size_t k = 0; k < trace.objectives.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k, trace.objectives[k], trace.thetas[k]);
    os << buf;
  }
}

struct AscentResult {
  Vector w;
  SolverTrace trace;
};

/// Per-iteration view handed to an optional observer (used by tests).
struct IterationView {
  int iteration;
  const Vector& w;
  const Vector& gradient;  // after any collinearity perturbation
  const Vector& tangent;   // g = grad - <grad, w> w
};

using IterationObserver = std::function<void(const IterationView&)>;

/// Normalized sample maximizing the objective; ties go to the smallest index.
template <DispersionObjective Obj>
Vector initialize(const DataMatrix& data, const Obj& obj) {
  const Matrix& x = data.values();
  Eigen::Index best = -1;
  double best_f = -1.0;
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const double len = x.col(k).stableNorm();
    if (len == 0.0) continue;
    const double f = detail::sum_components(x, x.col(k) / len, obj);
    if (best < 0 || f > best_f) {
      best = k;
      best_f = f;
    }
  }
  if (best < 0) fail(ErrorKind::data, "all samples are zero; no initial direction exists");
  return x.col(best) / x.col(best).stableNorm();
}

namespace detail {

inline Vector random_direction(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
  const double len = v.norm();
  if (len == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / len;
}

/// Gradient at w with kinks resolved: while some nonzero x_i has
/// |x_i^T w| within the zero margin, evaluate at w nudged by a random positive
/// vector of length 1e-9. Terms still at a kink after the retries use sign +1.
template <DispersionObjective Obj>
Vector guarded_gradient(const Matrix& x, const Vector& w, const Obj& obj,
                        const SolverConfig& cfg, const Vector& col_norms, Rng& rng) {
  auto at_kink = [&](const Vector& t, Eigen::Index i) {
    return col_norms[i] > 0.0 && std::abs(t[i]) <= cfg.zero_margin * col_norms[i];
  };
  Vector probe = w;
  Vector t = x.transpose() * probe;
  for (int retry = 0; retry < cfg.max_zero_retries; ++retry) {
    bool any = false;
    for (Eigen::Index i = 0; i < t.size() && !any; ++i) any = at_kink(t, i);
    if (!any) break;
    probe = w + 1e-9 * random_direction(w.size(), rng).cwiseAbs();
    probe.normalize();
    t = x.transpose() * probe;
  }
  Vector weights(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (col_norms[i] == 0.0) {
      weights[i] = 0.0;
    } else if (at_kink(t, i)) {
      const double s = std::max({std::abs(t[i]), cfg.zero_margin * col_norms[i],
                                 1e-12 * col_norms[i]});
      weights[i] = obj.slope(s);
    } else {
      weights[i] = sign_of(t[i]) * obj.slope(std::abs(t[i]));
    }
  }
  return x * weights;
}

}  // namespace detail

/// Runs the ascent from a caller-supplied unit vector.
template <DispersionObjective Obj>
AscentResult ascend_from(const DataMatrix& data, const Obj& obj, const SolverConfig& cfg,
                         Vector w, const IterationObserver& observer = {}) {
  cfg.validate();
  if (w.size() != data.dim()) fail(ErrorKind::shape, "ascend: start vector dimension mismatch");
  require_unit(w, "ascend");

  const Matrix& x = data.values();
  // stableNorm throughout: samples near the overflow threshold must not turn into inf norms.
  const Vector col_norms = x.colwise().stableNorm().transpose();
  Rng rng(cfg.seed);

  double theta = cfg.theta0;
  if (cfg.random_theta0) {
    // (0, pi/2]: reflect the half-open [0, pi/2) draw.
    std::uniform_real_distribution<double> unif(0.0, std::numbers::pi / 2);
    theta = std::numbers::pi / 2 - unif(rng);
  }

  double f = detail::sum_components(x, w, obj);
  if (!std::isfinite(f)) fail(ErrorKind::numeric, "objective is not finite at the start point");

  AscentResult out;
  SolverTrace& trace = out.trace;
  trace.objectives.push_back(f);
  trace.thetas.push_back(0.0);

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    Vector grad = detail::guarded_gradient(x, w, obj, cfg, col_norms, rng);
    const double grad_norm = grad.stableNorm();
    Vector g = grad - grad.dot(w) * w;

    if (g.stableNorm() <= 1e-12 * grad_norm) {
      Vector xi = detail::random_direction(w.size(), rng) * (cfg.perturb_scale * grad_norm);
      if (grad.dot(xi) < 0.0) xi = -xi;
      grad += xi;
      g = grad - grad.dot(w) * w;
    }
    if (observer) observer(IterationView{iter, w, grad, g});

    const double g_norm = g.stableNorm();
    if (!std::isfinite(g_norm)) {
      fail(ErrorKind::numeric, "non-finite gradient at iteration " + std::to_string(iter));
    }
    if (g_norm == 0.0) {
      // No tangent direction at all (zero gradient, or a one-dimensional sphere).
      trace.halt_reason = HaltReason::tolerance;
      trace.converged = true;
      out.w = w;
      return out;
    }
    const Vector g0 = g / g_norm;

    bool accepted = false;
    Vector candidate;
    double f_candidate = f;
    for (int h = 0; h < cfg.max_halvings; ++h) {
      candidate = w * std::cos(theta) + g0 * std::sin(theta);
      candidate.normalize();
      f_candidate = detail::sum_components(x, candidate, obj);
      if (!std::isfinite(f_candidate)) {
        fail(ErrorKind::numeric, "non-finite objective at iteration " + std::to_string(iter));
      }
      if (f_candidate > f) {
        accepted = true;
        break;
      }
      theta /= 2;
      if (theta < cfg.theta_min) break;
    }
    if (!accepted) {
      trace.halt_reason = HaltReason::theta_floor;
      trace.converged = true;
      out.w = w;
      return out;
    }

    const double gain = f_candidate - f;
    const double scale = std::max(1.0, std::abs(f));
    w = std::move(candidate);
    f = f_candidate;
    trace.objectives.push_back(f);
    trace.thetas.push_back(theta);
    trace.iterations = iter;
    theta = std::min(2 * theta, std::numbers::pi / 2);

    if (gain <= cfg.rel_tol * scale) {
      trace.halt_reason = HaltReason::tolerance;
      trace.converged = true;
      out.w = w;
      return out;
    }
  }
  trace.halt_reason = HaltReason::max_iter;
  trace.converged = false;
  out.w = w;
  return out;
}

template <DispersionObjective Obj>
AscentResult ascend(const DataMatrix& data, const Obj& obj, const SolverConfig& cfg,
                    const IterationObserver& observer = {}) {
  return ascend_from(data, obj, cfg, initialize(data, obj), observer);
}

/// Max-norm relative discrepancy between the analytic gradient at w and central
/// finite differences with step h. Zero when both gradients vanish.
template <DispersionObjective Obj>
double fd_check(const DataMatrix& data, const Obj& obj, const Vector& w, double h) {
  const Matrix& x = data.values();
  const Vector analytic = detail::raw_gradient(x, w, obj);
  Vector numeric(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    Vector up = w, down = w;
    up[k] += h;
    down[k] -= h;
    numeric[k] = (detail::sum_components(x, up, obj) - detail::sum_components(x, down, obj)) /
                 (2 * h);
  }
  const double scale = std::max(analytic.cwiseAbs().maxCoeff(), numeric.cwiseAbs().maxCoeff());
  if (scale == 0.0) return 0.0;
  return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

}  // namespace tl1pca

#pragma once

// Nearest-neighbor accuracy against reduced dimension, angle between directions,
// and the serializable report that carries them.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "tl1pca/baselines.hpp"
#include "tl1pca/datasets.hpp"
#include "tl1pca/random.hpp"

namespace tl1pca {

inline constexpr double kShapeGrid[] = {100, 50, 10, 1, 0.5, 0.1, 0.05, 0.01, 0.001};
inline constexpr double kExponentGrid[] = {1, 0.9, 0.7, 0.5, 0.3, 0.1, 0.01, 0.001};

/// Label of the Euclidean-nearest training column for each test column.
/// Ties go to the smallest training index.
inline std::vector<int> knn1(const Matrix& train, const std::vector<int>& train_labels,
                             const Matrix& test) {
  if (train.cols() == 0) fail(ErrorKind::data, "knn1 needs at least one training sample");
  if (train.rows() != test.rows()) fail(ErrorKind::shape, "knn1: train/test dimension mismatch");
  if (static_cast<Eigen::Index>(train_labels.size()) != train.cols()) {
    fail(ErrorKind::shape, "knn1: one label per training sample required");
  }
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(test.cols()));
  for (Eigen::Index j = 0; j < test.cols(); ++j) {
    Eigen::Index best = 0;
    double best_dist = (train.col(0) - test.col(j)).squaredNorm();
    for (Eigen::Index i = 1; i < train.cols(); ++i) {
      const double dist = (train.col(i) - test.col(j)).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    out.push_back(train_labels[static_cast<std::size_t>(best)]);
  }
  return out;
}

inline double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size() || truth.empty()) {
    fail(ErrorKind::shape, "accuracy needs equally sized, non-empty label vectors");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

/// Angle in degrees between the lines spanned by w and ref, in [0, 90].
inline double angle_to(const Vector& w, const Vector& ref) {
  if (w.size() != ref.size()) fail(ErrorKind::shape, "angle_to: dimension mismatch");
  const double c = std::clamp(std::abs(w.dot(ref)) / (w.norm() * ref.norm()), 0.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

struct EvalReport {
  std::string method;
  std::optional<double> param;
  std::vector<int> dims;
  std::vector<double> mean_accuracy;             // per dimension
  std::vector<std::vector<double>> per_repeat;   // [repeat][dimension]
  std::optional<std::vector<double>> angles;
  std::vector<SolverTrace> traces;

  /// Index into `dims` of the highest mean accuracy (first on ties). This is a
  /// peak over the test data, not a validated choice.
  std::size_t peak_index() const {
    return static_cast<std::size_t>(
        std::max_element(mean_accuracy.begin(), mean_accuracy.end()) - mean_accuracy.begin());
  }
  double peak_accuracy() const { return mean_accuracy.at(peak_index()); }
};

struct NoiseOptions {
  int block = 0;
  BlockFill fill = BlockFill::random;
};

struct CurveOptions {
  bool refit_per_dim = false;
  /// Upper bound on worker threads; 0 means hardware concurrency.
  unsigned threads = 1;
};

namespace detail {

inline std::vector<double> evaluate_split(const LabeledDataset& ds, const Split& split,
                                          const MethodConfig& mc, const std::vector<int>& dims,
                                          const NoiseOptions& noise, std::uint64_t noise_seed,
                                          bool refit) {
  LabeledDataset train = select(ds, split.train);
  if (noise.block > 0) {
    std::vector<std::size_t> all(split.train.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    train = block_noise(train, noise.block, all, noise_seed, noise.fill);
  }
  const LabeledDataset test = select(ds, split.test);
  const DataMatrix train_c = center(train.data);
  const DataMatrix test_c = center_with(test.data, train_c.feature_means());

  auto score = [&](const ProjectionMatrix& w, Eigen::Index k) {
    const ProjectionMatrix wk = w.leading(std::min(k, w.count()));
    return accuracy(knn1(project(train_c, wk), train.labels, project(test_c, wk)), test.labels);
  };

  std::vector<double> acc;
  acc.reserve(dims.size());
  if (refit) {
    for (int k : dims) acc.push_back(score(fit_method(train_c, k, mc).w, k));
  } else {
    const int m = *std::max_element(dims.begin(), dims.end());
    const FitResult fitted = fit_method(train_c, m, mc);
    for (int k : dims) acc.push_back(score(fitted.w, k));
  }
  return acc;
}

}  // namespace detail

/// For every split: fit on the (optionally block-corrupted) training part,
/// centered with training means, then score 1-NN on the test part at each
/// dimension in `dims`. By default W is fitted once at max(dims) and its leading
/// columns are reused, which is exact for the nested greedy solutions.
inline EvalReport accuracy_curve(const LabeledDataset& ds, const MethodConfig& mc,
                                 std::vector<int> dims, const SplitSpec& split_spec,
                                 const NoiseOptions& noise = {}, const CurveOptions& opts = {}) {
  if (dims.empty()) fail(ErrorKind::config, "dims must not be empty");
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  if (dims.front() < 1 || dims.back() > ds.data.dim()) {
    fail(ErrorKind::config, "dims must lie in [1, d] with d = " + std::to_string(ds.data.dim()));
  }
  const std::vector<Split> splits = make_splits(ds, split_spec);
  const std::size_t repeats = splits.size();

  std::vector<std::vector<double>> per_repeat(repeats);
  std::vector<std::exception_ptr> errors(repeats);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < repeats; r = next++) {
      try {
        per_repeat[r] = detail::evaluate_split(ds, splits[r], mc, dims, noise,
                                               mix_seed(split_spec.seed, 0x6e6f697365ULL + r),
                                               opts.refit_per_dim);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  unsigned threads = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, repeats));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (std::size_t r = 0; r < repeats; ++r) {
    if (!errors[r]) continue;
    try {
      std::rethrow_exception(errors[r]);
    } catch (const Error& e) {
      throw Error(e.kind(), "repeat " + std::to_string(r) + ": " + e.what());
    }
  }

  EvalReport report;
  report.method = to_string(mc.method);
  if (mc.method == Method::tl1 || mc.method == Method::lp) report.param = mc.param;
  report.dims = dims;
  report.per_repeat = std::move(per_repeat);
  report.mean_accuracy.assign(dims.size(), 0.0);
  for (const auto& row : report.per_repeat) {
    for (std::size_t k = 0; k < dims.size(); ++k) report.mean_accuracy[k] += row[k];
  }
  for (double& v : report.mean_accuracy) v /= static_cast<double>(repeats);
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::ordered_json trace_to_json(const SolverTrace& t) {
  return {{"objectives", t.objectives},
          {"thetas", t.thetas},
          {"iterations", t.iterations},
          {"converged", t.converged},
          {"halt_reason", to_string(t.halt_reason)}};
}

inline nlohmann::ordered_json report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["param"] = r.param ? nlohmann::ordered_json(*r.param) : nlohmann::ordered_json(nullptr);
  j["dims"] = r.dims;
  j["mean_accuracy"] = r.mean_accuracy;
  j["per_repeat"] = r.per_repeat;
  if (!r.mean_accuracy.empty()) {
    j["test_set_peak"] = {{"dimension", r.dims[r.peak_index()]}, {"mean_accuracy", r.peak_accuracy()}};
  }
  if (r.angles) j["angles_deg"] = *r.angles;
  if (!r.traces.empty()) {
    auto& arr = j["traces"] = nlohmann::ordered_json::array();
    for (const auto& t : r.traces) arr.push_back(trace_to_json(t));
  }
  return j;
}

/// Long format: method,param,dimension,mean_accuracy.
inline void write_reports_csv(std::ostream& os, const std::vector<EvalReport>& reports) {
  os << "method,param,dimension,mean_accuracy\n";
  char buf[128];
  for (const auto& r : reports) {
    for (std::size_t k = 0; k < r.dims.size(); ++k) {
      if (r.param) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%d,%.17g\n", r.method.c_str(), *r.param, r.dims[k],
                      r.mean_accuracy[k]);
      } else {
        std::snprintf(buf, sizeof buf, "%s,,%d,%.17g\n", r.method.c_str(), r.dims[k], r.mean_accuracy[k]);
      }
      os << buf;
    }
  }
}

}  // namespace tl1pca

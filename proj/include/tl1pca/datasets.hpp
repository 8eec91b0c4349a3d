#pragma once

// Labeled datasets: the 2-D outlier toy set, block-noise corruption of images,
// CSV I/O, stratified random splits and synthetic Gaussian classes.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tl1pca/core.hpp"
#include "tl1pca/random.hpp"

namespace tl1pca {

struct ImageShape {
  int height = 0;
  int width = 0;
  bool operator==(const ImageShape&) const = default;
};

/// Samples are columns of `data`; pixel (r, c) of an image sample is feature r * width + c.
struct LabeledDataset {
  DataMatrix data;
  std::vector<int> labels;
  std::optional<ImageShape> image_shape;

  LabeledDataset(DataMatrix d, std::vector<int> l, std::optional<ImageShape> shape = std::nullopt)
      : data(std::move(d)), labels(std::move(l)), image_shape(shape) {
    if (static_cast<Eigen::Index>(labels.size()) != data.samples()) {
      fail(ErrorKind::data, "label count must equal the number of samples");
    }
    if (image_shape) {
      if (image_shape->height < 1 || image_shape->width < 1 ||
          static_cast<Eigen::Index>(image_shape->height) * image_shape->width != data.dim()) {
        fail(ErrorKind::data, "image_shape height*width must equal the feature count");
      }
    }
  }

  Eigen::Index size() const noexcept { return data.samples(); }
};

/// Columns `idx` of `ds`, in the given order.
inline LabeledDataset select(const LabeledDataset& ds, const std::vector<std::size_t>& idx) {
  if (idx.empty()) fail(ErrorKind::data, "cannot select an empty sample set");
  Matrix cols(ds.data.dim(), static_cast<Eigen::Index>(idx.size()));
  std::vector<int> labels;
  labels.reserve(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= static_cast<std::size_t>(ds.size())) fail(ErrorKind::data, "sample index out of range");
    cols.col(static_cast<Eigen::Index>(k)) = ds.data.values().col(static_cast<Eigen::Index>(idx[k]));
    labels.push_back(ds.labels[idx[k]]);
  }
  return LabeledDataset(DataMatrix(std::move(cols)), std::move(labels), ds.image_shape);
}

// ---------------------------------------------------------------------------
// Toy data

inline constexpr int kToyInliers = 30;
inline constexpr double kToyOutliers[4][2] = {{-4.0, 4.8}, {-3.7, 5.1}, {-3.3, 6.0}, {-2.4, 5.5}};

/// 30 inliers on the line y = x (x evenly spaced over [-3, 3], y ~ N(x, 1)),
/// shifted so both inlier coordinates sum to zero, followed by 4 fixed outliers.
/// Labels: 0 inlier, 1 outlier.
inline LabeledDataset toy_generate(std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix pts(2, kToyInliers + 4);
  for (int i = 0; i < kToyInliers; ++i) {
    const double x = -3.0 + 6.0 * i / (kToyInliers - 1);
    pts(0, i) = x;
    pts(1, i) = x + noise(rng);
  }
  const Eigen::Vector2d mean = pts.leftCols(kToyInliers).rowwise().mean();
  pts.leftCols(kToyInliers).colwise() -= mean;
  for (int k = 0; k < 4; ++k) {
    pts(0, kToyInliers + k) = kToyOutliers[k][0];
    pts(1, kToyInliers + k) = kToyOutliers[k][1];
  }
  std::vector<int> labels(kToyInliers, 0);
  labels.insert(labels.end(), 4, 1);
  return LabeledDataset(DataMatrix(std::move(pts)), std::move(labels));
}

// ---------------------------------------------------------------------------
// Block noise

enum class BlockFill { random, zero, max };

inline BlockFill parse_fill(const std::string& s) {
  if (s == "random") return BlockFill::random;
  if (s == "zero") return BlockFill::zero;
  if (s == "max") return BlockFill::max;
  fail(ErrorKind::config, "unknown fill '" + s + "' (expected random, zero or max)");
}

inline const char* to_string(BlockFill f) {
  switch (f) {
    case BlockFill::random: return "random";
    case BlockFill::zero: return "zero";
    case BlockFill::max: return "max";
  }
  return "?";
}

/// Overwrites one block x block square per targeted image at a uniformly random
/// position. Random fill draws uniformly over the dataset's observed value range.
inline LabeledDataset block_noise(const LabeledDataset& ds, int block,
                                  const std::vector<std::size_t>& targets, std::uint64_t seed,
                                  BlockFill fill = BlockFill::random) {
  if (!ds.image_shape) fail(ErrorKind::config, "block noise needs an image_shape");
  const int h = ds.image_shape->height;
  const int w = ds.image_shape->width;
  if (block < 0 || block > std::min(h, w)) {
    fail(ErrorKind::config, "block size " + std::to_string(block) + " does not fit a " +
                                std::to_string(h) + "x" + std::to_string(w) + " image");
  }
  if (block == 0) return ds;

  Matrix values = ds.data.values();
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  Rng rng(seed);
  std::uniform_int_distribution<int> row_pos(0, h - block);
  std::uniform_int_distribution<int> col_pos(0, w - block);
  std::uniform_real_distribution<double> value(lo, hi);

  for (std::size_t target : targets) {
    if (target >= static_cast<std::size_t>(ds.size())) fail(ErrorKind::data, "target index out of range");
    const int r0 = row_pos(rng);
    const int c0 = col_pos(rng);
    auto col = values.col(static_cast<Eigen::Index>(target));
    for (int r = r0; r < r0 + block; ++r) {
      for (int c = c0; c < c0 + block; ++c) {
        double v = 0.0;
        switch (fill) {
          case BlockFill::random: v = value(rng); break;
          case BlockFill::zero: v = 0.0; break;
          case BlockFill::max: v = hi; break;
        }
        col[static_cast<Eigen::Index>(r) * w + c] = v;
      }
    }
  }
  return LabeledDataset(DataMatrix(std::move(values)), ds.labels, ds.image_shape);
}

// ---------------------------------------------------------------------------
// CSV
//
//   #image_shape=H,W        (optional, before the header)
//   label,f0,f1,...
//   3,0.5,1.25,...          (one sample per row)

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorKind::data, "csv line " + std::to_string(line) + ": " + what);
}

}  // namespace detail

inline LabeledDataset read_csv(std::istream& in) {
  std::optional<ImageShape> shape;
  std::optional<std::size_t> width;
  std::vector<int> labels;
  std::vector<double> flat;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = detail::trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      constexpr std::string_view key = "#image_shape=";
      if (view.substr(0, key.size()) == key) {
        const auto parts = detail::split_commas(view.substr(key.size()));
        ImageShape s;
        if (parts.size() != 2 || !detail::parse_number(parts[0], s.height) ||
            !detail::parse_number(parts[1], s.width)) {
          detail::parse_fail(line_no, "malformed image_shape metadata");
        }
        shape = s;
      }
      continue;
    }
    const auto cells = detail::split_commas(view);
    if (!header_seen) {
      if (detail::trim(cells[0]) != "label" || cells.size() < 2) {
        detail::parse_fail(line_no, "expected header 'label,f0,f1,...'");
      }
      width = cells.size() - 1;
      header_seen = true;
      continue;
    }
    if (cells.size() != *width + 1) {
      detail::parse_fail(line_no, "expected " + std::to_string(*width + 1) + " cells, found " +
                                      std::to_string(cells.size()));
    }
    int label = 0;
    if (!detail::parse_number(cells[0], label)) detail::parse_fail(line_no, "label is not an integer");
    labels.push_back(label);
    for (std::size_t k = 1; k < cells.size(); ++k) {
      double v = 0.0;
      if (!detail::parse_number(cells[k], v) || !std::isfinite(v)) {
        detail::parse_fail(line_no, "cell " + std::to_string(k) + " is not a finite number");
      }
      flat.push_back(v);
    }
  }
  if (!header_seen) fail(ErrorKind::data, "csv has no header");
  if (labels.empty()) fail(ErrorKind::data, "csv contains no samples");

  const auto d = static_cast<Eigen::Index>(*width);
  const auto n = static_cast<Eigen::Index>(labels.size());
  // Row-per-sample file -> column-per-sample matrix.
  Matrix values = Eigen::Map<const Matrix>(flat.data(), d, n);
  return LabeledDataset(DataMatrix(std::move(values)), std::move(labels), shape);
}

inline LabeledDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::data, "cannot open " + path);
  return read_csv(in);
}

inline void write_csv(std::ostream& os, const LabeledDataset& ds) {
  if (ds.image_shape) {
    os << "#image_shape=" << ds.image_shape->height << ',' << ds.image_shape->width << '\n';
  }
  os << "label";
  for (Eigen::Index k = 0; k < ds.data.dim(); ++k) os << ",f" << k;
  os << '\n';
  char buf[40];
  const Matrix& x = ds.data.values();
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    os << ds.labels[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < x.rows(); ++k) {
      std::snprintf(buf, sizeof buf, ",%.17g", x(k, i));
      os << buf;
    }
    os << '\n';
  }
}

inline std::string to_csv_string(const LabeledDataset& ds) {
  std::ostringstream os;
  write_csv(os, ds);
  return os.str();
}

// ---------------------------------------------------------------------------
// Splits

/// Exactly one of train_per_class / train_fraction must be set.
struct SplitSpec {
  std::optional<int> train_per_class;
  std::optional<double> train_fraction;
  int n_repeats = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (train_per_class.has_value() == train_fraction.has_value()) {
      fail(ErrorKind::config, "set exactly one of train_per_class and train_fraction");
    }
    if (train_per_class && *train_per_class < 1) fail(ErrorKind::config, "train_per_class must be >= 1");
    if (train_fraction && !(*train_fraction > 0.0 && *train_fraction < 1.0)) {
      fail(ErrorKind::config, "train_fraction must be in (0,1)");
    }
    if (n_repeats < 1) fail(ErrorKind::config, "n_repeats must be >= 1");
  }
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified per class; train and test are sorted and partition all samples.
inline std::vector<Split> make_splits(const std::vector<int>& labels, const SplitSpec& spec) {
  spec.validate();
  std::map<int, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < labels.size(); ++i) classes[labels[i]].push_back(i);
  if (classes.empty()) fail(ErrorKind::data, "no samples to split");

  std::map<int, std::size_t> train_count;
  for (const auto& [label, members] : classes) {
    const std::size_t size = members.size();
    const long k = spec.train_per_class
                       ? *spec.train_per_class
                       : std::lround(*spec.train_fraction * static_cast<double>(size));
    if (k < 1 || static_cast<std::size_t>(k) >= size) {
      fail(ErrorKind::config, "class " + std::to_string(label) + " has " + std::to_string(size) +
                                  " samples; cannot take " + std::to_string(k) +
                                  " for training and keep a test sample");
    }
    train_count[label] = static_cast<std::size_t>(k);
  }

  std::vector<Split> out;
  out.reserve(static_cast<std::size_t>(spec.n_repeats));
  for (int r = 0; r < spec.n_repeats; ++r) {
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(r)));
    Split split;
    for (const auto& [label, members] : classes) {
      std::vector<std::size_t> shuffled = members;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const std::size_t k = train_count[label];
      split.train.insert(split.train.end(), shuffled.begin(), shuffled.begin() + static_cast<long>(k));
      split.test.insert(split.test.end(), shuffled.begin() + static_cast<long>(k), shuffled.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    out.push_back(std::move(split));
  }
  return out;
}

inline std::vector<Split> make_splits(const LabeledDataset& ds, const SplitSpec& spec) {
  return make_splits(ds.labels, spec);
}

// ---------------------------------------------------------------------------
// Synthetic classes

struct SyntheticSpec {
  int n_classes = 10;
  int per_class = 10;
  int dim = 30;
  double noise_fraction = 0.0;
  /// Spread of the class means relative to the unit within-class deviation.
  double separation = 3.0;
  /// Scale of the Cauchy corruption added to every feature of a corrupted sample.
  double corruption_scale = 10.0;
};

/// Gaussian clusters with N(0, separation^2) means and unit within-class noise.
/// A seeded subset of round(noise_fraction * n) samples additionally receives
/// Cauchy-distributed corruption on every feature.
inline LabeledDataset synthetic_classes(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.n_classes < 1 || spec.per_class < 1 || spec.dim < 1) {
    fail(ErrorKind::config, "synthetic_classes needs positive class count, class size and dimension");
  }
  if (!(spec.noise_fraction >= 0.0 && spec.noise_fraction <= 1.0)) {
    fail(ErrorKind::config, "noise_fraction must be in [0,1]");
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index d = spec.dim;
  const Eigen::Index n = static_cast<Eigen::Index>(spec.n_classes) * spec.per_class;

  Matrix means(d, spec.n_classes);
  for (Eigen::Index c = 0; c < means.cols(); ++c) {
    for (Eigen::Index k = 0; k < d; ++k) means(k, c) = spec.separation * normal(rng);
  }
  Matrix x(d, n);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto c = static_cast<int>(i / spec.per_class);
    for (Eigen::Index k = 0; k < d; ++k) x(k, i) = means(k, c) + normal(rng);
    labels.push_back(c);
  }

  const auto n_noisy = static_cast<std::size_t>(std::lround(spec.noise_fraction * static_cast<double>(n)));
  if (n_noisy > 0) {
    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::cauchy_distribution<double> cauchy(0.0, spec.corruption_scale);
    for (std::size_t k = 0; k < n_noisy; ++k) {
      const auto i = static_cast<Eigen::Index>(order[k]);
      for (Eigen::Index f = 0; f < d; ++f) x(f, i) += cauchy(rng);
    }
  }
  return LabeledDataset(DataMatrix(std::move(x)), std::move(labels));
}

}  // namespace tl1pca

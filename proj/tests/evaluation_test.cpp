#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "tl1pca/evaluation.hpp"

using namespace tl1pca;

TEST(Knn1, ExactMatchAndTies) {
  Matrix train(1, 2);
  train << 0.0, 2.0;
  Matrix test(1, 2);
  test << 2.0, 1.0;
  EXPECT_EQ(knn1(train, {5, 7}, test), (std::vector<int>{7, 5}));
}

TEST(Knn1, ThreeClassFixture) {
  // Training points and their classes.
  Matrix train(2, 5);
  train << 0, 4, 0, 5, -3,
           0, 0, 4, 5, -3;
  const std::vector<int> labels{0, 1, 2, 1, 0};
  Matrix test(2, 4);
  test << 1, 3, 1, -1,
          1, 1, 3, -2;
  // Squared distances (rows: test, columns: train):
  //   (1,1):  2 10 10 32 32  -> train 0 -> class 0
  //   (3,1):  10 2 18 20 52  -> train 1 -> class 1
  //   (1,3):  10 18 2 20 52  -> train 2 -> class 2
  //   (-1,-2): 5 29 37 85 5  -> tie 0/4, lower index -> class 0
  EXPECT_EQ(knn1(train, labels, test), (std::vector<int>{0, 1, 2, 0}));
}

TEST(Knn1, Errors) {
  EXPECT_THROW(knn1(Matrix(2, 0), {}, Matrix::Zero(2, 1)), Error);
  EXPECT_THROW(knn1(Matrix::Zero(2, 1), {0}, Matrix::Zero(3, 1)), Error);
}

TEST(Knn1, InvariantUnderOrthogonalTransform) {
  std::mt19937_64 rng(41);
  const Matrix train = oracle::random_matrix(4, 30, rng);
  const Matrix test = oracle::random_matrix(4, 20, rng);
  std::vector<int> labels(30);
  for (int i = 0; i < 30; ++i) labels[static_cast<std::size_t>(i)] = i % 4;
  const Matrix q = oracle::random_orthogonal(4, rng);
  EXPECT_EQ(knn1(train, labels, test), knn1(q * train, labels, q * test));
}

TEST(AngleTo, KnownAngles) {
  Vector e1(2), e2(2), diag(2);
  e1 << 1, 0;
  e2 << 0, 1;
  diag << std::sqrt(0.5), std::sqrt(0.5);
  EXPECT_EQ(angle_to(diag, diag), 0.0);
  EXPECT_NEAR(angle_to(e1, e2), 90.0, 1e-12);
  EXPECT_NEAR(angle_to(e1, diag), 45.0, 1e-12);
  EXPECT_NEAR(angle_to(-e1, diag), 45.0, 1e-12);
}

namespace {

LabeledDataset separable() {
  // Four classes at the corners of a square, tiny spread.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.05);
  Matrix x(2, 40);
  std::vector<int> labels;
  const double cx[] = {5, -5, 5, -5}, cy[] = {5, 5, -5, -5};
  for (int i = 0; i < 40; ++i) {
    const int c = i % 4;
    x(0, i) = cx[c] + n(rng);
    x(1, i) = cy[c] + n(rng);
    labels.push_back(c);
  }
  return LabeledDataset(DataMatrix(x), labels);
}

}  // namespace

TEST(AccuracyCurve, SeparableFixtureIsPerfect) {
  SplitSpec split;
  split.train_fraction = 0.7;
  split.n_repeats = 3;
  for (Method m : {Method::tl1, Method::l1, Method::l2}) {
    const EvalReport r = accuracy_curve(separable(), MethodConfig{m, 1.0, {}}, {2}, split);
    ASSERT_EQ(r.mean_accuracy.size(), 1u);
    EXPECT_EQ(r.mean_accuracy[0], 1.0);
    EXPECT_EQ(r.per_repeat.size(), 3u);
  }
}

TEST(AccuracyCurve, DeterministicAcrossRunsAndThreads) {
  SyntheticSpec spec;
  spec.n_classes = 4;
  spec.per_class = 10;
  spec.dim = 8;
  spec.noise_fraction = 0.2;
  const LabeledDataset ds = synthetic_classes(spec, 2);
  SplitSpec split;
  split.train_fraction = 0.7;
  split.n_repeats = 4;
  split.seed = 3;
  const MethodConfig mc{Method::tl1, 0.1, {}};
  const EvalReport a = accuracy_curve(ds, mc, {1, 2, 4}, split, {}, {false, 1});
  const EvalReport b = accuracy_curve(ds, mc, {1, 2, 4}, split, {}, {false, 4});
  EXPECT_EQ(a.per_repeat, b.per_repeat);
  EXPECT_EQ(a.mean_accuracy, b.mean_accuracy);
  for (double v : a.mean_accuracy) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(AccuracyCurve, PrefixEqualsRefit) {
  SyntheticSpec spec;
  spec.n_classes = 3;
  spec.per_class = 12;
  spec.dim = 7;
  spec.noise_fraction = 0.1;
  const LabeledDataset ds = synthetic_classes(spec, 6);
  SplitSpec split;
  split.train_per_class = 8;
  split.n_repeats = 2;
  for (Method m : {Method::tl1, Method::lp, Method::l2}) {
    const MethodConfig mc{m, 0.5, {}};
    const EvalReport prefix = accuracy_curve(ds, mc, {1, 3, 5}, split);
    const EvalReport refit = accuracy_curve(ds, mc, {1, 3, 5}, split, {}, {true, 1});
    EXPECT_EQ(prefix.per_repeat, refit.per_repeat) << to_string(m);
  }
}

TEST(AccuracyCurve, CleanDataNearParity) {
  SyntheticSpec spec;
  spec.n_classes = 8;
  spec.per_class = 10;
  spec.dim = 20;
  const LabeledDataset ds = synthetic_classes(spec, 10);
  SplitSpec split;
  split.train_fraction = 0.7;
  split.n_repeats = 5;
  const std::vector<int> dims{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const EvalReport t = accuracy_curve(ds, MethodConfig{Method::tl1, 1.0, {}}, dims, split);
  const EvalReport p = accuracy_curve(ds, MethodConfig{Method::l2, 1.0, {}}, dims, split);
  EXPECT_LE(std::abs(t.peak_accuracy() - p.peak_accuracy()), 0.05);
}

TEST(AccuracyCurve, BlockNoiseOnTraining) {
  Rng rng(8);
  std::uniform_real_distribution<double> px(0, 1);
  Matrix x(16, 24);
  std::vector<int> labels;
  for (Eigen::Index j = 0; j < 24; ++j) {
    for (Eigen::Index i = 0; i < 16; ++i) x(i, j) = px(rng) + (j % 2) * (i < 8 ? 1.0 : 0.0);
    labels.push_back(static_cast<int>(j % 2));
  }
  const LabeledDataset ds(DataMatrix(x), labels, ImageShape{4, 4});
  SplitSpec split;
  split.train_fraction = 0.5;
  const EvalReport r = accuracy_curve(ds, MethodConfig{Method::l2, 1, {}}, {1, 4}, split, {2, BlockFill::zero});
  EXPECT_EQ(r.dims, (std::vector<int>{1, 4}));
  EXPECT_THROW(accuracy_curve(ds, MethodConfig{Method::l2, 1, {}}, {1}, split, {5, BlockFill::zero}), Error);
}

TEST(AccuracyCurve, ErrorsNameTheRepeat) {
  // Class 1 has a zero-variance training part in every split: nothing to fit.
  Matrix x = Matrix::Zero(3, 6);
  const LabeledDataset ds(DataMatrix(x), {0, 0, 0, 1, 1, 1});
  SplitSpec split;
  split.train_per_class = 2;
  try {
    accuracy_curve(ds, MethodConfig{Method::tl1, 1, {}}, {1}, split);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
    EXPECT_NE(std::string(e.what()).find("repeat 0"), std::string::npos);
  }
  EXPECT_THROW(accuracy_curve(ds, MethodConfig{}, {4}, split), Error);
}

TEST(Report, JsonAndCsv) {
  EvalReport r;
  r.method = "tl1";
  r.param = 0.5;
  r.dims = {1, 2};
  r.mean_accuracy = {0.5, 0.75};
  r.per_repeat = {{0.5, 0.5}, {0.5, 1.0}};
  const auto j = report_to_json(r);
  EXPECT_EQ(j["method"], "tl1");
  EXPECT_EQ(j["per_repeat"].size(), 2u);
  EXPECT_EQ(j["test_set_peak"]["dimension"], 2);
  std::ostringstream os;
  write_reports_csv(os, {r});
  EXPECT_EQ(os.str(), "method,param,dimension,mean_accuracy\ntl1,0.5,1,0.5\ntl1,0.5,2,0.75\n");
}

TEST(Grids, MatchSearchedParameters) {
  EXPECT_EQ(std::size(kShapeGrid), 9u);
  EXPECT_EQ(kShapeGrid[0], 100);
  EXPECT_EQ(kShapeGrid[8], 0.001);
  EXPECT_EQ(std::size(kExponentGrid), 8u);
  EXPECT_EQ(kExponentGrid[7], 0.001);
}

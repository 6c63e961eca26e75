#include <gtest/gtest.h>

#include <vector>

#include "embedprobe/metrics.hpp"

using namespace embedprobe;

TEST(Metrics, HandComputedTwoByTwo) {
  ConfusionMatrix cm(2);
  cm(0, 0) = 2;
  cm(1, 0) = 1;
  cm(1, 1) = 1;
  const auto m = metrics(cm);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.75);
  // class 0: precision 2/3, recall 1; class 1: precision 1, recall 1/2
  EXPECT_NEAR(m.per_class[0].f1, 0.8, 1e-15);
  EXPECT_NEAR(m.per_class[1].f1, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(m.macro_f1, (0.8 + 2.0 / 3.0) / 2.0, 1e-15);
  EXPECT_NEAR(m.macro_f1, 0.7333, 1e-4);
  EXPECT_NEAR(m.per_class[0].precision, 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(m.per_class[1].recall, 0.5);
}

TEST(Metrics, DiagonalIsPerfect) {
  ConfusionMatrix cm(3);
  cm(0, 0) = 4;
  cm(1, 1) = 2;
  cm(2, 2) = 7;
  const auto m = metrics(cm);
  EXPECT_DOUBLE_EQ(m.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(m.macro_f1, 1.0);
}

TEST(Metrics, TotalConfusionAndZeroDenominators) {
  ConfusionMatrix cm(2);
  cm(0, 1) = 5;
  cm(1, 0) = 5;
  const auto m = metrics(cm);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.0);
  EXPECT_DOUBLE_EQ(m.macro_f1, 0.0);

  ConfusionMatrix never_predicted(2);
  never_predicted(0, 0) = 3;
  never_predicted(1, 0) = 3;
  EXPECT_DOUBLE_EQ(metrics(never_predicted).per_class[1].precision, 0.0);
  EXPECT_DOUBLE_EQ(metrics(never_predicted).per_class[1].f1, 0.0);
}

TEST(Metrics, EmptyMatrixIsAnError) { EXPECT_THROW(metrics(ConfusionMatrix(2)), ArgumentError); }

TEST(GeometricMean, Values) {
  const std::vector<double> same{0.8, 0.8}, sq{0.64, 1.0}, one{0.37};
  EXPECT_NEAR(geometric_mean(same), 0.8, 1e-15);
  EXPECT_NEAR(geometric_mean(sq), 0.8, 1e-15);
  EXPECT_NEAR(geometric_mean(one), 0.37, 1e-15);
  const std::vector<double> zero{0.5, 0.0}, neg{-0.1};
  EXPECT_THROW(geometric_mean(zero), ArgumentError);
  EXPECT_THROW(geometric_mean(neg), ArgumentError);
}

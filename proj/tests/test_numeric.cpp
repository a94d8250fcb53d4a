#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mclt/error.hpp"
#include "mclt/numeric.hpp"

using namespace mclt;

TEST(PairwiseSum, MatchesLongDoubleAccumulation) {
  std::vector<double> v;
  long double ref = 0.0L;
  for (int i = 1; i <= 10007; ++i) {
    v.push_back(1.0 / i);
    ref += 1.0L / i;
  }
  EXPECT_NEAR(pairwise_sum(v), static_cast<double>(ref), 1e-13);
  EXPECT_NEAR(pairwise_mean(v), static_cast<double>(ref / 10007), 1e-17);
}

TEST(PairwiseSum, EmptyAndSmall) {
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
  EXPECT_EQ(pairwise_sum(std::vector<double>{1.5, 2.5}), 4.0);
}

TEST(LogGrid, EndpointsAndSpacing) {
  const auto g = log_grid(1e-6, 1e6, 200);
  ASSERT_EQ(g.size(), 200U);
  EXPECT_DOUBLE_EQ(g.front(), 1e-6);
  EXPECT_DOUBLE_EQ(g.back(), 1e6);
  for (std::size_t i = 2; i < g.size(); ++i) {
    EXPECT_NEAR(std::log(g[i] / g[i - 1]), std::log(g[1] / g[0]), 1e-12);
  }
}

TEST(SampleStddev, UsesBesselCorrection) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  EXPECT_NEAR(sample_stddev(v), std::sqrt(5.0 / 3.0), 1e-15);
}

TEST(AdaptiveGaussLegendre, SmoothIntegrand) {
  const double v = adaptive_gauss_legendre([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-13);
  EXPECT_NEAR(v, 2.0, 1e-13);
}

TEST(AdaptiveGaussLegendre, KinkedIntegrand) {
  const double v = adaptive_gauss_legendre([](double x) { return std::abs(x - 0.3); }, -1.0, 1.0, 1e-12);
  EXPECT_NEAR(v, 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7, 1e-11);
}

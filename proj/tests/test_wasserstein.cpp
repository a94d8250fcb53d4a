#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mclt/error.hpp"
#include "mclt/gaussian.hpp"
#include "mclt/random.hpp"
#include "mclt/wasserstein.hpp"

using namespace mclt;

namespace {

const double kSqrt2OverPiRef = std::sqrt(2.0 / std::numbers::pi);

// W_1 = ∫ |F_m(x) - Φ(x)| dx by a fine midpoint rule; independent of the
// quantile-coupling formula used by the library.
double cdf_gap_w1(const std::vector<double>& sorted) {
  const double lo = std::min(-9.0, sorted.front() - 1.0);
  const double hi = std::max(9.0, sorted.back() + 1.0);
  const int steps = 4000000;
  const double h = (hi - lo) / steps;
  const double m = static_cast<double>(sorted.size());
  double acc = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double x = lo + (i + 0.5) * h;
    const double fm = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) / m;
    acc += std::abs(fm - normal_cdf(x));
  }
  return acc * h;
}

std::vector<double> normal_sample(std::size_t m, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> v(m);
  for (auto& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST(WrVsNormal, PointMassAtZero) {
  const std::vector<double> zeros(7, 0.0);
  EXPECT_NEAR(wr_vs_normal(zeros, 1.0).value, kSqrt2OverPiRef, 1e-12);
  EXPECT_NEAR(wr_vs_normal(zeros, 2.0).value, 1.0, 1e-12);
  EXPECT_NEAR(wr_vs_normal(zeros, 3.0).value, std::cbrt(2.0 * kSqrt2OverPiRef), 1e-12);
}

TEST(WrVsNormal, PointMassClosedForm) {
  for (const double c : {-2.0, 0.3, 1.0, 4.0}) {
    const std::vector<double> s(5, c);
    const double expect = c * (2.0 * normal_cdf(c) - 1.0) + 2.0 * normal_pdf(c);
    EXPECT_NEAR(wr_vs_normal(s, 1.0).value, expect, 1e-12) << c;
  }
}

TEST(WrVsNormal, FractionalOrderMatchesIntegerNeighbours) {
  const auto v = [] {
    auto s = normal_sample(300, 2);
    std::sort(s.begin(), s.end());
    return s;
  }();
  const double w1 = wr_vs_normal(v, 1.0).value;
  const double w15 = wr_vs_normal(v, 1.5).value;
  const double w2 = wr_vs_normal(v, 2.0).value;
  EXPECT_LE(w1, w15);
  EXPECT_LE(w15, w2);
  EXPECT_NEAR(wr_vs_normal(v, 1.0 + 1e-9).value, w1, 1e-7);
  const std::vector<double> zeros(3, 0.0);
  // E|N|^{3/2} = 2^{3/4} Γ(5/4) / √π.
  const double m15 = std::pow(2.0, 0.75) * std::tgamma(1.25) / std::sqrt(std::numbers::pi);
  EXPECT_NEAR(wr_vs_normal(zeros, 1.5).value, std::pow(m15, 1.0 / 1.5), 1e-9);
}

TEST(WrVsNormal, AgreesWithCdfQuadrature) {
  auto s = normal_sample(2000, 5);
  for (auto& x : s) x = 0.8 * x + 0.1;
  std::sort(s.begin(), s.end());
  EXPECT_NEAR(wr_vs_normal(s, 1.0).value, cdf_gap_w1(s), 1e-6);
}

TEST(WrVsNormal, StratifiedQuantilesAreClose) {
  const std::size_t m = 1000000;
  std::vector<double> s(m);
  for (std::size_t i = 0; i < m; ++i) s[i] = normal_quantile((static_cast<double>(i) + 0.5) / m);
  EXPECT_LT(wr_vs_normal(s, 1.0).value, 1e-3);
  std::vector<double> small(5000);
  for (std::size_t i = 0; i < small.size(); ++i) small[i] = normal_quantile((i + 0.5) / small.size());
  EXPECT_NEAR(wr_vs_normal(small, 1.0).value, cdf_gap_w1(small), 1e-6);
}

TEST(WrVsNormal, MonotoneInOrder) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto s = normal_sample(200, seed);
    for (auto& x : s) x = 1.3 * x * x - 0.5;
    std::sort(s.begin(), s.end());
    const double w1 = wr_vs_normal(s, 1.0).value;
    const double w2 = wr_vs_normal(s, 2.0).value;
    const double w3 = wr_vs_normal(s, 3.0).value;
    ASSERT_LE(w1, w2);
    ASSERT_LE(w2, w3);
  }
}

TEST(WrVsNormal, RejectsBadInput) {
  EXPECT_THROW(wr_vs_normal(std::vector<double>{1.0, 0.0}, 1.0), DataError);
  EXPECT_THROW(wr_vs_normal(std::vector<double>{0.0, 1.0}, 0.5), DomainError);
  EXPECT_THROW(wr_vs_normal(std::vector<double>{}, 1.0), DataError);
}

TEST(WrVsNormalBatched, StderrScalesWithReplications) {
  const auto s = normal_sample(400000, 17);
  const auto half = wr_vs_normal_batched(std::span<const double>(s).first(200000), 1.0, 100);
  const auto full = wr_vs_normal_batched(s, 1.0, 100);
  EXPECT_EQ(full.m, 400000U);
  const double ratio = half.std_error / full.std_error;
  EXPECT_GE(ratio, 1.2);
  EXPECT_LE(ratio, 1.7);
}

TEST(SinLowerBound, NormalSampleIsNearZero) {
  const auto s = normal_sample(200000, 3);
  const auto est = w1_lower_bound_sin(s, 0.3, 100);
  EXPECT_LE(std::abs(est.value), 3.0 * est.std_error);
}

TEST(SinLowerBound, PeakValue) {
  const double alpha = 0.25;
  const std::vector<double> s(200, alpha * std::numbers::pi / 2.0);
  EXPECT_NEAR(w1_lower_bound_sin(s, alpha, 10).value, alpha, 1e-15);
}

TEST(GaussianSmooth, Examples) {
  const auto id = [](double x) { return x; };
  EXPECT_NEAR(gaussian_smooth(id, 2.0, 0.7), 0.7, 1e-12);
  const double alpha = 0.2;
  const auto h = [alpha](double x) { return alpha * std::sin(x / alpha); };
  for (const double x : {-1.0, 0.05, 0.3, 2.0}) {
    EXPECT_NEAR(gaussian_smooth(h, alpha, x), h(x) / std::sqrt(std::numbers::e), 1e-9);
  }
  const auto abs_f = [](double x) { return std::abs(x); };
  for (const double sigma : {0.1, 1.0, 10.0}) {
    EXPECT_NEAR(gaussian_smooth(abs_f, sigma, 0.0), sigma * kSqrt2OverPiRef, 1e-9 * std::max(1.0, sigma));
  }
}

TEST(GaussianSmooth, AbsValueClosedForm) {
  // E|x + σN| = x(2Φ(x/σ) - 1) + 2σφ(x/σ).
  const auto abs_f = [](double x) { return std::abs(x); };
  for (const double sigma : {0.1, 1.0, 10.0}) {
    for (const double x : {-3.0, -0.05, 0.2, 7.0}) {
      const double expect = x * (2.0 * normal_cdf(x / sigma) - 1.0) + 2.0 * sigma * normal_pdf(x / sigma);
      EXPECT_NEAR(gaussian_smooth(abs_f, sigma, x), expect, 1e-9 * std::max(1.0, sigma));
    }
  }
}

TEST(GaussianSmooth, SecondDerivativeOfAbs) {
  const auto abs_f = [](double x) { return std::abs(x); };
  for (const double sigma : {0.1, 1.0, 10.0}) {
    const double h = 0.01 * sigma;
    double peak = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const double x = -5.0 * sigma + 0.1 * sigma * k;
      const double d2 = (gaussian_smooth(abs_f, sigma, x + h) - 2.0 * gaussian_smooth(abs_f, sigma, x) +
                         gaussian_smooth(abs_f, sigma, x - h)) /
                        (h * h);
      // |x|'' = 2δ, so f_σ'' = 2φ(x/σ)/σ.
      EXPECT_NEAR(d2, 2.0 * normal_pdf(x / sigma) / sigma, 1e-5 / sigma);
      peak = std::max(peak, d2);
    }
    EXPECT_GE(peak, 0.79 / sigma);
    EXPECT_LE(peak, 0.80 / sigma);
  }
}

TEST(GaussianSmooth, RejectsNonFinite) {
  const auto bad = [](double x) { return x > 1.0 ? std::numeric_limits<double>::infinity() : 0.0; };
  EXPECT_THROW(gaussian_smooth(bad, 1.0, 0.0), DataError);
}

TEST(CosineRegion, Membership) {
  EXPECT_TRUE(in_cosine_region(0.0));
  EXPECT_TRUE(in_cosine_region(2.0 * std::numbers::pi));
  EXPECT_FALSE(in_cosine_region(std::numbers::pi));
  EXPECT_TRUE(in_cosine_region(-0.3));
  for (double x = -50.0; x < 50.0; x += 0.0137) {
    ASSERT_EQ(in_cosine_region(x), std::cos(x) >= 0.5) << x;
  }
}

TEST(RegionProbability, SmallScaleApproachesThird) {
  const double kappa = 1e-3;
  // Brute-force oracle: fine midpoint rule over t with the membership test cos(t/κ) >= 1/2.
  const int steps = 20000000;
  const double lo = -9.0;
  const double h = 18.0 / steps;
  double acc = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double t = lo + (i + 0.5) * h;
    if (std::cos(t / kappa) >= 0.5) acc += normal_pdf(t);
  }
  const double brute = acc * h;
  const double v = region_probability(kappa);
  EXPECT_NEAR(v, 1.0 / 3.0, 1e-3);
  EXPECT_NEAR(v, brute, 1e-4);
}

TEST(RegionProbability, Bounds) {
  for (const double kappa : {0.01, 0.05, 0.1, 0.2, 0.3}) {
    const double v = region_probability(kappa);
    EXPECT_GE(v, 1.0 / 12.0) << kappa;
    EXPECT_LE(v, 1.0) << kappa;
  }
  const double v = region_probability(0.05);
  EXPECT_LE(v, 0.5);
}

TEST(RegionProbability, LargeScaleIsCentralCell) {
  // For κ = 3 only the cell around 0 carries noticeable mass.
  const double kappa = 3.0;
  const double central = 1.0 - 2.0 * normal_sf(kappa * std::numbers::pi / 3.0);
  EXPECT_NEAR(region_probability(kappa), central, 1e-12);
}

#include "mclt/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mclt/error.hpp"
#include "mclt/gaussian.hpp"
#include "mclt/numeric.hpp"

namespace mclt {

namespace {

// Beyond this the standard normal density underflows to zero.
constexpr double kDensityCutoff = 39.0;

// ∫_lo^hi (t - x)^r φ(t) dt for integer r in {1,2,3}.
double upward_moment(double x, double lo, double hi, int r) {
  if (!(hi > lo)) return 0.0;
  const auto pm = GaussianPartialMoments::over(lo, hi);
  const double* m = pm.m;
  switch (r) {
    case 1:
      return m[1] - x * m[0];
    case 2:
      return m[2] - 2.0 * x * m[1] + x * x * m[0];
    default:
      return m[3] - 3.0 * x * m[2] + 3.0 * x * x * m[1] - x * x * x * m[0];
  }
}

// ∫_lo^hi |x - t|^r φ(t) dt, split at t = x only when x is interior.
double slab_integer(double x, double lo, double hi, int r) {
  const double sign = (r % 2 == 0) ? 1.0 : -1.0;
  double v;
  if (x <= lo) {
    v = upward_moment(x, lo, hi, r);
  } else if (x >= hi) {
    v = sign * upward_moment(x, lo, hi, r);
  } else {
    v = sign * upward_moment(x, lo, x, r) + upward_moment(x, x, hi, r);
  }
  return std::max(v, 0.0);
}

double slab_fractional(double x, double lo, double hi, double r) {
  lo = std::max(lo, -kDensityCutoff);
  hi = std::min(hi, kDensityCutoff);
  if (!(hi > lo)) return 0.0;
  const auto integrand = [x, r](double t) { return std::pow(std::abs(x - t), r) * normal_pdf(t); };
  constexpr double kTol = 1e-10;
  if (x > lo && x < hi) {
    return adaptive_gauss_legendre(integrand, lo, x, 0.5 * kTol) +
           adaptive_gauss_legendre(integrand, x, hi, 0.5 * kTol);
  }
  return adaptive_gauss_legendre(integrand, lo, hi, kTol);
}

void check_order(double r) {
  if (!(r >= 1.0 && r <= 3.0)) throw DomainError("wr_vs_normal: r must lie in [1,3]");
}

std::vector<std::span<const double>> blocks_of(std::span<const double> samples,
                                               std::size_t batches) {
  std::vector<std::span<const double>> out;
  const std::size_t m = samples.size();
  batches = std::min(batches, m);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t begin = m * b / batches;
    const std::size_t end = m * (b + 1) / batches;
    out.push_back(samples.subspan(begin, end - begin));
  }
  return out;
}

}  // namespace

WassersteinEstimate wr_vs_normal(std::span<const double> sorted, double r) {
  check_order(r);
  const std::size_t m = sorted.size();
  if (m == 0) throw DataError("wr_vs_normal: empty sample");
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(sorted[i])) throw DataError("wr_vs_normal: non-finite sample value");
    if (i > 0 && sorted[i] < sorted[i - 1]) throw DataError("wr_vs_normal: sample is not sorted");
  }
  const double rounded = std::round(r);
  const bool integer = rounded == r;
  const auto mm = static_cast<double>(m);

  std::vector<double> pieces(m);
  double lo = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    const double hi = (i + 1 == m) ? std::numeric_limits<double>::infinity()
                                   : normal_quantile_unchecked(static_cast<double>(i + 1) / mm);
    pieces[i] = integer ? slab_integer(sorted[i], lo, hi, static_cast<int>(rounded))
                        : slab_fractional(sorted[i], lo, hi, r);
    lo = hi;
  }
  WassersteinEstimate est;
  est.r = r;
  est.m = m;
  est.value = std::pow(pairwise_sum(pieces), 1.0 / r);
  return est;
}

WassersteinEstimate wr_vs_normal_batched(std::span<const double> samples, double r,
                                         std::size_t batches) {
  check_order(r);
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  WassersteinEstimate est = wr_vs_normal(sorted, r);
  if (batches < 2) return est;
  std::vector<double> values;
  for (const auto block : blocks_of(samples, batches)) {
    std::vector<double> b(block.begin(), block.end());
    std::sort(b.begin(), b.end());
    values.push_back(wr_vs_normal(b, r).value);
  }
  est.std_error = sample_stddev(values) / std::sqrt(static_cast<double>(values.size()));
  return est;
}

MeanEstimate w1_lower_bound_sin(std::span<const double> samples, double alpha,
                                std::size_t batches) {
  if (!(alpha > 0.0)) throw DomainError("w1_lower_bound_sin: alpha must be positive");
  if (samples.empty()) throw DataError("w1_lower_bound_sin: empty sample");
  std::vector<double> h(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) h[i] = alpha * std::sin(samples[i] / alpha);
  MeanEstimate est;
  est.value = pairwise_mean(h);
  if (batches >= 2) {
    std::vector<double> means;
    for (const auto block : blocks_of(h, batches)) means.push_back(pairwise_mean(block));
    est.std_error = sample_stddev(means) / std::sqrt(static_cast<double>(means.size()));
  }
  return est;
}

double gaussian_smooth(const std::function<double(double)>& f, double sigma, double x,
                       std::span<const double> kinks) {
  if (!(sigma > 0.0)) throw DomainError("gaussian_smooth: sigma must be positive");
  const auto integrand = [&](double u) {
    const double w = normal_pdf(u);
    if (w == 0.0) return 0.0;
    const double v = f(x + sigma * u);
    if (!std::isfinite(v)) throw DataError("gaussian_smooth: test function is not finite");
    return v * w;
  };
  // Fixed breaks keep the bulk of the density from being sampled too coarsely.
  std::vector<double> breaks = {-kDensityCutoff, -8.0, -4.0, -2.0, -1.0, 0.0,
                                1.0, 2.0, 4.0, 8.0, kDensityCutoff};
  for (double k : kinks) {
    const double u = (k - x) / sigma;
    if (u > -kDensityCutoff && u < kDensityCutoff) breaks.push_back(u);
  }
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) {
      total += adaptive_gauss_legendre(integrand, breaks[i], breaks[i + 1], 1e-14, 45);
    }
  }
  return total;
}

bool in_cosine_region(double x) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  constexpr double kThird = std::numbers::pi / 3.0;
  const double reduced = std::fmod(std::abs(x), kTwoPi);
  return reduced <= kThird || reduced >= kTwoPi - kThird;
}

double region_probability(double kappa) {
  if (!(kappa > 0.0)) throw DomainError("region_probability: kappa must be positive");
  constexpr double kPi = std::numbers::pi;
  constexpr double kTailMass = 1e-14;
  double total = 1.0 - 2.0 * normal_sf(kappa * kPi / 3.0);
  double side = 0.0;
  for (long k = 1;; ++k) {
    const double lo = kappa * (2.0 * k - 1.0 / 3.0) * kPi;
    const double tail = normal_sf(lo);
    if (tail < kTailMass) break;
    side += tail - normal_sf(kappa * (2.0 * k + 1.0 / 3.0) * kPi);
  }
  total += 2.0 * side;
  return total;
}

}  // namespace mclt

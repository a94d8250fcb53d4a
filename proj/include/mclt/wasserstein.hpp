#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace mclt {

/// Distance between an empirical sample and N(0,1).
struct WassersteinEstimate {
  double r = 1.0;
  double value = 0.0;
  double std_error = 0.0;
  std::size_t m = 0;
};

/// Monte-Carlo mean with its standard error.
struct MeanEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Exact W_r between the empirical measure of `sorted` and N(0,1) under the
/// quantile coupling, r in [1,3]. Integer orders use closed-form Gaussian
/// partial moments; other orders use adaptive Gauss-Legendre per slab.
/// Throws DataError when the sample is unsorted or non-finite.
WassersteinEstimate wr_vs_normal(std::span<const double> sorted, double r);

/// W_r of the whole sample plus a batch standard error: the sample (in
/// replication order) is cut into `batches` contiguous blocks, each block's
/// distance is computed, and stderr = sd(block values) / sqrt(batches).
WassersteinEstimate wr_vs_normal_batched(std::span<const double> samples, double r,
                                         std::size_t batches);

/// Ê[α sin(X/α)], a lower bound on W_1(X, N) because the test function is
/// 1-Lipschitz and odd. stderr uses `batches` contiguous blocks.
MeanEstimate w1_lower_bound_sin(std::span<const double> samples, double alpha,
                                std::size_t batches = 100);

inline constexpr double kOriginKink[] = {0.0};

/// f_σ(x) = E[f(x + σN)] by adaptive Gauss-Legendre against the standard normal density.
/// `kinks` lists points where f may fail to be smooth; the integral is split there so
/// the adaptive rule cannot step over a corner that falls between its nodes.
double gaussian_smooth(const std::function<double(double)>& f, double sigma, double x,
                       std::span<const double> kinks = kOriginKink);

/// True when x lies in A = {cos x >= 1/2} = ∪_k [(2k-1/3)π, (2k+1/3)π].
bool in_cosine_region(double x);

/// P(N ∈ κA) as a lattice sum of normal-tail differences.
double region_probability(double kappa);

}  // namespace mclt

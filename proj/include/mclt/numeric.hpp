#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mclt {

/// Sum with a fixed binary-tree topology. The result depends only on the
/// values and their order, never on how the caller partitioned the work.
double pairwise_sum(std::span<const double> values);

/// Mean via pairwise_sum; 0 for an empty span.
double pairwise_mean(std::span<const double> values);

/// `count` points spaced evenly in log between lo and hi (both > 0), endpoints included.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// Sample standard deviation (n - 1 denominator); 0 when fewer than two values.
double sample_stddev(std::span<const double> values);

/// Adaptive 20-point Gauss-Legendre on a finite interval. A panel is accepted
/// when refining it changes the estimate by at most abs_tol (halved per level)
/// or by a relative 1e-14; recursion stops at max_depth regardless.
double adaptive_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                               double abs_tol, int max_depth = 40);

}  // namespace mclt

#include "mclt/numeric.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "mclt/error.hpp"

namespace mclt {

namespace {

constexpr std::size_t kLeafSize = 8;

double tree_sum(const double* data, std::size_t size) {
  if (size <= kLeafSize) {
    double acc = 0.0;
    for (std::size_t i = 0; i < size; ++i) acc += data[i];
    return acc;
  }
  const std::size_t half = size / 2;
  return tree_sum(data, half) + tree_sum(data + half, size - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return tree_sum(values.data(), values.size());
}

double pairwise_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return pairwise_sum(values) / static_cast<double>(values.size());
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw DomainError("log_grid: need 0 < lo < hi and at least two points");
  }
  std::vector<double> grid(count);
  const double llo = std::log(lo);
  const double step = (std::log(hi) - llo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = std::exp(llo + step * static_cast<double>(i));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = pairwise_mean(values);
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mean;
    sq[i] = d * d;
  }
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(values.size() - 1));
}

namespace {

using Rule = boost::math::quadrature::gauss<double, 20>;

double refine(const std::function<double(double)>& f, double a, double b, double whole,
              double abs_tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = Rule::integrate(f, a, mid);
  const double right = Rule::integrate(f, mid, b);
  const double both = left + right;
  const double diff = std::abs(both - whole);
  if (depth <= 0 || diff <= abs_tol || diff <= 1e-14 * (std::abs(left) + std::abs(right)) ||
      !(mid > a && mid < b)) {
    return both;
  }
  return refine(f, a, mid, left, 0.5 * abs_tol, depth - 1) +
         refine(f, mid, b, right, 0.5 * abs_tol, depth - 1);
}

}  // namespace

double adaptive_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                               double abs_tol, int max_depth) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("adaptive_gauss_legendre: interval must be finite");
  }
  if (a == b) return 0.0;
  if (a > b) return -adaptive_gauss_legendre(f, b, a, abs_tol, max_depth);
  return refine(f, a, b, Rule::integrate(f, a, b), abs_tol, max_depth);
}

}  // namespace mclt

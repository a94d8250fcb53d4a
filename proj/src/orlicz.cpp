#include "mclt/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "mclt/error.hpp"
#include "mclt/numeric.hpp"

namespace mclt {

SampleMatrix::SampleMatrix(std::size_t reps, std::size_t n, std::vector<double> abs_values)
    : reps_(reps), n_(n), values_(std::move(abs_values)) {
  if (reps_ == 0 || n_ == 0) throw DataError("SampleMatrix: need R >= 1 and n >= 1");
  if (values_.size() != reps_ * n_) throw DataError("SampleMatrix: value count is not R * n");
  for (const double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw DataError("SampleMatrix: entries must be finite and >= 0");
  }
}

SampleMatrix SampleMatrix::from_signed(std::size_t reps, std::size_t n, std::span<const double> values) {
  std::vector<double> abs_values(values.size());
  std::transform(values.begin(), values.end(), abs_values.begin(), [](double v) { return std::abs(v); });
  return SampleMatrix(reps, n, std::move(abs_values));
}

SampleMatrix SampleMatrix::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open sample matrix " + path.string());
  std::vector<double> values;
  std::size_t reps = 0;
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::abs(std::stod(cell)));
      } catch (const std::logic_error&) {
        throw DataError(path.string() + ":" + std::to_string(reps + 1) + ": not a number: '" + cell + "'");
      }
      ++cols;
    }
    if (reps == 0) n = cols;
    if (cols != n) throw DataError(path.string() + ": ragged row " + std::to_string(reps + 1));
    ++reps;
  }
  return SampleMatrix(reps, n, std::move(values));
}

SampleMatrix SampleMatrix::rows(std::size_t first, std::size_t count) const {
  if (first + count > reps_) throw DomainError("SampleMatrix::rows: out of range");
  const auto begin = values_.begin() + static_cast<std::ptrdiff_t>(first * n_);
  return SampleMatrix(count, n_, std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count * n_)));
}

SampleMatrix SampleMatrix::scaled(double factor) const {
  if (!(factor > 0.0)) throw DomainError("SampleMatrix::scaled: factor must be positive");
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return SampleMatrix(reps_, n_, std::move(v));
}

namespace {

double mean_gauge(const NFunction& nf, std::span<const double> values, double c, std::vector<double>& scratch) {
  scratch.resize(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double v = nf(values[k] / c);
    if (std::isinf(v)) return std::numeric_limits<double>::infinity();
    scratch[k] = v;
  }
  return pairwise_mean(scratch);
}

double mean_power(double p, const SampleMatrix& s) {
  const auto values = s.values();
  std::vector<double> powered(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) powered[k] = std::pow(values[k], p);
  return pairwise_mean(powered);
}

}  // namespace

double orlicz_norm(const NFunction& nf, const SampleMatrix& s) {
  const double c0 = lp_norm(2.0, s);
  if (c0 == 0.0) return 0.0;
  std::vector<double> scratch;
  const auto objective = [&](double c) { return mean_gauge(nf, s.values(), c, scratch); };

  double lo, hi, f_lo, f_hi;
  const double f0 = objective(c0);
  if (f0 > 1.0) {
    lo = c0;
    f_lo = f0;
    hi = 2.0 * c0;
    f_hi = objective(hi);
    while (f_hi > 1.0) {
      lo = hi;
      f_lo = f_hi;
      hi *= 2.0;
      f_hi = objective(hi);
    }
  } else {
    hi = c0;
    f_hi = f0;
    lo = 0.5 * c0;
    f_lo = objective(lo);
    while (f_lo <= 1.0) {
      hi = lo;
      f_hi = f_lo;
      lo *= 0.5;
      f_lo = objective(lo);
    }
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = objective(mid);
    if (f_mid > f_lo || f_mid < f_hi) {
      throw InternalError("orlicz_norm: objective is not decreasing in c");
    }
    if (f_mid > 1.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  return hi;
}

double lp_norm(double p, const SampleMatrix& s) {
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
  const auto values = s.values();
  if (std::isinf(p)) return *std::max_element(values.begin(), values.end());
  return std::pow(mean_power(p, s), 1.0 / p);
}

double lyapunov(const NFunction& nf, const SampleMatrix& s, double s_n) {
  if (!(s_n > 0.0)) throw DomainError("lyapunov: s_n must be positive");
  return orlicz_norm(nf, s) * inverse(nf, static_cast<double>(s.n())) / s_n;
}

double lyapunov_power(double p, const SampleMatrix& s, double s_n) {
  if (!(s_n > 0.0)) throw DomainError("lyapunov_power: s_n must be positive");
  if (!(p > 1.0)) throw DomainError("lyapunov_power: p must exceed 1");
  if (std::isinf(p)) return lp_norm(p, s) / s_n;
  return std::pow(static_cast<double>(s.n()) * mean_power(p, s), 1.0 / p) / s_n;
}

NormEstimate orlicz_norm_batched(const NFunction& nf, const SampleMatrix& s, std::size_t batches) {
  NormEstimate est;
  est.reps = s.reps();
  est.value = orlicz_norm(nf, s);
  batches = std::min(batches, s.reps());
  if (batches < 2) return est;
  std::vector<double> norms;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t first = s.reps() * b / batches;
    const std::size_t last = s.reps() * (b + 1) / batches;
    norms.push_back(orlicz_norm(nf, s.rows(first, last - first)));
  }
  est.std_error = sample_stddev(norms) / std::sqrt(static_cast<double>(norms.size()));
  return est;
}

}  // namespace mclt

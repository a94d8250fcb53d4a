#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "mclt/nfunc.hpp"

namespace mclt {

/// R x n realisations of |Y_i| (replication r, index i), row-major.
/// Expectations are estimated by averaging over the R replications.
class SampleMatrix {
 public:
  /// `abs_values` must be finite and nonnegative; throws DataError otherwise.
  SampleMatrix(std::size_t reps, std::size_t n, std::vector<double> abs_values);
  /// Takes absolute values of signed realisations.
  static SampleMatrix from_signed(std::size_t reps, std::size_t n, std::span<const double> values);
  /// CSV with R rows and n columns, no header; entries may be signed.
  static SampleMatrix load_csv(const std::filesystem::path& path);

  std::size_t reps() const { return reps_; }
  std::size_t n() const { return n_; }
  double at(std::size_t rep, std::size_t i) const { return values_[rep * n_ + i]; }
  std::span<const double> values() const { return values_; }
  std::span<const double> row(std::size_t rep) const {
    return std::span<const double>(values_).subspan(rep * n_, n_);
  }
  /// Rows [first, first + count).
  SampleMatrix rows(std::size_t first, std::size_t count) const;
  SampleMatrix scaled(double factor) const;

 private:
  std::size_t reps_;
  std::size_t n_;
  std::vector<double> values_;
};

/// inf{c > 0 : (1/n) Σ_i Ê φ(|Y_i|/c) <= 1}, by bisection from c0 = ‖Y‖_2.
/// Returns 0 when every entry is 0.
double orlicz_norm(const NFunction& nf, const SampleMatrix& s);

/// ((1/n) Σ_i Ê|Y_i|^p)^{1/p}; p = +inf gives the largest entry. Throws
/// DomainError for p < 1.
double lp_norm(double p, const SampleMatrix& s);

/// L_φ = ‖Y‖_φ φ⁻¹(n) / s_n.
double lyapunov(const NFunction& nf, const SampleMatrix& s, double s_n);

/// L_p = (Σ_i Ê|Y_i|^p)^{1/p} / s_n (un-averaged sum); p = +inf gives ‖Y‖_∞ / s_n.
double lyapunov_power(double p, const SampleMatrix& s, double s_n);

struct NormEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
};

/// orlicz_norm on all rows; stderr from the spread of the norm over
/// `batches` contiguous row blocks.
NormEstimate orlicz_norm_batched(const NFunction& nf, const SampleMatrix& s, std::size_t batches);

}  // namespace mclt

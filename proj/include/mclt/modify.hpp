#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mclt/mds.hpp"

namespace mclt {

/// Z_i = Y_i 1{|Y_i| <= α/2} - E[Y_i 1{|Y_i| <= α/2} | F_{i-1}] and its exact
/// conditional variance.
struct Truncation {
  std::vector<double> z;
  std::vector<double> sigma2_z;
};

/// Truncation at level α/2 using the model's closed-form conditional laws.
/// alpha = +inf returns z = y and sigma2_z = sigma2 unchanged.
Truncation truncate(const MdsModel& model, const MdsPath& path, double alpha);

/// T = min{m : Σ_{i<=m} sigma2_z[i] > s_n2}, or n+1 when never exceeded (1-based).
std::size_t stopping_time(std::span<const double> sigma2_z, double s_n2);

/// The truncated, stopped and elongated sequence. Ŷ_i = Z_i for i < T,
/// Ŷ_i = 0 for T <= i <= n, and Ŷ_{n+1} = ξ (s_n² - Σ_{j<T} σ_j²(Z))^{1/2}.
struct ModifiedPath {
  std::vector<double> z;
  std::vector<double> sigma2_z;
  std::size_t t_stop = 0;
  std::vector<double> y_hat;       ///< n+1 entries
  std::vector<double> sigma2_hat;  ///< n+1 entries summing to s_n²
  double alpha = 0.0;
};

/// ξ ~ N(0,1) is the first normal draw of a generator seeded with xi_seed.
/// Throws InternalError if the radicand is below -1e-12; smaller negative
/// values are clamped to 0.
ModifiedPath elongate(const MdsModel& model, const MdsPath& path, double alpha, std::uint64_t xi_seed);

/// elongate() over an ensemble with ξ seeds derive_seed(master, rep, tag).
std::vector<ModifiedPath> modify_ensemble(const MdsModel& model, std::span<const MdsPath> paths, double alpha,
                                          std::uint64_t master_seed, std::string_view tag = "xi");

/// |Z_i| of each modified path as a reps x n matrix.
SampleMatrix abs_truncated(std::span<const ModifiedPath> paths);

}  // namespace mclt

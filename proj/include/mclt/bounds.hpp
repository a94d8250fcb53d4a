#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mclt/nfunc.hpp"

namespace mclt {

enum class BoundId {
  thm21_i,
  thm21_ii,
  thm22_i,
  thm22_ii,
  thm23,
  cor33_i,
  cor33_ii,
  cor33_iii,
  prior_haeusler_joos,
  prior_joos91,
  prior_rollin,
  prior_fanma,
  prior_fansu,
};

std::string_view to_string(BoundId id);
/// Throws ParameterError for unknown ids.
BoundId parse_bound_id(std::string_view name);
std::vector<BoundId> all_bounds();
/// The Wasserstein orders a bound applies to.
std::vector<int> bound_orders(BoundId id);

/// ‖V_n² - 1‖_q = (Ê|V_n² - 1|^q)^{1/q} over per-path values of V_n².
/// q < 1 gives the quasi-norm.
double v_norm(std::span<const double> v_n2, double q);
/// ‖V_n² - 1‖_q^{1/2} with V_n² = Σ_i sigma2[i] / s_n2 per row.
/// Throws DomainError when s_n2 <= 0.
double v_term(std::span<const std::vector<double>> sigma2_rows, double s_n2, double q);

/// Quantities the bound formulas are assembled from. Each formula names
/// the fields it needs; a missing field raises ParameterError.
struct BoundInputs {
  std::optional<NFunction> nf;
  std::optional<double> p;           ///< exponent for x^p-based bounds
  std::optional<double> L_phi;       ///< ‖Y‖_φ φ⁻¹(n) / s_n
  std::optional<double> norm_phi;    ///< ‖Y‖_φ
  std::optional<double> L_p;         ///< (Σ E|Y_i|^p)^{1/p} / s_n
  std::optional<double> L3;
  std::optional<std::size_t> n;
  std::optional<double> s_n;
  std::map<double, double> v_norms;  ///< q -> ‖V_n² - 1‖_q
  std::optional<double> M_phi;       ///< max_i E φ(|Y_i|)
  std::optional<double> sigma_floor; ///< σ with σ_i >= σ almost surely
  std::optional<double> theta;       ///< E[φ(|Y_i|) | F_{i-1}] <= θ σ_i²
  std::optional<double> M;           ///< max_i ‖Y_i‖_∞
  std::optional<double> max_norm_2q; ///< max_i ‖Y_i‖_{2q}
  double q = 1.0;                    ///< free exponent of the prior bounds
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

/// Right-hand side with all multiplicative constants set to 1.
/// value is the left-to-right sum of terms.
struct BoundReport {
  BoundId id = BoundId::thm21_i;
  int r = 1;
  std::vector<std::pair<std::string, double>> terms;
  std::map<std::string, double> details;
  double value = 0.0;
  std::string inputs_digest;

  double term(std::string_view name) const;  ///< 0 when absent
};

BoundReport rhs_w1(BoundId id, const BoundInputs& in);
BoundReport rhs_w2(BoundId id, const BoundInputs& in);
BoundReport rhs_w3(const BoundInputs& in);
/// Dispatches on r; throws DomainError when the bound does not cover order r.
BoundReport evaluate_bound(BoundId id, int r, const BoundInputs& in);

}  // namespace mclt

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mclt/orlicz.hpp"
#include "mclt/random.hpp"

namespace mclt {

enum class ModelKind {
  iid_gaussian,    ///< independent N(0, σ_i²), default σ_i² = 1/n
  iid_rademacher,  ///< independent ±c_i, default c_i = 1/√n
  lattice_switch,  ///< step n-1 switches to a skewed two-point law when X_{n-2} ∈ αA; V_n² = 1
  lattice_gate,    ///< step n-1 is switched off when X_{n-2} ∉ αA; V_n² is random
  b_mixture,       ///< Y_i = √(B/n) ξ_i with B ∈ {1/2, 3/2} revealed at step 1
};

std::string_view to_string(ModelKind kind);
/// Throws ParameterError for unknown names.
ModelKind parse_model_kind(std::string_view name);
std::vector<ModelKind> builtin_models();

enum class LawForm { gaussian, scaled_discrete, mixture };

/// A finite mixture of centred Gaussians and atoms. Every law the models
/// produce has this shape, so all truncated moments are closed-form.
struct ConditionalLaw {
  struct Gaussian {
    double weight;
    double variance;
  };
  struct Atom {
    double weight;
    double value;
  };
  std::vector<Gaussian> gaussians;
  std::vector<Atom> atoms;

  static ConditionalLaw gaussian(double variance);
  static ConditionalLaw discrete(std::vector<Atom> atoms);

  LawForm form() const;
  double mean() const;
  /// Second moment E[Y²] (the conditional variance when the mean is 0).
  double variance() const;
  /// E|Y|^p.
  double abs_moment(double p) const;

  struct Draw {
    double value;
    std::size_t component;  ///< index into gaussians, then atoms
  };
  /// One uniform selects the component when there is more than one; a
  /// Gaussian component then consumes one normal draw.
  Draw sample(CounterRng& rng) const;
};

struct TruncatedMoments {
  double mean = 0.0;                ///< E[Y 1{|Y| <= a}]
  double second = 0.0;              ///< E[Y² 1{|Y| <= a}]
  double centered_variance = 0.0;   ///< Var(Y 1{|Y| <= a}) = second - mean²
};

/// Closed-form truncated moments at level a > 0 (a may be +inf).
TruncatedMoments conditional_trunc_moments(const ConditionalLaw& law, double a);

/// Information the next conditional law may depend on.
struct History {
  double partial_sum = 0.0;  ///< Y_1 + ... + Y_{i-1}
  double latent = 0.0;       ///< B for b_mixture once revealed; unused otherwise
  bool latent_known = false;
};

struct ModelParams {
  /// iid_gaussian: σ_i² per step; iid_rademacher: magnitude c_i per step.
  /// Empty selects the uniform schedule with s_n² = 1.
  std::vector<double> schedule;
};

class MdsModel {
 public:
  static MdsModel make(ModelKind kind, std::size_t n, const ModelParams& params = {});

  ModelKind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  /// s_n² = Σ_i E[Y_i²].
  double s_n2() const { return s_n2_; }
  double s_n() const;
  /// Lattice scale α = 1/log n for the lattice models; 0 otherwise.
  double alpha() const { return alpha_; }
  /// P(X_{n-2} ∈ αA) for the lattice models; 0 otherwise.
  double region_mass() const { return region_mass_; }
  /// True when V_n² = 1 on every path.
  bool unit_conditional_variance() const;

  /// Law of Y_i (1-based) given the history up to step i-1.
  ConditionalLaw conditional_law(std::size_t i, const History& h) const;
  /// Unconditional law of Y_i.
  ConditionalLaw marginal_law(std::size_t i) const;
  /// E|Y_i|^p from the marginal law.
  double abs_moment(std::size_t i, double p) const;
  /// L_p = (Σ_i E|Y_i|^p)^{1/p} / s_n from closed forms; p = inf gives max ‖Y_i‖_∞ / s_n
  /// and throws DomainError when some step is unbounded.
  double lyapunov_power_exact(double p) const;

 private:
  MdsModel() = default;

  ModelKind kind_ = ModelKind::iid_gaussian;
  std::size_t n_ = 0;
  std::vector<double> schedule_;
  double alpha_ = 0.0;
  double bulk_variance_ = 0.0;
  double region_mass_ = 0.0;
  double tail_variance_ = 0.0;
  double s_n2_ = 0.0;
};

/// One simulated path. sigma2 holds exact conditional variances from the model.
struct MdsPath {
  std::vector<double> y;
  std::vector<double> sigma2;
  std::vector<double> x;  ///< X_m = (1/s_n) Σ_{i<=m} Y_i
  double s_n2 = 0.0;
  double v_n2 = 0.0;      ///< Σ sigma2 / s_n2
  History final_history;  ///< latent state after the last step
};

/// Deterministic in (model, seed).
MdsPath simulate_path(const MdsModel& model, std::uint64_t seed);

/// X_n and V_n² of one replication, drawn from the same joint law as
/// simulate_path but with blocks of history-independent Gaussian steps
/// aggregated into a single variate and Rademacher signs taken 64 per word.
struct TerminalDraw {
  double x_n = 0.0;
  double v_n2 = 0.0;
};
TerminalDraw simulate_terminal(const MdsModel& model, std::uint64_t seed);

/// Seeds derive_seed(master, rep, tag) for rep = 0..reps-1.
std::vector<MdsPath> simulate_ensemble(const MdsModel& model, std::uint64_t master_seed,
                                       std::size_t reps, std::string_view tag = "path");

/// |y| of each path as a reps x n matrix.
SampleMatrix abs_increments(std::span<const MdsPath> paths);

}  // namespace mclt

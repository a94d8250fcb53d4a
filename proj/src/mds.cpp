#include "mclt/mds.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "mclt/error.hpp"
#include "mclt/gaussian.hpp"
#include "mclt/wasserstein.hpp"

namespace mclt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The skewed two-point law η: P(η = 1/2) = 4/5, P(η = -2) = 1/5, scaled by α.
std::vector<ConditionalLaw::Atom> skewed_atoms(double alpha, double mass) {
  return {{0.8 * mass, 0.5 * alpha}, {0.2 * mass, -2.0 * alpha}};
}

double gaussian_abs_moment(double variance, double p) {
  if (variance == 0.0) return 0.0;
  // E|σN|^p = σ^p 2^{p/2} Γ((p+1)/2) / √π
  return std::pow(variance, 0.5 * p) *
         std::exp(0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(std::numbers::pi));
}

void check_martingale(const ConditionalLaw& law) {
  const double scale = std::sqrt(law.variance());
  if (std::abs(law.mean()) > 1e-14 * scale) {
    throw InternalError("conditional law is not centred");
  }
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::iid_gaussian:
      return "iid_gaussian";
    case ModelKind::iid_rademacher:
      return "iid_rademacher";
    case ModelKind::lattice_switch:
      return "lattice_switch";
    case ModelKind::lattice_gate:
      return "lattice_gate";
    case ModelKind::b_mixture:
      return "b_mixture";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  for (const ModelKind k : builtin_models()) {
    if (to_string(k) == name) return k;
  }
  throw ParameterError("unknown model '" + std::string(name) + "'");
}

std::vector<ModelKind> builtin_models() {
  return {ModelKind::iid_gaussian, ModelKind::iid_rademacher, ModelKind::lattice_switch,
          ModelKind::lattice_gate, ModelKind::b_mixture};
}

// ---------------------------------------------------------------------------
// ConditionalLaw

ConditionalLaw ConditionalLaw::gaussian(double variance) {
  ConditionalLaw law;
  law.gaussians.push_back({1.0, variance});
  return law;
}

ConditionalLaw ConditionalLaw::discrete(std::vector<Atom> atoms) {
  ConditionalLaw law;
  law.atoms = std::move(atoms);
  return law;
}

LawForm ConditionalLaw::form() const {
  if (atoms.empty() && gaussians.size() == 1) return LawForm::gaussian;
  if (gaussians.empty()) return LawForm::scaled_discrete;
  return LawForm::mixture;
}

double ConditionalLaw::mean() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.weight * a.value;
  return m;
}

double ConditionalLaw::variance() const {
  double v = 0.0;
  for (const auto& g : gaussians) v += g.weight * g.variance;
  for (const auto& a : atoms) v += a.weight * a.value * a.value;
  return v;
}

double ConditionalLaw::abs_moment(double p) const {
  double m = 0.0;
  for (const auto& g : gaussians) m += g.weight * gaussian_abs_moment(g.variance, p);
  for (const auto& a : atoms) {
    if (a.value != 0.0) m += a.weight * std::pow(std::abs(a.value), p);
  }
  return m;
}

ConditionalLaw::Draw ConditionalLaw::sample(CounterRng& rng) const {
  const std::size_t count = gaussians.size() + atoms.size();
  std::size_t pick = 0;
  if (count > 1) {
    const double u = rng.uniform();
    double acc = 0.0;
    pick = count - 1;
    for (std::size_t k = 0; k < count; ++k) {
      acc += k < gaussians.size() ? gaussians[k].weight : atoms[k - gaussians.size()].weight;
      if (u < acc) {
        pick = k;
        break;
      }
    }
  }
  if (pick < gaussians.size()) {
    return {std::sqrt(gaussians[pick].variance) * rng.normal(), pick};
  }
  return {atoms[pick - gaussians.size()].value, pick};
}

TruncatedMoments conditional_trunc_moments(const ConditionalLaw& law, double a) {
  if (!(a > 0.0)) throw DomainError("conditional_trunc_moments: level must be positive");
  TruncatedMoments t;
  for (const auto& g : law.gaussians) {
    if (g.variance == 0.0) continue;
    if (std::isinf(a)) {
      t.second += g.weight * g.variance;
    } else {
      const double z = a / std::sqrt(g.variance);
      t.second += g.weight * g.variance * GaussianPartialMoments::over(-z, z).m[2];
    }
  }
  for (const auto& atom : law.atoms) {
    if (std::abs(atom.value) <= a) {
      t.mean += atom.weight * atom.value;
      t.second += atom.weight * atom.value * atom.value;
    }
  }
  t.centered_variance = std::max(t.second - t.mean * t.mean, 0.0);
  return t;
}

// ---------------------------------------------------------------------------
// MdsModel

MdsModel MdsModel::make(ModelKind kind, std::size_t n, const ModelParams& params) {
  MdsModel m;
  m.kind_ = kind;
  m.n_ = n;
  if (n < 1) throw ParameterError("model needs n >= 1");
  const auto nn = static_cast<double>(n);
  switch (kind) {
    case ModelKind::iid_gaussian:
    case ModelKind::iid_rademacher: {
      if (params.schedule.empty()) {
        const double v = kind == ModelKind::iid_gaussian ? 1.0 / nn : 1.0 / std::sqrt(nn);
        m.schedule_.assign(n, v);
      } else {
        if (params.schedule.size() != n) throw ParameterError("schedule length must equal n");
        for (const double v : params.schedule) {
          if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError("schedule entries must be positive");
        }
        m.schedule_ = params.schedule;
      }
      break;
    }
    case ModelKind::lattice_switch:
    case ModelKind::lattice_gate: {
      if (n < 3) throw ParameterError(std::string(to_string(kind)) + " needs n >= 3");
      m.alpha_ = 1.0 / std::log(nn);
      const double a2 = m.alpha_ * m.alpha_;
      const double bulk_total = kind == ModelKind::lattice_switch ? 1.0 - 2.0 * a2 : 1.0 - a2;
      if (!(bulk_total > 0.0)) {
        throw ParameterError(std::string(to_string(kind)) + ": 1/log(n) too large for n = " + std::to_string(n));
      }
      m.bulk_variance_ = bulk_total / (nn - 2.0);
      m.region_mass_ = region_probability(m.alpha_ / std::sqrt(bulk_total));
      m.tail_variance_ = kind == ModelKind::lattice_switch ? a2 : a2 * (1.0 - m.region_mass_);
      break;
    }
    case ModelKind::b_mixture:
      break;
  }
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    switch (kind) {
      case ModelKind::iid_gaussian:
        total += m.schedule_[i - 1];
        break;
      case ModelKind::iid_rademacher:
        total += m.schedule_[i - 1] * m.schedule_[i - 1];
        break;
      case ModelKind::lattice_switch:
        total += i <= n - 2 ? m.bulk_variance_ : m.alpha_ * m.alpha_;
        break;
      case ModelKind::lattice_gate:
        if (i <= n - 2) {
          total += m.bulk_variance_;
        } else if (i == n - 1) {
          total += m.alpha_ * m.alpha_ * m.region_mass_;
        } else {
          total += m.tail_variance_;
        }
        break;
      case ModelKind::b_mixture:
        total += 1.0 / nn;
        break;
    }
  }
  m.s_n2_ = total;
  if (!(m.s_n2_ > 0.0) || !std::isfinite(m.s_n2_)) throw ParameterError("s_n^2 must be positive and finite");
  for (std::size_t i = 1; i <= n; ++i) check_martingale(m.marginal_law(i));
  return m;
}

double MdsModel::s_n() const { return std::sqrt(s_n2_); }

bool MdsModel::unit_conditional_variance() const {
  return kind_ == ModelKind::iid_gaussian || kind_ == ModelKind::iid_rademacher ||
         kind_ == ModelKind::lattice_switch;
}

ConditionalLaw MdsModel::conditional_law(std::size_t i, const History& h) const {
  if (i < 1 || i > n_) throw DomainError("conditional_law: step out of range");
  const auto nn = static_cast<double>(n_);
  switch (kind_) {
    case ModelKind::iid_gaussian:
      return ConditionalLaw::gaussian(schedule_[i - 1]);
    case ModelKind::iid_rademacher: {
      const double c = schedule_[i - 1];
      return ConditionalLaw::discrete({{0.5, c}, {0.5, -c}});
    }
    case ModelKind::lattice_switch:
      if (i <= n_ - 2) return ConditionalLaw::gaussian(bulk_variance_);
      if (i == n_ - 1 && in_cosine_region(h.partial_sum / alpha_)) {
        return ConditionalLaw::discrete(skewed_atoms(alpha_, 1.0));
      }
      return ConditionalLaw::gaussian(alpha_ * alpha_);
    case ModelKind::lattice_gate:
      if (i <= n_ - 2) return ConditionalLaw::gaussian(bulk_variance_);
      if (i == n_ - 1) {
        if (in_cosine_region(h.partial_sum / alpha_)) return ConditionalLaw::discrete(skewed_atoms(alpha_, 1.0));
        return ConditionalLaw::discrete({{1.0, 0.0}});
      }
      return ConditionalLaw::gaussian(tail_variance_);
    case ModelKind::b_mixture:
      if (h.latent_known) return ConditionalLaw::gaussian(h.latent / nn);
      {
        ConditionalLaw law;
        law.gaussians = {{0.5, 0.5 / nn}, {0.5, 1.5 / nn}};
        return law;
      }
  }
  throw InternalError("conditional_law: unhandled model");
}

ConditionalLaw MdsModel::marginal_law(std::size_t i) const {
  if (i < 1 || i > n_) throw DomainError("marginal_law: step out of range");
  const auto nn = static_cast<double>(n_);
  switch (kind_) {
    case ModelKind::iid_gaussian:
    case ModelKind::iid_rademacher:
      return conditional_law(i, History{});
    case ModelKind::lattice_switch:
      if (i == n_ - 1) {
        ConditionalLaw law;
        law.gaussians = {{1.0 - region_mass_, alpha_ * alpha_}};
        law.atoms = skewed_atoms(alpha_, region_mass_);
        return law;
      }
      return conditional_law(i, History{});
    case ModelKind::lattice_gate:
      if (i == n_ - 1) {
        auto atoms = skewed_atoms(alpha_, region_mass_);
        atoms.push_back({1.0 - region_mass_, 0.0});
        return ConditionalLaw::discrete(std::move(atoms));
      }
      return conditional_law(i, History{});
    case ModelKind::b_mixture: {
      ConditionalLaw law;
      law.gaussians = {{0.5, 0.5 / nn}, {0.5, 1.5 / nn}};
      return law;
    }
  }
  throw InternalError("marginal_law: unhandled model");
}

double MdsModel::abs_moment(std::size_t i, double p) const { return marginal_law(i).abs_moment(p); }

double MdsModel::lyapunov_power_exact(double p) const {
  if (!(p > 1.0)) throw DomainError("lyapunov_power_exact: p must exceed 1");
  if (std::isinf(p)) {
    double sup = 0.0;
    for (std::size_t i = 1; i <= n_; ++i) {
      const auto law = marginal_law(i);
      for (const auto& g : law.gaussians) {
        if (g.variance > 0.0) throw DomainError("L_inf is infinite: a step has a Gaussian component");
      }
      for (const auto& a : law.atoms) sup = std::max(sup, std::abs(a.value));
    }
    return sup / s_n();
  }
  double total = 0.0;
  if (kind_ == ModelKind::lattice_switch || kind_ == ModelKind::lattice_gate) {
    total = static_cast<double>(n_ - 2) * abs_moment(1, p) + abs_moment(n_ - 1, p) + abs_moment(n_, p);
  } else {
    for (std::size_t i = 1; i <= n_; ++i) total += abs_moment(i, p);
  }
  return std::pow(total, 1.0 / p) / s_n();
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

// Exact σ_i² as declared by the model (η has unit second moment exactly).
double declared_variance(const MdsModel& model, std::size_t i, const History& h, const ConditionalLaw& law) {
  const std::size_t n = model.n();
  const double a2 = model.alpha() * model.alpha();
  switch (model.kind()) {
    case ModelKind::lattice_switch:
      if (i >= n - 1) return a2;
      break;
    case ModelKind::lattice_gate:
      if (i == n - 1) return in_cosine_region(h.partial_sum / model.alpha()) ? a2 : 0.0;
      break;
    case ModelKind::b_mixture:
      if (!h.latent_known) return 1.0 / static_cast<double>(n);
      break;
    default:
      break;
  }
  return law.variance();
}

}  // namespace

MdsPath simulate_path(const MdsModel& model, std::uint64_t seed) {
  const std::size_t n = model.n();
  MdsPath path;
  path.y.resize(n);
  path.sigma2.resize(n);
  path.x.resize(n);
  path.s_n2 = model.s_n2();
  const double s_n = model.s_n();
  CounterRng rng(seed);
  History h;
  double var_total = 0.0;
  double x = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const ConditionalLaw law = model.conditional_law(i, h);
    const auto draw = law.sample(rng);
    const double sigma2 = declared_variance(model, i, h, law);
    if (model.kind() == ModelKind::b_mixture && !h.latent_known) {
      h.latent = draw.component == 0 ? 0.5 : 1.5;
      h.latent_known = true;
    }
    path.y[i - 1] = draw.value;
    path.sigma2[i - 1] = sigma2;
    var_total += sigma2;
    h.partial_sum += draw.value;
    x += draw.value / s_n;
    path.x[i - 1] = x;
  }
  path.v_n2 = var_total / path.s_n2;
  path.final_history = h;
  return path;
}

TerminalDraw simulate_terminal(const MdsModel& model, std::uint64_t seed) {
  const std::size_t n = model.n();
  const double s_n = model.s_n();
  CounterRng rng(seed);
  TerminalDraw out;
  switch (model.kind()) {
    case ModelKind::iid_gaussian:
      out.x_n = rng.normal();
      out.v_n2 = 1.0;
      return out;
    case ModelKind::iid_rademacher: {
      const auto law1 = model.conditional_law(1, History{});
      const double c1 = law1.atoms[0].value;
      bool uniform = true;
      for (std::size_t i = 2; i <= n && uniform; ++i) {
        uniform = model.conditional_law(i, History{}).atoms[0].value == c1;
      }
      double sum = 0.0;
      long ones = 0;
      for (std::size_t word = 0; word * 64 < n; ++word) {
        std::uint64_t bits = rng.next_u64();
        const std::size_t used = std::min<std::size_t>(64, n - word * 64);
        if (used < 64) bits &= (std::uint64_t{1} << used) - 1;
        if (uniform) {
          ones += std::popcount(bits);
        } else {
          for (std::size_t b = 0; b < used; ++b) {
            const double c = model.conditional_law(word * 64 + b + 1, History{}).atoms[0].value;
            sum += ((bits >> b) & 1U) ? c : -c;
          }
        }
      }
      if (uniform) sum = c1 * static_cast<double>(2 * ones - static_cast<long>(n));
      out.x_n = sum / s_n;
      out.v_n2 = 1.0;
      return out;
    }
    case ModelKind::lattice_switch:
    case ModelKind::lattice_gate: {
      History h;
      const double bulk = static_cast<double>(n - 2) * model.marginal_law(1).variance();
      h.partial_sum = std::sqrt(bulk) * rng.normal();
      double var_total = bulk;
      for (std::size_t i = n - 1; i <= n; ++i) {
        const auto law = model.conditional_law(i, h);
        var_total += declared_variance(model, i, h, law);
        h.partial_sum += law.sample(rng).value;
      }
      out.x_n = h.partial_sum / s_n;
      out.v_n2 = model.unit_conditional_variance() ? 1.0 : var_total / model.s_n2();
      return out;
    }
    case ModelKind::b_mixture: {
      const double b = rng.uniform() < 0.5 ? 0.5 : 1.5;
      const auto nn = static_cast<double>(n);
      out.x_n = std::sqrt(b) * rng.normal() / s_n;
      out.v_n2 = (1.0 / nn + (nn - 1.0) * b / nn) / model.s_n2();
      return out;
    }
  }
  throw InternalError("simulate_terminal: unhandled model");
}

std::vector<MdsPath> simulate_ensemble(const MdsModel& model, std::uint64_t master_seed, std::size_t reps,
                                       std::string_view tag) {
  std::vector<MdsPath> paths;
  paths.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) paths.push_back(simulate_path(model, derive_seed(master_seed, r, tag)));
  return paths;
}

SampleMatrix abs_increments(std::span<const MdsPath> paths) {
  if (paths.empty()) throw DataError("abs_increments: no paths");
  const std::size_t n = paths.front().y.size();
  std::vector<double> values;
  values.reserve(paths.size() * n);
  for (const auto& p : paths) {
    if (p.y.size() != n) throw DataError("abs_increments: paths differ in length");
    for (const double v : p.y) values.push_back(std::abs(v));
  }
  return SampleMatrix(paths.size(), n, std::move(values));
}

}  // namespace mclt

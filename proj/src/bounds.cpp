#include "mclt/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mclt/error.hpp"
#include "mclt/numeric.hpp"

namespace mclt {

namespace {

constexpr BoundId kAll[] = {BoundId::thm21_i,   BoundId::thm21_ii,          BoundId::thm22_i,
                            BoundId::thm22_ii,  BoundId::thm23,             BoundId::cor33_i,
                            BoundId::cor33_ii,  BoundId::cor33_iii,         BoundId::prior_haeusler_joos,
                            BoundId::prior_joos91, BoundId::prior_rollin,   BoundId::prior_fanma,
                            BoundId::prior_fansu};

template <typename T>
T need(const std::optional<T>& v, const char* name, BoundId id) {
  if (!v) throw ParameterError(std::string(to_string(id)) + ": missing input '" + name + "'");
  return *v;
}

double need_v(const BoundInputs& in, double q, BoundId id) {
  const auto it = in.v_norms.find(q);
  if (it == in.v_norms.end()) {
    std::ostringstream os;
    os << to_string(id) << ": missing input '‖V²-1‖_" << q << "'";
    throw ParameterError(os.str());
  }
  if (!(it->second >= 0.0)) throw DomainError("V-norm must be nonnegative");
  return it->second;
}

std::string digest(const BoundInputs& in) {
  std::ostringstream os;
  os.precision(17);
  os << "nfunction=" << (in.nf ? in.nf->describe() : std::string("-"));
  os << ";p=";
  if (in.p) os << *in.p; else os << '-';
  os << ";q=" << in.q << ";n=";
  if (in.n) os << *in.n; else os << '-';
  os << ";s_n=";
  if (in.s_n) os << *in.s_n; else os << '-';
  os << ";R=" << in.reps << ";seed=" << in.seed;
  return os.str();
}

BoundReport start(BoundId id, int r, const BoundInputs& in) {
  BoundReport rep;
  rep.id = id;
  rep.r = r;
  rep.inputs_digest = digest(in);
  return rep;
}

void finish(BoundReport& rep) {
  double total = 0.0;
  for (const auto& [name, v] : rep.terms) {
    if (!(v >= 0.0)) throw DomainError(std::string(to_string(rep.id)) + ": term '" + name + "' is negative or NaN");
    total += v;
  }
  rep.value = total;
}

// The gauge a bound is stated for: the explicit N-function, else x^p.
std::optional<NFunction> gauge(const BoundInputs& in) {
  if (in.nf) return in.nf;
  if (in.p) return NFunction::power(*in.p);
  return std::nullopt;
}

void require_order(const std::optional<NFunction>& lower, const std::optional<NFunction>& upper, BoundId id,
                   const char* relation) {
  if (!lower || !upper) return;
  const auto grid = default_check_grid();
  if (!check_order(*lower, *upper, grid)) {
    throw DomainError(std::string(to_string(id)) + ": precondition " + relation + " fails");
  }
}

void require_sub_cubic(const BoundInputs& in, BoundId id) {
  const auto g = gauge(in);
  if (!g) return;
  require_order(g, NFunction::power(3.0), id, "phi <= x^3");
  if (!sqrt_composition_convex(*g, default_check_grid())) {
    throw DomainError(std::string(to_string(id)) + ": precondition phi(sqrt(x)) convex fails");
  }
}

// L_φ, or L_p when the bound is stated for φ = x^p and only L_p is known.
double lyapunov_input(const BoundInputs& in, BoundId id) {
  if (in.L_phi) return *in.L_phi;
  if (in.L_p) return *in.L_p;
  throw ParameterError(std::string(to_string(id)) + ": missing input 'L_phi'");
}

double power_exponent(const BoundInputs& in, BoundId id) {
  if (in.p) return *in.p;
  if (in.nf && in.nf->kind() == NKind::power) return in.nf->params()[0];
  throw ParameterError(std::string(to_string(id)) + ": missing input 'p'");
}

double x_log_factor(double L) {
  if (L == 0.0) return 0.0;
  return L * std::log(std::numbers::e + 1.0 / (L * L));
}

BoundReport cor33_bound(BoundId id, int r, const BoundInputs& in) {
  BoundReport rep = start(id, r, in);
  require_sub_cubic(in, id);
  for (const auto& [q, v] : in.v_norms) {
    if (v != 0.0) throw DomainError(std::string(to_string(id)) + ": requires V_n^2 = 1");
  }
  if (id == BoundId::cor33_i) {
    const double L = lyapunov_input(in, id);
    rep.details["L"] = L;
    rep.terms.emplace_back("L", L);
    finish(rep);
    return rep;
  }
  const double p = power_exponent(in, id);
  const bool cubic = p == 3.0;
  if (r == 1 && !cubic && !(p > 2.0 && p < 3.0)) {
    throw DomainError(std::string(to_string(id)) + ": W1 case needs phi = x^3 or phi <= x^p with p in (2,3)");
  }
  const NFunction phi = gauge(in).value();
  const double s_n = need(in.s_n, "s_n", id);
  const double phi_sn = phi(s_n);
  rep.details["phi(s_n)"] = phi_sn;
  if (id == BoundId::cor33_ii) {
    const double m_phi = need(in.M_phi, "M_phi", id);
    const double sigma = need(in.sigma_floor, "sigma_floor", id);
    rep.details["M_phi"] = m_phi;
    rep.details["sigma_floor"] = sigma;
    if (r == 1 && cubic) {
      const double n = static_cast<double>(need(in.n, "n", id));
      rep.terms.emplace_back("moment_log", m_phi / (sigma * sigma * s_n) * std::log(n));
    } else if (r == 1) {
      rep.terms.emplace_back("moment", m_phi * s_n * s_n / ((3.0 - p) * sigma * sigma * phi_sn));
    } else {
      rep.terms.emplace_back("moment", std::sqrt(m_phi) * s_n / (sigma * std::sqrt(phi_sn)));
    }
  } else {
    if (cubic) {
      const double theta = need(in.theta, "theta", id);
      rep.details["theta"] = theta;
      if (r == 1) {
        rep.terms.emplace_back("bounded", theta / s_n * std::log(std::numbers::e + s_n));
      } else {
        rep.terms.emplace_back("bounded", std::sqrt(theta / s_n));
      }
    } else if (r == 1) {
      rep.terms.emplace_back("bounded", s_n * s_n / phi_sn);
    } else {
      rep.terms.emplace_back("bounded", s_n / std::sqrt(phi_sn));
    }
  }
  finish(rep);
  return rep;
}

}  // namespace

std::string_view to_string(BoundId id) {
  switch (id) {
    case BoundId::thm21_i: return "thm21_i";
    case BoundId::thm21_ii: return "thm21_ii";
    case BoundId::thm22_i: return "thm22_i";
    case BoundId::thm22_ii: return "thm22_ii";
    case BoundId::thm23: return "thm23";
    case BoundId::cor33_i: return "cor33_i";
    case BoundId::cor33_ii: return "cor33_ii";
    case BoundId::cor33_iii: return "cor33_iii";
    case BoundId::prior_haeusler_joos: return "prior_haeusler_joos";
    case BoundId::prior_joos91: return "prior_joos91";
    case BoundId::prior_rollin: return "prior_rollin";
    case BoundId::prior_fanma: return "prior_fanma";
    case BoundId::prior_fansu: return "prior_fansu";
  }
  return "?";
}

BoundId parse_bound_id(std::string_view name) {
  for (const BoundId id : kAll) {
    if (to_string(id) == name) return id;
  }
  throw ParameterError("unknown bound '" + std::string(name) + "'");
}

std::vector<BoundId> all_bounds() { return {std::begin(kAll), std::end(kAll)}; }

std::vector<int> bound_orders(BoundId id) {
  switch (id) {
    case BoundId::thm22_i:
    case BoundId::thm22_ii:
      return {2};
    case BoundId::thm23:
      return {3};
    case BoundId::cor33_i:
    case BoundId::cor33_ii:
    case BoundId::cor33_iii:
      return {1, 2};
    default:
      return {1};
  }
}

double v_norm(std::span<const double> v_n2, double q) {
  if (!(q > 0.0)) throw DomainError("v_norm: q must be positive");
  if (v_n2.empty()) throw DataError("v_norm: no paths");
  std::vector<double> powers(v_n2.size());
  for (std::size_t i = 0; i < v_n2.size(); ++i) {
    if (!std::isfinite(v_n2[i])) throw DataError("v_norm: non-finite V_n^2");
    const double d = std::abs(v_n2[i] - 1.0);
    powers[i] = d == 0.0 ? 0.0 : std::pow(d, q);
  }
  const double mean = pairwise_mean(powers);
  return mean == 0.0 ? 0.0 : std::pow(mean, 1.0 / q);
}

double v_term(std::span<const std::vector<double>> sigma2_rows, double s_n2, double q) {
  if (!(s_n2 > 0.0)) throw DomainError("v_term: s_n2 must be positive");
  std::vector<double> v(sigma2_rows.size());
  for (std::size_t r = 0; r < sigma2_rows.size(); ++r) {
    double total = 0.0;
    for (const double s : sigma2_rows[r]) total += s;
    v[r] = total / s_n2;
  }
  return std::sqrt(v_norm(v, q));
}

double BoundReport::term(std::string_view name) const {
  for (const auto& [k, v] : terms) {
    if (k == name) return v;
  }
  return 0.0;
}

BoundReport rhs_w1(BoundId id, const BoundInputs& in) {
  BoundReport rep = start(id, 1, in);
  switch (id) {
    case BoundId::thm21_i: {
      require_order(NFunction::power(2.0), gauge(in), id, "phi >= x^2");
      const double L = lyapunov_input(in, id);
      rep.details["L"] = L;
      rep.details["log_factor"] = L == 0.0 ? 0.0 : std::log(std::numbers::e + 1.0 / (L * L));
      rep.terms.emplace_back("L_log", x_log_factor(L));
      rep.terms.emplace_back("v_term", std::sqrt(need_v(in, 0.5, id)));
      break;
    }
    case BoundId::thm21_ii: {
      const double p = power_exponent(in, id);
      if (!(p > 2.0)) throw DomainError("thm21_ii: needs p > 2");
      require_order(NFunction::power(2.0), gauge(in), id, "phi >= x^2");
      if (std::isfinite(p)) require_order(gauge(in), NFunction::power(p), id, "phi <= x^p");
      const double L = lyapunov_input(in, id);
      rep.details["L"] = L;
      rep.details["p"] = p;
      rep.terms.emplace_back("pL", p * L);
      rep.terms.emplace_back("v_term", std::sqrt(need_v(in, 0.5, id)));
      break;
    }
    case BoundId::cor33_i:
    case BoundId::cor33_ii:
    case BoundId::cor33_iii:
      return cor33_bound(id, 1, in);
    case BoundId::prior_haeusler_joos: {
      const double p = power_exponent(in, id);
      if (!(p > 2.0)) throw DomainError("prior_haeusler_joos: needs p > 2");
      if (!(in.q >= 1.0)) throw DomainError("prior_haeusler_joos: needs q >= 1");
      const double L = need(in.L_p, "L_p", id);
      const double v = need_v(in, in.q, id);
      rep.details["L"] = L;
      rep.terms.emplace_back("L_pow", std::pow(L, p / (1.0 + p)));
      rep.terms.emplace_back("v_term", v == 0.0 ? 0.0 : std::pow(v, in.q / (2.0 * in.q + 1.0)));
      break;
    }
    case BoundId::prior_joos91: {
      if (!(in.q >= 1.0)) throw DomainError("prior_joos91: needs q >= 1");
      const double M = need(in.M, "M", id);
      const double s_n = need(in.s_n, "s_n", id);
      const double v = need_v(in, in.q, id);
      rep.details["M"] = M;
      rep.terms.emplace_back("M_log", M == 0.0 ? 0.0 : M / s_n * std::log(std::numbers::e + s_n * s_n / (M * M)));
      rep.terms.emplace_back("v_term", v == 0.0 ? 0.0 : std::pow(v, in.q / (2.0 * in.q + 1.0)));
      break;
    }
    case BoundId::prior_rollin: {
      for (const auto& [q, v] : in.v_norms) {
        if (v != 0.0) throw DomainError("prior_rollin: requires V_n^2 = 1");
      }
      const double L = need(in.L3, "L3", id);
      rep.details["L"] = L;
      rep.terms.emplace_back("L3", L);
      break;
    }
    case BoundId::prior_fanma: {
      if (!(in.q >= 1.0)) throw DomainError("prior_fanma: needs q >= 1");
      const double L = need(in.L3, "L3", id);
      const double s_n = need(in.s_n, "s_n", id);
      rep.details["L"] = L;
      rep.terms.emplace_back("L3", L);
      rep.terms.emplace_back("v_term", std::sqrt(need_v(in, in.q, id)));
      rep.terms.emplace_back("max_norm", need(in.max_norm_2q, "max_norm_2q", id) / s_n);
      break;
    }
    case BoundId::prior_fansu: {
      const double p = power_exponent(in, id);
      if (!(p > 2.0 && p <= 3.0)) throw DomainError("prior_fansu: needs 2 < p <= 3");
      for (const auto& [q, v] : in.v_norms) {
        if (v != 0.0) throw DomainError("prior_fansu: requires V_n^2 = 1");
      }
      const double L = need(in.L_p, "L_p", id);
      rep.details["L"] = L;
      rep.terms.emplace_back("L_p", L);
      break;
    }
    default:
      throw DomainError(std::string(to_string(id)) + " is not a W1 bound");
  }
  finish(rep);
  return rep;
}

BoundReport rhs_w2(BoundId id, const BoundInputs& in) {
  BoundReport rep = start(id, 2, in);
  switch (id) {
    case BoundId::thm22_i: {
      require_sub_cubic(in, id);
      const double L = lyapunov_input(in, id);
      rep.details["L"] = L;
      rep.terms.emplace_back("L", L);
      rep.terms.emplace_back("v_term", std::sqrt(need_v(in, 1.0, id)));
      break;
    }
    case BoundId::thm22_ii: {
      const auto g = gauge(in);
      if (!g) throw ParameterError("thm22_ii: missing input 'nf'");
      require_order(NFunction::power(3.0), g, id, "phi >= x^3");
      const double L = lyapunov_input(in, id);
      const double norm = need(in.norm_phi, "norm_phi", id);
      const double s_n = need(in.s_n, "s_n", id);
      const double n = static_cast<double>(need(in.n, "n", id));
      const double root = inverse(*g, n);
      const double g_inv = g_inverse(*g, root * root);
      rep.details["L"] = L;
      rep.details["g_inverse"] = g_inv;
      rep.terms.emplace_back("L", L);
      rep.terms.emplace_back("g_term", norm / s_n * std::pow(n * g_inv, 0.25));
      rep.terms.emplace_back("v_term", std::sqrt(need_v(in, 1.0, id)));
      break;
    }
    case BoundId::cor33_i:
    case BoundId::cor33_ii:
    case BoundId::cor33_iii:
      return cor33_bound(id, 2, in);
    default:
      throw DomainError(std::string(to_string(id)) + " is not a W2 bound");
  }
  finish(rep);
  return rep;
}

BoundReport rhs_w3(const BoundInputs& in) {
  BoundReport rep = start(BoundId::thm23, 3, in);
  const double L = need(in.L3, "L3", BoundId::thm23);
  rep.details["L"] = L;
  rep.terms.emplace_back("L3", L);
  rep.terms.emplace_back("v_term", std::sqrt(need_v(in, 1.5, BoundId::thm23)));
  finish(rep);
  return rep;
}

BoundReport evaluate_bound(BoundId id, int r, const BoundInputs& in) {
  const auto orders = bound_orders(id);
  if (std::find(orders.begin(), orders.end(), r) == orders.end()) {
    throw DomainError(std::string(to_string(id)) + " does not bound W_" + std::to_string(r));
  }
  switch (r) {
    case 1:
      return rhs_w1(id, in);
    case 2:
      return rhs_w2(id, in);
    default:
      return rhs_w3(in);
  }
}

}  // namespace mclt

#include "mclt/nfunc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mclt/error.hpp"

namespace mclt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Past this exponent expm1 overflows; switch to the log-space form.
constexpr double kExpLimit = 700.0;

// log(e^t - 1) for t > 0 without overflow or loss for tiny t.
double log_expm1(double t, double log_t) {
  if (t < 1e-8) return log_t + std::log1p(0.5 * t);
  if (t < kExpLimit) return std::log(std::expm1(t));
  return t + std::log1p(-std::exp(-t));
}

// e^x - x - 1 for small x via its Taylor series.
double exp_poly_series(double x) {
  double term = x * x / 2.0;
  double sum = term;
  for (int k = 3; k <= 14; ++k) {
    term *= x / k;
    sum += term;
  }
  return sum;
}

double exp_poly_value(double x) {
  if (x < 0.1) return exp_poly_series(x);
  if (x > kExpLimit) return kInf;
  return std::expm1(x) - x;
}

double exp_poly_log(double x) {
  if (x < 0.1) return std::log(exp_poly_series(x));
  if (x < kExpLimit) return std::log(std::expm1(x) - x);
  return x + std::log1p(-(1.0 + x) * std::exp(-x));
}

void require_param(std::span<const double> params, std::size_t count, std::string_view kind) {
  if (params.size() != count) {
    throw ParameterError(std::string(kind) + ": expected " + std::to_string(count) +
                         " parameter(s), got " + std::to_string(params.size()));
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Midpoint test f((a+b)/2) <= (f(a)+f(b))/2 + 1e-12 f(b) on grid triples, in log space.
template <typename LogF>
bool midpoint_convex(const LogF& log_f, std::span<const double> grid) {
  for (std::size_t i = 0; i + 2 < grid.size(); ++i) {
    const double a = grid[i];
    const double b = grid[i + 2];
    const double la = log_f(a);
    const double lb = log_f(b);
    const double lm = log_f(0.5 * (a + b));
    // log((φa + φb)/2 + 1e-12 φb) = lb + log(0.5 e^{la-lb} + 0.5 + 1e-12)
    const double rhs = (lb == -kInf) ? -kInf : lb + std::log(0.5 * std::exp(la - lb) + 0.5 + 1e-12);
    const double noise = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(rhs);
    if (lm > rhs + noise) return false;
  }
  return true;
}

}  // namespace

NFunction NFunction::power(double p, double scale) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("power N-function: need p >= 1");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("power N-function: need scale > 0");
  return NFunction(NKind::power, {p, scale});
}

NFunction NFunction::power_log() { return NFunction(NKind::power_log, {}); }

NFunction NFunction::exp_poly() { return NFunction(NKind::exp_poly, {}); }

NFunction NFunction::exp_power(double beta) {
  if (!(beta > 1.0) || !std::isfinite(beta)) throw DomainError("exp_power N-function: need beta > 1");
  return NFunction(NKind::exp_power, {beta});
}

NFunction NFunction::log_power(double beta) {
  if (!(beta > 1.0) || !std::isfinite(beta)) throw DomainError("log_power N-function: need beta > 1");
  return NFunction(NKind::log_power, {beta});
}

NFunction NFunction::tabulated(std::vector<double> x, std::vector<double> phi) {
  if (x.size() != phi.size() || x.size() < 2) {
    throw DataError("tabulated N-function: need at least two (x, phi) pairs");
  }
  auto table = std::make_shared<Table>();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(phi[i]) || !(x[i] > 0.0) || !(phi[i] > 0.0)) {
      throw DataError("tabulated N-function: entries must be finite and positive");
    }
    if (i > 0 && !(x[i] > x[i - 1] && phi[i] > phi[i - 1])) {
      throw DataError("tabulated N-function: grid must be strictly increasing in both columns");
    }
    table->log_x.push_back(std::log(x[i]));
    table->log_phi.push_back(std::log(phi[i]));
  }
  NFunction nf(NKind::tabulated, {});
  nf.table_ = std::move(table);
  return nf;
}

NFunction NFunction::load_table(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw DataError("cannot open N-function table " + csv.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> xs, phis;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError(csv.string() + ":" + std::to_string(line_no) + ": expected two columns");
    }
    try {
      xs.push_back(std::stod(line.substr(0, comma)));
      phis.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::logic_error&) {
      throw DataError(csv.string() + ":" + std::to_string(line_no) + ": not a number");
    }
  }
  return tabulated(std::move(xs), std::move(phis));
}

NFunction NFunction::from_kind(std::string_view kind, std::span<const double> params) {
  if (kind == "power") {
    if (params.size() == 1) return power(params[0]);
    require_param(params, 2, kind);
    return power(params[0], params[1]);
  }
  if (kind == "power_log") {
    require_param(params, 0, kind);
    return power_log();
  }
  if (kind == "exp_poly") {
    require_param(params, 0, kind);
    return exp_poly();
  }
  if (kind == "exp_power") {
    require_param(params, 1, kind);
    return exp_power(params[0]);
  }
  if (kind == "log_power") {
    require_param(params, 1, kind);
    return log_power(params[0]);
  }
  throw ParameterError("unknown N-function kind '" + std::string(kind) + "'");
}

NFunction NFunction::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  if (kind == "tabulated") return load_table(std::string(rest));
  std::vector<double> params;
  std::size_t pos = 0;
  while (pos < rest.size()) {
    auto next = rest.find(',', pos);
    if (next == std::string_view::npos) next = rest.size();
    const std::string token(rest.substr(pos, next - pos));
    try {
      std::size_t used = 0;
      params.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::logic_error&) {
      throw ParameterError("N-function spec '" + std::string(spec) + "': bad parameter '" + token + "'");
    }
    pos = next + 1;
  }
  return from_kind(kind, params);
}

std::string NFunction::describe() const {
  switch (kind_) {
    case NKind::power:
      return params_[1] == 1.0 ? "power:" + format_double(params_[0])
                               : "power:" + format_double(params_[0]) + "," + format_double(params_[1]);
    case NKind::power_log:
      return "power_log";
    case NKind::exp_poly:
      return "exp_poly";
    case NKind::exp_power:
      return "exp_power:" + format_double(params_[0]);
    case NKind::log_power:
      return "log_power:" + format_double(params_[0]);
    case NKind::tabulated:
      return "tabulated(" + std::to_string(table_->log_x.size()) + " points)";
    case NKind::conjugate:
      return "conjugate(" + primal_->describe() + ")";
  }
  return "?";
}

double NFunction::table_log_value(double x) const {
  const auto& lx = table_->log_x;
  const auto& lp = table_->log_phi;
  const double l = std::log(x);
  std::size_t seg;
  if (l <= lx.front()) {
    seg = 0;
  } else if (l >= lx.back()) {
    seg = lx.size() - 2;
  } else {
    seg = static_cast<std::size_t>(std::upper_bound(lx.begin(), lx.end(), l) - lx.begin()) - 1;
  }
  const double slope = (lp[seg + 1] - lp[seg]) / (lx[seg + 1] - lx[seg]);
  return lp[seg] + slope * (l - lx[seg]);
}

double NFunction::operator()(double x) const {
  if (x < 0.0 || std::isnan(x)) throw DomainError("N-function evaluated at a negative argument");
  if (x == 0.0) return 0.0;
  switch (kind_) {
    case NKind::power:
      return std::pow(x, params_[0]) / params_[1];
    case NKind::power_log:
      return x * x * std::log1p(x);
    case NKind::exp_poly:
      return exp_poly_value(x);
    case NKind::exp_power: {
      const double t = std::pow(x, params_[0]);
      return t > kExpLimit ? kInf : std::expm1(t);
    }
    case NKind::log_power: {
      const double t = std::pow(std::log1p(x), params_[0]);
      return t > kExpLimit ? kInf : std::expm1(t);
    }
    case NKind::tabulated:
      return std::exp(table_log_value(x));
    case NKind::conjugate:
      return conjugate_value(x);
  }
  return kInf;
}

double NFunction::log_value(double x) const {
  if (x < 0.0 || std::isnan(x)) throw DomainError("N-function evaluated at a negative argument");
  if (x == 0.0) return -kInf;
  switch (kind_) {
    case NKind::power:
      return params_[0] * std::log(x) - std::log(params_[1]);
    case NKind::power_log:
      return 2.0 * std::log(x) + std::log(std::log1p(x));
    case NKind::exp_poly:
      return exp_poly_log(x);
    case NKind::exp_power: {
      const double log_t = params_[0] * std::log(x);
      return log_expm1(std::exp(log_t), log_t);
    }
    case NKind::log_power: {
      const double log_t = params_[0] * std::log(std::log1p(x));
      return log_expm1(std::exp(log_t), log_t);
    }
    case NKind::tabulated:
      return table_log_value(x);
    case NKind::conjugate:
      return std::log(conjugate_value(x));
  }
  return kInf;
}

double NFunction::conjugate_value(double y) const {
  if (y == 0.0) return 0.0;
  const NFunction& phi = *primal_;
  const auto objective = [&](double x) {
    const double v = phi(x);
    return std::isinf(v) ? -kInf : x * y - v;
  };
  // Concave objective with value 0 at x = 0: find x with obj(x/2) <= obj(x) >= obj(2x).
  double x = 1.0;
  if (objective(2.0 * x) > objective(x)) {
    while (objective(2.0 * x) > objective(x) && x < 1e300) x *= 2.0;
  } else {
    while (x > 1e-300 && objective(0.5 * x) > objective(x)) x *= 0.5;
  }
  constexpr double kInvPhi = 0.618033988749894848204586834366;
  double lo = 0.5 * x;
  double hi = 2.0 * x;
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = objective(c);
  double fd = objective(d);
  double best = std::max({0.0, objective(x), fc, fd});
  while (hi - lo > 1e-13 * hi) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = objective(c);
      best = std::max(best, fc);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = objective(d);
      best = std::max(best, fd);
    }
  }
  return best;
}

ConjugatePair conjugate(const NFunction& nf) {
  if (nf.kind() == NKind::power && nf.params()[0] > 1.0) {
    // sup_x (xy - x^p/c) = (1 - 1/p) (c/p)^{1/(p-1)} y^{p/(p-1)}
    const double p = nf.params()[0];
    const double c = nf.params()[1];
    const double q = p / (p - 1.0);
    const double coeff = (1.0 - 1.0 / p) * std::pow(c / p, 1.0 / (p - 1.0));
    return {nf, NFunction::power(q, 1.0 / coeff), ConjugateMethod::analytic};
  }
  NFunction conj(NKind::conjugate, {});
  conj.primal_ = std::make_shared<const NFunction>(nf);
  return {nf, conj, ConjugateMethod::numeric_supremum};
}

std::vector<NFunction> builtin_nfunctions() {
  return {NFunction::power(2.0),    NFunction::power(2.5),     NFunction::power(3.0),
          NFunction::power_log(),   NFunction::exp_poly(),     NFunction::exp_power(2.0),
          NFunction::log_power(2.0)};
}

std::vector<double> default_check_grid() {
  std::vector<double> grid(200);
  const double lo = std::log(1e-6);
  const double step = (std::log(1e6) - lo) / 199.0;
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = std::exp(lo + step * static_cast<double>(i));
  grid.front() = 1e-6;
  grid.back() = 1e6;
  return grid;
}

NFunctionReport check_nfunction(const NFunction& nf, std::span<const double> grid) {
  if (grid.size() < 100 || grid.front() > 1e-6 || grid.back() < 1e6) {
    throw DomainError("check_nfunction: grid needs >= 100 points spanning [1e-6, 1e6]");
  }
  NFunctionReport report;
  report.grid_points = grid.size();
  std::vector<double> logs(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    logs[i] = nf.log_value(grid[i]);
    if (std::isnan(logs[i]) || logs[i] == kInf) {
      throw InvalidFunctionError("N-function is not finite at x = " + format_double(grid[i]));
    }
  }
  const auto fail = [&](std::string why) {
    report.violation = std::move(why);
    return report;
  };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (logs[i] == -kInf) return fail("phi(x) > 0 violated at x = " + format_double(grid[i]));
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(logs[i] > logs[i - 1])) return fail("phi strictly increasing violated at x = " + format_double(grid[i]));
  }
  if (!midpoint_convex([&](double x) { return nf.log_value(x); }, grid)) return fail("convexity violated");
  const auto log_ratio = [&](std::size_t i) { return logs[i] - std::log(grid[i]); };
  if (!(log_ratio(0) < log_ratio(1))) return fail("lim phi(x)/x = 0 violated");
  const std::size_t last = grid.size() - 1;
  if (!(log_ratio(last) > log_ratio(last - 1))) return fail("lim phi(x)/x = inf violated");
  report.passed = true;
  return report;
}

namespace {

// Root of log_f(x) = target for an increasing log_f, bisected to adjacent doubles.
template <typename LogF>
double solve_increasing(const LogF& log_f, double target) {
  double lo = 1.0;
  double hi = 1.0;
  if (log_f(1.0) < target) {
    while (log_f(hi) < target) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) throw InternalError("inverse: bracket expansion overflowed");
    }
  } else {
    while (log_f(lo) >= target) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300) return 0.0;
    }
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (log_f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(log_f(lo) - target) < std::abs(log_f(hi) - target) ? lo : hi;
}

}  // namespace

double inverse(const NFunction& nf, double y) {
  if (y < 0.0 || std::isnan(y)) throw DomainError("inverse: y must be nonnegative");
  if (y == 0.0) return 0.0;
  const double target = std::log(y);
  if (target < nf.log_value(1e-300)) return 0.0;
  return solve_increasing([&](double x) { return nf.log_value(x); }, target);
}

double g_inverse(const NFunction& nf, double y) {
  if (!(y > 0.0)) throw DomainError("g_inverse: y must be positive");
  const double target = std::log(y);
  return solve_increasing([&](double x) { return nf.log_value(x) - std::log(x); }, target);
}

OrderReport check_order(const NFunction& lower, const NFunction& upper, std::span<const double> grid) {
  OrderReport report;
  report.grid_points = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw DomainError("check_order: grid must be positive and strictly increasing");
    }
    if (i > 0) report.max_log_spacing = std::max(report.max_log_spacing, std::log(grid[i] / grid[i - 1]));
  }
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  double prev = 0.0;
  double prev_scale = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double lu = upper.log_value(grid[i]);
    const double ll = lower.log_value(grid[i]);
    const double d = lu - ll;
    const double scale = std::abs(lu) + std::abs(ll);
    // ratio_{i} >= ratio_{i-1} (1 - 1e-12), plus the rounding of the two logs.
    if (i > 0 && d < prev - 1e-12 - 4.0 * kEps * (scale + prev_scale)) {
      report.holds = false;
      return report;
    }
    prev = d;
    prev_scale = scale;
  }
  report.holds = true;
  return report;
}

bool sqrt_composition_convex(const NFunction& nf, std::span<const double> grid) {
  return midpoint_convex([&](double x) { return nf.log_value(std::sqrt(x)); }, grid);
}

}  // namespace mclt

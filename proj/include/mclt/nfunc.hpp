#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mclt {

enum class NKind {
  power,      ///< x^p / scale, p >= 1
  power_log,  ///< x^2 log(x + 1)
  exp_poly,   ///< e^x - x - 1
  exp_power,  ///< exp(x^β) - 1, β > 1
  log_power,  ///< exp(log(x + 1)^β) - 1, β > 1
  tabulated,  ///< log-log interpolation of (x, φ(x)) pairs
  conjugate,  ///< numeric Fenchel-Legendre transform of another NFunction
};

class NFunction;
struct ConjugatePair;
ConjugatePair conjugate(const NFunction& nf);

/// A convex integrability gauge φ: [0,∞) -> [0,∞). Immutable; copies share
/// any table or primal they refer to.
class NFunction {
 public:
  static NFunction power(double p, double scale = 1.0);
  static NFunction power_log();
  static NFunction exp_poly();
  static NFunction exp_power(double beta);
  static NFunction log_power(double beta);
  /// Grid must be strictly increasing in both coordinates with x, φ > 0.
  static NFunction tabulated(std::vector<double> x, std::vector<double> phi);
  /// Two-column CSV (x,phi) with a header line.
  static NFunction load_table(const std::filesystem::path& csv);
  /// Kind name plus comma-separated parameters, e.g. "power:3", "exp_power:2",
  /// "exp_poly", "tabulated:gauge.csv".
  static NFunction parse(std::string_view spec);
  static NFunction from_kind(std::string_view kind, std::span<const double> params);

  NKind kind() const { return kind_; }
  std::span<const double> params() const { return params_; }
  /// Spec string that parse() accepts (tabulated/conjugate render descriptively).
  std::string describe() const;

  /// φ(x); +inf when the value overflows. Throws DomainError for x < 0.
  double operator()(double x) const;
  /// log φ(x), finite wherever φ(x) is positive, -inf at 0.
  double log_value(double x) const;

  /// Primal of a numeric conjugate; null for other kinds.
  const NFunction* primal() const { return primal_.get(); }

 private:
  struct Table {
    std::vector<double> log_x;
    std::vector<double> log_phi;
  };

  NFunction(NKind kind, std::vector<double> params) : kind_(kind), params_(std::move(params)) {}
  double conjugate_value(double y) const;
  double table_log_value(double x) const;

  NKind kind_;
  std::vector<double> params_;
  std::shared_ptr<const Table> table_;
  std::shared_ptr<const NFunction> primal_;

  friend ConjugatePair conjugate(const NFunction& nf);
};

enum class ConjugateMethod { analytic, numeric_supremum };

struct ConjugatePair {
  NFunction primal;
  NFunction conjugate;
  ConjugateMethod method;
};

/// φ*(y) = sup_x (xy - φ(x)). Closed form for the power kind, otherwise a
/// golden-section maximisation on a geometrically expanded bracket.
ConjugatePair conjugate(const NFunction& nf);

/// Gauges the library treats as built in (used by property checks and the CLI).
std::vector<NFunction> builtin_nfunctions();

struct NFunctionReport {
  bool passed = false;
  std::string violation;  ///< First violated predicate; empty when passed.
  std::size_t grid_points = 0;
};

/// Validates the N-function predicates on a log grid of at least 100
/// points spanning [1e-6, 1e6]: positivity, monotonicity, midpoint convexity,
/// and the limits of φ(x)/x at both ends. Non-finite evaluations throw
/// InvalidFunctionError.
NFunctionReport check_nfunction(const NFunction& nf, std::span<const double> grid);

/// Default validation grid: 200 log-spaced points on [1e-6, 1e6].
std::vector<double> default_check_grid();

/// x with φ(x) = y by bisection on a geometric bracket. inverse(0) = 0 and
/// values below φ(1e-300) map to 0. Throws DomainError for y < 0.
double inverse(const NFunction& nf, double y);

/// x with φ(x)/x = y. Throws DomainError for y <= 0.
double g_inverse(const NFunction& nf, double y);

/// Verdict of lower ≼ upper (upper/lower non-decreasing) on a given grid.
/// The verdict is only as fine as the grid, so its resolution is reported.
struct OrderReport {
  bool holds = false;
  std::size_t grid_points = 0;
  double max_log_spacing = 0.0;  ///< largest log(x_{i+1}/x_i) on the grid
  explicit operator bool() const { return holds; }
};

OrderReport check_order(const NFunction& lower, const NFunction& upper,
                        std::span<const double> grid);

/// Midpoint convexity of x -> φ(√x) on the grid.
bool sqrt_composition_convex(const NFunction& nf, std::span<const double> grid);

}  // namespace mclt

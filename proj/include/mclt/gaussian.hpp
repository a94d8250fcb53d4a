#pragma once

namespace mclt {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kSqrt2OverPi = 0.797884560802865355879892119869;

/// Standard normal density; 0 at ±inf.
double normal_pdf(double x);
/// Standard normal CDF, accurate in the lower tail.
double normal_cdf(double x);
/// Upper tail 1 - Φ(x), accurate in the upper tail.
double normal_sf(double x);

/// Φ⁻¹(u) for u in [1e-12, 1 - 1e-12]; throws DomainError outside.
/// Rational approximation refined by one Halley step on Φ.
double normal_quantile(double u);

/// Same algorithm without the range check; valid on the whole open interval (0,1).
double normal_quantile_unchecked(double u);

/// ∫_a^b t^k φ(t) dt for k = 0..3. Endpoints may be infinite.
struct GaussianPartialMoments {
  double a = 0.0;
  double b = 0.0;
  double m[4] = {0.0, 0.0, 0.0, 0.0};

  static GaussianPartialMoments over(double a, double b);
};

}  // namespace mclt

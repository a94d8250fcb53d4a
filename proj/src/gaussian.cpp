#include "mclt/gaussian.hpp"

#include <cmath>
#include <limits>

#include "mclt/error.hpp"
#include "mclt/random.hpp"

namespace mclt {

namespace {

constexpr double kInvSqrt2 = 0.707106781186547524400844362105;
constexpr double kSqrt2Pi = 2.50662827463100050241576528481;

// Acklam's rational approximation, relative error below 1.2e-9.
double acklam(double u) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  if (u < kLow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (u > 1.0 - kLow) {
    const double q = std::sqrt(-2.0 * std::log1p(-u));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = u - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_pdf(double x) {
  if (std::isinf(x)) return 0.0;
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double normal_quantile_unchecked(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("normal_quantile: u must lie in (0,1)");
  }
  if (u == 0.5) return 0.0;
  // Refine on the tail that is represented accurately, then reflect.
  const bool upper = u > 0.5;
  const double p = upper ? 1.0 - u : u;
  double x = acklam(p);
  const double e = normal_cdf(x) - p;
  const double h = e * kSqrt2Pi * std::exp(0.5 * x * x);
  x -= h / (1.0 + 0.5 * x * h);
  return upper ? -x : x;
}

double normal_quantile(double u) {
  if (!(u >= 1e-12 && u <= 1.0 - 1e-12)) {
    throw DomainError("normal_quantile: u must lie in [1e-12, 1 - 1e-12]");
  }
  return normal_quantile_unchecked(u);
}

GaussianPartialMoments GaussianPartialMoments::over(double a, double b) {
  GaussianPartialMoments pm;
  pm.a = a;
  pm.b = b;
  if (!(a <= b)) throw DomainError("GaussianPartialMoments: need a <= b");
  double m0;
  if (a >= 0.0) {
    m0 = normal_sf(a) - normal_sf(b);
  } else if (b <= 0.0) {
    m0 = normal_cdf(b) - normal_cdf(a);
  } else {
    m0 = 1.0 - normal_cdf(a) - normal_sf(b);
  }
  const double pa = normal_pdf(a);
  const double pb = normal_pdf(b);
  // t^k φ(t) -> 0 at ±inf; avoid inf * 0.
  const double apa = std::isinf(a) ? 0.0 : a * pa;
  const double bpb = std::isinf(b) ? 0.0 : b * pb;
  const double aapa = std::isinf(a) ? 0.0 : a * apa;
  const double bbpb = std::isinf(b) ? 0.0 : b * bpb;
  pm.m[0] = m0;
  pm.m[1] = pa - pb;
  pm.m[2] = apa - bpb + m0;
  pm.m[3] = aapa - bbpb + 2.0 * pm.m[1];
  return pm;
}

double CounterRng::normal() { return normal_quantile_unchecked(uniform()); }

}  // namespace mclt

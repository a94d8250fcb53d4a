#include "mclt/modify.hpp"

#include <cmath>

#include "mclt/error.hpp"
#include "mclt/random.hpp"

namespace mclt {

Truncation truncate(const MdsModel& model, const MdsPath& path, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("truncate: alpha must be positive");
  const std::size_t n = model.n();
  if (path.y.size() != n || path.sigma2.size() != n) throw DataError("truncate: path does not match the model");
  Truncation t;
  if (std::isinf(alpha)) {
    t.z = path.y;
    t.sigma2_z = path.sigma2;
    return t;
  }
  t.z.resize(n);
  t.sigma2_z.resize(n);
  const double level = 0.5 * alpha;
  History h;
  for (std::size_t i = 1; i <= n; ++i) {
    if (model.kind() == ModelKind::b_mixture && i >= 2) {
      h.latent = path.final_history.latent;
      h.latent_known = true;
    }
    const ConditionalLaw law = model.conditional_law(i, h);
    const TruncatedMoments m = conditional_trunc_moments(law, level);
    const double y = path.y[i - 1];
    t.z[i - 1] = (std::abs(y) <= level ? y : 0.0) - m.mean;
    t.sigma2_z[i - 1] = m.centered_variance;
    h.partial_sum += y;
  }
  return t;
}

std::size_t stopping_time(std::span<const double> sigma2_z, double s_n2) {
  double total = 0.0;
  for (std::size_t i = 0; i < sigma2_z.size(); ++i) {
    if (sigma2_z[i] < 0.0) throw DomainError("stopping_time: negative conditional variance");
    total += sigma2_z[i];
    if (total > s_n2) return i + 1;
  }
  return sigma2_z.size() + 1;
}

ModifiedPath elongate(const MdsModel& model, const MdsPath& path, double alpha, std::uint64_t xi_seed) {
  ModifiedPath out;
  Truncation t = truncate(model, path, alpha);
  out.z = std::move(t.z);
  out.sigma2_z = std::move(t.sigma2_z);
  out.alpha = alpha;
  const std::size_t n = out.z.size();
  const double s_n2 = path.s_n2;
  out.t_stop = stopping_time(out.sigma2_z, s_n2);

  out.y_hat.assign(n + 1, 0.0);
  out.sigma2_hat.assign(n + 1, 0.0);
  double kept = 0.0;
  for (std::size_t i = 1; i < out.t_stop; ++i) {
    out.y_hat[i - 1] = out.z[i - 1];
    out.sigma2_hat[i - 1] = out.sigma2_z[i - 1];
    kept += out.sigma2_z[i - 1];
  }
  double radicand = s_n2 - kept;
  if (radicand < -1e-12) throw InternalError("elongate: negative residual variance");
  radicand = std::max(radicand, 0.0);
  CounterRng rng(xi_seed);
  out.y_hat[n] = rng.normal() * std::sqrt(radicand);
  out.sigma2_hat[n] = radicand;
  return out;
}

std::vector<ModifiedPath> modify_ensemble(const MdsModel& model, std::span<const MdsPath> paths, double alpha,
                                          std::uint64_t master_seed, std::string_view tag) {
  std::vector<ModifiedPath> out;
  out.reserve(paths.size());
  for (std::size_t r = 0; r < paths.size(); ++r) {
    out.push_back(elongate(model, paths[r], alpha, derive_seed(master_seed, r, tag)));
  }
  return out;
}

SampleMatrix abs_truncated(std::span<const ModifiedPath> paths) {
  if (paths.empty()) throw DataError("abs_truncated: no paths");
  const std::size_t n = paths.front().z.size();
  std::vector<double> values;
  values.reserve(paths.size() * n);
  for (const auto& p : paths) {
    if (p.z.size() != n) throw DataError("abs_truncated: paths differ in length");
    for (const double v : p.z) values.push_back(std::abs(v));
  }
  return SampleMatrix(paths.size(), n, std::move(values));
}

}  // namespace mclt

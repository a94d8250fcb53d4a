// Acceptance gate: runs every criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Usage: acceptance <path-to-mclt-cli>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mclt/bounds.hpp"
#include "mclt/gaussian.hpp"
#include "mclt/harness.hpp"
#include "mclt/mds.hpp"
#include "mclt/modify.hpp"
#include "mclt/nfunc.hpp"
#include "mclt/numeric.hpp"
#include "mclt/orlicz.hpp"
#include "mclt/random.hpp"
#include "mclt/wasserstein.hpp"

using namespace mclt;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int failures = 0;

void run(int id, const std::string& name, double time_limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > time_limit_s) {
    o.pass = false;
    o.detail += "; runtime " + num(secs) + " s exceeds " + num(time_limit_s) + " s";
  }
  if (!o.pass) ++failures;
  std::cout << "criterion " << id << " [" << (o.pass ? "PASS" : "FAIL") << "] " << name << ": " << o.detail << " ("
            << num(secs) << " s)" << std::endl;
}

Outcome orlicz_power_consistency() {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> len(1, 40);
  std::lognormal_distribution<double> val(0.0, 1.0);
  const double ps[] = {2.0, 2.5, 3.0, 5.0};
  double worst = 0.0;
  for (int f = 0; f < 100; ++f) {
    const double p = ps[f % 4];
    const std::size_t n = static_cast<std::size_t>(len(gen));
    std::vector<double> v(n);
    for (auto& x : v) x = val(gen);
    const SampleMatrix s(1, n, v);
    long double acc = 0.0L;
    for (const double x : v) acc += std::pow(static_cast<long double>(x), static_cast<long double>(p));
    const double closed = static_cast<double>(std::pow(acc / n, 1.0L / p));
    worst = std::max(worst, std::abs(orlicz_norm(NFunction::power(p), s) - closed) / closed);
  }
  return {worst <= 1e-8, "max relative error " + num(worst) + " over 100 fixtures"};
}

Outcome young_sandwich() {
  const auto grid = log_grid(1e-6, 1e6, 200);
  double worst_lo = std::numeric_limits<double>::infinity();
  double worst_hi = 0.0;
  for (const auto& nf : builtin_nfunctions()) {
    const auto pair = conjugate(nf);
    for (const double x : grid) {
      const double ratio = inverse(nf, x) * inverse(pair.conjugate, x) / x;
      worst_lo = std::min(worst_lo, ratio);
      worst_hi = std::max(worst_hi, ratio);
    }
  }
  const bool ok = worst_lo >= 1.0 - 1e-8 && worst_hi <= 2.0 * (1.0 + 1e-8);
  return {ok, "phi^-1(x) phi*^-1(x) / x in [" + num(worst_lo) + ", " + num(worst_hi) + "]"};
}

Outcome switch_lower_bound() {
  const std::size_t n = 10000;
  const std::size_t reps = 200000;
  const auto model = MdsModel::make(ModelKind::lattice_switch, n);
  std::vector<double> x(reps);
  parallel_for(reps, 0, [&](std::size_t r) { x[r] = simulate_terminal(model, derive_seed(51, r, "terminal")).x_n; });
  const double alpha = model.alpha();
  const auto est = w1_lower_bound_sin(x, alpha, 100);
  const double bound = alpha / (120.0 * std::sqrt(std::numbers::e));
  return {est.value >= bound - 3.0 * est.std_error,
          "E[a sin(X/a)] = " + num(est.value) + " +- " + num(est.std_error) + ", bound " + num(bound)};
}

Outcome lattice_probability() {
  std::string detail;
  bool ok = true;
  for (const double n : {1e3, 1e4, 1e5}) {
    const double a = 1.0 / std::log(n);
    const double p = region_probability(a / std::sqrt(1.0 - a * a));
    ok = ok && p >= 1.0 / 12.0 && p <= 0.5;
    detail += (detail.empty() ? "" : ", ") + std::string("n=") + num(n) + ": " + num(p);
  }
  return {ok, detail};
}

Outcome elongation_identity() {
  const std::size_t n = 64;
  const std::size_t reps = 10000;
  double worst = 0.0;
  for (const auto kind : builtin_models()) {
    const auto model = MdsModel::make(kind, n);
    for (const double alpha : {0.05, 0.5, std::numeric_limits<double>::infinity()}) {
      std::vector<double> err(reps);
      parallel_for(reps, 0, [&](std::size_t r) {
        const auto path = simulate_path(model, derive_seed(5, r, "path"));
        const auto mp = elongate(model, path, alpha, derive_seed(5, r, "xi"));
        double total = 0.0;
        for (const double v : mp.sigma2_hat) total += v;
        err[r] = std::abs(total - path.s_n2);
      });
      worst = std::max(worst, *std::max_element(err.begin(), err.end()));
    }
  }
  return {worst <= 1e-12, "max |sum sigma2_hat - s_n^2| = " + num(worst) + " over 5 models x 3 levels x 1e4 paths"};
}

Outcome truncation_norm_bound() {
  const std::size_t n = 64;
  const std::size_t reps = 10000;
  const NFunction gauges[] = {NFunction::power(2.0), NFunction::power(3.0), NFunction::exp_poly()};
  bool ok = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::string worst_case;
  for (const auto kind : builtin_models()) {
    const auto model = MdsModel::make(kind, n);
    std::vector<MdsPath> paths(reps);
    parallel_for(reps, 0, [&](std::size_t r) { paths[r] = simulate_path(model, derive_seed(6, r, "path")); });
    const SampleMatrix y = abs_increments(paths);
    for (const double alpha : {0.05, 0.5}) {
      std::vector<ModifiedPath> mods(reps);
      parallel_for(reps, 0, [&](std::size_t r) { mods[r] = elongate(model, paths[r], alpha, derive_seed(6, r, "xi")); });
      const SampleMatrix z = abs_truncated(mods);
      for (const auto& nf : gauges) {
        const auto ny = orlicz_norm_batched(nf, y, 10);
        const auto nz = orlicz_norm_batched(nf, z, 10);
        const double se = std::sqrt(nz.std_error * nz.std_error + 4.0 * ny.std_error * ny.std_error);
        const double margin = 2.0 * ny.value + 3.0 * se - nz.value;
        if (margin < worst_margin) {
          worst_margin = margin;
          worst_case = std::string(to_string(kind)) + "/" + nf.describe() + "/alpha=" + num(alpha);
        }
        ok = ok && margin >= 0.0;
      }
    }
  }
  return {ok, "smallest margin 2|Y| + 3se - |Z| = " + num(worst_margin) + " at " + worst_case};
}

Outcome rate_fits() {
  ExperimentConfig c;
  c.reps = 100000;
  c.batches = 100;
  c.r = 1.0;
  c.nfunction = "power:3";
  c.master_seed = 7;
  c.model = "iid_rademacher";
  c.bounds = {};
  const auto rad = run_experiment(c, 0);
  std::vector<std::pair<double, double>> w;
  for (const auto& row : rad) w.emplace_back(static_cast<double>(row.n), row.w_value);
  const auto fit_w = fit_rate(w);

  c.model = "lattice_switch";
  c.bounds = {BoundId::thm21_ii};
  const auto sw = run_experiment(c, 0);
  std::vector<std::pair<double, double>> ratio;
  for (const auto& row : sw) ratio.emplace_back(static_cast<double>(row.n), row.ratio);
  const auto fit_ratio = fit_rate(ratio);
  const bool ok = fit_w.slope >= -0.6 && fit_w.slope <= -0.4 && fit_ratio.slope >= -0.1 && fit_ratio.slope <= 0.1;
  return {ok, "rademacher W1 slope " + num(fit_w.slope) + " +- " + num(fit_w.slope_stderr) +
                  "; lattice_switch W1/thm21_ii slope " + num(fit_ratio.slope) + " +- " +
                  num(fit_ratio.slope_stderr)};
}

Outcome mixture_limit() {
  ExperimentConfig c;
  c.model = "b_mixture";
  c.n_grid = {16384};
  c.reps = 200000;
  c.batches = 100;
  c.r = 1.0;
  c.bounds = {};
  c.master_seed = 8;
  const auto row = run_experiment(c, 0).front();
  // Oracle: ∫ |½Φ(x/√½) + ½Φ(x/√(3/2)) - Φ(x)| dx by a fine midpoint rule.
  const int steps = 4000000;
  const double h = 24.0 / steps;
  double oracle = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double x = -12.0 + (i + 0.5) * h;
    oracle += std::abs(0.5 * normal_cdf(x / std::sqrt(0.5)) + 0.5 * normal_cdf(x / std::sqrt(1.5)) - normal_cdf(x));
  }
  oracle *= h;
  const bool ok = std::abs(row.w_value - oracle) <= 3.0 * row.w_stderr && row.w_value > 0.01;
  return {ok, "W1 = " + num(row.w_value) + " +- " + num(row.w_stderr) + ", oracle " + num(oracle)};
}

Outcome smoothing_regularity() {
  const auto abs_f = [](double x) { return std::abs(x); };
  bool ok = true;
  std::string detail;
  for (const double sigma : {0.1, 1.0, 10.0}) {
    const double h = 0.01 * sigma;
    double peak = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const double x = -5.0 * sigma + 0.1 * sigma * k;
      const double d2 = (gaussian_smooth(abs_f, sigma, x + h) - 2.0 * gaussian_smooth(abs_f, sigma, x) +
                         gaussian_smooth(abs_f, sigma, x - h)) /
                        (h * h);
      peak = std::max(peak, d2);
    }
    const double scaled = peak * sigma;
    ok = ok && scaled >= 0.39 && scaled <= 0.40;
    detail += (detail.empty() ? "" : ", ") + std::string("sigma=") + num(sigma) + ": sigma*max = " + num(scaled);
  }
  return {ok, detail};
}

Outcome distance_oracle() {
  const std::vector<double> zeros(1000, 0.0);
  const double e1 = std::sqrt(2.0 / std::numbers::pi);
  const double expect[] = {e1, 1.0, std::cbrt(2.0 * e1)};
  double worst = 0.0;
  for (int r = 1; r <= 3; ++r) {
    worst = std::max(worst, std::abs(wr_vs_normal(zeros, r).value - expect[r - 1]));
  }
  return {worst <= 1e-10, "max abs error " + num(worst)};
}

std::string csv_body(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);  // timestamp
  std::stringstream rest;
  rest << in.rdbuf();
  return rest.str();
}

Outcome cli_determinism(const std::string& cli) {
  if (cli.empty()) return {false, "path to the CLI binary not given"};
  const auto dir = std::filesystem::temp_directory_path() / "mclt_acceptance";
  std::filesystem::create_directories(dir);
  const auto config = dir / "verify.json";
  {
    std::ofstream out(config);
    out << R"({"model": "lattice_gate", "n_grid": [64, 128, 256], "reps": 20000, "batches": 100,)"
        << R"( "r": 1, "nfunction": "power:3", "bounds": ["thm21_i", "thm21_ii"], "master_seed": 11})";
  }
  std::vector<std::string> bodies;
  int k = 0;
  for (const int threads : {1, 1, 8, 8}) {
    const auto out = dir / ("run" + std::to_string(k++) + ".csv");
    const std::string cmd = "\"" + cli + "\" --threads " + std::to_string(threads) + " verify --config \"" +
                            config.string() + "\" --out \"" + out.string() + "\"";
    if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
    bodies.push_back(csv_body(out));
  }
  const bool same = std::all_of(bodies.begin(), bodies.end(), [&](const std::string& b) { return b == bodies[0]; });
  const bool nonempty = std::count(bodies[0].begin(), bodies[0].end(), '\n') == 7;
  std::filesystem::remove_all(dir);
  return {same && nonempty, same ? "4 runs (1,1,8,8 workers) byte-identical" : "CSV bodies differ"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const double inf = std::numeric_limits<double>::infinity();
  run(1, "Orlicz norm of x^p matches the power-mean closed form", 1.0, orlicz_power_consistency);
  run(2, "Young sandwich for built-in N-functions", 5.0, young_sandwich);
  run(3, "lattice_switch sin lower bound at n=1e4", 120.0, switch_lower_bound);
  run(4, "lattice probability within [1/12, 1/2]", 1.0, lattice_probability);
  run(5, "elongation preserves total conditional variance", 30.0, elongation_identity);
  run(6, "truncation at most doubles the Orlicz norm", inf, truncation_norm_bound);
  run(7, "rate fits", 600.0, rate_fits);
  run(8, "b_mixture W1 does not vanish", inf, mixture_limit);
  run(9, "smoothed |x| second derivative peak", inf, smoothing_regularity);
  run(10, "point-mass distance oracle", 1.0, distance_oracle);
  run(11, "verify CSV determinism across worker counts", inf, [&] { return cli_determinism(cli); });
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}

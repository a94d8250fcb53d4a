#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mclt/bounds.hpp"
#include "mclt/mds.hpp"

namespace mclt {

struct ExperimentConfig {
  std::string model = "iid_gaussian";
  std::vector<std::size_t> n_grid = {64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384};
  std::size_t reps = 100000;
  std::size_t batches = 100;
  double r = 1.0;
  std::string nfunction = "power:3";
  std::vector<BoundId> bounds = {BoundId::thm21_ii};
  std::uint64_t master_seed = 0;
  std::string output;
  double q = 1.0;  ///< free exponent of the prior bounds
  /// Replications used for Monte-Carlo Orlicz norms of non-power gauges;
  /// 0 picks min(reps, max(1000, 4e6 / n)).
  std::size_t moment_reps = 0;

  /// Keys are the snake_case field names; unknown keys are rejected.
  /// Throws ConfigError.
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);
  /// Throws ConfigError on the first violated constraint.
  void validate() const;
};

struct ExperimentRow {
  std::string model;
  std::size_t n = 0;
  double r = 1.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double w_value = 0.0;
  double w_stderr = 0.0;
  double L_term = 0.0;
  double v_term = 0.0;
  std::string extra_terms;
  double rhs_value = 0.0;
  double ratio = 0.0;
  std::optional<BoundReport> report;
};

/// Runs fn(i) for i in [0, count) on `threads` workers (0 = hardware concurrency).
/// Work is split into contiguous chunks; rethrows the first exception.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

/// Bound inputs for one model, computed analytically where the model allows
/// it, otherwise from Monte-Carlo path ensembles. v_n2 are per-replication
/// values of V_n².
BoundInputs model_bound_inputs(const MdsModel& model, const NFunction& nf, std::span<const double> v_n2,
                               const ExperimentConfig& config, std::size_t threads);

/// One row per (n, bound), or per n when no bounds are requested.
/// Output is independent of the worker count.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config, std::size_t threads = 1);

std::string csv_header();
std::string csv_row(const ExperimentRow& row);
/// Timestamp comment line, header, rows.
void write_csv(const std::filesystem::path& path, const std::vector<ExperimentRow>& rows);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

/// OLS of log W on log n. Needs at least 3 points; throws DomainError for W <= 0.
RateFit fit_rate(std::span<const std::pair<double, double>> points);

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  ///< (n, value), positive
};
/// Log-log line chart.
std::string rate_plot_svg(const std::vector<PlotSeries>& series, const std::string& title);

}  // namespace mclt

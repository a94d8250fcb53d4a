#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mclt/bounds.hpp"
#include "mclt/error.hpp"
#include "mclt/harness.hpp"
#include "mclt/mds.hpp"
#include "mclt/modify.hpp"
#include "mclt/nfunc.hpp"
#include "mclt/orlicz.hpp"
#include "mclt/random.hpp"
#include "mclt/wasserstein.hpp"

namespace {

using namespace mclt;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

// Every numeric token of a CSV file, in order; a non-numeric first line is a header.
std::vector<double> read_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto first = cell.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      try {
        std::size_t used = 0;
        out.push_back(std::stod(cell.substr(first), &used));
      } catch (const std::logic_error&) {
        if (line_no == 1) break;
        throw DataError(path + ":" + std::to_string(line_no) + ": not a number '" + cell + "'");
      }
    }
  }
  return out;
}

struct NfuncArgs {
  std::string kind;
  std::string params;
};

int run_nfunc_check(const NfuncArgs& a) {
  const std::string spec = a.params.empty() ? a.kind : a.kind + ":" + a.params;
  const NFunction nf = NFunction::parse(spec);
  const auto grid = default_check_grid();
  try {
    const NFunctionReport rep = check_nfunction(nf, grid);
    std::cout << "nfunction: " << nf.describe() << '\n'
              << "grid_points: " << rep.grid_points << '\n'
              << "result: " << (rep.passed ? "pass" : "fail") << '\n';
    if (!rep.passed) std::cout << "violation: " << rep.violation << '\n';
    return rep.passed ? 0 : 1;
  } catch (const InvalidFunctionError& e) {
    std::cout << "nfunction: " << nf.describe() << "\nresult: fail\nviolation: " << e.what() << '\n';
    return 1;
  }
}

struct OrliczArgs {
  std::string nfunc;
  std::string input;
  double sn = 0.0;
};

int run_orlicz(const OrliczArgs& a) {
  const NFunction nf = NFunction::parse(a.nfunc);
  const SampleMatrix s = SampleMatrix::load_csv(a.input);
  const double norm = orlicz_norm(nf, s);
  std::cout << "norm: " << fmt(norm) << "\nreps: " << s.reps() << "\nn: " << s.n() << '\n';
  if (a.sn > 0.0) std::cout << "L_phi: " << fmt(norm * inverse(nf, static_cast<double>(s.n())) / a.sn) << '\n';
  return 0;
}

struct SimulateArgs {
  std::string model;
  std::size_t n = 0;
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string modify;
};

double parse_modify_alpha(const std::string& text) {
  const std::string prefix = "alpha=";
  if (text.rfind(prefix, 0) != 0) throw ConfigError("--modify expects alpha=<value>");
  const std::string v = text.substr(prefix.size());
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  try {
    return std::stod(v);
  } catch (const std::logic_error&) {
    throw ConfigError("--modify: bad alpha '" + v + "'");
  }
}

int run_simulate(const SimulateArgs& a, std::size_t threads) {
  const MdsModel model = MdsModel::make(parse_model_kind(a.model), a.n);
  const bool modify = !a.modify.empty();
  const double alpha = modify ? parse_modify_alpha(a.modify) : 0.0;
  std::vector<MdsPath> paths(a.reps);
  std::vector<ModifiedPath> modified(modify ? a.reps : 0);
  parallel_for(a.reps, threads, [&](std::size_t rep) {
    paths[rep] = simulate_path(model, derive_seed(a.seed, rep, "path"));
    if (modify) modified[rep] = elongate(model, paths[rep], alpha, derive_seed(a.seed, rep, "xi"));
  });
  std::ofstream out = open_output(a.out);
  out << "rep,i,y,sigma2,x";
  if (modify) out << ",z,sigma2_z,t_stop,y_hat";
  out << '\n';
  for (std::size_t rep = 0; rep < a.reps; ++rep) {
    const MdsPath& p = paths[rep];
    for (std::size_t i = 0; i < a.n; ++i) {
      out << rep << ',' << i + 1 << ',' << fmt(p.y[i]) << ',' << fmt(p.sigma2[i]) << ',' << fmt(p.x[i]);
      if (modify) {
        const ModifiedPath& m = modified[rep];
        out << ',' << fmt(m.z[i]) << ',' << fmt(m.sigma2_z[i]) << ',' << m.t_stop << ',' << fmt(m.y_hat[i]);
      }
      out << '\n';
    }
    if (modify) out << rep << ',' << a.n + 1 << ",,,,,," << modified[rep].t_stop << ',' << fmt(modified[rep].y_hat[a.n]) << '\n';
  }
  if (!out) throw DataError("write failed for " + a.out);
  return 0;
}

struct DistanceArgs {
  std::string input;
  double r = 1.0;
  std::size_t batches = 100;
};

int run_distance(const DistanceArgs& a) {
  const std::vector<double> x = read_numbers(a.input);
  if (x.empty()) throw DataError(a.input + ": no samples");
  std::size_t batches = std::min(a.batches, x.size() / 2);
  WassersteinEstimate w;
  if (batches >= 2) {
    w = wr_vs_normal_batched(x, a.r, batches);
  } else {
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    w = wr_vs_normal(sorted, a.r);
    w.std_error = std::numeric_limits<double>::quiet_NaN();
  }
  std::cout << "value: " << fmt(w.value) << "\nstderr: " << fmt(w.std_error) << "\nm: " << w.m << '\n';
  return 0;
}

struct ExperimentArgs {
  std::string config;
  std::string model;
  std::vector<std::size_t> n;
  std::size_t reps = 0;
  std::size_t batches = 0;
  std::vector<std::string> bounds;
  std::string nfunc;
  double r = 0.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double q = 0.0;
  std::string out;
  std::string plot;
};

ExperimentConfig build_config(const ExperimentArgs& a) {
  ExperimentConfig c = a.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(a.config);
  if (!a.model.empty()) c.model = a.model;
  if (!a.n.empty()) c.n_grid = a.n;
  if (a.reps > 0) c.reps = a.reps;
  if (a.batches > 0) c.batches = a.batches;
  if (!a.bounds.empty()) {
    c.bounds.clear();
    for (const auto& b : a.bounds) c.bounds.push_back(parse_bound_id(b));
  }
  if (!a.nfunc.empty()) c.nfunction = a.nfunc;
  if (a.r > 0.0) c.r = a.r;
  if (a.seed_set) c.master_seed = a.seed;
  if (a.q > 0.0) c.q = a.q;
  if (!a.out.empty()) c.output = a.out;
  c.validate();
  return c;
}

int run_verify(const ExperimentArgs& a, std::size_t threads) {
  const ExperimentConfig c = build_config(a);
  const auto rows = run_experiment(c, threads);
  if (c.output.empty()) {
    std::cout << csv_header() << '\n';
    for (const auto& row : rows) std::cout << csv_row(row) << '\n';
  } else {
    write_csv(c.output, rows);
  }
  return 0;
}

int run_rates(const ExperimentArgs& a, std::size_t threads) {
  const ExperimentConfig c = build_config(a);
  const auto rows = run_experiment(c, threads);
  if (!c.output.empty()) write_csv(c.output, rows);

  std::vector<std::pair<double, double>> w_points;
  std::map<std::string, std::vector<std::pair<double, double>>> ratio_points;
  std::map<std::string, std::vector<std::pair<double, double>>> rhs_points;
  for (const auto& row : rows) {
    if (w_points.empty() || w_points.back().first != static_cast<double>(row.n)) {
      w_points.emplace_back(static_cast<double>(row.n), row.w_value);
    }
    if (row.report) {
      const std::string id(to_string(row.report->id));
      ratio_points[id].emplace_back(static_cast<double>(row.n), row.ratio);
      rhs_points[id].emplace_back(static_cast<double>(row.n), row.rhs_value);
    }
  }
  const auto print_fit = [](const std::string& label, const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 3) {
      std::cout << label << ": fewer than 3 grid points, no fit\n";
      return;
    }
    const RateFit f = fit_rate(pts);
    std::cout << label << ": slope " << fmt(f.slope) << " +- " << fmt(f.slope_stderr) << ", intercept "
              << fmt(f.intercept) << '\n';
  };
  print_fit("w_value", w_points);
  for (const auto& [id, pts] : ratio_points) print_fit("ratio[" + id + "]", pts);

  if (!a.plot.empty()) {
    std::vector<PlotSeries> series{{"W_r estimate", w_points}};
    for (const auto& [id, pts] : rhs_points) series.push_back({id, pts});
    std::ofstream out = open_output(a.plot);
    out << rate_plot_svg(series, c.model + ", r = " + fmt(c.r));
  }
  return 0;
}

void add_experiment_options(CLI::App* cmd, ExperimentArgs& a) {
  cmd->add_option("--config", a.config, "JSON experiment config");
  cmd->add_option("--model", a.model, "model name");
  cmd->add_option("--n", a.n, "sequence length(s)");
  cmd->add_option("--reps", a.reps, "replications");
  cmd->add_option("--batches", a.batches, "batches for standard errors");
  cmd->add_option("--bound", a.bounds, "bound id(s)");
  cmd->add_option("--nfunc", a.nfunc, "N-function spec, e.g. power:3");
  cmd->add_option("--r", a.r, "Wasserstein order in [1,3]");
  cmd->add_option("--seed", a.seed, "master seed")->each([&a](const std::string&) { a.seed_set = true; });
  cmd->add_option("--q", a.q, "exponent of the prior bounds");
  cmd->add_option("--out", a.out, "output CSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Martingale CLT rates: N-functions, Orlicz norms, Wasserstein distances, bound checks"};
  app.require_subcommand(1);
  std::size_t threads = 1;
  app.add_option("--threads", threads, "worker threads (0 = all cores)");

  NfuncArgs nfa;
  auto* nfunc = app.add_subcommand("nfunc", "N-function utilities");
  nfunc->require_subcommand(1);
  auto* check = nfunc->add_subcommand("check", "validate an N-function on a log grid");
  check->add_option("--kind", nfa.kind, "kind name, or tabulated")->required();
  check->add_option("--params", nfa.params, "comma-separated parameters, or a CSV path for tabulated");

  OrliczArgs oa;
  auto* orlicz = app.add_subcommand("orlicz", "sequence Orlicz norm of an R x n sample");
  orlicz->add_option("--nfunc", oa.nfunc, "N-function spec")->required();
  orlicz->add_option("--input", oa.input, "CSV, R rows x n columns")->required();
  orlicz->add_option("--sn", oa.sn, "s_n for the Lyapunov coefficient");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "simulate martingale difference paths");
  simulate->add_option("--model", sa.model)->required();
  simulate->add_option("--n", sa.n)->required();
  simulate->add_option("--reps", sa.reps);
  simulate->add_option("--seed", sa.seed);
  simulate->add_option("--out", sa.out)->required();
  simulate->add_option("--modify", sa.modify, "alpha=<value> adds truncated/elongated columns");

  DistanceArgs da;
  auto* distance = app.add_subcommand("distance", "W_r between a sample and N(0,1)");
  distance->add_option("--input", da.input, "CSV of samples")->required();
  distance->add_option("--r", da.r);
  distance->add_option("--batches", da.batches);

  ExperimentArgs va;
  auto* verify = app.add_subcommand("verify", "distance and bound values per n");
  add_experiment_options(verify, va);

  ExperimentArgs ra;
  auto* rates = app.add_subcommand("rates", "rate fits over an n grid");
  add_experiment_options(rates, ra);
  rates->add_option("--plot", ra.plot, "write an SVG log-log chart");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (check->parsed()) return run_nfunc_check(nfa);
    if (orlicz->parsed()) return run_orlicz(oa);
    if (simulate->parsed()) return run_simulate(sa, threads);
    if (distance->parsed()) return run_distance(da);
    if (verify->parsed()) return run_verify(va, threads);
    if (rates->parsed()) return run_rates(ra, threads);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

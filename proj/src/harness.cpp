#include "mclt/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mclt/error.hpp"
#include "mclt/numeric.hpp"
#include "mclt/orlicz.hpp"
#include "mclt/random.hpp"
#include "mclt/wasserstein.hpp"

namespace mclt {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

std::size_t auto_moment_reps(const ExperimentConfig& c, std::size_t n) {
  if (c.moment_reps > 0) return c.moment_reps;
  const std::size_t cap = std::max<std::size_t>(1000, 4000000 / n);
  return std::min(c.reps, cap);
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const char* const known[] = {"model", "n_grid",      "reps",   "batches", "r",          "nfunction",
                                      "bounds", "master_seed", "output", "q",       "moment_reps"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
        std::end(known)) {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  ExperimentConfig c;
  if (j.contains("model")) c.model = get_field<std::string>(j, "model");
  if (j.contains("n_grid")) c.n_grid = get_field<std::vector<std::size_t>>(j, "n_grid");
  if (j.contains("reps")) c.reps = get_field<std::size_t>(j, "reps");
  if (j.contains("batches")) c.batches = get_field<std::size_t>(j, "batches");
  if (j.contains("r")) c.r = get_field<double>(j, "r");
  if (j.contains("nfunction")) c.nfunction = get_field<std::string>(j, "nfunction");
  if (j.contains("bounds")) {
    c.bounds.clear();
    for (const auto& name : get_field<std::vector<std::string>>(j, "bounds")) {
      try {
        c.bounds.push_back(parse_bound_id(name));
      } catch (const ParameterError& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (j.contains("master_seed")) c.master_seed = get_field<std::uint64_t>(j, "master_seed");
  if (j.contains("output")) c.output = get_field<std::string>(j, "output");
  if (j.contains("q")) c.q = get_field<double>(j, "q");
  if (j.contains("moment_reps")) c.moment_reps = get_field<std::size_t>(j, "moment_reps");
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

void ExperimentConfig::validate() const {
  ModelKind kind;
  try {
    kind = parse_model_kind(model);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (n_grid.empty()) throw ConfigError("n_grid is empty");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) throw ConfigError("n_grid must be strictly increasing");
  }
  for (const std::size_t n : n_grid) {
    try {
      (void)MdsModel::make(kind, n);
    } catch (const Error& e) {
      throw ConfigError(std::string("n = ") + std::to_string(n) + ": " + e.what());
    }
  }
  if (batches < 2) throw ConfigError("batches must be at least 2");
  if (reps == 0 || reps % batches != 0) throw ConfigError("reps must be a positive multiple of batches");
  if (!(r >= 1.0 && r <= 3.0)) throw ConfigError("r must lie in [1, 3]");
  if (!(q > 0.0)) throw ConfigError("q must be positive");
  try {
    (void)NFunction::parse(nfunction);
  } catch (const Error& e) {
    throw ConfigError(std::string("nfunction: ") + e.what());
  }
  for (const BoundId id : bounds) {
    const auto orders = bound_orders(id);
    if (std::find_if(orders.begin(), orders.end(), [&](int o) { return o == r; }) == orders.end()) {
      throw ConfigError(std::string(to_string(id)) + " does not bound W_r for r = " + fmt(r));
    }
  }
}

// ---------------------------------------------------------------------------
// Execution

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(count, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

BoundInputs model_bound_inputs(const MdsModel& model, const NFunction& nf, std::span<const double> v_n2,
                               const ExperimentConfig& config, std::size_t threads) {
  BoundInputs in;
  const std::size_t n = model.n();
  const double s_n = model.s_n();
  in.nf = nf;
  in.n = n;
  in.s_n = s_n;
  in.q = config.q;
  in.reps = config.reps;
  in.seed = config.master_seed;

  if (nf.kind() == NKind::power) {
    const double p = nf.params()[0];
    const double scale = nf.params()[1];
    in.p = p;
    double total = 0.0;
    double max_moment = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      const double m = model.abs_moment(i, p);
      total += m;
      max_moment = std::max(max_moment, m);
    }
    in.L_phi = std::pow(total, 1.0 / p) / s_n;
    in.L_p = in.L_phi;
    in.norm_phi = std::pow(total / (scale * static_cast<double>(n)), 1.0 / p);
    in.M_phi = max_moment / scale;
  } else {
    const std::size_t reps = auto_moment_reps(config, n);
    const std::string tag = "moments:" + std::to_string(n);
    std::vector<double> values(reps * n);
    parallel_for(reps, threads, [&](std::size_t rep) {
      const MdsPath path = simulate_path(model, derive_seed(config.master_seed, rep, tag));
      for (std::size_t i = 0; i < n; ++i) values[rep * n + i] = std::abs(path.y[i]);
    });
    const SampleMatrix s(reps, n, std::move(values));
    const double norm = orlicz_norm(nf, s);
    in.norm_phi = norm;
    in.L_phi = norm * inverse(nf, static_cast<double>(n)) / s_n;
    double max_moment = 0.0;
    std::vector<double> col(reps);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t rep = 0; rep < reps; ++rep) col[rep] = nf(s.at(rep, i));
      max_moment = std::max(max_moment, pairwise_mean(col));
    }
    in.M_phi = max_moment;
  }
  in.L3 = model.lyapunov_power_exact(3.0);

  for (const double q : {0.5, 1.0, 1.5, config.q}) in.v_norms[q] = v_norm(v_n2, q);

  try {
    in.M = model.lyapunov_power_exact(std::numeric_limits<double>::infinity()) * s_n;
    in.theta = in.M;
  } catch (const DomainError&) {
  }
  double max_norm = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    max_norm = std::max(max_norm, std::pow(model.abs_moment(i, 2.0 * config.q), 1.0 / (2.0 * config.q)));
  }
  in.max_norm_2q = max_norm;

  if (model.kind() == ModelKind::iid_gaussian || model.kind() == ModelKind::iid_rademacher) {
    double floor = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= n; ++i) floor = std::min(floor, model.conditional_law(i, History{}).variance());
    in.sigma_floor = std::sqrt(floor);
  }
  return in;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config, std::size_t threads) {
  config.validate();
  const ModelKind kind = parse_model_kind(config.model);
  const NFunction nf = NFunction::parse(config.nfunction);
  std::vector<ExperimentRow> rows;
  for (const std::size_t n : config.n_grid) {
    const MdsModel model = MdsModel::make(kind, n);
    const std::string tag = "terminal:" + std::to_string(n);
    std::vector<double> x(config.reps);
    std::vector<double> v(config.reps);
    parallel_for(config.reps, threads, [&](std::size_t rep) {
      const TerminalDraw d = simulate_terminal(model, derive_seed(config.master_seed, rep, tag));
      x[rep] = d.x_n;
      v[rep] = d.v_n2;
    });
    const WassersteinEstimate w = wr_vs_normal_batched(x, config.r, config.batches);

    ExperimentRow base;
    base.model = config.model;
    base.n = n;
    base.r = config.r;
    base.reps = config.reps;
    base.seed = config.master_seed;
    base.w_value = w.value;
    base.w_stderr = w.std_error;
    if (config.bounds.empty()) {
      base.L_term = std::numeric_limits<double>::quiet_NaN();
      base.v_term = std::numeric_limits<double>::quiet_NaN();
      base.rhs_value = std::numeric_limits<double>::quiet_NaN();
      base.ratio = std::numeric_limits<double>::quiet_NaN();
      rows.push_back(base);
      continue;
    }
    const BoundInputs inputs = model_bound_inputs(model, nf, v, config, threads);
    for (const BoundId id : config.bounds) {
      ExperimentRow row = base;
      BoundReport rep = evaluate_bound(id, static_cast<int>(config.r), inputs);
      const auto L = rep.details.find("L");
      row.L_term = L == rep.details.end() ? 0.0 : L->second;
      row.v_term = rep.term("v_term");
      std::string extra = "bound=" + std::string(to_string(id));
      for (const auto& [name, value] : rep.terms) {
        if (name != "v_term") extra += ";" + name + "=" + fmt(value);
      }
      row.extra_terms = extra;
      row.rhs_value = rep.value;
      row.ratio = rep.value > 0.0 ? w.value / rep.value : std::numeric_limits<double>::infinity();
      row.report = std::move(rep);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output

std::string csv_header() { return "model,n,r,reps,seed,w_value,w_stderr,L_term,v_term,extra_terms,rhs_value,ratio"; }

std::string csv_row(const ExperimentRow& row) {
  std::ostringstream os;
  os << row.model << ',' << row.n << ',' << fmt(row.r) << ',' << row.reps << ',' << row.seed << ','
     << fmt(row.w_value) << ',' << fmt(row.w_stderr) << ',' << fmt(row.L_term) << ',' << fmt(row.v_term) << ','
     << row.extra_terms << ',' << fmt(row.rhs_value) << ',' << fmt(row.ratio);
  return os.str();
}

void write_csv(const std::filesystem::path& path, const std::vector<ExperimentRow>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out << "# mclt " << stamp << '\n' << csv_header() << '\n';
  for (const auto& row : rows) out << csv_row(row) << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw DomainError("fit_rate: need at least 3 points");
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [n, w] : points) {
    if (!(n > 0.0) || !(w > 0.0)) throw DomainError("fit_rate: n and W must be positive");
    xs.push_back(std::log(n));
    ys.push_back(std::log(w));
  }
  const double k = static_cast<double>(xs.size());
  const double mx = pairwise_mean(xs);
  const double my = pairwise_mean(ys);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_rate: n values must not all coincide");
  RateFit fit;
  fit.points = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - fit.intercept - fit.slope * xs[i];
    ssr += e * e;
  }
  fit.slope_stderr = std::sqrt(ssr / (k - 2.0) / sxx);
  return fit;
}

std::string rate_plot_svg(const std::vector<PlotSeries>& series, const std::string& title) {
  constexpr double width = 640;
  constexpr double height = 420;
  constexpr double margin = 60;
  static const char* const colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const auto& s : series) {
    for (const auto& [n, v] : s.points) {
      if (!(n > 0.0) || !(v > 0.0)) continue;
      x0 = std::min(x0, std::log10(n));
      x1 = std::max(x1, std::log10(n));
      y0 = std::min(y0, std::log10(v));
      y1 = std::max(y1, std::log10(v));
    }
  }
  if (!(x1 >= x0)) throw DataError("rate_plot_svg: no positive points");
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const auto px = [&](double n) { return margin + (std::log10(n) - x0) / (x1 - x0) * (width - 2 * margin); };
  const auto py = [&](double v) {
    return height - margin - (std::log10(v) - y0) / (y1 - y0) * (height - 2 * margin);
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
     << height - margin << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">log10 n ("
     << fmt(x0) << " .. " << fmt(x1) << ")</text>\n";
  os << "<text x=\"15\" y=\"" << height / 2 << "\" transform=\"rotate(-90 15 " << height / 2
     << ")\" text-anchor=\"middle\">log10 value (" << fmt(y0) << " .. " << fmt(y1) << ")</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = colors[k % std::size(colors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [n, v] : series[k].points) {
      if (n > 0.0 && v > 0.0) os << px(n) << ',' << py(v) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << width - margin - 150 << "\" y=\"" << margin + 18 * static_cast<double>(k) << "\" fill=\""
       << color << "\">" << series[k].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace mclt

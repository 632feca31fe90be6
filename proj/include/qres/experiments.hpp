// experiments.hpp - trajectory runs, figure protocols, parameter sweeps, and
// CSV / plot-script emission for the command line tool.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qres/couplings.hpp"
#include "qres/density_matrix.hpp"
#include "qres/entanglement.hpp"
#include "qres/propagator.hpp"
#include "qres/rates.hpp"
#include "qres/spectral.hpp"
#include "qres/system.hpp"

namespace qres {

enum class Rescale { none, kappa2, kappa2_plus_nu2 };
enum class OutputFormat { csv, plot };

struct TimeGridSpec {
  int n_points{2000};
  // Absolute horizon; used when > 0, otherwise t_end_scaled / kappa_max^2.
  double t_end{0.0};
  double t_end_scaled{5.0};
  Rescale rescale{Rescale::none};
};

// One run request: a system, couplings (single values or sweep lists, with
// lambda = mu tied together), a time grid, an initial state, the spectral
// evaluation mode, and output routing. Lists left unset fall back to
// per-figure defaults inside run_figure.
struct ExperimentConfig {
  SystemParams system;
  std::optional<std::vector<double>> lambda_values;
  std::optional<std::vector<double>> kappa_values;
  std::optional<std::vector<double>> nu_values;
  TimeGridSpec grid;
  InitialState initial{BraunProduct{}};
  bool renormalized{true};
  FormFactor g{FormFactor::default_g()};
  FormFactor f{FormFactor::default_f()};
  double u_c{100.0};
  std::string out_dir{"."};
  OutputFormat format{OutputFormat::csv};

  void validate() const {
    system.validate();
    if (grid.n_points < 2)
      throw std::invalid_argument("ExperimentConfig: n_points must be >= 2");
    if (grid.t_end < 0.0)
      throw std::invalid_argument("ExperimentConfig: t_end must be >= 0");
    if (grid.t_end == 0.0 && !(grid.t_end_scaled > 0.0))
      throw std::invalid_argument("ExperimentConfig: t_end_scaled must be > 0");
    auto check_list = [](const std::optional<std::vector<double>>& v,
                         const char* name) {
      if (!v) return;
      if (v->empty())
        throw std::invalid_argument(std::string("ExperimentConfig: empty sweep list for ") + name);
      for (double x : *v)
        if (!std::isfinite(x))
          throw std::invalid_argument(std::string("ExperimentConfig: non-finite value for ") + name);
    };
    check_list(lambda_values, "lambda");
    check_list(kappa_values, "kappa");
    check_list(nu_values, "nu");
    if (!renormalized) {
      g.validate();
      f.validate();
      if (!(u_c > 0.0))
        throw std::invalid_argument("ExperimentConfig: u_c must be > 0");
    }
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& s, const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument("config: bad number for '" + key + "': " + s);
  return v;
}

inline int parse_int(const std::string& s, const std::string& key) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument("config: bad integer for '" + key + "': " + s);
  return static_cast<int>(v);
}

inline std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const auto piece = trim(s.substr(pos, comma == std::string::npos
                                              ? std::string::npos
                                              : comma - pos));
    if (piece.empty())
      throw std::invalid_argument("config: empty entry in list for '" + key + "'");
    out.push_back(parse_double(piece, key));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

inline std::vector<double> values_or(const std::optional<std::vector<double>>& v,
                                     std::vector<double> fallback) {
  return v ? *v : std::move(fallback);
}

inline void require_fixed(const std::optional<std::vector<double>>& v,
                          double fixed, const std::string& what) {
  if (!v) return;
  for (double x : *v)
    if (x != fixed) throw std::invalid_argument(what);
}

}  // namespace detail

// Parses the flat sectioned key = value config format. '#' starts a comment,
// lists are comma separated, later keys override earlier ones. Unknown
// sections or keys are errors so that typos cannot silently change a run.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line, section, initial_kind = "braun";
  double a1 = 1.0, a2 = 1.0;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "system" && section != "couplings" && section != "grid" &&
          section != "initial" && section != "spectral" && section != "output")
        throw std::invalid_argument("config: unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    const std::string qual = section + "." + key;

    if (section == "system") {
      if (key == "B1") cfg.system.B1 = detail::parse_double(val, qual);
      else if (key == "B2") cfg.system.B2 = detail::parse_double(val, qual);
      else if (key == "beta") cfg.system.beta = detail::parse_double(val, qual);
      else throw std::invalid_argument("config: unknown key '" + qual + "'");
    } else if (section == "couplings") {
      if (key == "lambda") cfg.lambda_values = detail::parse_list(val, qual);
      else if (key == "kappa") cfg.kappa_values = detail::parse_list(val, qual);
      else if (key == "nu") cfg.nu_values = detail::parse_list(val, qual);
      else throw std::invalid_argument("config: unknown key '" + qual + "'");
    } else if (section == "grid") {
      if (key == "n_points") cfg.grid.n_points = detail::parse_int(val, qual);
      else if (key == "t_end") cfg.grid.t_end = detail::parse_double(val, qual);
      else if (key == "t_end_scaled") cfg.grid.t_end_scaled = detail::parse_double(val, qual);
      else if (key == "rescale") {
        if (val == "none") cfg.grid.rescale = Rescale::none;
        else if (val == "kappa2") cfg.grid.rescale = Rescale::kappa2;
        else if (val == "kappa2_plus_nu2") cfg.grid.rescale = Rescale::kappa2_plus_nu2;
        else throw std::invalid_argument("config: bad rescale mode '" + val + "'");
      } else throw std::invalid_argument("config: unknown key '" + qual + "'");
    } else if (section == "initial") {
      if (key == "state") {
        if (val != "braun" && val != "superposition")
          throw std::invalid_argument("config: bad initial state '" + val + "'");
        initial_kind = val;
      } else if (key == "a1") a1 = detail::parse_double(val, qual);
      else if (key == "a2") a2 = detail::parse_double(val, qual);
      else throw std::invalid_argument("config: unknown key '" + qual + "'");
    } else if (section == "spectral") {
      if (key == "mode") {
        if (val == "renormalized") cfg.renormalized = true;
        else if (val == "raw") cfg.renormalized = false;
        else throw std::invalid_argument("config: bad spectral mode '" + val + "'");
      } else if (key == "g_p") cfg.g.p = detail::parse_double(val, qual);
      else if (key == "g_m") cfg.g.m = detail::parse_int(val, qual);
      else if (key == "g_weight") cfg.g.angular_weight = detail::parse_double(val, qual);
      else if (key == "f_p") cfg.f.p = detail::parse_double(val, qual);
      else if (key == "f_m") cfg.f.m = detail::parse_int(val, qual);
      else if (key == "f_weight") cfg.f.angular_weight = detail::parse_double(val, qual);
      else if (key == "u_c") cfg.u_c = detail::parse_double(val, qual);
      else throw std::invalid_argument("config: unknown key '" + qual + "'");
    } else if (section == "output") {
      if (key == "dir") cfg.out_dir = val;
      else if (key == "format") {
        if (val == "csv") cfg.format = OutputFormat::csv;
        else if (val == "plot") cfg.format = OutputFormat::plot;
        else throw std::invalid_argument("config: bad output format '" + val + "'");
      } else throw std::invalid_argument("config: unknown key '" + qual + "'");
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": key outside any section");
    }
  }
  if (initial_kind == "superposition")
    cfg.initial = SuperpositionFamily{complexd(a1), complexd(a2)};
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse_config(in);
}

// Default grid: t = 0, then logarithmic points up to the breakpoint
// min(0.1 / kappa_max^2, t_end / 10), then linear points up to t_end.
// Strictly increasing with exactly n points.
inline std::vector<double> default_time_grid(double t_end, int n, double kappa_max) {
  if (!(t_end > 0.0))
    throw std::invalid_argument("default_time_grid: t_end must be > 0");
  if (n < 2) throw std::invalid_argument("default_time_grid: need n >= 2");
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(n));
  if (n < 8) {
    for (int i = 0; i < n; ++i) t.push_back(t_end * double(i) / (n - 1));
    return t;
  }
  double brk = t_end / 10.0;
  if (kappa_max > 0.0) brk = std::min(brk, 0.1 / (kappa_max * kappa_max));
  const double lo = 1e-3 * brk;
  const int n_log = std::max(2, n / 4);
  const int n_lin = n - 1 - n_log;
  t.push_back(0.0);
  for (int i = 0; i < n_log; ++i)
    t.push_back(lo * std::pow(brk / lo, double(i) / (n_log - 1)));
  for (int j = 1; j <= n_lin; ++j)
    t.push_back(brk + (t_end - brk) * double(j) / n_lin);
  t.back() = t_end;
  return t;
}

struct TimeSeriesRow {
  double t{0.0}, rescaled_t{0.0};
  Matrix4c rho{Matrix4c::Zero()};
  double concurrence{0.0}, min_eigenvalue{0.0};
};

struct TimeSeries {
  std::string label;
  CouplingSet couplings;
  std::vector<TimeSeriesRow> rows;
};

struct SummaryRow {
  std::string label;
  double lambda{0.0}, kappa{0.0}, nu{0.0};
  double c_max{0.0}, t_max{0.0}, t_max_rescaled{0.0};
  double revival_t{std::numeric_limits<double>::quiet_NaN()};
  double revival_c{std::numeric_limits<double>::quiet_NaN()};
  double delta_t_max{std::numeric_limits<double>::quiet_NaN()};
  // Times up to which each coherence cluster is tracked accurately:
  // log(kappa_max^-2) over the cluster's decoherence rate.
  double horizon_2B1{0.0}, horizon_2B2{0.0}, horizon_minus{0.0}, horizon_plus{0.0};
  // Concurrence maxima below 10 * kappa_max^2 sit inside the method's error
  // band and cannot be trusted.
  bool reliable{true};
};

struct FigureResult {
  std::string name;
  std::vector<TimeSeries> series;
  std::vector<SummaryRow> summary;
};

struct PeakInfo {
  double c_max{0.0}, t_max{0.0};
  double revival_t{std::numeric_limits<double>::quiet_NaN()};
  double revival_c{std::numeric_limits<double>::quiet_NaN()};
};

// Global maximum plus the first interior local maximum after it (the revival).
// A revival must be entered on a strict rise to rule out flat decay shoulders.
inline PeakInfo extract_peaks(const std::vector<double>& t,
                              const std::vector<double>& c) {
  if (t.size() != c.size() || t.empty())
    throw std::invalid_argument("extract_peaks: need matching non-empty arrays");
  PeakInfo p;
  std::size_t imax = 0;
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i] > c[imax]) imax = i;
  p.c_max = c[imax];
  p.t_max = t[imax];
  for (std::size_t i = imax + 1; i + 1 < c.size(); ++i) {
    if (c[i] > c[i - 1] && c[i] >= c[i + 1] && c[i] > 1e-9) {
      p.revival_t = t[i];
      p.revival_c = c[i];
      break;
    }
  }
  return p;
}

inline double rescale_factor(Rescale mode, const CouplingSet& c) {
  switch (mode) {
    case Rescale::none: return 1.0;
    case Rescale::kappa2: return c.kappa1 * c.kappa1;
    case Rescale::kappa2_plus_nu2: return c.kappa1 * c.kappa1 + c.nu1 * c.nu1;
  }
  return 1.0;
}

// Evolves one coupling point over the default grid and records state,
// concurrence, and minimal eigenvalue at each time. Concurrence is clamped
// into [0, 1]; approximation artifacts stay visible in min_eigenvalue.
inline TimeSeries run_point(const CouplingSet& c, const ResonanceData& rd,
                            const DensityMatrix4& rho0, const TimeGridSpec& grid,
                            Rescale mode, std::string label) {
  const double kmax = c.kappa_max();
  double t_end = grid.t_end;
  if (!(t_end > 0.0)) {
    if (kmax == 0.0)
      throw std::invalid_argument(
          "run_point: zero couplings need an absolute t_end");
    t_end = grid.t_end_scaled / (kmax * kmax);
  }
  const auto times = default_time_grid(t_end, grid.n_points, kmax);
  const double factor = rescale_factor(mode, c);
  // Tolerated negativity: second order in every coupling channel combined.
  double sumsq = 0.0;
  for (double v : {c.lambda1, c.lambda2, c.kappa1, c.kappa2, c.mu1, c.mu2,
                   c.nu1, c.nu2})
    sumsq += v * v;
  const double floor = -10.0 * sumsq - 1e-12;
  TimeSeries ts;
  ts.label = std::move(label);
  ts.couplings = c;
  ts.rows.reserve(times.size());
  for (double t : times) {
    const DensityMatrix4 rho = evolve(rho0, t, rd);
    TimeSeriesRow row;
    row.t = t;
    row.rescaled_t = factor * t;
    row.rho = rho.m;
    row.concurrence = std::min(1.0, concurrence(rho, floor));
    row.min_eigenvalue = rho.min_eigenvalue();
    ts.rows.push_back(row);
  }
  return ts;
}

// Times up to which the four coherence clusters are tracked accurately:
// log(kappa_max^-2) over each cluster's slowest decay, unbounded where the
// cluster does not decay at all. Order: 2 B1, 2 B2, difference, sum.
inline std::array<double, 4> validity_horizons(const ResonanceData& rd,
                                               double kappa_max) {
  const double inf = std::numeric_limits<double>::infinity();
  const double log_inv = kappa_max > 0.0 ? -2.0 * std::log(kappa_max) : inf;
  auto horizon = [&](double rate) { return rate > 0.0 ? log_inv / rate : inf; };
  return {
      horizon(cluster_rate(2.0 * rd.sys.B1, {rd.eps_2B1_1, rd.eps_2B1_2})),
      horizon(cluster_rate(2.0 * rd.sys.B2, {rd.eps_2B2_1, rd.eps_2B2_2})),
      horizon(cluster_rate(2.0 * (rd.sys.B1 - rd.sys.B2), {rd.eps_minus})),
      horizon(cluster_rate(2.0 * (rd.sys.B1 + rd.sys.B2), {rd.eps_plus}))};
}

inline SummaryRow summarize(const TimeSeries& ts, const ResonanceData& rd) {
  std::vector<double> t, c;
  t.reserve(ts.rows.size());
  c.reserve(ts.rows.size());
  for (const auto& row : ts.rows) {
    t.push_back(row.t);
    c.push_back(row.concurrence);
  }
  const PeakInfo p = extract_peaks(t, c);
  const double factor = ts.rows.size() >= 2 && ts.rows[1].t > 0.0
                            ? ts.rows[1].rescaled_t / ts.rows[1].t
                            : 0.0;
  SummaryRow s;
  s.label = ts.label;
  s.lambda = ts.couplings.lambda1;
  s.kappa = ts.couplings.kappa1;
  s.nu = ts.couplings.nu1;
  s.c_max = p.c_max;
  s.t_max = p.t_max;
  s.t_max_rescaled = factor * p.t_max;
  s.revival_t = p.revival_t;
  s.revival_c = p.revival_c;

  const double kmax = ts.couplings.kappa_max();
  const auto hz = validity_horizons(rd, kmax);
  s.horizon_2B1 = hz[0];
  s.horizon_2B2 = hz[1];
  s.horizon_minus = hz[2];
  s.horizon_plus = hz[3];
  s.reliable = s.c_max >= 10.0 * kmax * kmax;
  return s;
}

namespace detail {

struct PointRunner {
  const ExperimentConfig& cfg;
  SpectralData sd;
  DensityMatrix4 rho0;
  FigureResult fig;

  PointRunner(const ExperimentConfig& config, std::string name)
      : cfg(config),
        sd(config.renormalized
               ? SpectralData::renormalized(config.system)
               : SpectralData::from_form_factors(config.g, config.f,
                                                 config.system, config.u_c)),
        rho0(initial_state(config.initial)) {
    fig.name = std::move(name);
  }

  void add(const CouplingSet& c, Rescale mode, const std::string& label) {
    const ResonanceData rd = resonance_data(c, sd, cfg.system);
    TimeSeries ts = run_point(c, rd, rho0, cfg.grid, mode, label);
    fig.summary.push_back(summarize(ts, rd));
    fig.series.push_back(std::move(ts));
  }
};

}  // namespace detail

// Runs one of the six predefined figure protocols. Sweep lists left unset in
// the config take the protocol defaults; lists that contradict a value the
// protocol pins are rejected. All figure protocols start from the fixed
// product state.
inline FigureResult run_figure(int n, const ExperimentConfig& cfg) {
  cfg.validate();
  if (n < 1 || n > 6)
    throw std::invalid_argument("run_figure: figure index must be in 1..6");
  if (!std::holds_alternative<BraunProduct>(cfg.initial))
    throw std::invalid_argument(
        "run_figure: figure protocols use the fixed product initial state");
  using detail::format_value;
  using detail::require_fixed;
  using detail::sorted;
  using detail::values_or;

  detail::PointRunner run(cfg, "fig" + std::to_string(n));
  const std::vector<double> full_lambda_sweep = {0.0,  0.001, 0.0025, 0.005,
                                                 0.01, 0.025, 0.05};

  switch (n) {
    case 1: {
      require_fixed(cfg.lambda_values, 0.0, "figure 1 fixes lambda = mu = 0");
      require_fixed(cfg.nu_values, 0.0, "figure 1 fixes nu = 0");
      for (double k : sorted(values_or(cfg.kappa_values, {0.01, 0.1, 1.0})))
        run.add(CouplingSet::symmetric_set(0.0, k, 0.0, 0.0), Rescale::kappa2,
                run.fig.name + "_kappa" + format_value(k));
      break;
    }
    case 2: {
      require_fixed(cfg.lambda_values, 0.0, "figure 2 fixes lambda = mu = 0");
      for (double k : sorted(values_or(cfg.kappa_values, {0.01, 0.02}))) {
        std::vector<double> nus;
        if (cfg.nu_values) {
          nus = *cfg.nu_values;
        } else {
          for (double ratio : {0.0, 0.25, 0.5, 0.75, 1.0, 1.2})
            nus.push_back(ratio * k);
        }
        for (double v : sorted(std::move(nus)))
          run.add(CouplingSet::symmetric_set(0.0, k, 0.0, v), Rescale::none,
                  run.fig.name + "_kappa" + format_value(k) + "_nu" + format_value(v));
      }
      break;
    }
    case 3: {
      require_fixed(cfg.lambda_values, 0.0, "figure 3 fixes lambda = mu = 0");
      for (double v : sorted(values_or(cfg.nu_values, {0.005})))
        for (double k : sorted(values_or(cfg.kappa_values, {0.05, 0.1}))) {
          if (!(k > v))
            throw std::invalid_argument("figure 3 needs kappa > nu");
          run.add(CouplingSet::symmetric_set(0.0, k, 0.0, v),
                  Rescale::kappa2_plus_nu2,
                  run.fig.name + "_kappa" + format_value(k) + "_nu" + format_value(v));
        }
      break;
    }
    case 4:
    case 6: {
      require_fixed(cfg.nu_values, 0.0,
                    "figures 4 and 6 fix nu = 0");
      const auto lambdas = sorted(values_or(
          cfg.lambda_values,
          n == 4 ? full_lambda_sweep
                 : std::vector<double>{0.0, 0.0005, 0.001, 0.002, 0.005}));
      for (double k : sorted(values_or(cfg.kappa_values, {0.02})))
        for (double l : lambdas)
          run.add(CouplingSet::symmetric_set(l, k, l, 0.0), Rescale::kappa2,
                  run.fig.name + "_kappa" + format_value(k) + "_lambda" + format_value(l));
      break;
    }
    case 5: {
      const auto lambdas = sorted(values_or(cfg.lambda_values, full_lambda_sweep));
      for (double k : sorted(values_or(cfg.kappa_values, {0.02})))
        for (double v : sorted(values_or(cfg.nu_values, {0.0, 0.01}))) {
          const std::size_t base = run.fig.summary.size();
          for (double l : lambdas)
            run.add(CouplingSet::symmetric_set(l, k, l, v), Rescale::kappa2,
                    run.fig.name + "_kappa" + format_value(k) + "_nu" +
                        format_value(v) + "_lambda" + format_value(l));
          // Time shift of the maximum relative to the lambda = 0 member.
          double t0 = std::numeric_limits<double>::quiet_NaN();
          for (std::size_t i = base; i < run.fig.summary.size(); ++i)
            if (run.fig.summary[i].lambda == 0.0) t0 = run.fig.summary[i].t_max;
          for (std::size_t i = base; i < run.fig.summary.size(); ++i)
            run.fig.summary[i].delta_t_max = run.fig.summary[i].t_max - t0;
        }
      break;
    }
  }
  return std::move(run.fig);
}

// Cartesian sweep over the configured coupling lists, summary only. Points
// run in sorted order, so the output is independent of list order.
inline FigureResult sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  using detail::format_value;
  detail::PointRunner run(cfg, "sweep");
  for (double l : detail::sorted(detail::values_or(cfg.lambda_values, {0.0})))
    for (double k : detail::sorted(detail::values_or(cfg.kappa_values, {0.0})))
      for (double v : detail::sorted(detail::values_or(cfg.nu_values, {0.0})))
        run.add(CouplingSet::symmetric_set(l, k, l, v), cfg.grid.rescale,
                "sweep_lambda" + format_value(l) + "_kappa" + format_value(k) +
                    "_nu" + format_value(v));
  return std::move(run.fig);
}

// Fixed CSV layout: the strictly upper triangle row by row, then the
// diagonal, each entry as a real/imag pair printed with 17 significant
// digits so parsing recovers the doubles exactly.
inline constexpr const char* kSeriesHeader =
    "t,rescaled_t,re_12,im_12,re_13,im_13,re_14,im_14,re_23,im_23,re_24,im_24,"
    "re_34,im_34,re_11,im_11,re_22,im_22,re_33,im_33,re_44,im_44,concurrence,min_eig";

inline constexpr std::pair<int, int> kCsvSlots[10] = {
    {1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4},
    {1, 1}, {2, 2}, {3, 3}, {4, 4}};

inline constexpr const char* kSummaryHeader =
    "label,lambda,kappa,nu,c_max,t_max,t_max_rescaled,revival_t,revival_c,"
    "delta_t_max,horizon_2B1,horizon_2B2,horizon_minus,horizon_plus,reliable";

inline void write_series_csv(const std::string& path, const TimeSeries& ts) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kSeriesHeader << "\n";
  for (const auto& row : ts.rows) {
    out << detail::format_full(row.t) << ',' << detail::format_full(row.rescaled_t);
    for (const auto& [i, j] : kCsvSlots) {
      const complexd v = row.rho(i - 1, j - 1);
      out << ',' << detail::format_full(v.real()) << ',' << detail::format_full(v.imag());
    }
    out << ',' << detail::format_full(row.concurrence) << ','
        << detail::format_full(row.min_eigenvalue) << "\n";
  }
  if (!out.good()) throw std::runtime_error("cannot write " + path);
}

inline void write_summary_csv(const std::string& path,
                              const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kSummaryHeader << "\n";
  for (const auto& s : rows) {
    out << s.label;
    for (double v : {s.lambda, s.kappa, s.nu, s.c_max, s.t_max, s.t_max_rescaled,
                     s.revival_t, s.revival_c, s.delta_t_max, s.horizon_2B1,
                     s.horizon_2B2, s.horizon_minus, s.horizon_plus})
      out << ',' << detail::format_full(v);
    out << ',' << (s.reliable ? 1 : 0) << "\n";
  }
  if (!out.good()) throw std::runtime_error("cannot write " + path);
}

// Reads back a series CSV written by write_series_csv. The header must match
// the fixed layout exactly; the lower triangle is restored by conjugation.
inline std::vector<TimeSeriesRow> read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kSeriesHeader)
    throw std::runtime_error("unexpected CSV header in " + path);
  std::vector<TimeSeriesRow> rows;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    std::vector<double> vals;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const auto comma = line.find(',', pos);
      const auto piece = line.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      vals.push_back(detail::parse_double(detail::trim(piece), "csv field"));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (vals.size() != 24)
      throw std::runtime_error("bad CSV row width in " + path);
    TimeSeriesRow row;
    row.t = vals[0];
    row.rescaled_t = vals[1];
    for (int s = 0; s < 10; ++s) {
      const auto [i, j] = kCsvSlots[s];
      const complexd v(vals[2 + 2 * s], vals[3 + 2 * s]);
      row.rho(i - 1, j - 1) = v;
      if (i != j) row.rho(j - 1, i - 1) = std::conj(v);
    }
    row.concurrence = vals[22];
    row.min_eigenvalue = vals[23];
    rows.push_back(row);
  }
  return rows;
}

namespace detail {

// The plot script loads only the emitted CSV files; all drawing logic is
// static text branching on the figure id.
inline std::string plot_script_text(const FigureResult& fig,
                                    const std::vector<std::string>& series_files,
                                    const std::string& summary_file) {
  std::string py;
  py += "#!/usr/bin/env python3\n";
  py += "import collections\n";
  py += "import csv\n";
  py += "import os.path\n";
  py += "import matplotlib\n";
  py += "matplotlib.use(\"Agg\")\n";
  py += "import matplotlib.pyplot as plt\n\n";
  py += "FIG = \"" + fig.name + "\"\n";
  py += "SERIES = [\n";
  for (const auto& f : series_files) py += "    \"" + f + "\",\n";
  py += "]\n";
  py += "SUMMARY = \"" + summary_file + "\"\n\n";
  py += R"PY(def load(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        return {}
    return {k: [float(r[k]) if r[k] != "" and k != "label" else r[k] for r in rows]
            for k in rows[0]}

def label_of(path):
    stem = os.path.basename(path)[:-4]
    return stem.split("_", 1)[1] if "_" in stem else stem

data = [(label_of(p), load(p)) for p in SERIES]
summ = load(SUMMARY)

if FIG == "fig1":
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(11, 4))
    for name, d in data:
        ax0.plot(d["t"], d["concurrence"], label=name)
        ax1.plot(d["rescaled_t"], d["concurrence"], label=name)
    ax0.set_xscale("log")
    ax0.set_xlabel("t")
    ax1.set_xlabel("rescaled t")
    for ax in (ax0, ax1):
        ax.set_ylabel("concurrence")
        ax.legend()
elif FIG == "fig2":
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(11, 4))
    kmin = min(summ["kappa"]) if summ else None
    for (name, d), k in zip(data, summ.get("kappa", [])):
        if k == kmin:
            ax0.plot(d["t"], d["concurrence"], label=name)
    ax0.set_xlabel("t")
    ax0.set_ylabel("concurrence")
    ax0.legend()
    groups = collections.OrderedDict()
    for k, v, c in zip(summ["kappa"], summ["nu"], summ["c_max"]):
        groups.setdefault(k, []).append((v, c))
    for k, pts in groups.items():
        pts.sort()
        ax1.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                 label="kappa=%g" % k)
    ax1.set_xlabel("nu")
    ax1.set_ylabel("max concurrence")
    ax1.legend()
elif FIG == "sweep":
    fig, ax = plt.subplots(figsize=(8, 4.5))
    labels = summ.get("label", [])
    xs = list(range(len(labels)))
    ax.plot(xs, summ.get("c_max", []), marker="o")
    ax.set_xticks(xs)
    ax.set_xticklabels([str(l).replace("sweep_", "") for l in labels],
                       rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("max concurrence")
elif FIG == "fig5":
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(11, 4))
    groups = collections.OrderedDict()
    for v, l, dt, c in zip(summ["nu"], summ["lambda"], summ["delta_t_max"],
                           summ["c_max"]):
        groups.setdefault(v, []).append((l, dt, c))
    for v, pts in groups.items():
        pts.sort()
        ax0.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                 label="nu=%g" % v)
        ax1.plot([p[0] for p in pts], [p[2] for p in pts], marker="o",
                 label="nu=%g" % v)
    ax0.set_xlabel("lambda")
    ax0.set_ylabel("shift of t_max")
    ax1.set_xlabel("lambda")
    ax1.set_ylabel("max concurrence")
    ax0.legend()
    ax1.legend()
else:
    normalize = FIG in ("fig3", "fig6")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name, d in data:
        y = d["concurrence"]
        if normalize:
            peak = max(y) if y and max(y) > 0 else 1.0
            y = [c / peak for c in y]
        x = d["rescaled_t"] if any(d["rescaled_t"]) else d["t"]
        ax.plot(x, y, label=name)
    ax.set_xlabel("rescaled t")
    ax.set_ylabel("concurrence / max" if normalize else "concurrence")
    ax.legend()

plt.tight_layout()
plt.savefig(FIG + ".png", dpi=160)
)PY";
  return py;
}

}  // namespace detail

// Writes every series CSV, the summary CSV, and (for plot format) a python
// script that renders the figure from those CSV files. Returns the paths
// written, in order.
inline std::vector<std::string> emit(const FigureResult& fig,
                                     const std::string& out_dir,
                                     OutputFormat format) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  std::vector<std::string> series_files;
  for (const auto& ts : fig.series) {
    const std::string file = ts.label + ".csv";
    const std::string path = (fs::path(out_dir) / file).string();
    write_series_csv(path, ts);
    written.push_back(path);
    series_files.push_back(file);
  }
  const std::string summary_file = fig.name + "_summary.csv";
  const std::string summary_path = (fs::path(out_dir) / summary_file).string();
  write_summary_csv(summary_path, fig.summary);
  written.push_back(summary_path);
  if (format == OutputFormat::plot) {
    const std::string path = (fs::path(out_dir) / (fig.name + "_plot.py")).string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << detail::plot_script_text(fig, series_files, summary_file);
    if (!out.good()) throw std::runtime_error("cannot write " + path);
    written.push_back(path);
  }
  return written;
}

// Largest pointwise concurrence gap between two curves on the first curve's
// rescaled time axis, linearly interpolating the second curve and restricting
// to the overlap of the two ranges. With normalize set, each curve is first
// divided by its own maximum.
inline double max_rescaled_mismatch(const TimeSeries& a, const TimeSeries& b,
                                    bool normalize = false) {
  if (a.rows.size() < 2 || b.rows.size() < 2)
    throw std::invalid_argument("max_rescaled_mismatch: need at least 2 rows");
  auto columns = [&](const TimeSeries& ts, std::vector<double>& x,
                     std::vector<double>& y) {
    for (const auto& row : ts.rows) {
      x.push_back(row.rescaled_t);
      y.push_back(row.concurrence);
    }
    if (normalize) {
      const double peak = *std::max_element(y.begin(), y.end());
      if (peak > 0.0)
        for (double& v : y) v /= peak;
    }
  };
  std::vector<double> xa, ya, xb, yb;
  columns(a, xa, ya);
  columns(b, xb, yb);
  const double lo = std::max(xa.front(), xb.front());
  const double hi = std::min(xa.back(), xb.back());
  double worst = 0.0;
  for (std::size_t i = 0; i < xa.size(); ++i) {
    const double x = xa[i];
    if (x < lo || x > hi) continue;
    const auto it = std::lower_bound(xb.begin(), xb.end(), x);
    double v;
    if (it == xb.begin()) {
      v = yb.front();
    } else if (it == xb.end()) {
      v = yb.back();
    } else {
      const std::size_t j = static_cast<std::size_t>(it - xb.begin());
      const double w = (x - xb[j - 1]) / (xb[j] - xb[j - 1]);
      v = (1.0 - w) * yb[j - 1] + w * yb[j];
    }
    worst = std::max(worst, std::abs(ya[i] - v));
  }
  return worst;
}

}  // namespace qres

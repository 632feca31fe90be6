// qres - command line front end: rates, trajectories, concurrence series,
// sudden-death bounds, solvable-model validation, figure protocols, sweeps.
// Success prints results or written paths on stdout and exits 0; any failure
// prints one machine-readable line to stderr and exits 1:
//   error: {"message":"..."}
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qres/experiments.hpp"
#include "qres/solvable.hpp"

namespace {

using namespace qres;

void print_error(const std::string& message) {
  std::cerr << "error: " << nlohmann::json{{"message", message}}.dump() << "\n";
}

void print_value(const char* key, double v) {
  std::printf("%s=%s\n", key, detail::format_full(v).c_str());
}

double pick_single(const std::optional<std::vector<double>>& v, const char* name) {
  if (!v) return 0.0;
  if (v->size() != 1)
    throw std::invalid_argument(
        std::string("this command needs a single value for ") + name +
        ", not a sweep list");
  return v->front();
}

// CouplingSet for the one-point commands; lambda and mu are tied together,
// both qubits get the same values.
CouplingSet single_point(const ExperimentConfig& cfg) {
  const double l = pick_single(cfg.lambda_values, "lambda");
  return CouplingSet::symmetric_set(l, pick_single(cfg.kappa_values, "kappa"),
                                    l, pick_single(cfg.nu_values, "nu"));
}

SpectralData spectral_of(const ExperimentConfig& cfg) {
  return cfg.renormalized
             ? SpectralData::renormalized(cfg.system)
             : SpectralData::from_form_factors(cfg.g, cfg.f, cfg.system, cfg.u_c);
}

void print_horizons(const ResonanceData& rd, double kappa_max) {
  const auto hz = validity_horizons(rd, kappa_max);
  print_value("validity_horizon_2B1", hz[0]);
  print_value("validity_horizon_2B2", hz[1]);
  print_value("validity_horizon_minus", hz[2]);
  print_value("validity_horizon_plus", hz[3]);
}

int cmd_rates(const ExperimentConfig& cfg) {
  const auto c = single_point(cfg);
  const auto sd = spectral_of(cfg);
  const auto rs = lowest_order_rates(c, sd, cfg.system);
  const auto rd = resonance_data(c, sd, cfg.system);

  print_value("gamma_th", rs.gamma_th);
  print_value("gamma2_dec", rs.gamma2_dec);
  print_value("gamma3_dec", rs.gamma3_dec);
  print_value("gamma4_dec", rs.gamma4_dec);
  print_value("gamma5_dec", rs.gamma5_dec);
  print_value("Y2", rs.Y2);
  print_value("Y3", rs.Y3);

  // Slowest decay per cluster taken from the resonance energies themselves;
  // these drive the actual evolution.
  const auto& s = cfg.system;
  const double g2 = cluster_rate(2.0 * s.B1, {rd.eps_2B1_1, rd.eps_2B1_2});
  const double g3 = cluster_rate(2.0 * s.B2, {rd.eps_2B2_1, rd.eps_2B2_2});
  const double g4 = cluster_rate(2.0 * (s.B1 - s.B2), {rd.eps_minus});
  const double g5 = cluster_rate(2.0 * (s.B1 + s.B2), {rd.eps_plus});
  const double gth = std::min(rd.delta2, rd.delta3);
  print_value("thermalization_rate", gth);
  print_value("cluster_rate_2B1", g2);
  print_value("cluster_rate_2B2", g3);
  print_value("cluster_rate_minus", g4);
  print_value("cluster_rate_plus", g5);

  const double inf = std::numeric_limits<double>::infinity();
  auto reciprocal = [&](double g) { return g > 0.0 ? 1.0 / g : inf; };
  print_value("thermalization_time", reciprocal(gth));
  print_value("decoherence_time_2B1", reciprocal(g2));
  print_value("decoherence_time_2B2", reciprocal(g3));
  print_value("decoherence_time_minus", reciprocal(g4));
  print_value("decoherence_time_plus", reciprocal(g5));

  print_value("kappa_max", c.kappa_max());
  print_horizons(rd, c.kappa_max());
  return 0;
}

int cmd_series(const ExperimentConfig& cfg, bool concurrence_only) {
  const auto c = single_point(cfg);
  const auto sd = spectral_of(cfg);
  const auto rd = resonance_data(c, sd, cfg.system);
  const auto ts = run_point(c, rd, initial_state(cfg.initial), cfg.grid,
                            cfg.grid.rescale,
                            concurrence_only ? "concurrence" : "evolve");
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const std::string path = (fs::path(cfg.out_dir) / (ts.label + ".csv")).string();
  if (concurrence_only) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,rescaled_t,concurrence,min_eig\n";
    for (const auto& row : ts.rows)
      out << detail::format_full(row.t) << ',' << detail::format_full(row.rescaled_t)
          << ',' << detail::format_full(row.concurrence) << ','
          << detail::format_full(row.min_eigenvalue) << "\n";
    if (!out.good()) throw std::runtime_error("cannot write " + path);
  } else {
    write_series_csv(path, ts);
  }
  std::printf("wrote %s\n", path.c_str());
  print_horizons(rd, c.kappa_max());
  return 0;
}

int cmd_bounds(const ExperimentConfig& cfg) {
  const auto c = single_point(cfg);
  const auto sd = spectral_of(cfg);
  double p = 0.5;
  if (const auto* fam = std::get_if<SuperpositionFamily>(&cfg.initial)) {
    const double n1 = std::norm(fam->a1), n2 = std::norm(fam->a2);
    p = n1 / (n1 + n2);
  }
  const auto d = DisentanglementInputs::from_couplings(p, c, sd);
  const auto b = disentanglement_bounds(d);
  print_value("p", d.p);
  print_value("delta2", d.delta2);
  print_value("delta3", d.delta3);
  print_value("delta5", d.delta5);
  print_value("kappa_max", d.kappa_max);
  print_value("t_A", b.t_A);
  print_value("t_B", b.t_B);
  return 0;
}

int cmd_validate(const ExperimentConfig& cfg) {
  if (cfg.lambda_values)
    for (double l : *cfg.lambda_values)
      if (l != 0.0)
        throw std::invalid_argument(
            "validate needs lambda = mu = 0; the reference model has no "
            "transverse couplings");
  const double nu = pick_single(cfg.nu_values, "nu");
  auto kappas = cfg.kappa_values ? *cfg.kappa_values
                                 : std::vector<double>{0.02, 0.04, 0.08};
  std::sort(kappas.begin(), kappas.end());

  // The comparison runs the memory integrals of the configured profile, so
  // the Markovian side must use the matching quadrature constants; the
  // renormalized shortcut would compare two different models.
  const MemoryFunctions mf(cfg.f, cfg.system.beta);
  const auto sd = SpectralData::from_form_factors(cfg.g, cfg.f, cfg.system, cfg.u_c);
  const auto rho0 = initial_state(cfg.initial);

  const double t_end = cfg.grid.t_end > 0.0 ? cfg.grid.t_end : 1000.0;
  const int n = std::min(cfg.grid.n_points, 201);
  std::vector<double> grid_t;
  for (int i = 0; i < n; ++i) grid_t.push_back(t_end * i / (n - 1));

  std::vector<double> log_k, log_dev;
  for (double k : kappas) {
    const double dev = deviation(rho0, grid_t, k, nu, mf, sd, cfg.system);
    std::printf("kappa=%s deviation=%s\n", detail::format_full(k).c_str(),
                detail::format_full(dev).c_str());
    if (k > 0.0 && dev > 0.0) {
      log_k.push_back(std::log(k));
      log_dev.push_back(std::log(dev));
    }
  }
  if (log_k.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < log_k.size(); ++i) {
      sx += log_k[i];
      sy += log_dev[i];
      sxx += log_k[i] * log_k[i];
      sxy += log_k[i] * log_dev[i];
    }
    const double m = static_cast<double>(log_k.size());
    print_value("slope", (m * sxy - sx * sy) / (m * sxx - sx * sx));
  }
  return 0;
}

int cmd_figure(int index, const ExperimentConfig& cfg) {
  const auto fig = run_figure(index, cfg);
  for (const auto& p : emit(fig, cfg.out_dir, cfg.format))
    std::printf("wrote %s\n", p.c_str());
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  auto fig = sweep(cfg);
  fig.series.clear();  // the sweep product is the summary table
  for (const auto& p : emit(fig, cfg.out_dir, cfg.format))
    std::printf("wrote %s\n", p.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-qubit reservoir dynamics toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, format;
  app.add_option("--config", config_path,
                 "configuration file (sectioned key = value)");
  app.add_option("--out", out_dir, "output directory, overrides [output] dir");
  app.add_option("--format", format, "csv or plot, overrides [output] format")
      ->check(CLI::IsMember({"csv", "plot"}));

  auto* c_rates = app.add_subcommand(
      "rates", "decoherence and thermalization rates at one coupling point");
  auto* c_evolve = app.add_subcommand(
      "evolve", "full state time series at one coupling point");
  auto* c_conc = app.add_subcommand(
      "concurrence", "concurrence time series at one coupling point");
  auto* c_bounds = app.add_subcommand(
      "bounds", "sudden-death time window at one coupling point");
  auto* c_validate = app.add_subcommand(
      "validate", "deviation from the exactly solvable conserving model");
  int figure_index = 0;
  auto* c_figure =
      app.add_subcommand("figure", "run a predefined figure protocol");
  c_figure->add_option("index", figure_index, "figure number (1..6)")
      ->required()
      ->check(CLI::Range(1, 6));
  auto* c_sweep =
      app.add_subcommand("sweep", "cartesian coupling sweep, summary output");
  // Global options may appear after the subcommand name.
  for (auto* s : {c_rates, c_evolve, c_conc, c_bounds, c_validate, c_figure, c_sweep})
    s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error(e.what());
    return 1;
  }

  try {
    ExperimentConfig cfg =
        config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!format.empty())
      cfg.format = format == "plot" ? OutputFormat::plot : OutputFormat::csv;
    cfg.validate();
    if (c_rates->parsed()) return cmd_rates(cfg);
    if (c_evolve->parsed()) return cmd_series(cfg, false);
    if (c_conc->parsed()) return cmd_series(cfg, true);
    if (c_bounds->parsed()) return cmd_bounds(cfg);
    if (c_validate->parsed()) return cmd_validate(cfg);
    if (c_figure->parsed()) return cmd_figure(figure_index, cfg);
    if (c_sweep->parsed()) return cmd_sweep(cfg);
    print_error("no subcommand selected");
  } catch (const std::exception& e) {
    print_error(e.what());
    return 1;
  }
  return 1;
}

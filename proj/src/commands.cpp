#include "cdr/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cdr/analytic.hpp"
#include "cdr/csv.hpp"
#include "cdr/evolve.hpp"
#include "cdr/parallel.hpp"
#include "cdr/units.hpp"

namespace cdr::commands {

namespace {

using json = nlohmann::ordered_json;

void ensure_dir(const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << j.dump(2) << '\n';
}

json config_echo(const config::RunConfig& cfg) {
  const hilbert::SystemParams& p = cfg.params;
  json j;
  j["g_over_2pi_mhz"] = units::rad_ns_to_mhz(p.g);
  j["omega_r_over_2pi_ghz"] = units::rad_ns_to_ghz(p.omega_r);
  j["omega_q0_over_2pi_ghz"] = units::rad_ns_to_ghz(p.qubit.omega0);
  j["detuning_over_2pi_mhz"] = units::rad_ns_to_mhz(p.qubit.delta);
  j["qubit_levels"] = p.space.n_levels;
  if (p.space.n_levels == 3)
    j["anharmonicity_over_2pi_mhz"] = units::rad_ns_to_mhz(p.anharmonicity);
  j["n_max"] = p.space.n_max;
  j["b0_over_2pi_mhz"] = units::rad_ns_to_mhz(p.drive.b0);
  j["t_b_ns"] = p.drive.t_b;
  j["tau_b_ns"] = p.drive.tau_b;
  j["sigma_b_ns"] = p.drive.sigma_b;
  j["t_q_ns"] = p.qubit.t_q;
  j["sigma_q_ns"] = p.qubit.sigma_q;
  j["t_qe_ns"] = p.qubit.t_qe;
  j["sigma_qe_ns"] = p.qubit.sigma_qe;
  j["t_f_ns"] = p.schedule.t_f;
  j["dt_ps"] = p.schedule.dt * 1e3;
  j["eta"] = cfg.detection.eta;
  j["phi"] = cfg.detection.phi ? json(*cfg.detection.phi) : json("auto");
  j["grid_points"] = cfg.grid_points;
  return j;
}

json validity_block(const config::RunConfig& cfg) {
  const hilbert::SystemParams& p = cfg.params;
  analytic::DispersiveModel model{p.g, p.qubit, pulse::lambda_in(p.drive),
                                  p.schedule.t_d};
  json j;
  j["dispersive_ratio"] = model.validity_ratio();
  j["eq3_n_bar"] = cfg.n_bar_integral;
  j["truncation_tail"] = hilbert::poisson_tail(
      cfg.n_bar_integral, p.space.n_max - p.space.n_levels);
  j["nonlinearity_ratio"] =
      cfg.n_bar_integral / (p.qubit.delta * p.qubit.delta / (4.0 * p.g * p.g));
  return j;
}

void write_wigner_csv(const Eigen::MatrixXcd& rho, double half, int points,
                      const std::string& path) {
  std::vector<double> xs(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i)
    xs[static_cast<size_t>(i)] = -half + 2.0 * half * i / (points - 1);
  const Eigen::MatrixXd w = quadrature::wigner(rho, xs, xs);
  csv::Writer out(path, {"x", "p", "w"});
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j)
      out.row({xs[static_cast<size_t>(i)], xs[static_cast<size_t>(j)], w(i, j)});
}

optimize::OptSpec opt_spec_from(const config::RunConfig& cfg) {
  optimize::OptSpec spec;
  spec.base = cfg.params;
  spec.t_f = cfg.opt_t_f;
  spec.eta = cfg.detection.eta;
  spec.budget = cfg.opt_budget;
  spec.bounds = cfg.opt_bounds;
  spec.grid_points = cfg.grid_points;
  spec.threads = parallel::resolve_threads(cfg.threads);
  // Reference operating point, used as one start when inside the box.
  spec.seed = optimize::Point{units::mhz_to_rad_ns(60.0), 4.20, 3.25};
  return spec;
}

json optimum_json(const optimize::OptResult& result) {
  json j;
  j["best_error"] = result.best_error;
  j["best_delta_over_2pi_mhz"] = units::rad_ns_to_mhz(result.best.delta);
  j["best_sigma_q_ns"] = result.best.sigma_q;
  j["best_t_q_ns"] = result.best.t_q;
  j["evaluations"] = result.log.size();
  j["converged"] = result.converged;
  j["start_kinds"] = result.start_kinds;
  return j;
}

void write_evaluations_csv(const optimize::OptResult& result,
                           const std::string& path) {
  csv::Writer out(path, {"eval", "start", "delta_over_2pi_mhz", "sigma_q_ns",
                         "t_q_ns", "error", "feasible"});
  for (const auto& rec : result.log)
    out.row({double(rec.index), double(rec.start),
             units::rad_ns_to_mhz(rec.point.delta), rec.point.sigma_q,
             rec.point.t_q, rec.error, rec.feasible ? 1.0 : 0.0});
}

}  // namespace

void cmd_simulate(const config::RunConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  const hilbert::SystemParams& p = cfg.params;

  evolve::RunOptions opts;
  opts.log_every = cfg.log_every;
  opts.with_error = true;
  opts.grid_points = cfg.grid_points;
  opts.threads = parallel::resolve_threads(cfg.threads);
  const evolve::BothBranches run =
      evolve::run_both_branches(p, cfg.detection, opts);

  {
    csv::Writer out(join(out_dir, "timeseries.csv"),
                    {"t_ns", "re_lam0", "im_lam0", "re_lam1", "im_lam1",
                     "delta_lambda", "phi_rad", "squeeze0", "squeeze1",
                     "error"});
    for (const auto& rec : run.series.records)
      out.row({rec.t, rec.lambda0.real(), rec.lambda0.imag(),
               rec.lambda1.real(), rec.lambda1.imag(), rec.delta_lambda,
               rec.phi, rec.squeeze0, rec.squeeze1, rec.error});
  }

  const evolve::TimeSeriesRecord& last = run.series.records.back();
  const quadrature::Grid grid = quadrature::shared_grid(
      {&run.field0.rho, &run.field1.rho}, last.phi, cfg.detection.eta,
      cfg.grid_points);
  const auto p0 =
      quadrature::distribution(run.field0.rho, last.phi, cfg.detection.eta, grid);
  const auto p1 =
      quadrature::distribution(run.field1.rho, last.phi, cfg.detection.eta, grid);
  {
    csv::Writer out(join(out_dir, "dist_final.csv"), {"x", "P0", "P1"});
    for (int i = 0; i < grid.n; ++i)
      out.row({grid.x(i), p0.p[static_cast<size_t>(i)],
               p1.p[static_cast<size_t>(i)]});
  }
  const quadrature::ErrorReport error = quadrature::error_from_distributions(p0, p1);

  if (cfg.wigner) {
    const double half =
        std::abs(pulse::lambda_in(p.drive)) + 4.0;
    write_wigner_csv(run.field0.rho, half, cfg.wigner_points,
                     join(out_dir, "wigner_b0_tf.csv"));
    write_wigner_csv(run.field1.rho, half, cfg.wigner_points,
                     join(out_dir, "wigner_b1_tf.csv"));
  }

  const evolve::NonQndReport qnd =
      evolve::non_qndness_from_states(p, run.joint0, run.joint1);
  const analytic::RateReport rate =
      analytic::separation_rate_bound(run.series, p.g);

  json summary;
  summary["final_error"] = error.overlap_error;
  summary["final_threshold_error"] = error.threshold_error;
  summary["final_threshold_x"] = error.threshold;
  summary["final_delta_lambda"] = last.delta_lambda;
  summary["final_phi_rad"] = last.phi;
  summary["final_squeeze0"] = last.squeeze0;
  summary["final_squeeze1"] = last.squeeze1;
  summary["non_qndness"] = {
      {"branch0", qnd.branch0}, {"branch1", qnd.branch1}, {"value", qnd.value}};
  summary["n_bar_nominal"] = cfg.n_bar_nominal;
  summary["n_bar_integral"] = cfg.n_bar_integral;
  summary["max_separation_rate_over_g"] = rate.ratio_to_g;
  summary["validity"] = validity_block(cfg);
  summary["config"] = config_echo(cfg);
  write_json(summary, join(out_dir, "summary.json"));
}

void cmd_optimize(const config::RunConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  const optimize::OptSpec spec = opt_spec_from(cfg);
  const optimize::OptResult result = optimize::optimize(spec);
  write_evaluations_csv(result, join(out_dir, "evaluations.csv"));
  json j = optimum_json(result);
  j["t_f_ns"] = spec.t_f;
  j["eta"] = spec.eta;
  j["n_bar_integral"] = cfg.n_bar_integral;
  j["config"] = config_echo(cfg);
  write_json(j, join(out_dir, "optimum.json"));
}

void cmd_sweep(const config::RunConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  optimize::OptSpec spec = opt_spec_from(cfg);
  spec.threads = 1;
  const int threads = parallel::resolve_threads(cfg.threads);

  std::vector<double> n_bars = cfg.sweep_n_bar;
  if (n_bars.empty() || cfg.sweep_axis != "t_f")
    n_bars = {cfg.n_bar_integral};

  csv::Writer table(join(out_dir, "sweep.csv"),
                    {"n_bar", "axis_value", "best_error",
                     "best_delta_over_2pi_mhz", "best_sigma_q_ns", "best_t_q_ns",
                     "evaluations", "converged", "failed"});
  json summary;
  summary["axis"] = cfg.sweep_axis;
  json rows_json = json::array();

  for (double n_bar : n_bars) {
    optimize::OptSpec local = spec;
    if (cfg.sweep_axis == "t_f" && n_bar != cfg.n_bar_integral)
      local.base.drive.b0 = std::sqrt(n_bar) / local.base.drive.tau_b;
    const std::vector<optimize::SweepRow> rows =
        optimize::sweep(cfg.sweep_axis, cfg.sweep_values, local, threads);

    std::ofstream frontier;
    if (cfg.sweep_axis == "t_f") {
      std::ostringstream name;
      name << "frontier_nbar" << n_bar << ".csv";
      frontier.open(join(out_dir, name.str()));
      frontier << "t_f_ns,best_error\n";
    }
    for (const auto& row : rows) {
      table.row({n_bar, row.value,
                 row.failed ? std::nan("") : row.result.best_error,
                 row.failed ? std::nan("")
                            : units::rad_ns_to_mhz(row.result.best.delta),
                 row.failed ? std::nan("") : row.result.best.sigma_q,
                 row.failed ? std::nan("") : row.result.best.t_q,
                 double(row.result.log.size()),
                 row.result.converged ? 1.0 : 0.0, row.failed ? 1.0 : 0.0});
      if (frontier.is_open() && !row.failed)
        frontier << csv::fmt(row.value) << ','
                 << csv::fmt(row.result.best_error) << '\n';
      json jrow;
      jrow["n_bar"] = n_bar;
      jrow["value"] = row.value;
      jrow["failed"] = row.failed;
      if (row.failed)
        jrow["message"] = row.message;
      else
        jrow.update(optimum_json(row.result));
      rows_json.push_back(jrow);
    }
  }
  summary["rows"] = rows_json;
  summary["config"] = config_echo(cfg);
  write_json(summary, join(out_dir, "sweep_summary.json"));
}

void cmd_analyze(const config::RunConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  const hilbert::SystemParams& p = cfg.params;

  evolve::RunOptions opts;
  opts.log_every = cfg.log_every;
  opts.with_error = false;
  opts.grid_points = cfg.grid_points;
  opts.threads = parallel::resolve_threads(cfg.threads);
  const evolve::BothBranches run =
      evolve::run_both_branches(p, cfg.detection, opts);

  const analytic::DispersiveModel model{p.g, p.qubit, pulse::lambda_in(p.drive),
                                        p.schedule.t_d};
  {
    csv::Writer out(join(out_dir, "analytic_compare.csv"),
                    {"t_ns", "arg_lam0_numeric", "arg_lam0_approx",
                     "arg_lam1_numeric", "arg_lam1_approx", "delta_lambda",
                     "delta_lambda_dispersive"});
    for (const auto& rec : run.series.records) {
      const auto disp = analytic::dispersive_phases(rec.t, model);
      out.row({rec.t, std::arg(rec.lambda0),
               std::arg(analytic::lambda_eff_approx(0, rec.t, p)),
               std::arg(rec.lambda1),
               std::arg(analytic::lambda_eff_approx(1, rec.t, p)),
               rec.delta_lambda, disp.delta_lambda});
    }
  }

  const analytic::RateReport rate =
      analytic::separation_rate_bound(run.series, p.g);
  json j;
  j["max_separation_rate"] = rate.max_rate;
  j["max_separation_rate_over_g"] = rate.ratio_to_g;
  j["rate_bound_violated"] = rate.violation;
  j["min_photon_for_1e-3"] =
      analytic::min_photon_estimate(1e-3, cfg.detection.eta);
  j["min_photon_for_1e-4"] =
      analytic::min_photon_estimate(1e-4, cfg.detection.eta);
  j["validity"] = validity_block(cfg);
  j["config"] = config_echo(cfg);
  write_json(j, join(out_dir, "analysis.json"));
}

}  // namespace cdr::commands

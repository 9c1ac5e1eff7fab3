#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cdr/commands.hpp"
#include "cdr/config.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  double dt_ps = 0.0;
  int n_max = 0;
  int threads = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "TOML configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "output directory")->required();
  cmd->add_option("--dt", args.dt_ps, "integrator step override (ps)");
  cmd->add_option("--nmax", args.n_max, "Fock truncation override");
  cmd->add_option("--threads", args.threads, "worker thread override");
}

cdr::config::RunConfig load(const CommonArgs& args) {
  cdr::config::RunConfig cfg = args.config_path.empty()
                                   ? cdr::config::default_config()
                                   : cdr::config::parse_config(args.config_path);
  if (args.dt_ps > 0.0) {
    cfg.params.schedule.dt = args.dt_ps * 1e-3;
    const double steps = cfg.params.schedule.t_f / cfg.params.schedule.dt;
    if (std::abs(steps - std::round(steps)) > 1e-6)
      throw cdr::config::ConfigError("--dt: t_f / dt must be an integer step count");
  }
  if (args.n_max > 0) {
    cfg.params.space.n_max = args.n_max;
    cdr::hilbert::check_truncation(cfg.n_bar_integral, cfg.params.space);
  }
  if (args.threads >= 0) cfg.threads = args.threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"catch-disperse-release qubit readout simulator"};
  app.require_subcommand(1);

  CommonArgs sim_args, opt_args, sweep_args, analyze_args;
  add_common(app.add_subcommand("simulate",
                                "propagate both qubit branches and emit "
                                "time series, distributions and a summary"),
             sim_args);
  add_common(app.add_subcommand("optimize",
                                "minimize the measurement error over "
                                "(detuning, sigma_q, t_q) at fixed t_f"),
             opt_args);
  add_common(app.add_subcommand("sweep",
                                "re-optimize across a parameter axis and "
                                "emit frontier tables"),
             sweep_args);
  add_common(app.add_subcommand("analyze",
                                "compare numeric evolution against the "
                                "closed-form models"),
             analyze_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("simulate"))
      cdr::commands::cmd_simulate(load(sim_args), sim_args.out_dir);
    else if (app.got_subcommand("optimize"))
      cdr::commands::cmd_optimize(load(opt_args), opt_args.out_dir);
    else if (app.got_subcommand("sweep"))
      cdr::commands::cmd_sweep(load(sweep_args), sweep_args.out_dir);
    else if (app.got_subcommand("analyze"))
      cdr::commands::cmd_analyze(load(analyze_args), analyze_args.out_dir);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}

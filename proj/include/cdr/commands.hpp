#pragma once

#include <string>

#include "cdr/config.hpp"

namespace cdr::commands {

/// Writes timeseries.csv, dist_final.csv, optional wigner_*.csv and
/// summary.json into out_dir.
void cmd_simulate(const config::RunConfig& cfg, const std::string& out_dir);

/// Single optimization at opt_t_f: evaluations.csv + optimum.json.
void cmd_optimize(const config::RunConfig& cfg, const std::string& out_dir);

/// Re-optimized rows over the configured axis: sweep.csv, frontier CSVs and
/// sweep_summary.json.
void cmd_sweep(const config::RunConfig& cfg, const std::string& out_dir);

/// Numeric-vs-analytic comparison: analytic_compare.csv + analysis.json.
void cmd_analyze(const config::RunConfig& cfg, const std::string& out_dir);

}  // namespace cdr::commands

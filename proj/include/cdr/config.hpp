#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdr/hilbert.hpp"
#include "cdr/optimize.hpp"
#include "cdr/quadrature.hpp"

namespace cdr::config {

/// Fully validated run configuration. Defaults reproduce the reference
/// operating point (g/2pi = 30 MHz, Delta/2pi = 50 MHz, B0/2pi = 497.4 MHz,
/// sigma_q = 3 ns, t_q = 3.25 ns, t_qe = 30 ns).
struct RunConfig {
  hilbert::SystemParams params;
  quadrature::DetectionParams detection;

  double n_bar_nominal = 9.0;   // declared mean photon number
  double n_bar_integral = 0.0;  // (b0 tau_b)^2 from the envelope integral

  long log_every = 50;
  int grid_points = 4096;
  bool wigner = false;
  int wigner_points = 121;
  int threads = 0;  // 0 = auto

  // Optimization / sweep settings (config units: MHz, ns).
  double opt_t_f = 30.0;
  int opt_budget = 400;
  optimize::Bounds opt_bounds;  // internal units
  std::string sweep_axis = "t_f";
  std::vector<double> sweep_values;
  std::vector<double> sweep_n_bar;  // outer photon-number loop for t_f sweeps
};

RunConfig default_config();

/// Parses and validates; unknown keys, malformed values and violated
/// invariants are errors with field-precise messages.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cdr::config

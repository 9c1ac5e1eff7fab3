#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cdr/hilbert.hpp"

namespace cdr::optimize {

/// Free readout parameters (internal units: rad/ns, ns).
struct Point {
  double delta = 0.0;
  double sigma_q = 0.0;
  double t_q = 0.0;
};

struct Bounds {
  double delta_min = 0.0, delta_max = 0.0;
  double sigma_min = 0.0, sigma_max = 0.0;
  double tq_min = 0.0, tq_max = 0.0;
};

struct OptSpec {
  hilbert::SystemParams base;  // drive, coupling, schedule template
  double t_f = 30.0;           // t_qe is derived as t_f - 2 sigma_qe
  double eta = 1.0;
  int budget = 400;
  int n_starts = 8;
  Bounds bounds;
  int grid_points = 4096;
  int threads = 1;                // parallelism across starts
  std::optional<Point> seed;      // replaces the first grid start if in bounds
  double spread_tol = 0.05;       // relative simplex-spread termination
};

struct EvalRecord {
  int start = 0;
  int index = 0;  // global evaluation index, in log order
  Point point;
  double error = 0.5;
  bool feasible = true;
  std::string diagnostic;
};

struct OptResult {
  Point best;
  double best_error = 0.5;
  std::vector<EvalRecord> log;
  bool converged = false;
  std::vector<std::string> start_kinds;
};

/// System parameters for one candidate point under the fixed spec.
hilbert::SystemParams params_for(const Point& pt, const OptSpec& spec);

/// Full-pipeline objective: propagate both branches, form the quadrature
/// distributions at the measurement angle, return the overlap error.
/// Deterministic for fixed spec and point. Throws on infeasible points.
double evaluate_error(const Point& pt, const OptSpec& spec);

/// Multi-start Nelder-Mead over (log delta, log sigma_q, t_q).
OptResult optimize(const OptSpec& spec);

struct SweepRow {
  double value = 0.0;
  OptResult result;
  bool failed = false;
  std::string message;
};

/// Re-optimizes for each value of the given axis ("t_f", "n_bar" or "eta").
/// Per-row failures are recorded and the sweep continues.
std::vector<SweepRow> sweep(const std::string& axis,
                            const std::vector<double>& values, OptSpec spec,
                            int threads);

/// Generic Nelder-Mead core (used for the optimizer self-test as well).
struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int evals = 0;
  bool converged = false;
};

NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& x0, const std::vector<double>& steps,
    int max_evals, double spread_tol);

}  // namespace cdr::optimize

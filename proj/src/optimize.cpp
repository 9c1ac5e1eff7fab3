#include "cdr/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cdr/evolve.hpp"
#include "cdr/parallel.hpp"
#include "cdr/quadrature.hpp"

namespace cdr::optimize {

namespace {

constexpr double infeasible_floor = 0.5;

void check_spec(const OptSpec& spec) {
  const Bounds& b = spec.bounds;
  if (!(b.delta_min > 0.0 && b.delta_max > b.delta_min))
    throw std::invalid_argument("optimize: degenerate delta bounds");
  if (!(b.sigma_min > 0.0 && b.sigma_max > b.sigma_min))
    throw std::invalid_argument("optimize: degenerate sigma_q bounds");
  if (!(b.tq_max > b.tq_min))
    throw std::invalid_argument("optimize: degenerate t_q bounds");
  if (spec.budget < 1) throw std::invalid_argument("optimize: budget must be >= 1");
  if (spec.n_starts < 1) throw std::invalid_argument("optimize: need >= 1 start");
  if (spec.t_f <= 2.0 * spec.base.qubit.sigma_qe)
    throw std::invalid_argument("optimize: t_f too short for the rear ramp");
}

}  // namespace

hilbert::SystemParams params_for(const Point& pt, const OptSpec& spec) {
  hilbert::SystemParams p = spec.base;
  p.qubit.delta = pt.delta;
  p.qubit.sigma_q = pt.sigma_q;
  p.qubit.t_q = pt.t_q;
  p.qubit.t_qe = spec.t_f - 2.0 * p.qubit.sigma_qe;
  p.schedule.t_f = spec.t_f;
  p.schedule.t_d = p.drive.t_b + 0.5 * p.drive.tau_b;
  return p;
}

double evaluate_error(const Point& pt, const OptSpec& spec) {
  const Bounds& b = spec.bounds;
  if (pt.delta < b.delta_min || pt.delta > b.delta_max ||
      pt.sigma_q < b.sigma_min || pt.sigma_q > b.sigma_max ||
      pt.t_q < b.tq_min || pt.t_q > b.tq_max)
    throw std::invalid_argument("evaluate_error: point outside bounds");
  const hilbert::SystemParams p = params_for(pt, spec);
  if (pt.t_q + 2.0 * pt.sigma_q >= p.qubit.t_qe)
    throw std::invalid_argument(
        "evaluate_error: front ramp does not complete before the rear ramp");

  quadrature::DetectionParams det;
  det.eta = spec.eta;
  evolve::RunOptions opts;
  opts.log_every = 0;  // final record only
  opts.with_error = true;
  opts.grid_points = spec.grid_points;
  opts.threads = 1;
  const evolve::BothBranches run = evolve::run_both_branches(p, det, opts);
  return run.series.records.back().error;
}

NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& x0, const std::vector<double>& steps,
    int max_evals, double spread_tol) {
  const size_t dim = x0.size();
  NelderMeadResult result;
  result.x = x0;
  result.f = std::numeric_limits<double>::infinity();

  int evals = 0;
  auto call = [&](const std::vector<double>& x) {
    ++evals;
    const double f = objective(x);
    if (f < result.f) {
      result.f = f;
      result.x = x;
    }
    return f;
  };

  if (max_evals < 1) return result;

  std::vector<std::vector<double>> simplex;
  std::vector<double> fvals;
  simplex.push_back(x0);
  fvals.push_back(call(x0));
  for (size_t i = 0; i < dim && evals < max_evals; ++i) {
    std::vector<double> v = x0;
    v[i] += steps[i];
    simplex.push_back(v);
    fvals.push_back(call(v));
  }
  if (simplex.size() < dim + 1) {
    result.evals = evals;
    return result;
  }

  auto order = [&] {
    std::vector<size_t> idx(simplex.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](size_t a, size_t b) { return fvals[a] < fvals[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> f2;
    for (size_t k : idx) {
      s2.push_back(simplex[k]);
      f2.push_back(fvals[k]);
    }
    simplex.swap(s2);
    fvals.swap(f2);
  };

  while (evals < max_evals) {
    order();
    const double spread =
        (fvals.back() - fvals.front()) / std::max(std::abs(fvals.front()), 1e-300);
    if (spread < spread_tol) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (size_t i = 0; i < dim; ++i) {
      for (size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= double(dim);

    auto blend = [&](const std::vector<double>& from, double coeff) {
      std::vector<double> v(dim);
      for (size_t j = 0; j < dim; ++j)
        v[j] = centroid[j] + coeff * (from[j] - centroid[j]);
      return v;
    };

    const std::vector<double> reflected = blend(simplex.back(), -1.0);
    const double fr = call(reflected);
    if (fr < fvals.front() && evals < max_evals) {
      const std::vector<double> expanded = blend(simplex.back(), -2.0);
      const double fe = call(expanded);
      if (fe < fr) {
        simplex.back() = expanded;
        fvals.back() = fe;
      } else {
        simplex.back() = reflected;
        fvals.back() = fr;
      }
    } else if (fr < fvals[dim - 1]) {
      simplex.back() = reflected;
      fvals.back() = fr;
    } else if (evals < max_evals) {
      const bool outside = fr < fvals.back();
      const std::vector<double> contracted =
          blend(outside ? reflected : simplex.back(), outside ? 0.5 : 0.5);
      const double fc = call(contracted);
      if (fc < std::min(fr, fvals.back())) {
        simplex.back() = contracted;
        fvals.back() = fc;
      } else {
        for (size_t i = 1; i < simplex.size() && evals < max_evals; ++i) {
          for (size_t j = 0; j < dim; ++j)
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          fvals[i] = call(simplex[i]);
        }
      }
    }
  }
  result.evals = evals;
  return result;
}

namespace {

struct TransformedSpace {
  Bounds b;

  std::vector<double> to_u(const Point& p) const {
    return {std::log(p.delta), std::log(p.sigma_q), p.t_q};
  }
  Point to_point(const std::vector<double>& u) const {
    return {std::exp(u[0]), std::exp(u[1]), u[2]};
  }
  std::vector<double> lo() const {
    return {std::log(b.delta_min), std::log(b.sigma_min), b.tq_min};
  }
  std::vector<double> hi() const {
    return {std::log(b.delta_max), std::log(b.sigma_max), b.tq_max};
  }
};

struct StartResult {
  std::vector<EvalRecord> log;
  bool converged = false;
};

}  // namespace

OptResult optimize(const OptSpec& spec) {
  check_spec(spec);
  const TransformedSpace space{spec.bounds};
  const std::vector<double> lo = space.lo();
  const std::vector<double> hi = space.hi();

  // Starts: the 8 vertices of an interior 2x2x2 grid at 25% / 75% of each
  // transformed range, with the seed (if any, and in bounds) replacing the
  // first vertex.
  std::vector<std::vector<double>> starts;
  std::vector<std::string> kinds;
  for (int corner = 0; corner < spec.n_starts; ++corner) {
    std::vector<double> u(3);
    for (int j = 0; j < 3; ++j) {
      const double frac = ((corner >> j) & 1) ? 0.75 : 0.25;
      u[static_cast<size_t>(j)] =
          lo[static_cast<size_t>(j)] +
          frac * (hi[static_cast<size_t>(j)] - lo[static_cast<size_t>(j)]);
    }
    starts.push_back(u);
    kinds.push_back("grid");
  }
  if (spec.seed) {
    const Point s = *spec.seed;
    const Bounds& b = spec.bounds;
    if (s.delta >= b.delta_min && s.delta <= b.delta_max &&
        s.sigma_q >= b.sigma_min && s.sigma_q <= b.sigma_max &&
        s.t_q >= b.tq_min && s.t_q <= b.tq_max) {
      starts[0] = space.to_u(s);
      kinds[0] = "seeded";
    }
  }

  // Per-start evaluation quotas partition the global budget.
  const int n = static_cast<int>(starts.size());
  std::vector<int> quota(static_cast<size_t>(n), spec.budget / n);
  for (int i = 0; i < spec.budget % n; ++i) ++quota[static_cast<size_t>(i)];

  std::vector<StartResult> results(static_cast<size_t>(n));
  auto run_start = [&](int s) {
    if (quota[static_cast<size_t>(s)] < 1) return;
    StartResult& res = results[static_cast<size_t>(s)];
    auto objective = [&](const std::vector<double>& u) {
      EvalRecord rec;
      rec.start = s;
      rec.point = space.to_point(u);
      double penalty = 0.0;
      for (int j = 0; j < 3; ++j) {
        const double v = u[static_cast<size_t>(j)];
        if (v < lo[static_cast<size_t>(j)]) penalty += lo[static_cast<size_t>(j)] - v;
        if (v > hi[static_cast<size_t>(j)]) penalty += v - hi[static_cast<size_t>(j)];
      }
      const double t_qe = spec.t_f - 2.0 * spec.base.qubit.sigma_qe;
      const double ramp_excess = rec.point.t_q + 2.0 * rec.point.sigma_q - t_qe;
      if (ramp_excess > 0.0) penalty += ramp_excess;
      if (penalty > 0.0) {
        rec.feasible = false;
        rec.error = infeasible_floor + penalty;
      } else {
        try {
          rec.error = evaluate_error(rec.point, spec);
        } catch (const std::exception& ex) {
          rec.feasible = false;
          rec.error = std::numeric_limits<double>::infinity();
          rec.diagnostic = ex.what();
        }
      }
      res.log.push_back(rec);
      return rec.error;
    };

    std::vector<double> steps(3);
    for (int j = 0; j < 3; ++j) {
      const double span = hi[static_cast<size_t>(j)] - lo[static_cast<size_t>(j)];
      double st = 0.2 * span;
      if (starts[static_cast<size_t>(s)][static_cast<size_t>(j)] + st >
          hi[static_cast<size_t>(j)])
        st = -st;
      steps[static_cast<size_t>(j)] = st;
    }
    const NelderMeadResult nm =
        nelder_mead(objective, starts[static_cast<size_t>(s)], steps,
                    quota[static_cast<size_t>(s)], spec.spread_tol);
    res.converged = nm.converged;
  };

  parallel::for_index(n, spec.threads, run_start);

  OptResult out;
  out.start_kinds = kinds;
  out.best_error = std::numeric_limits<double>::infinity();
  int index = 0;
  bool any_feasible = false;
  for (const StartResult& res : results) {
    for (EvalRecord rec : res.log) {
      rec.index = index++;
      if (rec.feasible && rec.error < out.best_error) {
        out.best_error = rec.error;
        out.best = rec.point;
        any_feasible = true;
      }
      out.log.push_back(std::move(rec));
    }
  }
  out.converged =
      std::any_of(results.begin(), results.end(),
                  [](const StartResult& r) { return r.converged; });
  if (!any_feasible) {
    std::ostringstream msg;
    msg << "optimize: all " << out.log.size() << " evaluations failed;";
    for (const EvalRecord& rec : out.log)
      if (!rec.diagnostic.empty()) {
        msg << " first diagnostic: " << rec.diagnostic;
        break;
      }
    throw std::runtime_error(msg.str());
  }
  return out;
}

std::vector<SweepRow> sweep(const std::string& axis,
                            const std::vector<double>& values, OptSpec spec,
                            int threads) {
  if (axis != "t_f" && axis != "n_bar" && axis != "eta")
    throw std::invalid_argument("sweep: axis must be t_f, n_bar or eta");
  std::vector<SweepRow> rows(values.size());
  spec.threads = 1;  // rows are the parallel unit
  auto run_row = [&](int i) {
    SweepRow& row = rows[static_cast<size_t>(i)];
    row.value = values[static_cast<size_t>(i)];
    OptSpec local = spec;
    if (axis == "t_f") {
      local.t_f = row.value;
    } else if (axis == "n_bar") {
      if (row.value < 0.0) {
        row.failed = true;
        row.message = "negative photon number";
        return;
      }
      local.base.drive.b0 = std::sqrt(row.value) / local.base.drive.tau_b;
    } else {
      local.eta = row.value;
    }
    try {
      row.result = optimize(local);
    } catch (const std::exception& ex) {
      row.failed = true;
      row.message = ex.what();
    }
  };
  parallel::for_index(static_cast<int>(values.size()), threads, run_row);
  return rows;
}

}  // namespace cdr::optimize

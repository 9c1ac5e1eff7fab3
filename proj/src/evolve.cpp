#include "cdr/evolve.hpp"

#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

namespace cdr::evolve {

FieldState reduce_field(const JointState& state, const hilbert::SpaceSpec& space) {
  const int n_max = space.n_max;
  FieldState f;
  f.time = state.time;
  f.rho = Eigen::MatrixXcd::Zero(n_max, n_max);
  for (int q = 0; q < space.n_levels; ++q) {
    const auto block = state.psi.segment(q * n_max, n_max);
    f.rho.noalias() += block * block.adjoint();
  }
  return f;
}

Complex effective_amplitude(const FieldState& f) {
  const int n_max = static_cast<int>(f.rho.rows());
  Complex lam = 0.0;
  for (int n = 1; n < n_max; ++n) lam += std::sqrt(double(n)) * f.rho(n, n - 1);
  // Identity check against the independent Tr(a rho) route.
  const Complex tr_a_rho =
      (hilbert::annihilation(n_max) * f.rho).trace();
  if (std::abs(lam - tr_a_rho) > 1e-12)
    throw std::runtime_error("effective_amplitude: Tr(a rho) identity violated");
  return lam;
}

quadrature::FieldMoments joint_moments(const JointState& state,
                                       const hilbert::SpaceSpec& space) {
  quadrature::FieldMoments m;
  for (int q = 0; q < space.n_levels; ++q) {
    const int base = q * space.n_max;
    for (int n = 0; n < space.n_max; ++n) {
      const Complex c = state.psi(base + n);
      m.n_mean += n * std::norm(c);
      if (n >= 1) m.a_mean += std::conj(state.psi(base + n - 1)) * std::sqrt(double(n)) * c;
      if (n >= 2)
        m.a2_mean += std::conj(state.psi(base + n - 2)) *
                     std::sqrt(double(n) * (n - 1)) * c;
    }
  }
  return m;
}

std::array<double, 3> level_populations(const JointState& state,
                                        const hilbert::SpaceSpec& space) {
  std::array<double, 3> pops{0.0, 0.0, 0.0};
  for (int q = 0; q < space.n_levels; ++q)
    pops[static_cast<size_t>(q)] =
        state.psi.segment(q * space.n_max, space.n_max).squaredNorm();
  return pops;
}

JointState propagate(JointState state, const SystemParams& p,
                     const Observer& observer, long log_every) {
  if (std::abs(state.time) > 1e-12)
    throw std::invalid_argument("propagate: state must start at t = 0");
  if (state.psi.size() != p.dim())
    throw std::invalid_argument("propagate: state dimension mismatch");
  if (std::abs(state.psi.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("propagate: state not normalized");
  const double dt = p.schedule.dt;
  if (dt <= 0.0) throw std::invalid_argument("propagate: dt must be positive");
  const long n_steps = p.schedule.n_steps();
  if (std::abs(n_steps * dt - p.schedule.t_f) > 1e-9)
    throw std::invalid_argument("propagate: t_f / dt is not an integer step count");

  const hilbert::HamiltonianApplier h(p);
  const Complex minus_i(0.0, -1.0);
  const int dim = p.dim();
  Eigen::VectorXcd k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

  if (observer) observer(0, 0.0, state);
  for (long step = 0; step < n_steps; ++step) {
    const double t = step * dt;
    h.apply(t, state.psi, k1);
    k1 *= minus_i;
    tmp = state.psi + (0.5 * dt) * k1;
    h.apply(t + 0.5 * dt, tmp, k2);
    k2 *= minus_i;
    tmp = state.psi + (0.5 * dt) * k2;
    h.apply(t + 0.5 * dt, tmp, k3);
    k3 *= minus_i;
    tmp = state.psi + dt * k3;
    h.apply(t + dt, tmp, k4);
    k4 *= minus_i;
    state.psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    state.time = (step + 1) * dt;

    if ((step + 1) % 2000 == 0 || step + 1 == n_steps) {
      const double drift = std::abs(state.psi.norm() - 1.0);
      if (drift > 1e-6) {
        std::ostringstream msg;
        msg << "propagate: norm drift " << drift << " at t = " << state.time
            << " ns (dt = " << dt << " ns); step size diverges";
        throw std::runtime_error(msg.str());
      }
    }
    if (observer && ((log_every > 0 && (step + 1) % log_every == 0) ||
                     step + 1 == n_steps))
      observer(step + 1, state.time, state);
  }
  return state;
}

BranchLog run_branch(int qubit_init, const SystemParams& p, long log_every) {
  const Complex lam_in = pulse::lambda_in(p.drive);
  JointState init = hilbert::initial_state(qubit_init, lam_in, p);
  BranchLog log;
  long last_step = -1;
  Observer obs = [&](long step, double t, const JointState& s) {
    if (step == last_step) return;
    last_step = step;
    log.times.push_back(t);
    log.fields.push_back(reduce_field(s, p.space).rho);
    log.moments.push_back(joint_moments(s, p.space));
    log.pops.push_back(level_populations(s, p.space));
  };
  log.final_state = propagate(std::move(init), p, obs, log_every);
  return log;
}

BothBranches run_both_branches(const SystemParams& p,
                               const quadrature::DetectionParams& det,
                               const RunOptions& opts) {
  BranchLog log0, log1;
  if (opts.threads >= 2) {
    auto fut = std::async(std::launch::async,
                          [&] { return run_branch(1, p, opts.log_every); });
    log0 = run_branch(0, p, opts.log_every);
    log1 = fut.get();
  } else {
    log0 = run_branch(0, p, opts.log_every);
    log1 = run_branch(1, p, opts.log_every);
  }
  if (log0.times.size() != log1.times.size())
    throw std::runtime_error("run_both_branches: branch logs out of sync");

  BothBranches out;
  out.joint0 = log0.final_state;
  out.joint1 = log1.final_state;
  out.field0 = {log0.fields.back(), log0.times.back()};
  out.field1 = {log1.fields.back(), log1.times.back()};

  out.series.records.reserve(log0.times.size());
  for (size_t i = 0; i < log0.times.size(); ++i) {
    TimeSeriesRecord rec;
    rec.t = log0.times[i];
    rec.lambda0 = log0.moments[i].a_mean;
    rec.lambda1 = log1.moments[i].a_mean;
    const Complex diff = rec.lambda1 - rec.lambda0;
    rec.delta_lambda = std::abs(diff);
    const double phi_auto = rec.delta_lambda > 1e-14 ? std::arg(diff) : 0.0;
    rec.phi = det.phi.value_or(phi_auto);
    rec.squeeze0 = quadrature::squeezing(log0.moments[i], rec.phi);
    rec.squeeze1 = quadrature::squeezing(log1.moments[i], rec.phi);
    rec.pops0 = log0.pops[i];
    rec.pops1 = log1.pops[i];
    rec.n_photon0 = log0.moments[i].n_mean;
    rec.n_photon1 = log1.moments[i].n_mean;
    if (opts.with_error) {
      const quadrature::Grid grid = quadrature::shared_grid(
          {&log0.fields[i], &log1.fields[i]}, rec.phi, det.eta, opts.grid_points);
      const auto p0 = quadrature::distribution(log0.fields[i], rec.phi, det.eta, grid);
      const auto p1 = quadrature::distribution(log1.fields[i], rec.phi, det.eta, grid);
      rec.error = quadrature::error_from_distributions(p0, p1).overlap_error;
    }
    out.series.records.push_back(rec);
  }
  return out;
}

NonQndReport non_qndness_from_states(const SystemParams& p,
                                     const JointState& final0,
                                     const JointState& final1) {
  const Eigen::MatrixXcd basis = hilbert::dressed_basis(p.qubit.delta0, p);
  auto survival = [&](const JointState& s, int level) {
    double prob = 0.0;
    for (int n = 0; n < p.space.n_max; ++n) {
      const Complex amp = basis.col(p.space.index(level, n)).dot(s.psi);
      prob += std::norm(amp);
    }
    return prob;
  };
  NonQndReport report;
  report.branch0 = 1.0 - survival(final0, 0);
  report.branch1 = 1.0 - survival(final1, 1);
  report.value = std::max(report.branch0, report.branch1);
  return report;
}

NonQndReport non_qndness(const SystemParams& p) {
  quadrature::DetectionParams det;
  RunOptions opts;
  opts.with_error = false;
  opts.log_every = 0;
  const BothBranches run = run_both_branches(p, det, opts);
  return non_qndness_from_states(p, run.joint0, run.joint1);
}

}  // namespace cdr::evolve

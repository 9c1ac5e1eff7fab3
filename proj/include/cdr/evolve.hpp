#pragma once

#include <array>
#include <functional>
#include <vector>

#include "cdr/hilbert.hpp"
#include "cdr/quadrature.hpp"

namespace cdr::evolve {

using hilbert::Complex;
using hilbert::JointState;
using hilbert::SystemParams;

/// Reduced resonator density matrix rho_nm at a point in time.
struct FieldState {
  Eigen::MatrixXcd rho;
  double time = 0.0;
};

FieldState reduce_field(const JointState& state, const hilbert::SpaceSpec& space);

/// Sum_n sqrt(n) rho_{n,n-1}; cross-checked against Tr(a rho), which it
/// equals identically.
Complex effective_amplitude(const FieldState& f);

quadrature::FieldMoments joint_moments(const JointState& state,
                                       const hilbert::SpaceSpec& space);

std::array<double, 3> level_populations(const JointState& state,
                                        const hilbert::SpaceSpec& space);

using Observer = std::function<void(long step, double t, const JointState&)>;

/// Fixed-step RK4 propagation of a pure state from t = 0 to t_f. The
/// Hamiltonian is re-evaluated at every substage. The observer (if any) fires
/// at step 0, every log_every steps, and at the final step. Aborts if the
/// norm drifts by more than 1e-6.
JointState propagate(JointState state, const SystemParams& p,
                     const Observer& observer = {}, long log_every = 50);

struct TimeSeriesRecord {
  double t = 0.0;
  Complex lambda0{0.0, 0.0};
  Complex lambda1{0.0, 0.0};
  double delta_lambda = 0.0;
  double phi = 0.0;        // arg(lambda1 - lambda0), 0 when degenerate
  double squeeze0 = 1.0;   // 4 * var(x_phi) for the |0> branch
  double squeeze1 = 1.0;
  double error = 0.5;      // overlap error at this instant (if requested)
  std::array<double, 3> pops0{};
  std::array<double, 3> pops1{};
  double n_photon0 = 0.0;
  double n_photon1 = 0.0;
};

struct TimeSeries {
  std::vector<TimeSeriesRecord> records;
};

/// Per-branch log collected by run_both_branches.
struct BranchLog {
  std::vector<double> times;
  std::vector<Eigen::MatrixXcd> fields;          // reduced rho per record
  std::vector<quadrature::FieldMoments> moments;
  std::vector<std::array<double, 3>> pops;
  JointState final_state;
};

struct RunOptions {
  long log_every = 50;
  bool with_error = true;  // evaluate the instantaneous error per record
  int grid_points = 4096;
  int threads = 2;         // branch-level parallelism (1 or 2)
};

struct BothBranches {
  TimeSeries series;
  FieldState field0, field1;
  JointState joint0, joint1;
};

/// Propagates both initial qubit states over the schedule and assembles the
/// synchronized log; phi(t) = arg(lambda_eff,1 - lambda_eff,0) per record.
BothBranches run_both_branches(const SystemParams& p,
                               const quadrature::DetectionParams& det,
                               const RunOptions& opts = {});

BranchLog run_branch(int qubit_init, const SystemParams& p, long log_every);

struct NonQndReport {
  double branch0 = 0.0;  // probability that dressed |0,.> qubit level is left
  double branch1 = 0.0;
  double value = 0.0;    // 1 - min branch survival
};

/// Survival of the dressed-at-delta0 qubit level for both initial states.
NonQndReport non_qndness(const SystemParams& p);

NonQndReport non_qndness_from_states(const SystemParams& p,
                                     const JointState& final0,
                                     const JointState& final1);

}  // namespace cdr::evolve

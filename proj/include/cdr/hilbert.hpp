#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "cdr/pulse.hpp"

namespace cdr::hilbert {

using Complex = std::complex<double>;

/// Truncated qubit (x) Fock product space. Basis ordering is qubit-major:
/// index(q, n) = q * n_max + n.
struct SpaceSpec {
  int n_levels = 2;        // 2 or 3 qubit levels
  int n_max = 40;          // Fock states |0> .. |n_max-1>
  double tail_tol = 1e-9;  // allowed Poisson weight beyond n_max - n_levels

  int dim() const { return n_levels * n_max; }
  int index(int q, int n) const { return q * n_max + n; }
};

struct SystemParams {
  double g = 0.0;              // qubit-resonator coupling (rad/ns)
  double omega_r = 0.0;        // resonator frequency (rad/ns)
  double anharmonicity = 0.0;  // rad/ns, used only for 3 qubit levels
  pulse::DrivePulse drive;
  pulse::QubitFreqPulse qubit;
  pulse::Schedule schedule;
  SpaceSpec space;

  int dim() const { return space.dim(); }
  double delta(double t) const { return pulse::detuning(t, qubit); }
};

/// Pure joint state on the product space.
struct JointState {
  Eigen::VectorXcd psi;
  double time = 0.0;
};

/// Eigen-decomposition of one excitation block (total excitation = n_exc).
/// Row q of `basis` refers to the bare state |q, n_exc - q>; labels[b] gives
/// the column of `vectors` continuously connected to bare qubit level b.
struct DressedBlock {
  double delta = 0.0;
  int n_exc = 0;
  std::vector<int> qubit_levels;  // bare q spanned by the block, ascending
  Eigen::VectorXd values;         // eigenvalues (rad/ns), same column order
  Eigen::MatrixXcd vectors;       // columns are eigenvectors in block basis
  std::vector<int> labels;        // labels[i] = column index for qubit level i

  double value_for(int qubit_level) const {
    return values(labels.at(static_cast<size_t>(qubit_level)));
  }
};

/// P(N > k) for N ~ Poisson(mean).
double poisson_tail(double mean, int k);

/// Throws unless the Poisson tail of a coherent state with |lambda|^2 = n_bar
/// beyond n_max - n_levels stays below tail_tol.
void check_truncation(double n_bar, const SpaceSpec& space);

/// Annihilation operator on the Fock factor.
Eigen::MatrixXcd annihilation(int n_max);

/// Qubit lowering operator with harmonic-ladder matrix elements
/// (|0><1| + sqrt(2) |1><2| for three levels).
Eigen::MatrixXcd qubit_lowering(int n_levels);

/// Full rotating-frame Hamiltonian at time t (frame rotating at omega_r for
/// both subsystems): qubit detuning diagonal, excitation-conserving coupling,
/// real drive on the resonator. Rejects t outside [0, t_f].
Eigen::MatrixXcd build_hamiltonian(double t, const SystemParams& p);

/// Same operator content with the drive off and the qubit frequency held at
/// omega_r - delta; valid for any detuning (used for dressed-state analysis).
Eigen::MatrixXcd hamiltonian_at_detuning(double delta, const SystemParams& p);

/// Applies H(t) to a state without forming the dense matrix; identical to
/// build_hamiltonian(t, p) * psi.
class HamiltonianApplier {
 public:
  explicit HamiltonianApplier(const SystemParams& p);
  void apply(double t, const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const;

 private:
  pulse::DrivePulse drive_;
  pulse::QubitFreqPulse qubit_;
  double g_ = 0.0;
  double omega_r_ = 0.0;
  double anharmonicity_ = 0.0;
  int n_levels_ = 2;
  int n_max_ = 0;
  double drive_cutoff_ = 0.0;
  std::vector<double> sqrt_n_;   // sqrt(n) for n = 0..n_max
  std::vector<double> ladder_;   // qubit ladder element s_q, s_0 unused
};

/// Eigensystem of the excitation block n_exc >= 1 at fixed detuning, with
/// labels assigned by adiabatic continuation from the reference detuning
/// delta0 (where bare and dressed states are essentially aligned).
DressedBlock dressed_eigensystem(double delta, int n_exc, const SystemParams& p);

/// Bare product basis state |q, n>.
Eigen::VectorXcd bare_state(int q, int n, const SpaceSpec& space);

/// Coherent state on the Fock factor, normalized after truncation.
Eigen::VectorXcd coherent_field(Complex lambda, int n_max);

/// Initial joint state at t = 0: bare |0,0> for qubit_init = 0, or the
/// eigenvector of H(0) (drive off) with maximum overlap on bare |1,0> for
/// qubit_init = 1. `lambda` is the intended catch amplitude; it only enters
/// the truncation check.
JointState initial_state(int qubit_init, Complex lambda, const SystemParams& p);

/// Columns of the dressed basis at fixed detuning (drive off), addressed by
/// column index space.index(q, n) after max-overlap labeling against the bare
/// basis. Throws if the labeling is ambiguous.
Eigen::MatrixXcd dressed_basis(double delta, const SystemParams& p);

}  // namespace cdr::hilbert

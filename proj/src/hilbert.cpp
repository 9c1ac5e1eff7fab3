#include "cdr/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cdr::hilbert {

namespace {

void check_space(const SpaceSpec& s) {
  if (s.n_levels != 2 && s.n_levels != 3)
    throw std::invalid_argument("SpaceSpec: n_levels must be 2 or 3");
  if (s.n_max < 2) throw std::invalid_argument("SpaceSpec: n_max must be >= 2");
}

// Ladder matrix element between qubit levels q-1 and q.
double ladder_element(int q) { return std::sqrt(static_cast<double>(q)); }

// Diagonal qubit energy in the rotating frame for level q at detuning delta.
double qubit_diag(int q, double delta, double anharmonicity) {
  if (q == 0) return 0.0;
  if (q == 1) return -delta;
  return -2.0 * delta - anharmonicity;
}

}  // namespace

double poisson_tail(double mean, int k) {
  if (mean <= 0.0) return 0.0;
  double term = std::exp(-mean);
  double cumulative = term;
  for (int j = 1; j <= k; ++j) {
    term *= mean / j;
    cumulative += term;
  }
  return std::max(0.0, 1.0 - cumulative);
}

void check_truncation(double n_bar, const SpaceSpec& space) {
  check_space(space);
  const int headroom = space.n_max - space.n_levels;
  const double tail = poisson_tail(n_bar, headroom);
  if (tail > space.tail_tol) {
    int needed = space.n_max;
    SpaceSpec probe = space;
    while (needed < 4096) {
      ++needed;
      probe.n_max = needed;
      if (poisson_tail(n_bar, probe.n_max - probe.n_levels) <= probe.tail_tol)
        break;
    }
    std::ostringstream msg;
    msg << "Fock truncation too small: coherent tail beyond n = "
        << headroom << " is " << tail << " > tolerance " << space.tail_tol
        << " for n_bar = " << n_bar << "; need n_max >= " << needed;
    throw std::invalid_argument(msg.str());
  }
}

Eigen::MatrixXcd annihilation(int n_max) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_max, n_max);
  for (int n = 1; n < n_max; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Eigen::MatrixXcd qubit_lowering(int n_levels) {
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n_levels, n_levels);
  for (int q = 1; q < n_levels; ++q) b(q - 1, q) = ladder_element(q);
  return b;
}

static Eigen::MatrixXcd assemble(double delta, double drive_amp,
                                 const SystemParams& p) {
  const SpaceSpec& s = p.space;
  const int d = s.dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
  for (int q = 0; q < s.n_levels; ++q) {
    const double eq = qubit_diag(q, delta, p.anharmonicity);
    for (int n = 0; n < s.n_max; ++n) {
      const int i = s.index(q, n);
      h(i, i) = eq;
      if (n + 1 < s.n_max) {
        h(i, s.index(q, n + 1)) += drive_amp * std::sqrt(double(n + 1));
        h(s.index(q, n + 1), i) += drive_amp * std::sqrt(double(n + 1));
      }
      // g (a b† + b a†): couples |q, n> and |q+1, n-1>
      if (q + 1 < s.n_levels && n >= 1) {
        const double v = p.g * ladder_element(q + 1) * std::sqrt(double(n));
        h(i, s.index(q + 1, n - 1)) += v;
        h(s.index(q + 1, n - 1), i) += v;
      }
    }
  }
  return h;
}

Eigen::MatrixXcd build_hamiltonian(double t, const SystemParams& p) {
  check_space(p.space);
  if (t < -1e-12 || t > p.schedule.t_f + 1e-12) {
    std::ostringstream msg;
    msg << "build_hamiltonian: t = " << t << " outside schedule [0, "
        << p.schedule.t_f << "]";
    throw std::out_of_range(msg.str());
  }
  return assemble(p.delta(t), pulse::drive_envelope(t, p.drive), p);
}

Eigen::MatrixXcd hamiltonian_at_detuning(double delta, const SystemParams& p) {
  check_space(p.space);
  return assemble(delta, 0.0, p);
}

HamiltonianApplier::HamiltonianApplier(const SystemParams& p)
    : drive_(p.drive),
      qubit_(p.qubit),
      g_(p.g),
      omega_r_(p.omega_r),
      anharmonicity_(p.anharmonicity),
      n_levels_(p.space.n_levels),
      n_max_(p.space.n_max),
      drive_cutoff_(p.drive.b0 * 1e-18) {
  check_space(p.space);
  sqrt_n_.resize(static_cast<size_t>(n_max_) + 1);
  for (int n = 0; n <= n_max_; ++n) sqrt_n_[static_cast<size_t>(n)] = std::sqrt(double(n));
  ladder_.resize(static_cast<size_t>(n_levels_));
  for (int q = 1; q < n_levels_; ++q) ladder_[static_cast<size_t>(q)] = ladder_element(q);
}

void HamiltonianApplier::apply(double t, const Eigen::VectorXcd& psi,
                               Eigen::VectorXcd& out) const {
  const double delta = pulse::detuning(t, qubit_);
  const double b = pulse::drive_envelope(t, drive_);
  const bool with_drive = std::abs(b) > drive_cutoff_;
  out.resize(psi.size());
  for (int q = 0; q < n_levels_; ++q) {
    const double eq = qubit_diag(q, delta, anharmonicity_);
    const int base = q * n_max_;
    for (int n = 0; n < n_max_; ++n) {
      const int i = base + n;
      Complex acc = eq * psi(i);
      if (with_drive) {
        if (n >= 1) acc += b * sqrt_n_[static_cast<size_t>(n)] * psi(i - 1);
        if (n + 1 < n_max_) acc += b * sqrt_n_[static_cast<size_t>(n + 1)] * psi(i + 1);
      }
      if (q >= 1 && n + 1 < n_max_)
        acc += g_ * ladder_[static_cast<size_t>(q)] * sqrt_n_[static_cast<size_t>(n + 1)] *
               psi(i - n_max_ + 1);
      if (q + 1 < n_levels_ && n >= 1)
        acc += g_ * ladder_[static_cast<size_t>(q + 1)] * sqrt_n_[static_cast<size_t>(n)] *
               psi(i + n_max_ - 1);
      out(i) = acc;
    }
  }
}

namespace {

// Block Hamiltonian over {|q, n_exc - q>} at fixed detuning, drive off.
Eigen::MatrixXcd block_hamiltonian(double delta, int n_exc,
                                   const SystemParams& p,
                                   const std::vector<int>& levels) {
  const int m = static_cast<int>(levels.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const int q = levels[static_cast<size_t>(i)];
    h(i, i) = qubit_diag(q, delta, p.anharmonicity);
    if (i + 1 < m) {
      const int n = n_exc - q;  // photons in row i
      const double v = p.g * ladder_element(q + 1) * std::sqrt(double(n));
      h(i, i + 1) = v;
      h(i + 1, i) = v;
    }
  }
  return h;
}

struct BlockEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

BlockEigen solve_block(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dressed_eigensystem: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace

DressedBlock dressed_eigensystem(double delta, int n_exc,
                                 const SystemParams& p) {
  check_space(p.space);
  if (n_exc < 1 || n_exc > p.space.n_max - 1)
    throw std::invalid_argument("dressed_eigensystem: n_exc outside truncation");

  std::vector<int> levels;
  for (int q = 0; q < p.space.n_levels && q <= n_exc; ++q)
    if (n_exc - q < p.space.n_max) levels.push_back(q);
  const int m = static_cast<int>(levels.size());

  // Labeling by adiabatic continuation from the reference detuning delta0.
  const double delta_ref = p.qubit.delta0;
  const int n_path = 64;
  Eigen::MatrixXcd prev = Eigen::MatrixXcd::Identity(m, m);  // bare basis
  BlockEigen eig;
  std::vector<int> perm(static_cast<size_t>(m));
  for (int step = 1; step <= n_path; ++step) {
    const double d = delta_ref + (delta - delta_ref) * step / n_path;
    eig = solve_block(block_hamiltonian(d, n_exc, p, levels));
    // Match each previous column to the closest current eigenvector.
    std::vector<bool> used(static_cast<size_t>(m), false);
    for (int i = 0; i < m; ++i) {
      int best = -1;
      double best_ov = -1.0;
      for (int j = 0; j < m; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double ov = std::norm(prev.col(i).dot(eig.vectors.col(j)));
        if (ov > best_ov) {
          best_ov = ov;
          best = j;
        }
      }
      used[static_cast<size_t>(best)] = true;
      perm[static_cast<size_t>(i)] = best;
    }
    Eigen::MatrixXcd cont(m, m);
    for (int i = 0; i < m; ++i) cont.col(i) = eig.vectors.col(perm[static_cast<size_t>(i)]);
    prev = cont;
  }

  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(eig.values(perm[static_cast<size_t>(i)]) - eig.values(perm[static_cast<size_t>(j)])) < 1e-12)
        throw std::runtime_error(
            "dressed_eigensystem: degenerate eigenvalues, labeling undefined");

  DressedBlock block;
  block.delta = delta;
  block.n_exc = n_exc;
  block.qubit_levels = levels;
  block.values = eig.values;
  block.vectors = eig.vectors;
  block.labels.assign(perm.begin(), perm.end());
  return block;
}

Eigen::VectorXcd bare_state(int q, int n, const SpaceSpec& space) {
  check_space(space);
  if (q < 0 || q >= space.n_levels || n < 0 || n >= space.n_max)
    throw std::invalid_argument("bare_state: index outside space");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(space.dim());
  v(space.index(q, n)) = 1.0;
  return v;
}

Eigen::VectorXcd coherent_field(Complex lambda, int n_max) {
  Eigen::VectorXcd v(n_max);
  Complex amp = std::exp(-0.5 * std::norm(lambda));
  v(0) = amp;
  for (int n = 1; n < n_max; ++n) {
    amp *= lambda / std::sqrt(double(n));
    v(n) = amp;
  }
  v.normalize();
  return v;
}

JointState initial_state(int qubit_init, Complex lambda,
                         const SystemParams& p) {
  check_space(p.space);
  if (qubit_init != 0 && qubit_init != 1)
    throw std::invalid_argument("initial_state: qubit_init must be 0 or 1");
  check_truncation(std::norm(lambda), p.space);

  JointState state;
  state.time = 0.0;
  if (qubit_init == 0) {
    state.psi = bare_state(0, 0, p.space);
    return state;
  }

  SystemParams quiet = p;
  quiet.drive.b0 = 0.0;
  const Eigen::MatrixXcd h = build_hamiltonian(0.0, quiet);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("initial_state: eigensolver failed");
  const int target = p.space.index(1, 0);
  int best = 0;
  double best_ov = -1.0;
  for (int j = 0; j < p.dim(); ++j) {
    const double ov = std::norm(solver.eigenvectors()(target, j));
    if (ov > best_ov) {
      best_ov = ov;
      best = j;
    }
  }
  Eigen::VectorXcd v = solver.eigenvectors().col(best);
  // Fix the arbitrary eigenvector phase so the |1,0> component is positive.
  const Complex ref = v(target);
  if (std::abs(ref) > 0) v *= std::conj(ref) / std::abs(ref);
  state.psi = v;
  return state;
}

Eigen::MatrixXcd dressed_basis(double delta, const SystemParams& p) {
  check_space(p.space);
  const Eigen::MatrixXcd h = hamiltonian_at_detuning(delta, p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dressed_basis: eigensolver failed");
  const int d = p.dim();
  Eigen::MatrixXcd out(d, d);
  std::vector<bool> used(static_cast<size_t>(d), false);
  for (int j = 0; j < d; ++j) {
    int arg = 0;
    solver.eigenvectors().col(j).cwiseAbs2().maxCoeff(&arg);
    if (used[static_cast<size_t>(arg)])
      throw std::runtime_error(
          "dressed_basis: ambiguous max-overlap labeling (detuning too small)");
    used[static_cast<size_t>(arg)] = true;
    out.col(arg) = solver.eigenvectors().col(j);
  }
  return out;
}

}  // namespace cdr::hilbert

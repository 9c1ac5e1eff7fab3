#pragma once

#include <complex>
#include <random>

#include "cdr/hilbert.hpp"
#include "cdr/units.hpp"

namespace cdr::testing {

/// Reference operating point: g/2pi = 30 MHz, omega_r/2pi = 7 GHz,
/// omega_q0/2pi = 6 GHz, Delta/2pi = 50 MHz, B0/2pi = 497.4 MHz, tau_b = 1 ns,
/// t_b = 3 ns, sigma_b = sigma_qe = 1 ns, sigma_q = 3 ns, t_q = 3.25 ns,
/// t_qe = 30 ns (t_f = 32 ns).
inline hilbert::SystemParams reference_params() {
  hilbert::SystemParams p;
  p.g = units::mhz_to_rad_ns(30.0);
  p.omega_r = units::ghz_to_rad_ns(7.0);
  p.qubit.omega0 = units::ghz_to_rad_ns(6.0);
  p.qubit.delta0 = p.omega_r - p.qubit.omega0;
  p.qubit.delta = units::mhz_to_rad_ns(50.0);
  p.qubit.t_q = 3.25;
  p.qubit.sigma_q = 3.0;
  p.qubit.t_qe = 30.0;
  p.qubit.sigma_qe = 1.0;
  p.drive.b0 = units::mhz_to_rad_ns(497.4);
  p.drive.t_b = 3.0;
  p.drive.tau_b = 1.0;
  p.drive.sigma_b = 1.0;
  p.drive.omega = p.omega_r;
  p.schedule.t_f = 32.0;
  p.schedule.t_d = 3.5;
  p.schedule.dt = 5e-4;
  p.space.n_levels = 2;
  p.space.n_max = 40;
  p.space.tail_tol = 1e-9;
  return p;
}

/// Drive replaced by a clean n_bar target (b0 = sqrt(n_bar) / tau_b).
inline hilbert::SystemParams reference_params_n_bar(double n_bar) {
  hilbert::SystemParams p = reference_params();
  p.drive.b0 = std::sqrt(n_bar) / p.drive.tau_b;
  return p;
}

/// Random normalized density matrix of the given rank (seeded, reproducible).
inline Eigen::MatrixXcd random_density(int n_max, int rank, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n_max, n_max);
  for (int k = 0; k < rank; ++k) {
    Eigen::VectorXcd v(n_max);
    for (int n = 0; n < n_max; ++n) {
      // Damp high-n amplitudes so the state lives inside the truncation.
      const double scale = std::exp(-0.15 * n);
      v(n) = std::complex<double>(gauss(rng), gauss(rng)) * scale;
    }
    rho += v * v.adjoint();
  }
  rho /= rho.trace().real();
  return rho;
}

}  // namespace cdr::testing

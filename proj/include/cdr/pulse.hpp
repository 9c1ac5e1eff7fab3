#pragma once

#include <complex>

namespace cdr::pulse {

/// Erf-smoothed rectangular drive envelope. The carrier is pinned to the
/// resonator frequency; only the real envelope B(t) enters the rotating-frame
/// Hamiltonian.
struct DrivePulse {
  double b0 = 0.0;       // peak envelope amplitude (rad/ns)
  double t_b = 3.0;      // front-ramp center (ns)
  double tau_b = 1.0;    // plateau length (ns)
  double sigma_b = 1.0;  // ramp standard deviation (ns)
  double omega = 0.0;    // carrier (rad/ns), must equal the resonator frequency
};

/// Erf-smoothed qubit-frequency trajectory: idles at omega0, rises to
/// omega0 + delta0 - delta on the plateau, returns to omega0.
struct QubitFreqPulse {
  double omega0 = 0.0;    // idle qubit frequency (rad/ns)
  double delta0 = 0.0;    // idle detuning omega_r - omega0 (rad/ns)
  double delta = 0.0;     // disperse-stage detuning (rad/ns)
  double t_q = 3.25;      // front-ramp center (ns)
  double t_qe = 30.0;     // rear-ramp center (ns)
  double sigma_q = 3.0;   // front-ramp std-dev (ns)
  double sigma_qe = 1.0;  // rear-ramp std-dev (ns)
};

/// Integration window. t_f = t_qe + 2 sigma_qe, t_d = t_b + tau_b / 2.
struct Schedule {
  double t_f = 32.0;
  double t_d = 3.5;
  double dt = 5e-4;  // ns

  long n_steps() const;
};

double drive_envelope(double t, const DrivePulse& p);

double qubit_freq(double t, const QubitFreqPulse& p);

/// omega_r - omega_q(t), with omega_r recovered as omega0 + delta0.
double detuning(double t, const QubitFreqPulse& p);

/// -i * integral of B(t) dt = -i * b0 * tau_b (closed form).
std::complex<double> lambda_in(const DrivePulse& p);

}  // namespace cdr::pulse

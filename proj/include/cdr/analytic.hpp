#pragma once

#include <complex>
#include <functional>

#include "cdr/evolve.hpp"
#include "cdr/hilbert.hpp"

namespace cdr::analytic {

using Complex = std::complex<double>;

/// Adaptive Simpson quadrature with absolute tolerance (default 1e-10).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10);

/// Dispersive-limit model: field amplitudes rotate by the accumulated phase
/// phi(t) = integral_0^t g^2 / Delta(t') dt'.
struct DispersiveModel {
  double g = 0.0;
  pulse::QubitFreqPulse qubit;
  Complex lambda_in{0.0, 0.0};
  double t_d = 0.0;

  /// |Delta| / (g sqrt(n_bar + 1)) at the plateau detuning; >> 1 required for
  /// validity of the dispersive approximation.
  double validity_ratio() const;
};

struct DispersivePhases {
  Complex lambda0{0.0, 0.0};
  Complex lambda1{0.0, 0.0};
  double phi = 0.0;
  double delta_lambda = 0.0;  // 2 |lambda_in| |sin phi|
};

/// Throws if Delta(t') crosses zero on [0, t].
DispersivePhases dispersive_phases(double t, const DispersiveModel& m);

/// Dressed-state phase phi_{branch,n}(t) accumulated from t_d:
/// integrand [sqrt(Delta^2 + 4 g^2 (n + branch)) - Delta] / 2.
double adiabatic_phase(int n, int branch, double t, const hilbert::SystemParams& p);

/// Effective-amplitude approximation: lambda_in rotated by
/// -+ integral_{t_d}^{t} g^2 / sqrt(Delta^2 + 4 g^2 (|lambda_in|^2 + branch)).
Complex lambda_eff_approx(int branch, double t, const hilbert::SystemParams& p);

struct RateReport {
  double max_rate = 0.0;   // max finite-difference d|delta lambda|/dt
  double ratio_to_g = 0.0;
  bool violation = false;  // ratio above 1.1
};

RateReport separation_rate_bound(const evolve::TimeSeries& series, double g);

/// Crude minimal mean photon number for a target error, assuming the two
/// field states end up separated by sqrt(2) |lambda_in| (the 90-degree
/// dispersed configuration); reproduces the ~7/eta rule of thumb at 1e-4.
double min_photon_estimate(double target_error, double eta);

double erf_inv(double y);

}  // namespace cdr::analytic

#include "cdr/pulse.hpp"

#include <cmath>

namespace cdr::pulse {

namespace {
constexpr double sqrt2 = 1.4142135623730950488;
}

long Schedule::n_steps() const { return std::lround(t_f / dt); }

double drive_envelope(double t, const DrivePulse& p) {
  const double s = sqrt2 * p.sigma_b;
  return 0.5 * p.b0 *
         (std::erf((t - p.t_b) / s) - std::erf((t - p.t_b - p.tau_b) / s));
}

double qubit_freq(double t, const QubitFreqPulse& p) {
  const double rise = std::erf((t - p.t_q) / (sqrt2 * p.sigma_q));
  const double fall = std::erf((t - p.t_qe) / (sqrt2 * p.sigma_qe));
  return p.omega0 + 0.5 * (p.delta0 - p.delta) * (rise - fall);
}

double detuning(double t, const QubitFreqPulse& p) {
  return p.omega0 + p.delta0 - qubit_freq(t, p);
}

std::complex<double> lambda_in(const DrivePulse& p) {
  return {0.0, -p.b0 * p.tau_b};
}

}  // namespace cdr::pulse

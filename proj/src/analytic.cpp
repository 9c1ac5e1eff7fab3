#include "cdr/analytic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cdr::analytic {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa,
                double b, double fb, double m, double fm, double whole,
                double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double err = left + right - whole;
  if (depth <= 0 || std::abs(err) <= 15.0 * tol)
    return left + right + err / 15.0;
  return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  if (a == b) return 0.0;
  // Pre-split so that ramp-localized integrands cannot hide between the
  // initial sample points of the adaptive recursion.
  const int panels = 32;
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * width;
    const double hi = k + 1 == panels ? b : lo + width;
    const double m = 0.5 * (lo + hi);
    const double fa = f(lo), fb = f(hi), fm = f(m);
    const double whole = simpson(lo, fa, hi, fb, fm);
    total += adaptive(f, lo, fa, hi, fb, m, fm, whole, tol / panels, 48);
  }
  return total;
}

double DispersiveModel::validity_ratio() const {
  const double n_bar = std::norm(lambda_in);
  return std::abs(qubit.delta) / (std::abs(g) * std::sqrt(n_bar + 1.0));
}

DispersivePhases dispersive_phases(double t, const DispersiveModel& m) {
  // Guard against Delta(t') crossing zero anywhere on the path.
  const int samples = 257;
  for (int i = 0; i <= samples; ++i) {
    const double tau = t * i / samples;
    if (pulse::detuning(tau, m.qubit) <= 0.0)
      throw std::domain_error("dispersive_phases: Delta(t) crosses zero");
  }
  const double g2 = m.g * m.g;
  const double phi = integrate(
      [&](double tau) { return g2 / pulse::detuning(tau, m.qubit); }, 0.0, t);

  DispersivePhases out;
  out.phi = phi;
  out.lambda0 = m.lambda_in * std::polar(1.0, -phi);
  out.lambda1 = m.lambda_in * std::polar(1.0, phi);
  out.delta_lambda = 2.0 * std::abs(m.lambda_in) * std::abs(std::sin(phi));
  return out;
}

double adiabatic_phase(int n, int branch, double t,
                       const hilbert::SystemParams& p) {
  if (branch != 0 && branch != 1)
    throw std::invalid_argument("adiabatic_phase: branch must be 0 or 1");
  if (n < 0) throw std::invalid_argument("adiabatic_phase: n must be >= 0");
  if (t < p.schedule.t_d) return 0.0;
  const double factor = 4.0 * p.g * p.g * (n + branch);
  return integrate(
      [&](double tau) {
        const double d = p.delta(tau);
        return 0.5 * (std::sqrt(d * d + factor) - d);
      },
      p.schedule.t_d, t);
}

Complex lambda_eff_approx(int branch, double t, const hilbert::SystemParams& p) {
  if (branch != 0 && branch != 1)
    throw std::invalid_argument("lambda_eff_approx: branch must be 0 or 1");
  const Complex lam_in = pulse::lambda_in(p.drive);
  if (t < p.schedule.t_d) return lam_in;
  const double n_eff = std::norm(lam_in) + branch;
  const double g2 = p.g * p.g;
  const double phase = integrate(
      [&](double tau) {
        const double d = p.delta(tau);
        return g2 / std::sqrt(d * d + 4.0 * g2 * n_eff);
      },
      p.schedule.t_d, t);
  const double sign = branch == 0 ? -1.0 : 1.0;
  return lam_in * std::polar(1.0, sign * phase);
}

RateReport separation_rate_bound(const evolve::TimeSeries& series, double g) {
  const auto& recs = series.records;
  if (recs.size() < 3)
    throw std::invalid_argument("separation_rate_bound: need >= 3 records");
  RateReport report;
  for (size_t i = 0; i + 1 < recs.size(); ++i) {
    const double dt = recs[i + 1].t - recs[i].t;
    if (dt <= 0.0) continue;
    const double rate = (recs[i + 1].delta_lambda - recs[i].delta_lambda) / dt;
    report.max_rate = std::max(report.max_rate, rate);
  }
  report.ratio_to_g = std::abs(g) > 0.0
                          ? report.max_rate / std::abs(g)
                          : (report.max_rate > 0.0
                                 ? std::numeric_limits<double>::infinity()
                                 : 0.0);
  report.violation = report.ratio_to_g > 1.1;
  return report;
}

double min_photon_estimate(double target_error, double eta) {
  if (!(target_error > 0.0 && target_error < 0.5))
    throw std::invalid_argument("min_photon_estimate: error must be in (0, 0.5)");
  if (eta <= 0.0 || eta > 1.0)
    throw std::invalid_argument("min_photon_estimate: eta must be in (0, 1]");
  const double z = erf_inv(1.0 - 2.0 * target_error);
  return z * z / eta;
}

double erf_inv(double y) {
  if (y <= -1.0 || y >= 1.0)
    throw std::domain_error("erf_inv: argument must be in (-1, 1)");
  if (y == 0.0) return 0.0;
  // Winitzki-style initial guess, then Newton to full precision.
  const double a = 0.147;
  const double ln1my2 = std::log(1.0 - y * y);
  const double term = 2.0 / (3.14159265358979323846 * a) + 0.5 * ln1my2;
  double x = std::copysign(
      std::sqrt(std::sqrt(term * term - ln1my2 / a) - term), y);
  for (int it = 0; it < 4; ++it) {
    const double err = std::erf(x) - y;
    const double deriv = 2.0 / std::sqrt(3.14159265358979323846) * std::exp(-x * x);
    x -= err / deriv;
  }
  return x;
}

}  // namespace cdr::analytic

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

namespace cdr::quadrature {

using Complex = std::complex<double>;

/// Homodyne detection settings. phi empty means "use the measurement
/// direction arg(lambda_eff,1 - lambda_eff,0)" resolved by the caller.
struct DetectionParams {
  double eta = 1.0;
  std::optional<double> phi;
};

/// Low-order field moments of a resonator density matrix.
struct FieldMoments {
  Complex a_mean{0.0, 0.0};
  Complex a2_mean{0.0, 0.0};
  double n_mean = 0.0;
};

FieldMoments moments_of(const Eigen::MatrixXcd& rho);

/// Uniform x_phi grid, symmetric about zero.
struct Grid {
  double x_min = 0.0;
  double h = 0.0;
  int n = 0;

  double x(int i) const { return x_min + h * i; }
  double x_max() const { return x_min + h * (n - 1); }
};

/// Sampled homodyne distribution P(x_phi) on a grid; eta has already been
/// applied when eta < 1.
struct QuadratureDistribution {
  Grid grid;
  std::vector<double> p;
  double phi = 0.0;
  double eta = 1.0;
};

/// Harmonic-oscillator wave functions psi_0..psi_{n_max-1} at x, normalized
/// for the x = (a e^{-i phi} + a† e^{i phi})/2 quadrature convention:
/// psi_0(x) = (2/pi)^{1/4} exp(-x^2), vacuum variance 1/4. Stable three-term
/// recurrence directly on the functions.
std::vector<double> hermite_functions(double x, int n_max);

/// Grid wide enough for every state in `states` at angle phi with detection
/// efficiency eta: covers at least 8 standard deviations beyond each mean.
Grid shared_grid(const std::vector<const Eigen::MatrixXcd*>& states, double phi,
                 double eta, int n_points);

/// P(x_phi) from the Fock-basis density matrix; convolved with the
/// sqrt(1/eta - 1)/2 Gaussian and renormalized when eta < 1.
QuadratureDistribution distribution(const Eigen::MatrixXcd& rho, double phi,
                                    double eta, const Grid& grid);

struct ErrorReport {
  double overlap_error = 0.0;    // (1/2) integral of min(P0, P1)
  double threshold_error = 0.0;  // best single-threshold error
  double threshold = 0.0;        // threshold location
};

ErrorReport error_from_distributions(const QuadratureDistribution& p0,
                                     const QuadratureDistribution& p1);

/// Closed-form two-coherent-state error (1 - erf(|dl| sqrt(eta/2))) / 2.
double analytic_error(double delta_lambda, double eta);

double squeezing(const FieldMoments& m, double phi);  // 4 * variance(x_phi)

double squeezing(const Eigen::MatrixXcd& rho, double phi);

/// Wigner function W(x, p) for the convention x = (a + a†)/2, normalized so
/// that the integral over dx dp is 1 (vacuum peak 2/pi).
Eigen::MatrixXd wigner(const Eigen::MatrixXcd& rho,
                       const std::vector<double>& xs,
                       const std::vector<double>& ps);

/// Hermiticity / unit-trace / positivity checks shared by the quadrature
/// entry points; throws on violation.
void validate_density_matrix(const Eigen::MatrixXcd& rho, bool check_psd = false);

}  // namespace cdr::quadrature

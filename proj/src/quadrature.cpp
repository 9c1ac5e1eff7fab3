#include "cdr/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cdr::quadrature {

namespace {
constexpr double pi = 3.14159265358979323846;
constexpr double quarter_root_2_over_pi = 0.89324384173800233;  // (2/pi)^(1/4)

double conv_sigma(double eta) { return 0.5 * std::sqrt(1.0 / eta - 1.0); }
}  // namespace

void validate_density_matrix(const Eigen::MatrixXcd& rho, bool check_psd) {
  if (rho.rows() != rho.cols())
    throw std::invalid_argument("density matrix must be square");
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10) {
    std::ostringstream msg;
    msg << "density matrix not Hermitian: max |rho - rho†| = " << herm;
    throw std::invalid_argument(msg.str());
  }
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "density matrix trace = " << tr << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
  for (int n = 0; n < rho.rows(); ++n)
    if (rho(n, n).real() < -1e-10)
      throw std::invalid_argument("density matrix has negative population");
  if (check_psd) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho);
    if (solver.eigenvalues().minCoeff() < -1e-8)
      throw std::invalid_argument("density matrix not positive semidefinite");
  }
}

FieldMoments moments_of(const Eigen::MatrixXcd& rho) {
  const int n_max = static_cast<int>(rho.rows());
  FieldMoments m;
  for (int n = 0; n < n_max; ++n) {
    m.n_mean += n * rho(n, n).real();
    if (n >= 1) m.a_mean += std::sqrt(double(n)) * rho(n, n - 1);
    if (n >= 2) m.a2_mean += std::sqrt(double(n) * (n - 1)) * rho(n, n - 2);
  }
  return m;
}

std::vector<double> hermite_functions(double x, int n_max) {
  if (n_max < 1) throw std::invalid_argument("hermite_functions: n_max >= 1");
  std::vector<double> psi(static_cast<size_t>(n_max), 0.0);
  if (x * x > 700.0) return psi;  // underflow guard; all values < 1e-300
  psi[0] = quarter_root_2_over_pi * std::exp(-x * x);
  if (n_max > 1) psi[1] = 2.0 * x * psi[0];
  for (int n = 2; n < n_max; ++n)
    psi[static_cast<size_t>(n)] =
        (2.0 * x * psi[static_cast<size_t>(n - 1)] -
         std::sqrt(double(n - 1)) * psi[static_cast<size_t>(n - 2)]) /
        std::sqrt(double(n));
  return psi;
}

Grid shared_grid(const std::vector<const Eigen::MatrixXcd*>& states, double phi,
                 double eta, int n_points) {
  if (states.empty()) throw std::invalid_argument("shared_grid: no states");
  if (n_points < 16) throw std::invalid_argument("shared_grid: n_points too small");
  const double widen = conv_sigma(eta);
  double half = 3.0;  // never narrower than a wide vacuum window
  for (const auto* rho : states) {
    const FieldMoments m = moments_of(*rho);
    const double mean = std::abs(m.a_mean);  // bound on |Re(<a> e^{-i phi})|
    double var = 0.25 * squeezing(m, phi) + widen * widen;
    var = std::max(var, 0.05);
    half = std::max(half, mean + 8.5 * std::sqrt(var));
  }
  Grid grid;
  grid.n = n_points;
  grid.x_min = -half;
  grid.h = 2.0 * half / (n_points - 1);
  return grid;
}

namespace {

// Ideal P(x) = sum_{nm} psi_n(x) rho_nm psi_m(x) exp(-i(n-m)phi). With the
// phase twist folded into A = diag(e^{-i n phi}) rho diag(e^{i n phi}) the
// contraction against real psi vectors keeps only Re(A); the dropped
// imaginary part is bounded by the Hermiticity residue checked above.
std::vector<double> ideal_distribution(const Eigen::MatrixXcd& rho, double phi,
                                       const Grid& grid) {
  const int n_max = static_cast<int>(rho.rows());
  Eigen::VectorXcd twist(n_max);
  for (int n = 0; n < n_max; ++n)
    twist(n) = std::polar(1.0, -phi * n);
  const Eigen::MatrixXcd a = twist.asDiagonal() * rho * twist.conjugate().asDiagonal();
  const double residue = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (residue > 1e-10)
    throw std::runtime_error("distribution: imaginary residue above 1e-10");
  const Eigen::MatrixXd a_re = a.real();

  std::vector<double> p(static_cast<size_t>(grid.n), 0.0);
  Eigen::VectorXd psi(n_max);
  for (int i = 0; i < grid.n; ++i) {
    const std::vector<double> h = hermite_functions(grid.x(i), n_max);
    for (int n = 0; n < n_max; ++n) psi(n) = h[static_cast<size_t>(n)];
    p[static_cast<size_t>(i)] = psi.dot(a_re * psi);
  }
  return p;
}

double trapezoid_mass(const std::vector<double>& p, double h) {
  double s = 0.0;
  for (size_t i = 0; i + 1 < p.size(); ++i) s += 0.5 * (p[i] + p[i + 1]);
  return s * h;
}

std::vector<double> convolve_gaussian(const std::vector<double>& p, double h,
                                      double sigma) {
  const int half = static_cast<int>(std::ceil(8.0 * sigma / h));
  std::vector<double> kernel(static_cast<size_t>(2 * half + 1));
  double mass = 0.0;
  for (int k = -half; k <= half; ++k) {
    const double v = std::exp(-0.5 * (k * h) * (k * h) / (sigma * sigma));
    kernel[static_cast<size_t>(k + half)] = v;
    mass += v;
  }
  for (double& v : kernel) v /= mass;  // absorbs the 8-sigma truncation loss
  const int n = static_cast<int>(p.size());
  std::vector<double> out(p.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    const int k_lo = std::max(-half, i - (n - 1));
    const int k_hi = std::min(half, i);
    for (int k = k_lo; k <= k_hi; ++k)
      acc += kernel[static_cast<size_t>(k + half)] * p[static_cast<size_t>(i - k)];
    out[static_cast<size_t>(i)] = acc;
  }
  return out;
}

}  // namespace

QuadratureDistribution distribution(const Eigen::MatrixXcd& rho, double phi,
                                    double eta, const Grid& grid) {
  if (eta <= 0.0 || eta > 1.0)
    throw std::invalid_argument("distribution: eta must be in (0, 1]");
  validate_density_matrix(rho);

  QuadratureDistribution dist;
  dist.grid = grid;
  dist.phi = phi;
  dist.eta = eta;
  dist.p = ideal_distribution(rho, phi, grid);

  const double ideal_mass = trapezoid_mass(dist.p, grid.h);
  if (std::abs(ideal_mass - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "distribution: grid coverage violation, mass = " << ideal_mass;
    throw std::runtime_error(msg.str());
  }

  if (eta < 1.0) {
    dist.p = convolve_gaussian(dist.p, grid.h, conv_sigma(eta));
    const double mass = trapezoid_mass(dist.p, grid.h);
    for (double& v : dist.p) v /= mass;
  }

  for (double v : dist.p)
    if (v < -1e-12)
      throw std::runtime_error("distribution: negative probability density");
  return dist;
}

ErrorReport error_from_distributions(const QuadratureDistribution& p0,
                                     const QuadratureDistribution& p1) {
  const Grid& g = p0.grid;
  if (g.n != p1.grid.n || std::abs(g.x_min - p1.grid.x_min) > 1e-12 ||
      std::abs(g.h - p1.grid.h) > 1e-15)
    throw std::invalid_argument("error_from_distributions: grid mismatch");
  if (std::abs(p0.phi - p1.phi) > 1e-12 || std::abs(p0.eta - p1.eta) > 1e-12)
    throw std::invalid_argument("error_from_distributions: phi/eta mismatch");

  ErrorReport report;
  std::vector<double> overlap(static_cast<size_t>(g.n));
  for (int i = 0; i < g.n; ++i)
    overlap[static_cast<size_t>(i)] =
        std::min(p0.p[static_cast<size_t>(i)], p1.p[static_cast<size_t>(i)]);
  report.overlap_error = 0.5 * trapezoid_mass(overlap, g.h);

  // Best single threshold: classify x < c as the lower-mean state. Sweep the
  // cumulative masses once; mean order decides which side counts as error.
  double mean0 = 0.0, mean1 = 0.0;
  for (int i = 0; i < g.n; ++i) {
    mean0 += g.x(i) * p0.p[static_cast<size_t>(i)];
    mean1 += g.x(i) * p1.p[static_cast<size_t>(i)];
  }
  const bool p0_low = mean0 <= mean1;
  const std::vector<double>& lo = p0_low ? p0.p : p1.p;
  const std::vector<double>& hi = p0_low ? p1.p : p0.p;
  double cum_lo = 0.0, cum_hi = 0.0;
  double best = 0.5, best_x = 0.0;
  for (int i = 0; i + 1 < g.n; ++i) {
    cum_lo += 0.5 * (lo[static_cast<size_t>(i)] + lo[static_cast<size_t>(i + 1)]) * g.h;
    cum_hi += 0.5 * (hi[static_cast<size_t>(i)] + hi[static_cast<size_t>(i + 1)]) * g.h;
    const double err = 0.5 * ((1.0 - cum_lo) + cum_hi);
    if (err < best) {
      best = err;
      best_x = g.x(i + 1);
    }
  }
  report.threshold_error = best;
  report.threshold = best_x;
  return report;
}

double analytic_error(double delta_lambda, double eta) {
  if (delta_lambda < 0.0)
    throw std::invalid_argument("analytic_error: |delta lambda| must be >= 0");
  if (eta <= 0.0 || eta > 1.0)
    throw std::invalid_argument("analytic_error: eta must be in (0, 1]");
  return 0.5 * (1.0 - std::erf(delta_lambda * std::sqrt(0.5 * eta)));
}

double squeezing(const FieldMoments& m, double phi) {
  const Complex rot = std::polar(1.0, -2.0 * phi);
  const double var =
      0.25 + 0.5 * m.n_mean - 0.5 * std::norm(m.a_mean) +
      0.5 * ((m.a2_mean - m.a_mean * m.a_mean) * rot).real();
  return 4.0 * var;
}

double squeezing(const Eigen::MatrixXcd& rho, double phi) {
  validate_density_matrix(rho);
  return squeezing(moments_of(rho), phi);
}

Eigen::MatrixXd wigner(const Eigen::MatrixXcd& rho,
                       const std::vector<double>& xs,
                       const std::vector<double>& ps) {
  validate_density_matrix(rho);
  const int n_max = static_cast<int>(rho.rows());

  std::vector<double> lgamma_table(static_cast<size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n)
    lgamma_table[static_cast<size_t>(n)] = std::lgamma(double(n) + 1.0);

  // rho with parity fold: rhoP(n, m) = (-1)^n rho(n, m); W = (2/pi) *
  // sum_nm rhoP(n, m) <m|D(2 alpha)|n>.
  Eigen::MatrixXcd rho_p = rho;
  for (int n = 1; n < n_max; n += 2) rho_p.row(n) *= -1.0;

  Eigen::MatrixXd w(static_cast<Eigen::Index>(xs.size()),
                    static_cast<Eigen::Index>(ps.size()));
  Eigen::MatrixXcd d(n_max, n_max);
  std::vector<double> lag(static_cast<size_t>(n_max));
  for (size_t ix = 0; ix < xs.size(); ++ix) {
    for (size_t ip = 0; ip < ps.size(); ++ip) {
      const Complex beta(2.0 * xs[ix], 2.0 * ps[ip]);
      const double t = std::norm(beta);
      const double ln_abs_beta = (t > 0.0) ? 0.5 * std::log(t) : -745.0;
      const double theta = std::arg(beta);

      // <n+k|D(beta)|n> = sqrt(n!/(n+k)!) beta^k e^{-t/2} L_n^{(k)}(t)
      for (int k = 0; k < n_max; ++k) {
        const double ln_a0 =
            k * ln_abs_beta - 0.5 * lgamma_table[static_cast<size_t>(k)] - 0.5 * t;
        double amp = (ln_a0 < -745.0) ? 0.0 : std::exp(ln_a0);
        const Complex phase = std::polar(1.0, k * theta);
        double l_prev2 = 1.0;                  // L_0^{(k)}
        double l_prev1 = 1.0 + k - t;          // L_1^{(k)}
        for (int n = 0; n + k < n_max; ++n) {
          double l_n;
          if (n == 0)
            l_n = l_prev2;
          else if (n == 1)
            l_n = l_prev1;
          else {
            l_n = ((2.0 * n - 1.0 + k - t) * l_prev1 - (n - 1.0 + k) * l_prev2) / n;
            l_prev2 = l_prev1;
            l_prev1 = l_n;
          }
          if (n >= 1) amp *= std::sqrt(double(n) / double(n + k));
          const Complex val = amp * l_n * phase;
          d(n + k, n) = val;                       // m = n + k
          if (k > 0) {
            // <n|D(beta)|n+k> = (-1)^k conj(val) with beta -> beta simplifies
            // via D(beta)† = D(-beta): <n|D(beta)|n+k> = conj(<n+k|D(-beta)|n>)
            const Complex phase_neg = std::polar(1.0, k * (theta + pi));
            d(n, n + k) = std::conj(amp * l_n * phase_neg);
          }
        }
      }

      Complex acc = 0.0;
      for (int n = 0; n < n_max; ++n)
        for (int m = 0; m < n_max; ++m) acc += rho_p(n, m) * d(m, n);
      w(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(ip)) =
          (2.0 / pi) * acc.real();
    }
  }
  return w;
}

}  // namespace cdr::quadrature

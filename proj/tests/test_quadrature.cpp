#include <doctest.h>

#include <cmath>
#include <complex>
#include <unsupported/Eigen/MatrixFunctions>

#include "cdr/hilbert.hpp"
#include "cdr/quadrature.hpp"
#include "helpers.hpp"

using namespace cdr;
using Complex = std::complex<double>;

namespace {

Eigen::MatrixXcd coherent_density(Complex lambda, int n_max) {
  const Eigen::VectorXcd v = hilbert::coherent_field(lambda, n_max);
  return v * v.adjoint();
}

double trapz(const std::vector<double>& values, double h) {
  double s = 0.0;
  for (size_t i = 0; i + 1 < values.size(); ++i)
    s += 0.5 * (values[i] + values[i + 1]);
  return s * h;
}

// Naive complex double sum, the reference for the production contraction.
double direct_p(const Eigen::MatrixXcd& rho, double phi, double x) {
  const int n_max = static_cast<int>(rho.rows());
  const auto psi = quadrature::hermite_functions(x, n_max);
  Complex acc = 0.0;
  for (int n = 0; n < n_max; ++n)
    for (int m = 0; m < n_max; ++m)
      acc += psi[static_cast<size_t>(n)] * rho(n, m) *
             psi[static_cast<size_t>(m)] * std::polar(1.0, -phi * (n - m));
  return acc.real();
}

}  // namespace

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("hermite functions: normalization, parity, vacuum variance") {
  const int n_max = 40;
  const int grid_n = 4001;
  const double half = 12.0;
  const double h = 2.0 * half / (grid_n - 1);

  std::vector<std::vector<double>> all(static_cast<size_t>(grid_n));
  for (int i = 0; i < grid_n; ++i)
    all[static_cast<size_t>(i)] = quadrature::hermite_functions(-half + i * h, n_max);

  SUBCASE("psi_0(0) = (2/pi)^{1/4}") {
    CHECK(quadrature::hermite_functions(0.0, 1)[0] ==
          doctest::Approx(0.89324384173800233).epsilon(1e-14));
  }
  SUBCASE("unit norm for n <= 39") {
    for (int n = 0; n < n_max; ++n) {
      std::vector<double> sq(static_cast<size_t>(grid_n));
      for (int i = 0; i < grid_n; ++i) {
        const double v = all[static_cast<size_t>(i)][static_cast<size_t>(n)];
        sq[static_cast<size_t>(i)] = v * v;
      }
      CHECK(trapz(sq, h) == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
  SUBCASE("psi_1 is odd") {
    CHECK(quadrature::hermite_functions(0.0, 2)[1] == 0.0);
  }
  SUBCASE("vacuum variance 1/4") {
    std::vector<double> x2(static_cast<size_t>(grid_n));
    for (int i = 0; i < grid_n; ++i) {
      const double x = -half + i * h;
      const double v = all[static_cast<size_t>(i)][0];
      x2[static_cast<size_t>(i)] = x * x * v * v;
    }
    CHECK(trapz(x2, h) == doctest::Approx(0.25).epsilon(1e-10));
  }
}

TEST_CASE("distribution of vacuum and coherent states is the expected Gaussian") {
  const int n_max = 40;

  SUBCASE("vacuum: mean 0, variance 1/4 at any angle") {
    const Eigen::MatrixXcd rho = coherent_density({0.0, 0.0}, n_max);
    for (double phi : {0.0, 0.7, 2.1}) {
      const auto grid = quadrature::shared_grid({&rho}, phi, 1.0, 2048);
      const auto dist = quadrature::distribution(rho, phi, 1.0, grid);
      double mass = 0.0, mean = 0.0, var = 0.0;
      for (int i = 0; i < grid.n; ++i) {
        mass += dist.p[static_cast<size_t>(i)];
        mean += grid.x(i) * dist.p[static_cast<size_t>(i)];
      }
      mean /= mass;
      for (int i = 0; i < grid.n; ++i)
        var += (grid.x(i) - mean) * (grid.x(i) - mean) *
               dist.p[static_cast<size_t>(i)];
      var /= mass;
      CHECK(std::abs(mean) < 1e-10);
      CHECK(var == doctest::Approx(0.25).epsilon(1e-6));
    }
  }

  SUBCASE("coherent state: mean Re(lambda e^{-i phi}), variance 1/4") {
    const Complex lambda{1.4, -0.9};
    const Eigen::MatrixXcd rho = coherent_density(lambda, n_max);
    for (double phi : {0.0, -1.1, 0.6}) {
      const auto grid = quadrature::shared_grid({&rho}, phi, 1.0, 4096);
      const auto dist = quadrature::distribution(rho, phi, 1.0, grid);
      double mean = 0.0, var = 0.0;
      for (int i = 0; i < grid.n; ++i)
        mean += grid.x(i) * dist.p[static_cast<size_t>(i)] * grid.h;
      for (int i = 0; i < grid.n; ++i)
        var += (grid.x(i) - mean) * (grid.x(i) - mean) *
               dist.p[static_cast<size_t>(i)] * grid.h;
      CHECK(mean ==
            doctest::Approx((lambda * std::polar(1.0, -phi)).real()).epsilon(1e-8));
      CHECK(var == doctest::Approx(0.25).epsilon(1e-6));
    }
  }
}

TEST_CASE("distribution matches the naive double sum on random mixed states") {
  const int n_max = 24;
  const Eigen::MatrixXcd rho = testing::random_density(n_max, 3, 42);
  const double phi = 0.83;
  const auto grid = quadrature::shared_grid({&rho}, phi, 1.0, 512);
  const auto dist = quadrature::distribution(rho, phi, 1.0, grid);
  for (int i = 0; i < grid.n; i += 17)
    CHECK(dist.p[static_cast<size_t>(i)] ==
          doctest::Approx(direct_p(rho, phi, grid.x(i)))
              .epsilon(1e-10)
              .scale(1.0));
}

TEST_CASE("distribution moments agree with the operator moments") {
  for (unsigned seed : {7u, 8u, 9u}) {
    const Eigen::MatrixXcd rho = testing::random_density(28, 2, seed);
    const auto m = quadrature::moments_of(rho);
    for (double phi : {0.0, 1.3}) {
      const auto grid = quadrature::shared_grid({&rho}, phi, 1.0, 4096);
      const auto dist = quadrature::distribution(rho, phi, 1.0, grid);
      double mean = 0.0, var = 0.0;
      for (int i = 0; i < grid.n; ++i)
        mean += grid.x(i) * dist.p[static_cast<size_t>(i)] * grid.h;
      for (int i = 0; i < grid.n; ++i)
        var += (grid.x(i) - mean) * (grid.x(i) - mean) *
               dist.p[static_cast<size_t>(i)] * grid.h;
      CHECK(mean ==
            doctest::Approx((m.a_mean * std::polar(1.0, -phi)).real())
                .epsilon(1e-8)
                .scale(1.0));
      CHECK(4.0 * var ==
            doctest::Approx(quadrature::squeezing(m, phi)).epsilon(1e-6));
    }
  }
}

TEST_CASE("eta = 1 skips the convolution bitwise") {
  const Eigen::MatrixXcd rho = coherent_density({0.5, 0.5}, 30);
  const auto grid = quadrature::shared_grid({&rho}, 0.3, 1.0, 1024);
  const auto a = quadrature::distribution(rho, 0.3, 1.0, grid);
  const auto b = quadrature::distribution(rho, 0.3, 1.0, grid);
  for (int i = 0; i < grid.n; ++i)
    CHECK(a.p[static_cast<size_t>(i)] == b.p[static_cast<size_t>(i)]);
}

TEST_CASE("error against the closed form for synthetic coherent pairs") {
  // E = (1 - erf(|dl| sqrt(eta/2))) / 2; values frozen from high-precision
  // evaluation.
  struct Case {
    double dl, eta, expected;
  };
  const Case cases[] = {
      {3.0, 1.0, 1.34989803163e-3},
      {3.0, 0.5, 1.69474267623e-2},
  };
  const int n_max = 45;
  for (const Case& c : cases) {
    const Complex l0{0.0, -0.5 * c.dl};
    const Complex l1{0.0, 0.5 * c.dl};
    const Eigen::MatrixXcd rho0 = coherent_density(l0, n_max);
    const Eigen::MatrixXcd rho1 = coherent_density(l1, n_max);
    const double phi = std::arg(l1 - l0);
    const auto grid =
        quadrature::shared_grid({&rho0, &rho1}, phi, c.eta, 4096);
    const auto p0 = quadrature::distribution(rho0, phi, c.eta, grid);
    const auto p1 = quadrature::distribution(rho1, phi, c.eta, grid);
    const auto report = quadrature::error_from_distributions(p0, p1);
    CHECK(report.overlap_error == doctest::Approx(c.expected).epsilon(1e-3));
    CHECK(quadrature::analytic_error(c.dl, c.eta) ==
          doctest::Approx(c.expected).epsilon(1e-9));
    // Unimodal overlap: threshold error equals the overlap error.
    CHECK(report.threshold_error ==
          doctest::Approx(report.overlap_error).epsilon(1e-3));
  }
}

TEST_CASE("analytic error endpoints") {
  CHECK(quadrature::analytic_error(0.0, 1.0) == doctest::Approx(0.5));
  CHECK(quadrature::analytic_error(50.0, 1.0) == doctest::Approx(0.0));
  CHECK(quadrature::analytic_error(0.0, 0.3) == doctest::Approx(0.5));
}

TEST_CASE("identical distributions give error 1/2") {
  const Eigen::MatrixXcd rho = coherent_density({0.2, 0.1}, 25);
  const auto grid = quadrature::shared_grid({&rho}, 0.0, 1.0, 1024);
  const auto p = quadrature::distribution(rho, 0.0, 1.0, grid);
  CHECK(quadrature::error_from_distributions(p, p).overlap_error ==
        doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("convolution monotonicity: lower eta never lowers the error") {
  const Eigen::MatrixXcd rho0 = coherent_density({0.0, -1.0}, 30);
  const Eigen::MatrixXcd rho1 = coherent_density({0.0, 1.0}, 30);
  double previous = 0.0;
  for (double eta : {1.0, 0.8, 0.5, 0.3}) {
    const auto grid = quadrature::shared_grid({&rho0, &rho1}, 1.5708, eta, 4096);
    const auto p0 = quadrature::distribution(rho0, 1.5708, eta, grid);
    const auto p1 = quadrature::distribution(rho1, 1.5708, eta, grid);
    const double e = quadrature::error_from_distributions(p0, p1).overlap_error;
    CHECK(e >= previous);
    previous = e;
  }
}

TEST_CASE("squeezing values") {
  SUBCASE("any coherent state gives 1") {
    for (Complex lambda : {Complex{0.0, 0.0}, Complex{2.0, -1.0}}) {
      const Eigen::MatrixXcd rho = coherent_density(lambda, 45);
      for (double phi : {0.0, 0.9, 2.2})
        CHECK(quadrature::squeezing(rho, phi) ==
              doctest::Approx(1.0).epsilon(1e-8));
    }
  }
  SUBCASE("vacuum is phi-independent") {
    const Eigen::MatrixXcd rho = coherent_density({0.0, 0.0}, 20);
    for (int k = 0; k < 16; ++k)
      CHECK(quadrature::squeezing(rho, 0.3927 * k) ==
            doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("wigner function") {
  SUBCASE("vacuum peak 2/pi and unit mass") {
    const Eigen::MatrixXcd rho = coherent_density({0.0, 0.0}, 30);
    const Eigen::MatrixXd w0 = quadrature::wigner(rho, {0.0}, {0.0});
    CHECK(w0(0, 0) == doctest::Approx(0.63661977236758134).epsilon(1e-10));

    const int n = 81;
    std::vector<double> xs(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      xs[static_cast<size_t>(i)] = -4.0 + 8.0 * i / (n - 1);
    const Eigen::MatrixXd w = quadrature::wigner(rho, xs, xs);
    const double h = xs[1] - xs[0];
    double mass = 0.0;
    for (int i = 0; i + 1 < n; ++i)
      for (int j = 0; j + 1 < n; ++j)
        mass += 0.25 * (w(i, j) + w(i + 1, j) + w(i, j + 1) + w(i + 1, j + 1)) *
                h * h;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
  }

  SUBCASE("coherent state is the displaced vacuum Gaussian") {
    const Complex lambda{1.2, -0.7};
    const Eigen::MatrixXcd rho = coherent_density(lambda, 35);
    const Eigen::MatrixXd peak =
        quadrature::wigner(rho, {lambda.real()}, {lambda.imag()});
    CHECK(peak(0, 0) == doctest::Approx(0.63661977236758134).epsilon(1e-8));
    // W = (2/pi) exp(-2 |alpha - lambda|^2) away from the center.
    const Eigen::MatrixXd off =
        quadrature::wigner(rho, {lambda.real() + 0.5}, {lambda.imag() - 0.3});
    CHECK(off(0, 0) ==
          doctest::Approx(0.63661977236758134 * std::exp(-2.0 * 0.34))
              .epsilon(1e-7));
  }

  SUBCASE("marginal along p reproduces the phi = 0 distribution") {
    const Eigen::MatrixXcd rho = testing::random_density(18, 2, 5);
    const int n = 161;
    std::vector<double> xs(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      xs[static_cast<size_t>(i)] = -6.0 + 12.0 * i / (n - 1);
    const Eigen::MatrixXd w = quadrature::wigner(rho, xs, xs);
    const double h = xs[1] - xs[0];
    quadrature::Grid grid;
    grid.x_min = xs[0];
    grid.h = h;
    grid.n = n;
    const auto dist = quadrature::distribution(rho, 0.0, 1.0, grid);
    for (int i = 0; i < n; i += 8) {
      double marginal = 0.0;
      for (int j = 0; j + 1 < n; ++j)
        marginal += 0.5 * (w(i, j) + w(i, j + 1)) * h;
      CHECK(marginal == doctest::Approx(dist.p[static_cast<size_t>(i)])
                            .epsilon(1e-4)
                            .scale(1.0));
    }
  }

  SUBCASE("wigner matches matrix-exponential displacement on a small space") {
    // Independent route: D(2 alpha) = expm(2 alpha a† - conj(2 alpha) a).
    const int n_small = 24;
    const Eigen::MatrixXcd rho = testing::random_density(8, 2, 11);
    Eigen::MatrixXcd rho_pad = Eigen::MatrixXcd::Zero(n_small, n_small);
    rho_pad.topLeftCorner(8, 8) = rho;
    const Complex alpha{0.45, -0.3};
    const Eigen::MatrixXcd a = hilbert::annihilation(n_small);
    const Eigen::MatrixXcd arg =
        2.0 * alpha * a.adjoint() - std::conj(2.0 * alpha) * a;
    const Eigen::MatrixXcd d = arg.exp();
    Complex acc = 0.0;
    for (int n = 0; n < n_small; ++n)
      for (int m = 0; m < n_small; ++m)
        acc += (n % 2 == 0 ? 1.0 : -1.0) * rho_pad(n, m) * d(m, n);
    const double expected = 2.0 / 3.14159265358979323846 * acc.real();
    const Eigen::MatrixXd w =
        quadrature::wigner(rho_pad, {alpha.real()}, {alpha.imag()});
    CHECK(w(0, 0) == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("grid coverage violations are detected") {
  const Eigen::MatrixXcd rho = coherent_density({3.0, 0.0}, 40);
  quadrature::Grid tiny;
  tiny.x_min = -1.0;
  tiny.h = 2.0 / 255.0;
  tiny.n = 256;
  CHECK_THROWS_AS(quadrature::distribution(rho, 0.0, 1.0, tiny),
                  std::runtime_error);
}

TEST_SUITE_END();

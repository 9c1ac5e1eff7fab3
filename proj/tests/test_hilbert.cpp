#include <doctest.h>

#include <cmath>
#include <random>

#include "cdr/hilbert.hpp"
#include "cdr/units.hpp"
#include "helpers.hpp"

using namespace cdr;
using testing::reference_params;

TEST_SUITE_BEGIN("hilbert");

TEST_CASE("truncation check follows the Poisson tail") {
  hilbert::SpaceSpec space;
  space.n_max = 40;
  space.tail_tol = 1e-9;
  CHECK_NOTHROW(hilbert::check_truncation(9.8, space));
  // n_bar = 15 against n_max = 40 leaves a ~2e-7 tail.
  CHECK_THROWS_AS(hilbert::check_truncation(15.0, space),
                  std::invalid_argument);
  space.n_max = 50;
  CHECK_NOTHROW(hilbert::check_truncation(15.0, space));
}

TEST_CASE("ladder algebra holds away from the truncation edge") {
  const int n_max = 12;
  const Eigen::MatrixXcd a = hilbert::annihilation(n_max);
  const Eigen::MatrixXcd comm = a * a.adjoint() - a.adjoint() * a;
  for (int n = 0; n < n_max - 1; ++n)
    CHECK(std::abs(comm(n, n) - 1.0) < 1e-14);
  for (int n = 0; n < n_max; ++n)
    for (int m = 0; m < n_max; ++m)
      if (n != m) CHECK(std::abs(comm(n, m)) < 1e-14);
}

TEST_CASE("hamiltonian structure") {
  hilbert::SystemParams p = reference_params();
  p.space.n_max = 6;

  SUBCASE("g = 0, B = 0 is diagonal with -Delta on the excited ladder") {
    hilbert::SystemParams quiet = p;
    quiet.g = 0.0;
    quiet.drive.b0 = 0.0;
    const double t = 15.0;
    const Eigen::MatrixXcd h = hilbert::build_hamiltonian(t, quiet);
    const double delta_t = quiet.delta(t);
    for (int i = 0; i < quiet.dim(); ++i)
      for (int j = 0; j < quiet.dim(); ++j) {
        if (i != j)
          CHECK(std::abs(h(i, j)) < 1e-15);
      }
    for (int n = 0; n < quiet.space.n_max; ++n) {
      CHECK(std::abs(h(quiet.space.index(0, n), quiet.space.index(0, n))) <
            1e-15);
      CHECK(std::abs(h(quiet.space.index(1, n), quiet.space.index(1, n)) -
                     (-delta_t)) < 1e-12);
    }
  }

  SUBCASE("single-excitation block couples |0,1> and |1,0> with g") {
    hilbert::SystemParams res = p;
    res.space.n_max = 2;
    res.drive.b0 = 0.0;
    res.qubit.delta = res.qubit.delta0;  // any detuning; check the coupling
    const Eigen::MatrixXcd h = hilbert::build_hamiltonian(0.0, res);
    CHECK(std::abs(h(res.space.index(0, 1), res.space.index(1, 0)) - res.g) <
          1e-15);
    CHECK(std::abs(h(res.space.index(1, 0), res.space.index(0, 1)) - res.g) <
          1e-15);
  }

  SUBCASE("three-level coupling element sqrt(2) g sqrt(n-1)") {
    hilbert::SystemParams three = p;
    three.space.n_levels = 3;
    three.space.n_max = 8;
    three.anharmonicity = units::mhz_to_rad_ns(200.0);
    const Eigen::MatrixXcd h = hilbert::build_hamiltonian(10.0, three);
    for (int n = 2; n < 8; ++n) {
      const auto v = h(three.space.index(2, n - 2), three.space.index(1, n - 1));
      CHECK(std::abs(v - std::sqrt(2.0) * three.g * std::sqrt(double(n - 1))) <
            1e-13);
    }
    // Qubit diagonal for level 2: 2 (omega_q - omega_r) - anharmonicity.
    const double wq = pulse::qubit_freq(10.0, three.qubit);
    const auto d2 = h(three.space.index(2, 0), three.space.index(2, 0));
    CHECK(std::abs(d2 - (2.0 * (wq - three.omega_r) - three.anharmonicity)) <
          1e-12);
  }

  SUBCASE("rejects times outside the schedule") {
    CHECK_THROWS_AS(hilbert::build_hamiltonian(-1.0, p), std::out_of_range);
    CHECK_THROWS_AS(hilbert::build_hamiltonian(p.schedule.t_f + 1.0, p),
                    std::out_of_range);
  }
}

TEST_CASE("hamiltonian is Hermitian at 100 random times") {
  hilbert::SystemParams p = reference_params();
  p.space.n_max = 10;
  p.space.n_levels = 2;
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> times(0.0, p.schedule.t_f);
  for (int k = 0; k < 100; ++k) {
    const Eigen::MatrixXcd h = hilbert::build_hamiltonian(times(rng), p);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("structured apply equals the dense Hamiltonian") {
  for (int levels : {2, 3}) {
    hilbert::SystemParams p = reference_params();
    p.space.n_levels = levels;
    p.space.n_max = 9;
    p.anharmonicity = levels == 3 ? units::mhz_to_rad_ns(200.0) : 0.0;
    const hilbert::HamiltonianApplier applier(p);
    std::mt19937 rng(77 + levels);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> times(0.0, p.schedule.t_f);
    for (int k = 0; k < 25; ++k) {
      Eigen::VectorXcd psi(p.dim());
      for (int i = 0; i < p.dim(); ++i)
        psi(i) = std::complex<double>(gauss(rng), gauss(rng));
      psi.normalize();
      const double t = times(rng);
      Eigen::VectorXcd fast(p.dim());
      applier.apply(t, psi, fast);
      const Eigen::VectorXcd dense = hilbert::build_hamiltonian(t, p) * psi;
      CHECK((fast - dense).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("excitation-block eigenvalues match the closed form") {
  hilbert::SystemParams p = reference_params();
  const double g = p.g;

  SUBCASE("splitting sqrt(Delta^2 + 4 g^2 n) across detunings and n") {
    for (double delta_mhz : {25.0, 100.0, 1000.0}) {
      for (int n : {1, 3, 9, 20}) {
        const double delta = units::mhz_to_rad_ns(delta_mhz);
        const auto block = hilbert::dressed_eigensystem(delta, n, p);
        const double split = block.values.maxCoeff() - block.values.minCoeff();
        const double exact = std::sqrt(delta * delta + 4.0 * g * g * n);
        CHECK(split == doctest::Approx(exact).epsilon(1e-10));
      }
    }
  }

  SUBCASE("reference numbers: Delta/2pi = 1 GHz, n = 9") {
    const auto block =
        hilbert::dressed_eigensystem(units::ghz_to_rad_ns(1.0), 9, p);
    const double split_ghz =
        units::rad_ns_to_ghz(block.values.maxCoeff() - block.values.minCoeff());
    CHECK(split_ghz == doctest::Approx(1.016070863670443).epsilon(1e-10));
  }

  SUBCASE("resonant doublet: splitting 2g, balanced eigenvectors") {
    const auto block = hilbert::dressed_eigensystem(1e-9, 1, p);
    const double split = block.values.maxCoeff() - block.values.minCoeff();
    CHECK(split == doctest::Approx(2.0 * g).epsilon(1e-6));
    for (int col = 0; col < 2; ++col) {
      CHECK(std::abs(block.vectors.col(col).cwiseAbs()(0) -
                     1.0 / std::sqrt(2.0)) < 1e-4);
    }
  }

  SUBCASE("g -> 0 keeps bare states and eigenvalues {0, -Delta}") {
    hilbert::SystemParams weak = p;
    weak.g = 1e-9;
    const double delta = units::mhz_to_rad_ns(200.0);
    const auto block = hilbert::dressed_eigensystem(delta, 4, weak);
    CHECK(block.value_for(0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(block.value_for(1) == doctest::Approx(-delta).epsilon(1e-9));
    CHECK(std::abs(block.vectors.col(block.labels[0])(0)) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("initial states") {
  hilbert::SystemParams p = reference_params();

  SUBCASE("qubit 0 is exactly |0,0>") {
    const auto s = hilbert::initial_state(0, {0.0, -3.0}, p);
    CHECK(std::abs(s.psi(p.space.index(0, 0)) - 1.0) < 1e-15);
    CHECK(s.psi.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("qubit 1 at g -> 0 is exactly |1,0>") {
    hilbert::SystemParams weak = p;
    weak.g = 1e-12;
    const auto s = hilbert::initial_state(1, {0.0, -3.0}, weak);
    CHECK(std::abs(s.psi(p.space.index(1, 0))) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("dressed |1,0> overlap at the idle detuning") {
    // Keep the front ramp away from t = 0 so Delta(0) = Delta0.
    hilbert::SystemParams idle = p;
    idle.qubit.t_q = 10.0;
    idle.qubit.sigma_q = 1.0;
    const auto s = hilbert::initial_state(1, {0.0, -3.0}, idle);
    const double overlap = std::norm(s.psi(p.space.index(1, 0)));
    // Exact 2x2 value cos^2(atan2(2g, Delta0)/2) = 0.99910242273288934.
    CHECK(overlap == doctest::Approx(0.99910242273288934).epsilon(1e-8));
  }

  SUBCASE("truncation-tail violation is rejected") {
    hilbert::SystemParams tight = p;
    tight.space.n_max = 12;
    CHECK_THROWS_AS(hilbert::initial_state(0, {0.0, -3.0}, tight),
                    std::invalid_argument);
  }
}

TEST_CASE("dressed basis labeling at the idle detuning") {
  hilbert::SystemParams p = reference_params();
  p.space.n_max = 15;
  const Eigen::MatrixXcd basis = hilbert::dressed_basis(p.qubit.delta0, p);
  // Columns are orthonormal and dominated by their bare label.
  const Eigen::MatrixXcd gram = basis.adjoint() * basis;
  CHECK((gram - Eigen::MatrixXcd::Identity(p.dim(), p.dim()))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  for (int q = 0; q < p.space.n_levels; ++q)
    for (int n = 0; n < p.space.n_max; ++n) {
      const int i = p.space.index(q, n);
      CHECK(std::norm(basis(i, i)) > 0.9);
    }
}

TEST_SUITE_END();

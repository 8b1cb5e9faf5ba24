#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qdarwin/errors.hpp"
#include "qdarwin/oracle.hpp"
#include "qdarwin/verify.hpp"

using namespace qdarwin;
using linalg::ComplexMatrix;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_SUITE("oracle") {
  TEST_CASE("initial state") {
    const auto psi = oracle::build_initial(0.4, 5);
    CHECK(psi.n_qubits == 6);
    CHECK(psi.amplitudes.size() == 64);
    CHECK(psi.amplitudes.norm() == doctest::Approx(1.0).epsilon(1e-14));

    // theta = 0: system down, so every odd index carries 2^{-N/2}
    const auto down = oracle::build_initial(0.0, 3);
    for (Eigen::Index i = 0; i < 16; ++i) {
      CHECK(std::abs(down.amplitudes(i)) == doctest::Approx((i & 1) ? std::sqrt(0.125) : 0.0));
    }

    const double a = 0.3, b = 1.1;
    const auto overlap =
        oracle::build_initial(a, 4).amplitudes.dot(oracle::build_initial(b, 4).amplitudes);
    CHECK(std::abs(overlap - std::cos(a - b)) < 1e-14);
  }

  TEST_CASE("evolution") {
    const CouplingSet r = sample_couplings({0.5, 0.5}, 5, 2);
    const auto psi = oracle::build_initial(0.9, 5);
    CHECK((oracle::evolve(psi, 0.0, r).amplitudes - psi.amplitudes).norm() < 1e-15);
    CHECK(oracle::evolve(psi, 7.3, r).amplitudes.norm() == doctest::Approx(1.0).epsilon(1e-13));

    // equal couplings: every phase is an integer multiple of J t / sqrt N
    const CouplingSet flat = sample_couplings({0.8, 0.0}, 5, 1);
    const double period = 2 * pi * std::sqrt(5.0) / 0.8;
    const auto back = oracle::evolve(psi, period, flat);
    CHECK((back.amplitudes - psi.amplitudes).norm() < 1e-12);

    // evolution composes
    const auto twice = oracle::evolve(oracle::evolve(psi, 0.6, r), 0.9, r);
    CHECK((twice.amplitudes - oracle::evolve(psi, 1.5, r).amplitudes).norm() < 1e-13);
  }

  TEST_CASE("size cap and dimension checks") {
    CHECK_THROWS_AS(oracle::build_initial(0.3, 13), SizeCapError);
    CHECK_NOTHROW(oracle::build_initial(0.3, 12));
    const CouplingSet r = sample_couplings({0.5, 0.5}, 4, 1);
    CHECK_THROWS_AS(oracle::evolve(oracle::build_initial(0.3, 5), 1.0, r), DimensionError);
    CHECK_THROWS_AS(oracle::oracle_fragment_state(0.3, 1.0, r, 5), DomainError);
    CHECK_THROWS_AS(oracle::collective_pauli('w', 2), DomainError);
    CHECK_THROWS_AS(oracle::oracle_qfi(0.0, 1.0, r, 2), DomainError);
    CHECK_THROWS_AS(oracle::oracle_qfi(pi / 2, 1.0, r, 2), DomainError);
  }

  TEST_CASE("reduced states are valid density matrices") {
    const CouplingSet r = sample_couplings({0.5, 0.5}, 6, 3);
    for (int k = 1; k <= 6; ++k) {
      const ComplexMatrix rho = oracle::oracle_fragment_state(0.7, 1.9, r, k);
      CHECK(rho.rows() == (1 << k));
      CHECK(std::abs(rho.trace() - 1.0) < 1e-13);
      CHECK(linalg::hermiticity_residual(rho) < 1e-14);
      CHECK(linalg::eig_hermitian(rho).eigenvalues.minCoeff() > -1e-12);
    }
    // theta = 0 leaves a single branch, so the fragment is pure
    const ComplexMatrix pure = oracle::oracle_fragment_state(0.0, 1.9, r, 3);
    CHECK(std::abs((pure * pure).trace() - 1.0) < 1e-13);
    // the empty fragment is the 1x1 identity
    const ComplexMatrix none = oracle::oracle_fragment_state(0.7, 1.9, r, 0);
    CHECK(none.rows() == 1);
    CHECK(std::abs(none(0, 0) - 1.0) < 1e-14);
  }

  TEST_CASE("closed-form fragment and system states match the exact statevector") {
    const int sizes[] = {4, 6};
    const auto pts = sweep::oracle_test_matrix(sizes, 4, 50, 21);
    CHECK(pts.size() == 400);
    double worst = 0.0;
    for (const ModelPoint& p : pts) {
      const ComplexMatrix exact =
          oracle::oracle_fragment_state(p.theta, p.time, p.couplings, p.fragment_size);
      worst = std::max(worst, linalg::max_abs(fragment_state(p).rho - exact));
      worst = std::max(worst, linalg::max_abs(system_state(p.theta, p.time, p.couplings) -
                                              oracle::oracle_system_state(p.theta, p.time,
                                                                          p.couplings)));
    }
    CHECK(worst <= 1e-10);
  }

  TEST_CASE("collective Pauli operators") {
    const ComplexMatrix sz = oracle::collective_pauli('z', 3);
    CHECK(sz(0, 0).real() == 3.0);
    CHECK(sz(7, 7).real() == -3.0);
    const ComplexMatrix sx = oracle::collective_pauli('x', 3);
    const ComplexMatrix sy = oracle::collective_pauli('y', 3);
    CHECK(linalg::hermiticity_residual(sy) == 0.0);
    // [S_x, S_y] = 2 i S_z
    const ComplexMatrix comm = sx * sy - sy * sx;
    CHECK(linalg::max_abs(comm - linalg::Complex(0.0, 2.0) * sz) < 1e-14);
  }

  TEST_CASE("oracle moments of S_z vanish on the fragment") {
    const CouplingSet r = sample_couplings({0.5, 0.5}, 5, 8);
    const ComplexMatrix rho = oracle::oracle_fragment_state(0.6, 2.2, r, 3);
    CHECK(std::abs((oracle::collective_pauli('z', 3) * rho).trace()) < 1e-14);
    CHECK_THROWS_AS(oracle::oracle_observable_moments(0.6, 2.2, r, 0, ObservableSpec()),
                    EmptyFragmentError);
  }
}

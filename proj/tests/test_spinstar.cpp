#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "qdarwin/errors.hpp"
#include "qdarwin/linalg.hpp"
#include "qdarwin/oracle.hpp"
#include "qdarwin/spinstar.hpp"

using namespace qdarwin;
using linalg::Complex;
using linalg::ComplexMatrix;

namespace {

constexpr double pi = std::numbers::pi;

// Fixed couplings used for frozen values (computed with an independent NumPy statevector).
CouplingSet fixed6() { return CouplingSet::from_values({0.3, 0.7, -0.2, 0.9, 0.5, 1.1}); }

}  // namespace

TEST_SUITE("spinstar") {
  TEST_CASE("degenerate ensemble gives constant couplings") {
    const CouplingSet c = sample_couplings({0.5, 0.0}, 7, 123);
    for (double v : c.values()) CHECK(v == 0.5);
    CHECK(c.moments().mean == 0.5);
    CHECK(c.moments().second_moment == 0.25);
  }

  TEST_CASE("Gaussian sampling obeys the law of large numbers") {
    const CouplingSet c = sample_couplings({0.5, 0.5}, 100000, 2024);
    const auto& v = c.values();
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= v.size() - 1;
    CHECK(std::abs(mean - 0.5) < 0.01);
    CHECK(std::abs(var - 0.25) < 0.01);
    CHECK(c.moments().mean == 0.5);
    CHECK(c.moments().second_moment == 0.5);
  }

  TEST_CASE("sampling is deterministic per seed") {
    CHECK(sample_couplings({0.5, 0.5}, 50, 9).values() ==
          sample_couplings({0.5, 0.5}, 50, 9).values());
    CHECK(sample_couplings({0.5, 0.5}, 50, 9).values() !=
          sample_couplings({0.5, 0.5}, 50, 10).values());
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  }

  TEST_CASE("coupling set invariants") {
    CHECK_THROWS_AS(CouplingSet({}, {0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(CouplingSet({1.0}, {1.0, 0.5}), DomainError);
    CHECK_THROWS_AS(sample_couplings({0.5, 0.5}, 0, 1), DomainError);
    CHECK_THROWS_AS(ModelPoint::make(0.3, 1.0, fixed6(), 7), DomainError);
    CHECK_THROWS_AS(ModelPoint::make(0.3, -1.0, fixed6(), 2), DomainError);
  }

  TEST_CASE("theta reduction by symmetry") {
    CHECK(reduce_theta(0.3) == 0.3);
    CHECK(reduce_theta(-0.3) == doctest::Approx(0.3));
    CHECK(reduce_theta(pi - 0.3) == doctest::Approx(0.3));
    CHECK(reduce_theta(pi + 0.3) == doctest::Approx(0.3));
    CHECK(reduce_theta(pi / 2) == pi / 2);
    CHECK(sin_2theta(0.0) == 0.0);
    CHECK(sin_2theta(pi / 2) == 0.0);
  }

  TEST_CASE("omega special cases") {
    ComplexMatrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    CHECK(linalg::max_abs(omega(1.7, 0.0, 5, +1) - plus) == 0.0);

    const int n = 9;
    ComplexMatrix quarter(2, 2);
    quarter << 0.5, Complex(0, 0.5), Complex(0, -0.5), 0.5;
    CHECK(linalg::max_abs(omega(1.0, pi * std::sqrt(n) / 4, n, +1) - quarter) < 1e-15);

    for (double j : {-0.4, 0.3, 1.2}) {
      CHECK(linalg::max_abs(ComplexMatrix(omega(j, 0.7, 4, +1).adjoint().transpose()) -
                            omega(j, 0.7, 4, -1)) < 1e-16);
    }
  }

  TEST_CASE("system state special cases") {
    const CouplingSet c = fixed6();
    const double th = 0.4;
    linalg::ComplexVector psi(2);
    psi << Complex(0, std::sin(th)), std::cos(th);  // (up, down) amplitudes
    CHECK(linalg::max_abs(system_state(th, 0.0, c) - psi * psi.adjoint()) < 1e-15);

    ComplexMatrix down(2, 2);
    down << 0, 0, 0, 1;
    for (double t : {0.0, 0.5, 3.0}) CHECK(linalg::max_abs(system_state(0.0, t, c) - down) == 0.0);
  }

  TEST_CASE("system state matches the oracle, frozen values included") {
    const CouplingSet c = fixed6();
    const ComplexMatrix rho = system_state(0.7, 1.3, c);
    CHECK(linalg::max_abs(rho - oracle::oracle_system_state(0.7, 1.3, c)) <= 1e-10);
    CHECK(rho(0, 0).real() == doctest::Approx(0.415016429).epsilon(1e-8));
    CHECK(rho(0, 1).imag() == doctest::Approx(0.0658188905).epsilon(1e-8));
    CHECK(coherence_factor(1.3, c) == doctest::Approx(0.1335814267319667).epsilon(1e-12));

    const CouplingSet r = sample_couplings({0.5, 0.5}, 4, 77);
    CHECK(linalg::max_abs(system_state(0.7, 1.3, r) - oracle::oracle_system_state(0.7, 1.3, r)) <=
          1e-10);
  }

  TEST_CASE("coherence factor") {
    const CouplingSet single({1.0}, {1.0, 1.0});
    CHECK(coherence_factor(0.0, fixed6()) == 1.0);
    // one spin, 2 J t / sqrt(N) = pi
    CHECK(coherence_factor(pi / 2, single) == doctest::Approx(-1.0));
    CHECK_FALSE(decoherence_exponent(pi / 2, single).has_value());

    const CouplingSet r = sample_couplings({0.5, 0.5}, 6, 5);
    const ComplexMatrix exact = oracle::oracle_system_state(0.6, 0.8, r);
    const double s = std::sin(0.6) * std::cos(0.6);
    CHECK(std::abs(exact(0, 1).imag() / s - coherence_factor(0.8, r)) <= 1e-10);
    for (double t : {0.1, 1.0, 4.0, 17.0}) {
      CHECK(std::abs(coherence_factor(t, r)) <= 1.0);
    }
  }

  TEST_CASE("thermodynamic decoherence exponent") {
    CHECK(gamma_thermodynamic(0.0, 0.5) == 0.0);
    CHECK(gamma_thermodynamic(1.0, 0.5) == doctest::Approx(1.0));
    CHECK(gamma_thermodynamic(2.6, 0.8) == doctest::Approx(4.0 * gamma_thermodynamic(1.3, 0.8)));
    CHECK_THROWS_AS(gamma_thermodynamic(1.0, 0.0), DomainError);

    // sigma = 0: Gamma = -N ln cos(2 J t / sqrt N) -> (t / tau_D)^2
    const int n = 10000;
    const CouplingSet flat = sample_couplings({0.5, 0.0}, n, 1);
    const auto gamma = decoherence_exponent(1.0, flat);
    REQUIRE(gamma.has_value());
    CHECK(*gamma >= 0.0);
    CHECK(*gamma == doctest::Approx(-n * std::log(std::cos(2 * 0.5 / std::sqrt(n)))).epsilon(1e-9));
    const double limit = gamma_thermodynamic(1.0, flat.moments().second_moment);
    CHECK(std::abs(*gamma - limit) / limit <= 0.01);
  }

  TEST_CASE("fragment state special cases") {
    const CouplingSet c = fixed6();
    {
      const FragmentState s = fragment_state(ModelPoint::make(0.0, 1.1, c, 3));
      ComplexMatrix product = omega(c[0], 1.1, 6, +1);
      for (int m = 1; m < 3; ++m) product = linalg::kron(product, omega(c[m], 1.1, 6, +1));
      CHECK(linalg::max_abs(s.rho - product) < 1e-15);
      CHECK(std::abs((s.rho * s.rho).trace() - 1.0) < 1e-12);
    }
    {
      const FragmentState s = fragment_state(ModelPoint::make(0.9, 0.0, c, 2));
      CHECK(linalg::max_abs(s.rho - ComplexMatrix::Constant(4, 4, 0.25)) < 1e-15);
      CHECK(linalg::max_abs(s.drho_dtheta) == 0.0);
    }
    CHECK_THROWS_AS(fragment_state(ModelPoint::make(0.5, 1.0, c, 0)), EmptyFragmentError);
  }

  TEST_CASE("fragment state matches the oracle and its invariants") {
    const CouplingSet r = sample_couplings({0.5, 0.5}, 6, 31);
    const ModelPoint p = ModelPoint::make(0.5, 1.1, r, 2);
    const FragmentState s = fragment_state(p);
    CHECK(linalg::max_abs(s.rho - oracle::oracle_fragment_state(0.5, 1.1, r, 2)) <= 1e-10);

    CHECK(linalg::hermiticity_residual(s.rho) <= 1e-10);
    CHECK(std::abs(s.rho.trace() - 1.0) <= 1e-10);
    CHECK(linalg::hermiticity_residual(s.drho_dtheta) <= 1e-10);
    CHECK(std::abs(s.drho_dtheta.trace()) <= 1e-10);
    const auto eig = linalg::eig_hermitian(s.rho);
    CHECK(eig.eigenvalues.minCoeff() >= -1e-10);
    CHECK((eig.eigenvalues.array() > 1e-12).count() <= 2);
    const auto n = eig.eigenvalues.size();
    CHECK(eig.eigenvalues(n - 1) + eig.eigenvalues(n - 2) == doctest::Approx(1.0).epsilon(1e-10));

    // analytic derivative against a central difference
    constexpr double h = 1e-6;
    const ComplexMatrix fd = (fragment_state(ModelPoint::make(0.5 + h, 1.1, r, 2)).rho -
                              fragment_state(ModelPoint::make(0.5 - h, 1.1, r, 2)).rho) /
                             (2 * h);
    CHECK(linalg::max_abs(s.drho_dtheta - fd) <= 1e-8);
  }

  TEST_CASE("overlap c(t)") {
    CHECK(overlap_c(0.0, fixed6(), 4) == 1.0);
    const CouplingSet single({1.0}, {1.0, 1.0});
    CHECK(std::abs(overlap_c(pi / 4, single, 1)) < 1e-15);

    const CouplingSet r = sample_couplings({0.5, 0.5}, 8, 8);
    const auto a = branch_state(0.9, r, 3, +1);
    const auto b = branch_state(0.9, r, 3, -1);
    CHECK(std::abs(a.norm() - 1.0) < 1e-14);
    CHECK(std::abs(std::abs(a.dot(b)) - std::abs(overlap_c(0.9, r, 3))) < 1e-14);
    // |phi_t><phi_t| is the Omega(t) product
    ComplexMatrix product = omega(r[0], 0.9, 8, +1);
    for (int m = 1; m < 3; ++m) product = linalg::kron(product, omega(r[m], 0.9, 8, +1));
    CHECK(linalg::max_abs(a * a.adjoint() - product) < 1e-15);
  }
}

#include "doctest.h"

#include "support/oracles.hpp"
#include "tbscat/pair1d.hpp"

using namespace tbscat;

TEST_CASE("bump potential values") {
  CHECK(potential_eval(0.0) == doctest::Approx(2.0));
  CHECK(potential_eval(0.25) == 0.0);
  CHECK(potential_eval(-0.3) == 0.0);
  for (double x : {0.01, 0.1, 0.2, 0.249}) {
    CHECK(potential_eval(x) == potential_eval(-x));
    CHECK(potential_eval(x) >= 0.0);
  }
  // Smooth contact at the support edge.
  CHECK(potential_eval(0.2499) < 1e-100);
  const PairPotential v = PairPotential::bump();
  CHECK(v(0.1) == potential_eval(0.1));
}

TEST_CASE("free motion") {
  const PairScattering ps = solve_pair(PairPotential::zero(), 2.0);
  CHECK(std::abs(ps.s() - 1.0) < 1e-12);
  CHECK(std::abs(ps.r()) < 1e-12);
  CHECK(std::abs(ps.chi(1.0, 2.0) - std::exp(cplx(0.0, 2.0))) < 1e-12);
  CHECK(std::abs(ps.chi(0.1, 2.0) - std::exp(cplx(0.0, 0.2))) < 1e-10);
}

TEST_CASE("flux conservation and Wronskian") {
  const PairPotential v = PairPotential::bump();
  for (double k : {0.5, 1.0, std::sqrt(2.0), 2.0, 3.7}) {
    const PairScattering ps = solve_pair(v, k);
    CHECK(std::abs(ps.unitarity_defect()) < 1e-8);
    // W = chi conj(chi)' - conj(chi) chi' is constant and equals -2ik|s|^2.
    const cplx expect = -2.0 * kI * k * std::norm(ps.s());
    for (double x : {-0.4, -0.2, -0.05, 0.0, 0.13, 0.24, 0.5}) {
      const auto j = ps.chi_jet(x, k);
      const cplx w = j.value * std::conj(j.derivative) - std::conj(j.value) * j.derivative;
      CHECK(std::abs(w - expect) < 1e-8 * k);
    }
    // Off-diagonal unitarity of the symmetric scattering matrix.
    CHECK(std::abs(std::real(ps.s() * std::conj(ps.r()) + std::conj(ps.s()) * ps.r())) < 1e-8);
  }
}

TEST_CASE("square barrier against closed form") {
  for (auto [height, width, k] : {std::tuple{2.0, 0.5, 1.0}, std::tuple{2.0, 0.5, 2.0}, std::tuple{5.0, 0.3, 0.7},
                                   std::tuple{1.0, 1.0, 0.9}}) {
    const PairScattering ps = solve_pair(PairPotential::square_barrier(height, width), k);
    const auto [s, r] = oracle::square_barrier(height, width, k);
    CHECK(std::abs(ps.s() - s) < 1e-6);
    CHECK(std::abs(ps.r() - r) < 1e-6);
  }
}

TEST_CASE("matching conditions at the support edges") {
  const PairPotential v = PairPotential::bump();
  const double k = 1.3;
  const PairScattering ps = solve_pair(v, k);
  const double w = v.support_halfwidth();
  CHECK(std::abs(ps.chi(w, k) - ps.s() * std::exp(kI * k * w)) < 1e-12);
  CHECK(std::abs(ps.chi(-w, k) - (std::exp(-kI * k * w) + ps.r() * std::exp(kI * k * w))) < 1e-9);
}

TEST_CASE("negative wavenumber extension") {
  const PairScattering ps = solve_pair(PairPotential::bump(), 1.0);
  for (double x : {-0.7, -0.2, 0.0, 0.11, 0.3}) CHECK(std::abs(ps.chi(x, -1.0) - ps.chi(-x, 1.0)) == 0.0);
  CHECK_THROWS_AS(ps.chi(0.0, 1.5), std::invalid_argument);
}

TEST_CASE("interpolated solution satisfies the ODE") {
  const PairPotential v = PairPotential::bump();
  const double k = std::sqrt(2.0);
  const PairScattering ps = solve_pair(v, k);
  const double h = 1e-3;
  for (int i = 1; i <= 50; ++i) {
    const double x = -0.24 + 0.48 * i / 51.0;
    // Fourth-order central stencil: the bump's curvature near its edges makes
    // the second-order truncation error exceed 1e-5 at this h.
    const cplx d2 = (-ps.chi(x + 2 * h, k) + 16.0 * ps.chi(x + h, k) - 30.0 * ps.chi(x, k) +
                     16.0 * ps.chi(x - h, k) - ps.chi(x - 2 * h, k)) /
                    (12.0 * h * h);
    const cplx res = -d2 + (v(x) - k * k) * ps.chi(x, k);
    CHECK(std::abs(res) < 1e-5 * k * k * std::abs(ps.chi(x, k)));
  }
}

TEST_CASE("interpolation error against a refined solve") {
  // Compare the quintic interpolant between nodes with an independent
  // integration started at the evaluation point's neighbourhood: the values at
  // table nodes of a finer tolerance solve agree.
  const PairPotential v = PairPotential::bump();
  const PairScattering a = solve_pair(v, 1.0, 1e-10);
  const PairScattering b = solve_pair(v, 1.0, 1e-12);
  for (int i = 0; i < 200; ++i) {
    const double x = oracle::uniform(-0.25, 0.25);
    CHECK(std::abs(a.chi(x, 1.0) - b.chi(x, 1.0)) < 1e-8 * std::abs(b.chi(x, 1.0)));
  }
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(solve_pair(PairPotential::bump(), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_pair(PairPotential::bump(), 1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(PairPotential::bump(-1.0), std::invalid_argument);
}

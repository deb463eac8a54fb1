#include "doctest.h"

#include <algorithm>

#include "support/oracles.hpp"
#include "tbscat/fresnel.hpp"
#include "tbscat/wavefield.hpp"

using namespace tbscat;

namespace {

KVector control_q() { return from_jacobi(1.0, std::sqrt(3.0), 1); }
KVector oblique_q() { return from_jacobi(std::sqrt(2.0), std::sqrt(2.0), 1); }

FieldParams control_params() {
  FieldParams p;
  p.q = control_q();
  p.r1 = 4.0;
  p.r2 = 10.0;
  return p;
}

FieldParams oblique_params() {
  FieldParams p;
  p.q = oblique_q();
  p.delta_in = deg_to_rad(4.0);
  p.delta_out = deg_to_rad(12.0);
  return p;
}

// Ray angles of the orbit of q under the reflection group, computed directly.
std::vector<double> orbit_angles(const KVector& q) {
  std::vector<double> out;
  for (const auto& g : reflection_group()) out.push_back(g.apply(q).chart().angle());
  return out;
}

double screen_distance(Vec2 x) {
  const ConfigPoint p = ConfigPoint::from_chart(x);
  return std::min({std::abs(p.at(1)), std::abs(p.at(2)), std::abs(p.at(3))});
}

double ray_distance(Vec2 x, const std::vector<double>& rays) {
  double best = 10.0;
  for (double a : rays) best = std::min(best, std::abs(wrap_difference(x.angle() - a)));
  return best;
}

double pair_support(const FieldModel& m) { return m.params().potential.support_halfwidth(); }

}  // namespace

TEST_CASE("smoothstep profile and derivatives") {
  CHECK(smoothstep(0.0) == 0.0);
  CHECK(smoothstep(1.0) == 1.0);
  CHECK(smoothstep(0.5) == doctest::Approx(0.5));
  for (double z : {0.1, 0.37, 0.8}) {
    const double h = 1e-5;
    CHECK(smoothstep_d1(z) == doctest::Approx((smoothstep(z + h) - smoothstep(z - h)) / (2 * h)).epsilon(1e-8));
    CHECK(smoothstep_d2(z) == doctest::Approx((smoothstep_d1(z + h) - smoothstep_d1(z - h)) / (2 * h)).epsilon(1e-7));
  }
  CHECK(smoothstep_d1(0.0) == 0.0);
  CHECK(smoothstep_d1(1.0) == 0.0);
}

TEST_CASE("energy and canonical frame") {
  const FieldModel m(control_params());
  CHECK(m.energy() == doctest::Approx(4.0).epsilon(1e-12));
  const KVector c = m.canonical_q();
  CHECK(c.at(1) < 0.0);
  CHECK(c.at(2) > 0.0);
  CHECK(c.at(3) < 0.0);
  CHECK(m.canonical_map().apply(m.q()) == c);
  const Vec2 x{3.1, -0.7};
  const Vec2 back = m.from_canonical(m.to_canonical(x));
  CHECK(back.x == doctest::Approx(x.x));
  CHECK(back.y == doctest::Approx(x.y));
}

TEST_CASE("channel wave reduces to the plane wave for the free system") {
  const PairScattering free = solve_pair(PairPotential::zero(), 1.0);
  const KVector q = control_q();
  for (const ConfigPoint& x : {ConfigPoint(0.1, 0.3, -0.4), ConfigPoint(2.0, -5.0, 3.0)}) {
    const cplx expect = std::exp(kI * inner(x, q));
    CHECK(std::abs(channel_wave(free, 1, q, x) - expect) < 1e-12);
  }
}

TEST_CASE("channel wave beyond the support has modulus |s|") {
  const KVector q = control_q();
  const PairScattering ps = solve_pair(PairPotential::bump(), std::abs(jacobi(q, 1).normal));
  const ConfigPoint x = ConfigPoint::from_chart({3.0, 1.2});
  CHECK(std::abs(std::abs(channel_wave(ps, 1, q, x)) - std::abs(ps.s())) < 1e-12);
}

TEST_CASE("channel wave solves its separated equation") {
  const KVector q = oblique_q();
  const int frame = 2;
  const PairScattering ps = solve_pair(PairPotential::bump(), std::abs(jacobi(q, frame).normal));
  const double e = inner(q, q);
  auto f = [&](Vec2 p) { return channel_wave(ps, frame, q, ConfigPoint::from_chart(p)); };
  for (int i = 0; i < 40; ++i) {
    const Vec2 p{oracle::uniform(-1.0, 1.0), oracle::uniform(-1.0, 1.0)};
    const double v = ps.potential()(jacobi(ConfigPoint::from_chart(p), frame).normal);
    const cplx res = -oracle::laplacian(f, p, 1e-3) + (v - e) * f(p);
    CHECK(std::abs(res) < 1e-5 * e * std::abs(f(p)));
  }
}

TEST_CASE("ray field is an exact solution away from screens and rays") {
  for (const FieldParams& params : {control_params(), oblique_params()}) {
    const FieldModel m(params);
    const auto rays = orbit_angles(m.q());
    auto f = [&](Vec2 p) { return m.psi_ray(p); };
    int checked = 0;
    while (checked < 60) {
      const Vec2 p = Vec2::polar(oracle::uniform(5.0, 50.0), oracle::uniform(0.0, 2.0 * kPi));
      if (screen_distance(p) < 0.6 || ray_distance(p, rays) < deg_to_rad(5.0)) continue;
      const cplx res = -oracle::laplacian(f, p, 1e-3) + (m.potential_sum(p) - m.energy()) * f(p);
      CHECK(std::abs(res) < 1e-5 * m.energy() * std::abs(f(p)));
      ++checked;
    }
  }
}

TEST_CASE("ray field inside the potential strips") {
  const FieldModel m(control_params());
  auto f = [&](Vec2 p) { return m.psi_ray(p); };
  const double w = pair_support(m);
  // Points on the strips at radius >= r1, away from the rays.
  for (int j = 1; j <= 3; ++j)
    for (int sign : {1, -1})
      for (double t : {6.0, 17.0}) {
        const double along = half_line_angle({j, sign});
        const Vec2 dir = Vec2::polar(1.0, along);
        const Vec2 nrm{-dir.y, dir.x};
        for (double off : {-0.6 * w, 0.1 * w, 0.8 * w}) {
          const Vec2 p = t * dir + off * nrm;
          const cplx res = -oracle::laplacian(f, p, 1e-3) + (m.potential_sum(p) - m.energy()) * f(p);
          CHECK(std::abs(res) < 1e-5 * m.energy() * std::max(std::abs(f(p)), 0.1));
        }
      }
}

TEST_CASE("continuity across smooth rays and jumps across anomalous rays") {
  for (const FieldParams& params : {control_params(), oblique_params()}) {
    const FieldModel m(params);
    const SectorFan& fan = m.fan();
    for (int i = 0; i < 6; ++i) {
      const int before = (i + 5) % 6;
      const int after = i;
      const bool anomalous = fan.window23.sector_after == i || fan.window21.sector_after == i;
      for (double r : {10.0, 50.0, 100.0, 200.0}) {
        const Vec2 x = m.from_canonical(Vec2::polar(r, fan.rays[i]));
        const cplx a = m.sector_formula_jet(x, after).value;
        const cplx b = m.sector_formula_jet(x, before).value;
        if (!anomalous) {
          CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(a)));
        }
      }
    }
    for (int w = 0; w < 2; ++w) {
      const auto sides = m.side_amplitudes(w);
      const KVector dir = m.anomalous_direction(w);
      for (double r : {10.0, 50.0, 100.0}) {
        const Vec2 x = r / norm(dir) * dir.chart();
        const cplx jump = m.sector_formula_jet(x, sides[0].sector).value - m.sector_formula_jet(x, sides[1].sector).value;
        const cplx expect = std::exp(kI * inner(ConfigPoint::from_chart(x), dir)) * (sides[0].amplitude - sides[1].amplitude);
        CHECK(std::abs(jump - expect) < 1e-10 * std::max(1.0, std::abs(expect)));
        CHECK(std::abs(expect) > 1e-6);
      }
    }
  }
}

TEST_CASE("anomalous directions follow the caller's component labelling") {
  const FieldModel m(control_params());
  const AnomalousRays r = anomalous_rays(m.q());
  const KVector d0 = m.anomalous_direction(0);
  const KVector d1 = m.anomalous_direction(1);
  for (int j = 1; j <= 3; ++j) {
    CHECK(d0.at(j) == doctest::Approx(r.q23.at(j)));
    CHECK(d1.at(j) == doctest::Approx(r.q21.at(j)));
  }
  CHECK(r.q23.at(1) == doctest::Approx(-2.0));
  CHECK(r.q23.at(2) == doctest::Approx(1.0));
  CHECK(r.q23.at(3) == doctest::Approx(1.0));
}

TEST_CASE("corrected field removes the jump on the anomalous ray") {
  for (const FieldParams& params : {control_params(), oblique_params()}) {
    const FieldModel m(params);
    for (int w = 0; w < 2; ++w) {
      const double c = m.window_angles(w).center;
      for (double r : {12.0, 30.0, 80.0}) {
        auto f = [&](double da) { return m.psi_corrected(Vec2::polar(r, c + da)); };
        const double eps = 1e-7;
        const cplx left = 2.0 * f(-eps) - f(-2.0 * eps);
        const cplx right = 2.0 * f(eps) - f(2.0 * eps);
        CHECK(std::abs(left - right) < 1e-10 * std::max(1.0, std::abs(left)));
        // The uncorrected field does jump here.
        CHECK(std::abs(m.psi_ray(Vec2::polar(r, c - eps)) - m.psi_ray(Vec2::polar(r, c + eps))) > 1e-4);
      }
    }
  }
}

TEST_CASE("corrected field equals the ray field at the window edges") {
  const FieldModel m(control_params());
  for (int w = 0; w < 2; ++w) {
    const WindowAngles a = m.window_angles(w);
    for (double ang : {a.outer_lo, a.outer_hi})
      for (double r : {12.0, 40.0}) {
        const Vec2 x = Vec2::polar(r, ang);
        CHECK(std::abs(m.psi_corrected(x) - m.psi_ray(x)) < 1e-12);
      }
  }
}

TEST_CASE("diffraction waves solve the Helmholtz equation") {
  for (const FieldParams& params : {control_params(), oblique_params()}) {
    const FieldModel m(params);
    for (int w = 0; w < 2; ++w) {
      const WindowAngles a = m.window_angles(w);
      for (int side = 0; side < 2; ++side) {
        auto f = [&](Vec2 p) { return m.diffraction_wave(p, w, side); };
        for (int i = 0; i < 20; ++i) {
          const Vec2 p = Vec2::polar(oracle::uniform(10.0, 60.0), oracle::uniform(a.inner_lo, a.inner_hi));
          const cplx res = -oracle::laplacian(f, p, 1e-3) - m.energy() * f(p);
          CHECK(std::abs(res) < 1e-5 * m.energy() * std::abs(f(p)));
        }
      }
    }
  }
}

TEST_CASE("cutoff field support") {
  const FieldModel m(control_params());
  CHECK(m.psi_one(Vec2::polar(2.0, 0.3)) == cplx(0.0));
  CHECK(m.discrepancy(Vec2::polar(3.9, 1.3)) == cplx(0.0));
  const auto rays = orbit_angles(m.q());
  for (int i = 0; i < 50; ++i) {
    const Vec2 p = Vec2::polar(oracle::uniform(10.5, 60.0), oracle::uniform(0.0, 2.0 * kPi));
    bool in_window = false;
    for (int w = 0; w < 2; ++w)
      in_window |= std::abs(wrap_difference(p.angle() - m.window_angles(w).center)) < m.params().delta_out;
    if (in_window) continue;
    CHECK(m.psi_one(p) == m.psi_ray(p));
    if (screen_distance(p) > 0.3) CHECK(m.discrepancy(p) == cplx(0.0));
  }
}

TEST_CASE("closed-form discrepancy matches the finite-difference operator") {
  for (const FieldParams& params : {control_params(), oblique_params()}) {
    const FieldModel m(params);
    auto f = [&](Vec2 p) { return m.psi_one(p); };
    for (int i = 0; i < 80; ++i) {
      Vec2 p;
      if (i % 2 == 0) {
        const WindowAngles a = m.window_angles((i / 2) % 2);
        p = Vec2::polar(oracle::uniform(4.2, 60.0), oracle::uniform(a.outer_lo, a.outer_hi));
      } else {
        p = Vec2::polar(oracle::uniform(4.2, 9.8), oracle::uniform(0.0, 2.0 * kPi));
      }
      const cplx fd = -oracle::laplacian(f, p, 1e-3) + (m.potential_sum(p) - m.energy()) * f(p);
      const cplx q = m.discrepancy(p);
      CHECK(std::abs(q - fd) < 1e-4 * (std::abs(fd) + m.energy() * std::abs(f(p))));
    }
  }
}

TEST_CASE("swap symmetry of the control field") {
  const FieldModel m(control_params());
  for (int i = 0; i < 50; ++i) {
    const Vec2 p = Vec2::polar(oracle::uniform(4.0, 40.0), oracle::uniform(0.0, 2.0 * kPi));
    const ConfigPoint x = ConfigPoint::from_chart(p);
    const ConfigPoint s(x.at(2), x.at(1), x.at(3));
    const cplx a = m.psi_one(p);
    const cplx b = m.psi_one(s.chart());
    CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(a)));
    CHECK(std::abs(m.discrepancy(p) - m.discrepancy(s.chart())) < 1e-9);
  }
}

TEST_CASE("model validation") {
  FieldParams p = control_params();
  p.r1 = 0.3;
  CHECK_THROWS_AS(FieldModel{p}, ConfigInvalid);
  p = control_params();
  p.r2 = 3.0;
  CHECK_THROWS_AS(FieldModel{p}, ConfigInvalid);
  p = control_params();
  p.q = KVector(0.0, 1.0, -1.0);
  CHECK_THROWS_AS(FieldModel{p}, DegenerateFan);
  p = oblique_params();
  p.delta_in = deg_to_rad(8.0);
  p.delta_out = deg_to_rad(16.0);
  CHECK_THROWS_AS(FieldModel{p}, DegenerateFan);
}

#include "tbscat/pair1d.hpp"

#include <algorithm>
#include <array>

namespace tbscat {

double potential_eval(double x) {
  const double z = 4.0 * x;
  if (std::abs(z) >= 1.0) return 0.0;
  return 2.0 * std::exp(1.0 / (z * z - 1.0) + 1.0);
}

PairPotential PairPotential::bump(double amplitude, double halfwidth) {
  if (!(amplitude >= 0.0)) throw std::invalid_argument("pair potential must be non-negative");
  if (!(halfwidth > 0.0)) throw std::invalid_argument("support halfwidth must be positive");
  return {Shape::kBump, amplitude, halfwidth};
}

PairPotential PairPotential::square_barrier(double height, double width) {
  if (!(height >= 0.0)) throw std::invalid_argument("pair potential must be non-negative");
  if (!(width > 0.0)) throw std::invalid_argument("barrier width must be positive");
  return {Shape::kSquareBarrier, height, 0.5 * width};
}

PairPotential PairPotential::zero(double halfwidth) {
  if (!(halfwidth > 0.0)) throw std::invalid_argument("support halfwidth must be positive");
  return {Shape::kZero, 0.0, halfwidth};
}

double PairPotential::operator()(double x) const {
  if (std::abs(x) >= halfwidth_) return 0.0;
  return on_support(x);
}

double PairPotential::on_support(double x) const {
  switch (shape_) {
    case Shape::kZero: return 0.0;
    case Shape::kSquareBarrier: return std::abs(x) <= halfwidth_ ? amplitude_ : 0.0;
    case Shape::kBump: {
      const double z = x / halfwidth_;
      if (std::abs(z) >= 1.0) return 0.0;
      return amplitude_ * std::exp(1.0 / (z * z - 1.0) + 1.0);
    }
  }
  return 0.0;
}

namespace {

using State = std::array<cplx, 2>;  // (chi, chi')

State rhs(const PairPotential& v, double k2, double x, const State& y) {
  return {y[1], (v.on_support(x) - k2) * y[0]};
}

State rk4_step(const PairPotential& v, double k2, double x, const State& y, double h) {
  const State a = rhs(v, k2, x, y);
  const State b = rhs(v, k2, x + 0.5 * h, {y[0] + 0.5 * h * a[0], y[1] + 0.5 * h * a[1]});
  const State c = rhs(v, k2, x + 0.5 * h, {y[0] + 0.5 * h * b[0], y[1] + 0.5 * h * b[1]});
  const State d = rhs(v, k2, x + h, {y[0] + h * c[0], y[1] + h * c[1]});
  return {y[0] + h / 6.0 * (a[0] + 2.0 * b[0] + 2.0 * c[0] + d[0]),
          y[1] + h / 6.0 * (a[1] + 2.0 * b[1] + 2.0 * c[1] + d[1])};
}

// Advances y from x0 to x1 with step-doubling error control.
State integrate_interval(const PairPotential& v, double k2, double x0, double x1, State y, double tol,
                         double& step) {
  const double dir = x1 > x0 ? 1.0 : -1.0;
  double x = x0;
  int guard = 0;
  while (dir * (x1 - x) > 0.0) {
    if (++guard > 1000000) throw IntegrationFailure("pair ODE step size underflow");
    double h = dir * std::min(std::abs(step), std::abs(x1 - x));
    const State full = rk4_step(v, k2, x, y, h);
    const State half = rk4_step(v, k2, x + 0.5 * h, rk4_step(v, k2, x, y, 0.5 * h), 0.5 * h);
    const double scale = std::max(1.0, std::max(std::abs(y[0]), std::abs(y[1])));
    const double err = std::max(std::abs(half[0] - full[0]), std::abs(half[1] - full[1])) / 15.0;
    if (err <= tol * scale) {
      y = {half[0] + (half[0] - full[0]) / 15.0, half[1] + (half[1] - full[1]) / 15.0};
      x = std::abs(x1 - (x + h)) < 1e-15 * std::max(1.0, std::abs(x1)) ? x1 : x + h;
      if (err < 0.01 * tol * scale) step = 2.0 * std::abs(h);
    } else {
      step = 0.5 * std::abs(h);
      if (step < 1e-14) throw IntegrationFailure("pair ODE step size underflow");
    }
  }
  return y;
}

}  // namespace

PairScattering solve_pair(const PairPotential& potential, double k, double tol) {
  if (!(k > 0.0)) throw std::invalid_argument("solve_pair requires k > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_pair requires tol > 0");

  PairScattering ps(potential);
  const double w = potential.support_halfwidth();
  const int n = kPairTableIntervals;
  const double k2 = k * k;
  ps.k_ = k;
  ps.dx_ = 2.0 * w / n;
  ps.chi_.assign(n + 1, cplx{});
  ps.dchi_.assign(n + 1, cplx{});
  ps.d2chi_.assign(n + 1, cplx{});

  // Start from the transmitted wave with unit amplitude at x = +w.
  State y{std::exp(kI * k * w), kI * k * std::exp(kI * k * w)};
  ps.chi_[n] = y[0];
  ps.dchi_[n] = y[1];
  double step = ps.dx_;
  for (int i = n - 1; i >= 0; --i) {
    y = integrate_interval(potential, k2, ps.table_x(i + 1), ps.table_x(i), y, tol, step);
    ps.chi_[i] = y[0];
    ps.dchi_[i] = y[1];
  }

  // Match y at x = -w to A e^{ikx} + B e^{-ikx}.
  const cplx e = std::exp(kI * k * w);
  const cplx a = 0.5 * e * (y[0] + y[1] / (kI * k));
  const cplx b = 0.5 / e * (y[0] - y[1] / (kI * k));
  if (std::abs(a) < 1e-14) throw IntegrationFailure("incident amplitude vanished in pair solve");
  ps.s_ = 1.0 / a;
  ps.r_ = b / a;
  for (int i = 0; i <= n; ++i) {
    ps.chi_[i] /= a;
    ps.dchi_[i] /= a;
    ps.d2chi_[i] = (potential.on_support(ps.table_x(i)) - k2) * ps.chi_[i];
  }
  return ps;
}

PairScattering::Jet PairScattering::positive_jet(double x) const {
  const double w = support_halfwidth();
  if (x >= w) {
    const cplx e = s_ * std::exp(kI * k_ * x);
    return {e, kI * k_ * e};
  }
  if (x <= -w) {
    const cplx in = std::exp(kI * k_ * x);
    const cplx out = r_ * std::exp(-kI * k_ * x);
    return {in + out, kI * k_ * (in - out)};
  }
  const std::size_t last = chi_.size() - 2;
  const double u = (x + w) / dx_;
  const std::size_t i = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(u))), last);
  const double t = u - static_cast<double>(i);
  const double h = dx_;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  const double h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  const double h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
  const double h3 = 1.0 - h0;
  const double h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
  const double h5 = 0.5 * (t3 - 2.0 * t4 + t5);
  const double omt = 1.0 - t;
  const double g0 = -30.0 * t2 * omt * omt;
  const double g1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
  const double g2 = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
  const double g3 = -g0;
  const double g4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
  const double g5 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
  const cplx value = chi_[i] * h0 + h * dchi_[i] * h1 + h * h * d2chi_[i] * h2 + chi_[i + 1] * h3 +
                     h * dchi_[i + 1] * h4 + h * h * d2chi_[i + 1] * h5;
  const cplx slope = (chi_[i] * g0 + h * dchi_[i] * g1 + h * h * d2chi_[i] * g2 + chi_[i + 1] * g3 +
                      h * dchi_[i + 1] * g4 + h * h * d2chi_[i + 1] * g5) /
                     h;
  return {value, slope};
}

PairScattering::Jet PairScattering::chi_jet(double x, double k_signed) const {
  if (std::abs(std::abs(k_signed) - k_) > 1e-12 * k_)
    throw std::invalid_argument("chi evaluated at a wavenumber the table was not built for");
  if (k_signed > 0.0) return positive_jet(x);
  const Jet mirrored = positive_jet(-x);
  return {mirrored.value, -mirrored.derivative};
}

}  // namespace tbscat

#pragma once

// One-dimensional pair scattering: transmission/reflection coefficients and
// the scattering solution chi(x, k) of -chi'' + v chi = k^2 chi for an even,
// non-negative, compactly supported pair potential v.

#include <vector>

#include "tbscat/common.hpp"

namespace tbscat {

// The default bump: 2 exp(1/((4x)^2 - 1) + 1) for |x| < 1/4, zero otherwise.
double potential_eval(double x);

class PairPotential {
 public:
  enum class Shape { kBump, kSquareBarrier, kZero };

  // amplitude * exp(1/((x/w)^2 - 1) + 1) on |x| < w.
  static PairPotential bump(double amplitude = 2.0, double halfwidth = 0.25);
  // Constant height on |x| < width/2.
  static PairPotential square_barrier(double height, double width);
  // Identically zero; keeps a nominal support so chi is still tabulated.
  static PairPotential zero(double halfwidth = 0.25);

  double operator()(double x) const;
  // Value used by the ODE integrator on the closed support [-w, w]; differs
  // from operator() only at the edges of a discontinuous profile.
  double on_support(double x) const;

  double support_halfwidth() const { return halfwidth_; }
  double amplitude() const { return amplitude_; }
  Shape shape() const { return shape_; }
  bool is_zero() const { return shape_ == Shape::kZero || amplitude_ == 0.0; }

 private:
  PairPotential(Shape shape, double amplitude, double halfwidth)
      : shape_(shape), amplitude_(amplitude), halfwidth_(halfwidth) {}

  Shape shape_;
  double amplitude_;
  double halfwidth_;
};

// Scattering data for one wavenumber k > 0:
//   chi(x, k) = s e^{ikx}                 for x >= w,
//   chi(x, k) = e^{ikx} + r e^{-ikx}      for x <= -w,
// tabulated as (chi, chi', chi'') on a uniform grid over [-w, w] and
// interpolated with quintic Hermite polynomials. Immutable once built.
class PairScattering {
 public:
  struct Jet {
    cplx value;
    cplx derivative;  // d/dx
  };

  double k() const { return k_; }
  cplx s() const { return s_; }
  cplx r() const { return r_; }
  double unitarity_defect() const { return std::norm(s_) + std::norm(r_) - 1.0; }
  const PairPotential& potential() const { return potential_; }
  double support_halfwidth() const { return potential_.support_halfwidth(); }
  std::size_t table_size() const { return chi_.size(); }
  double table_x(std::size_t i) const { return -support_halfwidth() + static_cast<double>(i) * dx_; }

  // chi(x, k_signed); negative k is the even extension chi(x, -k) = chi(-x, k).
  // Requires |k_signed| == k().
  cplx chi(double x, double k_signed) const { return chi_jet(x, k_signed).value; }
  Jet chi_jet(double x, double k_signed) const;

 private:
  friend PairScattering solve_pair(const PairPotential&, double, double);
  explicit PairScattering(PairPotential potential) : potential_(potential) {}

  Jet positive_jet(double x) const;

  PairPotential potential_;
  double k_ = 0.0;
  cplx s_{1.0, 0.0};
  cplx r_{0.0, 0.0};
  double dx_ = 0.0;
  std::vector<cplx> chi_;
  std::vector<cplx> dchi_;
  std::vector<cplx> d2chi_;
};

// Number of uniform table intervals used by solve_pair.
inline constexpr int kPairTableIntervals = 4096;

// Integrates from chi = e^{ikx} at x = +w backward to x = -w with an adaptive
// RK4 (step doubling, local tolerance tol), then rescales so that the
// incident amplitude is one. Throws IntegrationFailure if the incident
// amplitude vanishes.
PairScattering solve_pair(const PairPotential& potential, double k, double tol = 1e-10);

// Convenience wrapper matching chi_eval(ps, x, k_signed).
inline cplx chi_eval(const PairScattering& ps, double x, double k_signed) { return ps.chi(x, k_signed); }

}  // namespace tbscat

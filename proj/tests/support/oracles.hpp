#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "tbscat/common.hpp"

namespace oracle {

using tbscat::cplx;
using tbscat::Vec2;

// Five-point finite-difference Laplacian.
inline cplx laplacian(const std::function<cplx(Vec2)>& f, Vec2 p, double h) {
  const cplx c = f(p);
  return (f({p.x + h, p.y}) + f({p.x - h, p.y}) + f({p.x, p.y + h}) + f({p.x, p.y - h}) - 4.0 * c) / (h * h);
}

// Central difference gradient.
inline std::pair<cplx, cplx> gradient(const std::function<cplx(Vec2)>& f, Vec2 p, double h) {
  return {(f({p.x + h, p.y}) - f({p.x - h, p.y})) / (2.0 * h), (f({p.x, p.y + h}) - f({p.x, p.y - h})) / (2.0 * h)};
}

// Square barrier of the given height on |x| < width/2, unit incident wave from
// the left. Even/odd phase decomposition of the matching problem.
inline std::pair<cplx, cplx> square_barrier(double height, double width, double k) {
  const double half = 0.5 * width;
  const cplx kk = std::sqrt(cplx(k * k - height, 0.0));
  const cplx t = std::tan(kk * half);
  const cplx ct = 1.0 / t;
  const cplx ik(0.0, k);
  const cplx even = -(kk * t - ik) / (kk * t + ik);
  const cplx odd = (kk * ct + ik) / (kk * ct - ik);
  const cplx phase = std::exp(cplx(0.0, -2.0 * k * half));
  return {phase * 0.5 * (even + odd), phase * 0.5 * (even - odd)};
}

// Composite Gauss-Legendre quadrature (8 points per panel) of a complex function.
inline cplx integrate(const std::function<cplx(double)>& f, double a, double b, int panels) {
  static const double xs[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
  static const double ws[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  cplx sum = 0.0;
  const double hp = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * hp;
    for (int i = 0; i < 4; ++i) {
      const double dx = 0.5 * hp * xs[i];
      sum += 0.5 * hp * ws[i] * (f(mid - dx) + f(mid + dx));
    }
  }
  return sum;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240531ULL);
  return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

}  // namespace oracle

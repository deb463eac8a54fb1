#pragma once

// Configuration plane of three one-dimensional particles after removing the
// centre of mass: triples (x1, x2, x3) with zero sum, the reflections that
// exchange two particles, and the six-sector fan generated by a wavevector.

#include <array>
#include <optional>

#include "tbscat/common.hpp"

namespace tbscat {

struct PointTag {};
struct WaveTag {};

// A vector of the plane Gamma stored as its zero-sum coordinate triple.
// Components are addressed 1-based through at(), matching particle labels.
template <class Tag>
class PlaneVector {
 public:
  PlaneVector() = default;
  PlaneVector(double x1, double x2, double x3) : c_{x1, x2, x3} {}

  double at(int particle) const { return c_[particle - 1]; }
  const std::array<double, 3>& components() const { return c_; }
  double sum() const { return c_[0] + c_[1] + c_[2]; }

  // Global chart: frame-1 Jacobi coordinates (X, Y) = (x1, (x2 - x3)/sqrt3).
  Vec2 chart() const { return {c_[0], (c_[1] - c_[2]) / std::numbers::sqrt3}; }
  static PlaneVector from_chart(Vec2 p) {
    const double s = std::numbers::sqrt3 * p.y;
    return {p.x, 0.5 * (-p.x + s), 0.5 * (-p.x - s)};
  }

  friend PlaneVector operator+(const PlaneVector& a, const PlaneVector& b) {
    return {a.c_[0] + b.c_[0], a.c_[1] + b.c_[1], a.c_[2] + b.c_[2]};
  }
  friend PlaneVector operator-(const PlaneVector& a, const PlaneVector& b) {
    return {a.c_[0] - b.c_[0], a.c_[1] - b.c_[1], a.c_[2] - b.c_[2]};
  }
  friend PlaneVector operator*(double s, const PlaneVector& a) {
    return {s * a.c_[0], s * a.c_[1], s * a.c_[2]};
  }
  friend bool operator==(const PlaneVector&, const PlaneVector&) = default;

 private:
  std::array<double, 3> c_{0.0, 0.0, 0.0};
};

using ConfigPoint = PlaneVector<PointTag>;
using KVector = PlaneVector<WaveTag>;

// <a, b> = (2/3)(a1 b1 + a2 b2 + a3 b3).
template <class A, class B>
double inner(const PlaneVector<A>& a, const PlaneVector<B>& b) {
  const auto& x = a.components();
  const auto& y = b.components();
  return (2.0 / 3.0) * (x[0] * y[0] + x[1] * y[1] + x[2] * y[2]);
}

template <class T>
double norm(const PlaneVector<T>& a) {
  return std::sqrt(inner(a, a));
}

// Jacobi coordinates of frame j: the pair coordinate x_j and the
// complementary coordinate y_j = (x_{j+1} - x_{j+2})/sqrt3 (cyclic indices).
struct JacobiPair {
  double normal = 0.0;  // x_j (or k_j for a wavevector)
  double along = 0.0;   // y_j (or p_j)
};

template <class T>
JacobiPair jacobi(const PlaneVector<T>& v, int frame) {
  const int j = frame - 1;
  const auto& c = v.components();
  return {c[j], (c[(j + 1) % 3] - c[(j + 2) % 3]) / std::numbers::sqrt3};
}

// Inverse of jacobi(): the vector whose frame-j coordinates are (normal, along).
template <class T = WaveTag>
PlaneVector<T> from_jacobi(double normal, double along, int frame) {
  const int j = frame - 1;
  std::array<double, 3> c{};
  const double s = std::numbers::sqrt3 * along;
  c[j] = normal;
  c[(j + 1) % 3] = 0.5 * (-normal + s);
  c[(j + 2) % 3] = 0.5 * (-normal - s);
  return {c[0], c[1], c[2]};
}

// Chart rotation taking global (X, Y) to frame-j Jacobi coordinates.
Mat2 frame_rotation(int frame);

// A signed permutation v -> sign * (v[p0], v[p1], v[p2]). The reflections
// tau_j and their products act on Gamma through this representation.
class SignedPermutation {
 public:
  SignedPermutation() = default;
  SignedPermutation(std::array<int, 3> perm, int sign) : perm_(perm), sign_(sign) {}

  static SignedPermutation identity() { return {}; }
  // Reflection in the line l_j: negate and swap the two other components.
  static SignedPermutation tau(int j);
  static SignedPermutation negation() { return {{0, 1, 2}, -1}; }

  template <class T>
  PlaneVector<T> apply(const PlaneVector<T>& v) const {
    const auto& c = v.components();
    return {sign_ * c[perm_[0]], sign_ * c[perm_[1]], sign_ * c[perm_[2]]};
  }

  // (this * other)(v) = this(other(v)).
  SignedPermutation operator*(const SignedPermutation& other) const;
  SignedPermutation inverse() const;
  Mat2 chart_matrix() const;

  const std::array<int, 3>& perm() const { return perm_; }
  int sign() const { return sign_; }
  friend bool operator==(const SignedPermutation&, const SignedPermutation&) = default;

 private:
  std::array<int, 3> perm_{0, 1, 2};
  int sign_ = 1;
};

template <class T>
PlaneVector<T> reflect(const PlaneVector<T>& v, int j) {
  return SignedPermutation::tau(j).apply(v);
}

// The six elements of the reflection group in a fixed order:
// I, tau1, tau2, tau3, tau1 tau2, tau2 tau1.
const std::array<SignedPermutation, 6>& reflection_group();

// All twelve isometries of Gamma that preserve the three-body Hamiltonian
// (particle permutations, optionally composed with x -> -x).
const std::array<SignedPermutation, 12>& symmetry_group();

struct AnomalousRays {
  KVector q23;  // tau2 tau3 q = (q3, q1, q2)
  KVector q21;  // tau2 tau1 q = (q2, q3, q1)
};

AnomalousRays anomalous_rays(const KVector& q);

// K-sector label: the half-line sign * l_screen it contains.
struct SectorLabel {
  int screen = 0;
  int sign = 0;
  friend bool operator==(const SectorLabel&, const SectorLabel&) = default;
};

// Chart angle of the unit vector sign * l_j (x_{j+1} increases along +l_j).
double half_line_angle(SectorLabel label);

struct Sector {
  SectorLabel label;
  double begin = 0.0;  // ray angle, [0, 2 pi)
  double end = 0.0;    // begin + width, may exceed 2 pi
};

// Angular correction window around an anomalous ray:
// outer_lo < inner_lo < center < inner_hi < outer_hi (unwrapped around center).
struct AnomalousWindow {
  double center = 0.0;
  double outer_lo = 0.0;
  double inner_lo = 0.0;
  double inner_hi = 0.0;
  double outer_hi = 0.0;
  int sector_before = -1;  // sector ending at the ray
  int sector_after = -1;   // sector starting at the ray
};

struct SectorFan {
  KVector q;
  std::array<double, 6> rays{};                    // sorted ray angles
  std::array<SignedPermutation, 6> ray_elements{};  // group element generating each ray
  std::array<Sector, 6> sectors{};                  // sector i spans [rays[i], rays[i+1])
  AnomalousWindow window23;
  AnomalousWindow window21;
  double delta_in = 0.0;
  double delta_out = 0.0;

  int sector_with_label(SectorLabel label) const;
};

// Builds the six-ray fan of q. Throws DegenerateFan if rays coincide, a sector
// does not contain exactly one half-line +-l_j, or the windows do not fit
// between neighbouring rays.
SectorFan build_fan(const KVector& q, double delta_in, double delta_out);

struct WindowPosition {
  int which = 0;        // 0 for q23, 1 for q21
  double offset = 0.0;  // signed angle from the window centre, (-pi, pi]
};

struct Classification {
  int sector = 0;
  SectorLabel label;
  double angle = 0.0;
  std::optional<WindowPosition> window;  // set when inside (outer_lo, outer_hi)
};

// Locates the direction of a (nonzero) chart point. Points on a ray belong to
// the counterclockwise sector.
Classification classify(const SectorFan& fan, Vec2 x);

inline Classification classify(const SectorFan& fan, const ConfigPoint& x) {
  return classify(fan, x.chart());
}

}  // namespace tbscat

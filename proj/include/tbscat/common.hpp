#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tbscat {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  if (a >= 2.0 * kPi) a -= 2.0 * kPi;
  return a;
}

// Wraps an angle difference into (-pi, pi].
inline double wrap_difference(double d) {
  d = std::fmod(d, 2.0 * kPi);
  if (d <= -kPi) d += 2.0 * kPi;
  if (d > kPi) d -= 2.0 * kPi;
  return d;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;

  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
  double angle() const { return wrap_angle(std::atan2(y, x)); }
  static Vec2 polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

// Row-major 2x2 matrix acting on chart coordinates.
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 transpose() const { return {a, c, b, d}; }
  double det() const { return a * d - b * c; }
};

// Error hierarchy. The CLI maps ConfigInvalid to exit code 2 and every
// NumericalFailure to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class DegenerateFan : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class IntegrationFailure : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class MeshQuality : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class QuadratureFailure : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class NonConvergence : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class PointOutsideDomain : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

// Number of worker threads used by bulk loops; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs fn(begin, end) over contiguous chunks of [0, n). Chunk boundaries are a
// pure function of n and the thread count, so per-index results are
// deterministic regardless of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace tbscat

#include "tbscat/fresnel.hpp"

namespace tbscat {

namespace {

constexpr double kSeriesLimit = 2.5;

const cplx kEighthTurn = std::exp(cplx(0.0, -kPi / 4.0));  // e^{-i pi/4}

// Power series of integral_0^a e^{i t^2} dt; accurate to ~1e-13 for |a| <= 2.5.
cplx integral_series(double a) {
  const double a2 = a * a;
  cplx term = a;  // i^n a^{2n+1} / n!
  cplx sum = a;
  for (int n = 1; n < 200; ++n) {
    term *= kI * a2 / static_cast<double>(n);
    const cplx add = term / static_cast<double>(2 * n + 1);
    sum += add;
    if (std::abs(add) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Continued fraction z + (1/2)/(z + 1/(z + (3/2)/(z + ...))) evaluated with the
// modified Lentz method, so that erfc(z) = e^{-z^2} / (sqrt(pi) * K(z)), Re z > 0.
cplx erfc_fraction(cplx z) {
  const double tiny = 1e-300;
  cplx f = z;
  cplx c = f;
  cplx d = 0.0;
  for (int n = 1; n < 5000; ++n) {
    const double an = 0.5 * n;
    d = z + an * d;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    c = z + an / c;
    if (std::abs(c) < tiny) c = tiny;
    const cplx delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return f;
  }
  throw NumericalFailure("Fresnel continued fraction did not converge");
}

// 1 - Phi(a) for a > kSeriesLimit, equal to erfc(e^{-i pi/4} a) / 2.
cplx upper_tail(double a) {
  const cplx z = kEighthTurn * a;
  return std::exp(kI * a * a) / (2.0 * std::sqrt(kPi) * erfc_fraction(z));
}

}  // namespace

cplx fresnel_constant() { return kEighthTurn / std::sqrt(kPi); }

cplx fresnel_phi(double a) {
  if (std::abs(a) <= kSeriesLimit) return 0.5 + fresnel_constant() * integral_series(a);
  if (a > 0.0) return 1.0 - upper_tail(a);
  return upper_tail(-a);
}

cplx fresnel_integral(double a) {
  if (std::abs(a) <= kSeriesLimit) return integral_series(a);
  return (fresnel_phi(a) - 0.5) / fresnel_constant();
}

cplx fresnel_phi_derivative(double a) { return fresnel_constant() * std::exp(kI * a * a); }

cplx fresnel_remainder(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("fresnel_remainder requires a > 0");
  const cplx leading = fresnel_constant() * std::exp(kI * a * a) / (2.0 * kI * a);
  if (a <= kSeriesLimit) return fresnel_phi(a) - 1.0 - leading;
  // Phi - 1 = -e^{i a^2} / (2 sqrt(pi) K); combine before subtracting to keep
  // the cancellation of the leading terms exact in form.
  const cplx k = erfc_fraction(kEighthTurn * a);
  return -std::exp(kI * a * a) / (2.0 * std::sqrt(kPi)) * (1.0 / k + kEighthTurn / (kI * a));
}

}  // namespace tbscat

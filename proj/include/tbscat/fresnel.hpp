#pragma once

// Normalized Fresnel function
//   Phi(a) = c * integral_{-inf}^{a} e^{i t^2} dt,   c = e^{-i pi/4} / sqrt(pi),
// a smoothed unit step: Phi(-inf) = 0, Phi(0) = 1/2, Phi(+inf) = 1.

#include "tbscat/common.hpp"

namespace tbscat {

// e^{-i pi/4} / sqrt(pi)
cplx fresnel_constant();

// integral_0^a e^{i t^2} dt
cplx fresnel_integral(double a);

cplx fresnel_phi(double a);

// Phi'(a) = c e^{i a^2}
cplx fresnel_phi_derivative(double a);

// Phi(a) - 1 - c e^{i a^2} / (2 i a), defined for a > 0; O(a^-3) as a -> inf.
cplx fresnel_remainder(double a);

}  // namespace tbscat

#pragma once

// Explicit approximate three-body field: the ray approximation psi_R built
// from products of pair scattering solutions, the diffraction-corrected field
// psi_0 smoothing the two anomalous shadow boundaries with Fresnel functions,
// the radially cut-off field psi_1 = zeta(|x|) psi_0, and the closed-form
// discrepancy Q = (-Laplacian + sum v - E) psi_1.
//
// Internally the model works in a canonical frame: the wavevector is moved by
// a symmetry of the Hamiltonian to components with sign pattern (-, +, -),
// which is the configuration the six sector formulas are written for.
// Evaluators take points in the caller's frame.

#include <array>
#include <span>
#include <vector>

#include "tbscat/geometry.hpp"
#include "tbscat/pair1d.hpp"

namespace tbscat {

// zeta(z) = z^3 (10 - 15 z + 6 z^2) clamped to [0, 1], and its derivatives.
double smoothstep(double z);
double smoothstep_d1(double z);
double smoothstep_d2(double z);

struct FieldParams {
  PairPotential potential = PairPotential::bump();
  KVector q;
  double r1 = 4.0;
  double r2 = 10.0;
  double delta_in = deg_to_rad(8.0);
  double delta_out = deg_to_rad(16.0);
  double pair_tol = 1e-10;
};

// Value and chart gradient of a complex field.
struct FieldJet {
  cplx value;
  cplx dx;
  cplx dy;
};

struct FieldSample {
  double potential = 0.0;  // v(x1) + v(x2) + v(x3)
  cplx psi_ray;
  cplx psi_zero;
  cplx psi_one;
  cplx discrepancy;
};

// Angles of an anomalous correction window in the caller's chart.
struct WindowAngles {
  double center = 0.0;
  double outer_lo = 0.0;
  double inner_lo = 0.0;
  double inner_hi = 0.0;
  double outer_hi = 0.0;
};

// Amplitude of the doubly reflected plane wave on one side of an anomalous ray.
struct SideAmplitude {
  int sector = -1;  // canonical sector index
  cplx amplitude;
};

// chi(x_j, k_j) e^{i p_j y_j} where (k_j, p_j) are the frame-j coordinates of
// wave; pair must have been solved for |k_j|.
cplx channel_wave(const PairScattering& pair, int frame, const KVector& wave, const ConfigPoint& x);

class FieldModel {
 public:
  // Throws ConfigInvalid when r1 does not separate the potential strips, and
  // DegenerateFan when q or the windows are inadmissible.
  explicit FieldModel(const FieldParams& params);

  const FieldParams& params() const { return params_; }
  double energy() const { return energy_; }
  double wavenumber() const { return std::sqrt(energy_); }
  const KVector& q() const { return params_.q; }

  // Canonical frame: canonical_q() = canonical_map().apply(q()).
  const KVector& canonical_q() const { return q_canon_; }
  const SignedPermutation& canonical_map() const { return to_canon_; }
  Vec2 to_canonical(Vec2 x) const { return g_ * x; }
  Vec2 from_canonical(Vec2 y) const { return g_.transpose() * y; }
  const SectorFan& fan() const { return fan_; }

  std::span<const PairScattering> pairs() const { return pairs_; }
  const PairScattering& pair_for(double abs_k) const;

  // which = 0 for q23, 1 for q21. Directions and angles in the caller's frame.
  KVector anomalous_direction(int which) const;
  WindowAngles window_angles(int which) const;
  // First entry: side carrying R1 for q23 (R2 for q21); second: the other side.
  std::array<SideAmplitude, 2> side_amplitudes(int which) const;

  double potential_sum(Vec2 x) const;

  cplx psi_ray(Vec2 x) const { return psi_ray_jet(x).value; }
  FieldJet psi_ray_jet(Vec2 x) const;
  // The formula of one canonical sector, evaluated at x regardless of where x lies.
  FieldJet sector_formula_jet(Vec2 x, int sector) const;

  cplx psi_corrected(Vec2 x) const { return psi_corrected_jet(x).value; }
  FieldJet psi_corrected_jet(Vec2 x) const;

  cplx psi_one(Vec2 x) const;
  cplx discrepancy(Vec2 x) const;
  FieldSample sample(Vec2 x) const;

  // e^{i <q_a, x>} Phi(+-alpha) with alpha^2 = |q||x| - <q_a, x>, the sign
  // chosen so that side 0 (see side_amplitudes) is the illuminated one.
  cplx diffraction_wave(Vec2 x, int which, int side) const;

  // ConfigPoint conveniences.
  cplx psi_ray(const ConfigPoint& x) const { return psi_ray(x.chart()); }
  cplx psi_corrected(const ConfigPoint& x) const { return psi_corrected(x.chart()); }
  cplx psi_one(const ConfigPoint& x) const { return psi_one(x.chart()); }
  cplx discrepancy(const ConfigPoint& x) const { return discrepancy(x.chart()); }

 private:
  struct Term {
    int frame = 1;
    Mat2 rotation;
    double k = 0.0;  // normal wavenumber (signed)
    double p = 0.0;  // along wavenumber
    cplx coeff;
    std::size_t pair = 0;  // index into pairs_
  };

  struct Window {
    AnomalousWindow geometry;
    Vec2 direction;  // canonical chart vector q_a
    cplx amp_before;  // amplitude on the sector ending at the ray
    cplx amp_after;   // amplitude on the sector starting at the ray
    int labeled_side_first = 0;  // 0: "before" side carries the first amplitude
  };

  struct WindowJet {
    cplx c;        // correction amplitude C(x)
    cplx grad_x;   // chart gradient of C
    cplx grad_y;
    double zeta = 0.0;     // angular plateau
    double zeta_d1 = 0.0;  // d/dtheta
    double zeta_d2 = 0.0;
  };

  FieldJet canonical_ray_jet(Vec2 y, int sector) const;
  FieldJet canonical_corrected_jet(Vec2 y, const Classification& cls) const;
  WindowJet window_jet(Vec2 y, const Classification& cls, const Window& w) const;
  cplx canonical_window_discrepancy(Vec2 y, const Classification& cls, double vsum) const;
  void validate_radii() const;
  const Window& windows_for_canonical(int which) const { return windows_[canon_slot_[which]]; }

  FieldParams params_;
  double energy_ = 0.0;
  SignedPermutation to_canon_;
  Mat2 g_;
  KVector q_canon_;
  SectorFan fan_;
  std::vector<PairScattering> pairs_;
  std::array<std::vector<Term>, 6> sector_terms_;
  std::array<Window, 2> windows_;  // indexed in the caller's labelling
  std::array<int, 2> canon_slot_{0, 1};
};

}  // namespace tbscat

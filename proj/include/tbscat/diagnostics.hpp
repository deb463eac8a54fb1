#pragma once

// Post-processing of a solved correction field xi.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tbscat/fem.hpp"
#include "tbscat/wavefield.hpp"

namespace tbscat {

// N(r) = int_{|x|=r} |xi|^2 ds and M(r) = int_{|x|=r} |d_r xi - i sqrt(E) xi|^2 ds
// by the periodic trapezoidal rule.
struct RadialAudit {
  std::vector<double> radii;
  std::vector<double> n;
  std::vector<double> m;
};

RadialAudit boundary_norms(const FemField& xi, double energy, const std::vector<double>& radii, int samples = 720);

struct AngularProfile {
  double radius = 0.0;
  std::vector<double> theta;
  std::vector<cplx> xi;
  std::vector<cplx> amplitude;  // xi(r theta) sqrt(r) exp(-i sqrt(E) r), diagnostic only
  std::array<WindowAngles, 2> windows{};  // q23, q21
};

AngularProfile angular_profile(const FemField& xi, const FieldModel& model, double radius, int samples = 1440);

struct PeakCheck {
  std::array<double, 2> angle{};  // the two largest local maxima of |xi|
  std::array<double, 2> value{};
  std::array<int, 2> window{-1, -1};  // window containing each peak, -1 if none
  bool pass = false;                   // one peak in each window
};

PeakCheck dominant_peaks(const AngularProfile& profile);

// Total field psi_1 + xi.
std::vector<cplx> total_field(const FieldModel& model, const FemField& xi, const std::vector<Vec2>& points);

// Particle exchange that leaves q invariant (2 or 3 for the exchanged pair's
// complement, as in tau_j), if any.
std::optional<int> swap_symmetry(const KVector& q, double tol = 1e-12);
Vec2 apply_swap(int j, Vec2 x);

// Relative L2 defect ||xi - xi o tau_j|| / ||xi|| over the disk of radius
// r_max, sampled on a polar grid with area weights.
double symmetry_defect(const FemField& xi, int j, double r_max, int n_radial = 200, int n_angular = 720);

// Rectangular grid dumps of the analytic field, masked (empty) outside r_max.
struct GridSpec {
  double half_width = 0.0;
  int n = 0;  // points per side
};
void write_field_grid_csv(std::ostream& os, const FieldModel& model, const GridSpec& grid, double r_max,
                          const std::string& header = {});
void write_solution_grid_csv(std::ostream& os, const FemField& xi, const GridSpec& grid, const std::string& header = {});

void write_radial_csv(std::ostream& os, const RadialAudit& audit, double energy, const std::string& header = {});
void write_profile_csv(std::ostream& os, const AngularProfile& profile, const std::string& header = {});

}  // namespace tbscat

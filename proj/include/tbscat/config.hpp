#pragma once

// Run configuration: flat "key = value" text, '#' starts a comment. Numeric
// values accept plain numbers, sqrt(a) and a*sqrt(b); lists are comma
// separated. Unknown keys are rejected.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tbscat/fem.hpp"
#include "tbscat/mesh.hpp"
#include "tbscat/wavefield.hpp"

namespace tbscat {

struct RunConfig {
  std::string potential_shape = "bump";  // bump | square | zero
  double potential_amplitude = 2.0;
  double potential_halfwidth = 0.25;

  double energy = 4.0;
  double k1 = 1.0;
  double p1 = std::sqrt(3.0);

  double r1 = 4.0;
  double r2 = 10.0;
  double delta_in_deg = 8.0;
  double delta_out_deg = 16.0;

  double mesh_radius = 25.0;
  double mesh_h = 0.25;
  double screen_factor = 2.0;
  double window_factor = 2.0;
  double min_angle_deg = 20.0;

  BoundaryCondition bc = BoundaryCondition::kPlain;
  std::size_t direct_threshold = 400'000;
  double solver_tolerance = 1e-10;
  int max_iterations = 20'000;

  std::vector<double> pair_k{0.5, 1.0, std::sqrt(2.0), 2.0};
  std::vector<double> probe_radii{14.0, 16.0, 18.0, 19.0, 20.0, 21.0, 22.0, 23.0, 24.0};
  double profile_radius = 22.0;
  int profile_samples = 1440;
  int circle_samples = 720;
  int grid_points = 201;

  // Derived objects.
  KVector q() const;
  PairPotential potential() const;
  FieldParams field_params() const;
  MeshOptions mesh_options(const FieldModel& model) const;
  SolverOptions solver_options() const;

  // Throws ConfigInvalid naming the violated invariant.
  void validate() const;

  // Canonical "key = value" listing (full precision, fixed key order) and its
  // 64-bit FNV-1a hash as 16 hex digits.
  std::string canonical() const;
  std::string hash() const;

  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);

  // Applies a single "key = value" assignment.
  void set(const std::string& key, const std::string& value);
};

std::uint64_t fnv1a(const std::string& data);

// Parses "1.5", "sqrt(3)", "2*sqrt(2)", "-sqrt(0.5)".
double parse_number(const std::string& text);

}  // namespace tbscat

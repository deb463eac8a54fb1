#include "tbscat/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tbscat {

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double plain_number(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigInvalid("not a number: '" + text + "'");
  }
  if (used != t.size()) throw ConfigInvalid("not a number: '" + text + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string list17(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + g17(v[i]);
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_number(value);
  if (v != std::floor(v) || std::abs(v) > 2e9) throw ConfigInvalid(key + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

double parse_number(const std::string& text) {
  std::string t = trim(text);
  double sign = 1.0;
  if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
    if (t[0] == '-') sign = -1.0;
    t = trim(t.substr(1));
  }
  const auto s = t.find("sqrt(");
  if (s == std::string::npos) return sign * plain_number(t);
  if (t.back() != ')') throw ConfigInvalid("malformed sqrt expression: '" + text + "'");
  double factor = 1.0;
  if (s > 0) {
    const std::string pre = trim(t.substr(0, s));
    if (pre.empty() || pre.back() != '*') throw ConfigInvalid("malformed sqrt expression: '" + text + "'");
    factor = plain_number(pre.substr(0, pre.size() - 1));
  }
  const double arg = plain_number(t.substr(s + 5, t.size() - s - 6));
  if (arg < 0.0) throw ConfigInvalid("sqrt of a negative number: '" + text + "'");
  return sign * factor * std::sqrt(arg);
}

KVector RunConfig::q() const { return from_jacobi(k1, p1, 1); }

PairPotential RunConfig::potential() const {
  if (potential_shape == "bump") return PairPotential::bump(potential_amplitude, potential_halfwidth);
  if (potential_shape == "square") return PairPotential::square_barrier(potential_amplitude, 2.0 * potential_halfwidth);
  if (potential_shape == "zero") return PairPotential::zero(potential_halfwidth);
  throw ConfigInvalid("potential.shape must be bump, square or zero");
}

FieldParams RunConfig::field_params() const {
  FieldParams p;
  p.potential = potential();
  p.q = q();
  p.r1 = r1;
  p.r2 = r2;
  p.delta_in = deg_to_rad(delta_in_deg);
  p.delta_out = deg_to_rad(delta_out_deg);
  return p;
}

MeshOptions RunConfig::mesh_options(const FieldModel& model) const {
  MeshOptions o;
  o.radius = mesh_radius;
  o.h = mesh_h;
  o.screen_factor = screen_factor;
  o.window_factor = window_factor;
  o.strip_halfwidth = potential_halfwidth;
  o.min_angle_deg = min_angle_deg;
  for (int w = 0; w < 2; ++w) {
    const WindowAngles a = model.window_angles(w);
    o.windows.push_back({a.outer_lo, a.outer_hi});
  }
  return o;
}

SolverOptions RunConfig::solver_options() const {
  SolverOptions s;
  s.direct_threshold = direct_threshold;
  s.tolerance = solver_tolerance;
  s.max_iterations = max_iterations;
  return s;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigInvalid(m); };
  potential();
  if (!(potential_halfwidth > 0.0)) fail("potential.halfwidth must be positive");
  if (!(energy > 0.0)) fail("energy must be positive");
  if (std::abs(k1 * k1 + p1 * p1 - energy) > 1e-10 * std::max(1.0, energy))
    fail("k1^2 + p1^2 must equal the energy (|q|^2 = E)");
  if (!(r1 > 0.0 && r1 < r2)) fail("field radii must satisfy 0 < r1 < r2");
  if (!(r2 < mesh_radius)) fail("r2 must be smaller than the mesh radius");
  if (!(0.0 < delta_in_deg && delta_in_deg < delta_out_deg && delta_out_deg < 60.0))
    fail("window angles must satisfy 0 < delta_in < delta_out < 60 degrees");
  if (!(mesh_h > 0.0)) fail("mesh.h must be positive");
  if (!(screen_factor >= 1.0 && window_factor >= 1.0)) fail("refinement factors must be at least 1");
  if (!(min_angle_deg > 0.0 && min_angle_deg <= 30.0)) fail("mesh.min_angle_deg must lie in (0, 30]");
  if (!(solver_tolerance > 0.0 && solver_tolerance < 1e-8)) fail("solver.tolerance must lie in (0, 1e-8)");
  if (max_iterations < 1) fail("solver.max_iterations must be positive");
  for (double k : pair_k)
    if (!(k > 0.0)) fail("pair.k entries must be positive");
  const double limit = mesh_radius - 2.0 * mesh_h;
  for (double r : probe_radii)
    if (!(r > 0.0 && r < limit)) fail("probe radii must lie in (0, R - 2h)");
  if (!(profile_radius > 0.0 && profile_radius < limit)) fail("diagnostics.profile_radius must lie in (0, R - 2h)");
  if (profile_samples < 8 || circle_samples < 8) fail("angular sample counts must be at least 8");
  if (grid_points < 2) fail("dump.grid_points must be at least 2");
}

std::string RunConfig::canonical() const {
  std::string s;
  auto line = [&s](const char* key, const std::string& v) { s += std::string(key) + " = " + v + "\n"; };
  line("potential.shape", potential_shape);
  line("potential.amplitude", g17(potential_amplitude));
  line("potential.halfwidth", g17(potential_halfwidth));
  line("energy", g17(energy));
  line("q.k1", g17(k1));
  line("q.p1", g17(p1));
  line("field.r1", g17(r1));
  line("field.r2", g17(r2));
  line("field.delta_in_deg", g17(delta_in_deg));
  line("field.delta_out_deg", g17(delta_out_deg));
  line("mesh.radius", g17(mesh_radius));
  line("mesh.h", g17(mesh_h));
  line("mesh.screen_factor", g17(screen_factor));
  line("mesh.window_factor", g17(window_factor));
  line("mesh.min_angle_deg", g17(min_angle_deg));
  line("solver.bc", bc_name(bc));
  line("solver.direct_threshold", std::to_string(direct_threshold));
  line("solver.tolerance", g17(solver_tolerance));
  line("solver.max_iterations", std::to_string(max_iterations));
  line("pair.k", list17(pair_k));
  line("diagnostics.radii", list17(probe_radii));
  line("diagnostics.profile_radius", g17(profile_radius));
  line("diagnostics.profile_samples", std::to_string(profile_samples));
  line("diagnostics.circle_samples", std::to_string(circle_samples));
  line("dump.grid_points", std::to_string(grid_points));
  return s;
}

std::string RunConfig::hash() const {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
  return buf;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto num = [&] { return parse_number(value); };
  auto list = [&] {
    std::vector<double> out;
    for (const auto& item : split_list(value)) out.push_back(parse_number(item));
    if (out.empty()) throw ConfigInvalid(key + " needs at least one value");
    return out;
  };
  if (key == "potential.shape") potential_shape = trim(value);
  else if (key == "potential.amplitude") potential_amplitude = num();
  else if (key == "potential.halfwidth") potential_halfwidth = num();
  else if (key == "energy") energy = num();
  else if (key == "q.k1") k1 = num();
  else if (key == "q.p1") p1 = num();
  else if (key == "field.r1") r1 = num();
  else if (key == "field.r2") r2 = num();
  else if (key == "field.delta_in_deg") delta_in_deg = num();
  else if (key == "field.delta_out_deg") delta_out_deg = num();
  else if (key == "mesh.radius") mesh_radius = num();
  else if (key == "mesh.h") mesh_h = num();
  else if (key == "mesh.screen_factor") screen_factor = num();
  else if (key == "mesh.window_factor") window_factor = num();
  else if (key == "mesh.min_angle_deg") min_angle_deg = num();
  else if (key == "solver.bc") bc = parse_bc(trim(value));
  else if (key == "solver.direct_threshold") {
    const int v = parse_int(key, value);
    if (v < 0) throw ConfigInvalid(key + " must be non-negative");
    direct_threshold = static_cast<std::size_t>(v);
  } else if (key == "solver.tolerance") solver_tolerance = num();
  else if (key == "solver.max_iterations") max_iterations = parse_int(key, value);
  else if (key == "pair.k") pair_k = list();
  else if (key == "diagnostics.radii") probe_radii = list();
  else if (key == "diagnostics.profile_radius") profile_radius = num();
  else if (key == "diagnostics.profile_samples") profile_samples = parse_int(key, value);
  else if (key == "diagnostics.circle_samples") circle_samples = parse_int(key, value);
  else if (key == "dump.grid_points") grid_points = parse_int(key, value);
  else throw ConfigInvalid("unknown configuration key '" + key + "'");
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigInvalid("line " + std::to_string(lineno) + ": expected 'key = value'");
    try {
      c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigInvalid& e) {
      throw ConfigInvalid("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot read configuration file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace tbscat

#include "tbscat/diagnostics.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace tbscat {

RadialAudit boundary_norms(const FemField& xi, double energy, const std::vector<double>& radii, int samples) {
  if (samples < 8) throw ConfigInvalid("at least 8 angular samples required");
  const double k = std::sqrt(energy);
  RadialAudit out;
  out.radii = radii;
  out.n.assign(radii.size(), 0.0);
  out.m.assign(radii.size(), 0.0);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    if (!(r > 0.0 && r < xi.mesh().radius())) throw ConfigInvalid("probe radius must lie strictly inside the mesh");
    std::vector<double> n(static_cast<std::size_t>(samples)), m(static_cast<std::size_t>(samples));
    parallel_for(n.size(), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t s = lo; s < hi; ++s) {
        const double th = 2.0 * kPi * static_cast<double>(s) / samples;
        const Vec2 x = Vec2::polar(r, th);
        const cplx v = xi.value(x);
        const auto g = xi.gradient(x);
        const cplx dr = g[0] * std::cos(th) + g[1] * std::sin(th);
        n[s] = std::norm(v);
        m[s] = std::norm(dr - kI * k * v);
      }
    });
    double sn = 0.0, sm = 0.0;
    for (std::size_t s = 0; s < n.size(); ++s) {
      sn += n[s];
      sm += m[s];
    }
    const double ds = 2.0 * kPi * r / samples;
    out.n[i] = sn * ds;
    out.m[i] = sm * ds;
  }
  return out;
}

AngularProfile angular_profile(const FemField& xi, const FieldModel& model, double radius, int samples) {
  if (!(radius > 0.0 && radius < xi.mesh().radius())) throw ConfigInvalid("probe radius must lie strictly inside the mesh");
  AngularProfile p;
  p.radius = radius;
  p.theta.resize(static_cast<std::size_t>(samples));
  p.xi.resize(p.theta.size());
  p.amplitude.resize(p.theta.size());
  p.windows = {model.window_angles(0), model.window_angles(1)};
  const cplx phase = std::sqrt(radius) * std::exp(-kI * model.wavenumber() * radius);
  parallel_for(p.theta.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      const double th = 2.0 * kPi * static_cast<double>(s) / samples;
      p.theta[s] = th;
      p.xi[s] = xi.value(Vec2::polar(radius, th));
      p.amplitude[s] = p.xi[s] * phase;
    }
  });
  return p;
}

PeakCheck dominant_peaks(const AngularProfile& profile) {
  const std::size_t n = profile.xi.size();
  std::vector<std::pair<double, std::size_t>> maxima;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(profile.xi[i]);
    const double prev = std::abs(profile.xi[(i + n - 1) % n]);
    const double next = std::abs(profile.xi[(i + 1) % n]);
    if (a > prev && a >= next) maxima.emplace_back(a, i);
  }
  std::sort(maxima.begin(), maxima.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  PeakCheck c;
  for (std::size_t k = 0; k < 2 && k < maxima.size(); ++k) {
    const double th = profile.theta[maxima[k].second];
    c.angle[k] = th;
    c.value[k] = maxima[k].first;
    for (int w = 0; w < 2; ++w)
      if (AngularRange{profile.windows[w].outer_lo, profile.windows[w].outer_hi}.contains(th)) c.window[k] = w;
  }
  c.pass = maxima.size() >= 2 && c.window[0] >= 0 && c.window[1] >= 0 && c.window[0] != c.window[1];
  return c;
}

std::vector<cplx> total_field(const FieldModel& model, const FemField& xi, const std::vector<Vec2>& points) {
  std::vector<cplx> out(points.size());
  parallel_for(points.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) out[i] = model.psi_one(points[i]) + xi.value(points[i]);
  });
  return out;
}

std::optional<int> swap_symmetry(const KVector& q, double tol) {
  const double scale = std::max({std::abs(q.at(1)), std::abs(q.at(2)), std::abs(q.at(3))});
  for (int j = 1; j <= 3; ++j) {
    const int a = j % 3 + 1;
    const int b = (j + 1) % 3 + 1;
    if (std::abs(q.at(a) - q.at(b)) <= tol * scale) return j;
  }
  return std::nullopt;
}

Vec2 apply_swap(int j, Vec2 x) {
  const ConfigPoint p = ConfigPoint::from_chart(x);
  std::array<double, 3> c = p.components();
  std::swap(c[j % 3], c[(j + 1) % 3]);
  return ConfigPoint(c[0], c[1], c[2]).chart();
}

double symmetry_defect(const FemField& xi, int j, double r_max, int n_radial, int n_angular) {
  std::vector<double> diff(static_cast<std::size_t>(n_radial), 0.0), norm(diff.size(), 0.0);
  parallel_for(diff.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double r = r_max * (static_cast<double>(i) + 0.5) / n_radial;
      double d = 0.0, s = 0.0;
      for (int a = 0; a < n_angular; ++a) {
        const Vec2 x = Vec2::polar(r, 2.0 * kPi * a / n_angular);
        const cplx v = xi.value(x);
        d += std::norm(v - xi.value(apply_swap(j, x)));
        s += std::norm(v);
      }
      diff[i] = d * r;
      norm[i] = s * r;
    }
  });
  double d = 0.0, s = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    d += diff[i];
    s += norm[i];
  }
  return s > 0.0 ? std::sqrt(d / s) : 0.0;
}

namespace {

void put(std::string& out, const char* fmt, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, fmt, v);
  out += buf;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> axis(const GridSpec& grid) {
  if (grid.n < 2) throw ConfigInvalid("grid needs at least two points per side");
  std::vector<double> a(static_cast<std::size_t>(grid.n));
  for (int i = 0; i < grid.n; ++i) a[i] = -grid.half_width + 2.0 * grid.half_width * i / (grid.n - 1);
  return a;
}

}  // namespace

void write_field_grid_csv(std::ostream& os, const FieldModel& model, const GridSpec& grid, double r_max,
                          const std::string& header) {
  const auto ax = axis(grid);
  const std::size_t n = ax.size();
  std::vector<std::string> rows(n * n);
  parallel_for(rows.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const Vec2 x{ax[k % n], ax[k / n]};
      std::string& row = rows[k];
      row = g17(x.x) + "," + g17(x.y);
      if (x.norm() > r_max) {
        row += ",,,,,,,,,\n";
        continue;
      }
      const FieldSample s = model.sample(x);
      for (double v : {s.potential, s.psi_ray.real(), s.psi_ray.imag(), s.psi_zero.real(), s.psi_zero.imag(),
                       s.psi_one.real(), s.psi_one.imag(), s.discrepancy.real(), s.discrepancy.imag()}) {
        row += ",";
        put(row, "%.17g", v);
      }
      row += "\n";
    }
  });
  std::string out;
  if (!header.empty()) out += "# " + header + "\n";
  out += "x,y,v,re_psi_ray,im_psi_ray,re_psi0,im_psi0,re_psi1,im_psi1,re_q,im_q\n";
  for (const auto& r : rows) out += r;
  os << out;
}

void write_solution_grid_csv(std::ostream& os, const FemField& xi, const GridSpec& grid, const std::string& header) {
  const auto ax = axis(grid);
  const std::size_t n = ax.size();
  std::vector<std::string> rows(n * n);
  parallel_for(rows.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const Vec2 x{ax[k % n], ax[k / n]};
      std::string& row = rows[k];
      row = g17(x.x) + "," + g17(x.y);
      const auto v = xi.try_value(x);
      if (!v) {
        row += ",,\n";
        continue;
      }
      row += "," + g17(v->real()) + "," + g17(v->imag()) + "\n";
    }
  });
  std::string out;
  if (!header.empty()) out += "# " + header + "\n";
  out += "x,y,re_xi,im_xi\n";
  for (const auto& r : rows) out += r;
  os << out;
}

void write_radial_csv(std::ostream& os, const RadialAudit& audit, double energy, const std::string& header) {
  std::string out;
  if (!header.empty()) out += "# " + header + "\n";
  out += "r,N,M,M_over_EN\n";
  for (std::size_t i = 0; i < audit.radii.size(); ++i) {
    const double ratio = audit.n[i] > 0.0 ? audit.m[i] / (energy * audit.n[i]) : 0.0;
    out += g17(audit.radii[i]) + "," + g17(audit.n[i]) + "," + g17(audit.m[i]) + "," + g17(ratio) + "\n";
  }
  os << out;
}

void write_profile_csv(std::ostream& os, const AngularProfile& p, const std::string& header) {
  std::string out;
  if (!header.empty()) out += "# " + header + "\n";
  out += "# radius " + g17(p.radius) + "\n";
  const char* names[2] = {"q23", "q21"};
  for (int w = 0; w < 2; ++w) {
    const WindowAngles& a = p.windows[w];
    out += std::string("# window ") + names[w] + " center " + g17(a.center) + " outer " + g17(a.outer_lo) + " " +
           g17(a.outer_hi) + " inner " + g17(a.inner_lo) + " " + g17(a.inner_hi) + "\n";
  }
  out += "theta,abs_xi,re_xi,im_xi,re_g,im_g\n";
  for (std::size_t i = 0; i < p.theta.size(); ++i) {
    out += g17(p.theta[i]) + "," + g17(std::abs(p.xi[i])) + "," + g17(p.xi[i].real()) + "," + g17(p.xi[i].imag()) +
           "," + g17(p.amplitude[i].real()) + "," + g17(p.amplitude[i].imag()) + "\n";
  }
  os << out;
}

}  // namespace tbscat

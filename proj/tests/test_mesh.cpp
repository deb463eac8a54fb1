#include "doctest.h"

#include <map>
#include <set>
#include <sstream>

#include "support/oracles.hpp"
#include "tbscat/geometry.hpp"
#include "tbscat/mesh.hpp"

using namespace tbscat;

namespace {

MeshOptions small_options() {
  MeshOptions opt;
  opt.radius = 6.0;
  opt.h = 0.6;
  opt.screen_factor = 2.0;
  opt.window_factor = 1.5;
  opt.windows = {{deg_to_rad(74.0), deg_to_rad(106.0)}, {deg_to_rad(254.0), deg_to_rad(286.0)}};
  return opt;
}

double signed_area(const Mesh& m, const std::array<int, 6>& t) {
  return 0.5 * cross(m.nodes()[t[1]] - m.nodes()[t[0]], m.nodes()[t[2]] - m.nodes()[t[0]]);
}

}  // namespace

TEST_CASE("size field and regions") {
  const MeshOptions opt = small_options();
  // A point on the line x_1 = 0 is inside a screen strip.
  CHECK(region_at(opt, {0.0, 3.0}) == Region::kScreen);
  CHECK(mesh_size_at(opt, {0.0, 3.0}) == doctest::Approx(0.3));
  // 90 degrees lies on the x_1 = 0 line; 100 degrees at radius 5 is away from it.
  const Vec2 w = Vec2::polar(5.0, deg_to_rad(100.0));
  const ConfigPoint p = ConfigPoint::from_chart(w);
  REQUIRE(std::min({std::abs(p.at(1)), std::abs(p.at(2)), std::abs(p.at(3))}) > 0.85);
  CHECK(region_at(opt, w) == Region::kWindow);
  CHECK(mesh_size_at(opt, w) == doctest::Approx(0.4));
  const Vec2 g = Vec2::polar(5.0, deg_to_rad(45.0));
  CHECK(region_at(opt, g) == Region::kGeneric);
  CHECK(mesh_size_at(opt, g) == doctest::Approx(0.6));
  AngularRange wrap{deg_to_rad(-10.0), deg_to_rad(10.0)};
  CHECK(wrap.contains(deg_to_rad(355.0)));
  CHECK_FALSE(wrap.contains(deg_to_rad(15.0)));
}

TEST_CASE("built mesh is a conforming quality triangulation of the disk") {
  const MeshOptions opt = small_options();
  const Mesh m = build_mesh(opt);
  const MeshStats s = m.stats();
  CHECK(s.min_angle_deg >= 20.0 - 1e-9);
  CHECK(s.max_boundary_deviation <= 1e-10 * opt.radius);
  CHECK(s.max_edge <= opt.h * (1.0 + 1e-9));
  CHECK(s.region_triangles[0] > 0);
  CHECK(s.region_triangles[1] > 0);
  CHECK(s.region_triangles[2] > 0);

  // Counterclockwise, positive area, and total area equals the inscribed polygon.
  double area = 0.0;
  for (const auto& t : m.triangles()) {
    const double a = signed_area(m, t);
    CHECK(a > 0.0);
    area += a;
  }
  double polygon = 0.0;
  for (const BoundaryEdge& e : m.boundary()) polygon += 0.5 * cross(m.nodes()[e.a], m.nodes()[e.b]);
  CHECK(area == doctest::Approx(polygon).epsilon(1e-12));
  CHECK(polygon == doctest::Approx(kPi * opt.radius * opt.radius).epsilon(0.01));

  // Conformity: each edge is shared by exactly two triangles unless it is a boundary chord.
  std::map<std::pair<int, int>, int> uses;
  for (const auto& t : m.triangles())
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      ++uses[{std::min(a, b), std::max(a, b)}];
    }
  std::set<std::pair<int, int>> chords;
  for (const BoundaryEdge& e : m.boundary()) chords.insert({std::min(e.a, e.b), std::max(e.a, e.b)});
  CHECK(chords.size() == m.boundary().size());
  for (const auto& [edge, n] : uses) {
    if (chords.count(edge)) {
      CHECK(n == 1);
    } else {
      CHECK(n == 2);
    }
  }

  // Euler characteristic of a disk.
  const long v = static_cast<long>(m.vertex_count());
  const long e = static_cast<long>(uses.size());
  const long f = static_cast<long>(m.triangles().size());
  CHECK(v - e + f == 1);
  // Quadratic nodes: one per vertex plus one per edge.
  CHECK(m.node_count() == m.vertex_count() + uses.size());

  // Midside nodes sit at edge midpoints.
  for (const auto& t : m.triangles())
    for (int k = 0; k < 3; ++k) {
      const Vec2 mid = 0.5 * (m.nodes()[t[k]] + m.nodes()[t[(k + 1) % 3]]);
      CHECK((m.nodes()[t[3 + k]] - mid).norm() < 1e-14 * opt.radius);
    }
}

TEST_CASE("refinement factors shrink the local edge length") {
  MeshOptions base;
  base.radius = 6.0;
  base.h = 0.6;
  base.windows = {{deg_to_rad(74.0), deg_to_rad(106.0)}};
  MeshOptions fine = base;
  fine.screen_factor = 2.0;
  fine.window_factor = 2.0;
  const MeshStats a = build_mesh(base).stats();
  const MeshStats b = build_mesh(fine).stats();
  CHECK(b.mean_edge[1] / a.mean_edge[1] == doctest::Approx(0.5).epsilon(0.2));
  CHECK(b.mean_edge[2] / a.mean_edge[2] == doctest::Approx(0.5).epsilon(0.2));
  CHECK(b.mean_edge[0] / a.mean_edge[0] > 0.6);
}

TEST_CASE("mesh construction is deterministic") {
  const MeshOptions opt = small_options();
  std::ostringstream a, b;
  build_mesh(opt).write(a, "h");
  build_mesh(opt).write(b, "h");
  CHECK(a.str() == b.str());
}

TEST_CASE("text format round trip") {
  const Mesh m = build_mesh(small_options());
  std::ostringstream out;
  m.write(out, "config 0123456789abcdef");
  std::istringstream in(out.str());
  const Mesh r = Mesh::read(in);
  CHECK(r.radius() == m.radius());
  CHECK(r.vertex_count() == m.vertex_count());
  CHECK(r.nodes() == m.nodes());
  CHECK(r.triangles() == m.triangles());
  CHECK(r.regions() == m.regions());
  REQUIRE(r.boundary().size() == m.boundary().size());
  for (std::size_t i = 0; i < m.boundary().size(); ++i) {
    CHECK(r.boundary()[i].a == m.boundary()[i].a);
    CHECK(r.boundary()[i].mid == m.boundary()[i].mid);
  }
  std::istringstream bad("# tbscat mesh\n3\n0 0\n");
  CHECK_THROWS(Mesh::read(bad));
}

TEST_CASE("uniform refinement") {
  const Mesh m = build_mesh(small_options());
  const Mesh r = refine_uniform(m);
  CHECK(r.triangles().size() == 4 * m.triangles().size());
  CHECK(r.vertex_count() == m.node_count());
  CHECK(r.boundary().size() == 2 * m.boundary().size());
  const MeshStats s = r.stats();
  CHECK(s.max_boundary_deviation <= 1e-10 * m.radius());
  CHECK(s.max_edge <= 0.5 * m.stats().max_edge * 1.05);
  double area = 0.0;
  for (const auto& t : r.triangles()) {
    CHECK(signed_area(r, t) > 0.0);
    area += signed_area(r, t);
  }
  CHECK(area > 0.0);
  CHECK(area < kPi * m.radius() * m.radius());
}

TEST_CASE("point location") {
  const Mesh m = build_mesh(small_options());
  const TriangleLocator loc(m);
  // Nodes are recovered with barycentric weights reproducing their position.
  for (std::size_t i = 0; i < m.node_count(); i += 7) {
    const Vec2 x = m.nodes()[i];
    const auto hit = loc.locate(x);
    const auto& t = m.triangles()[hit.triangle];
    Vec2 y{};
    for (int k = 0; k < 3; ++k) y = y + hit.bary[k] * m.nodes()[t[k]];
    CHECK((y - x).norm() < 1e-12);
    CHECK(std::min({hit.bary[0], hit.bary[1], hit.bary[2]}) >= -1e-12);
  }
  for (int i = 0; i < 500; ++i) {
    const Vec2 x = Vec2::polar(m.radius() * std::sqrt(oracle::uniform(0.0, 0.999)), oracle::uniform(0.0, 2.0 * kPi));
    REQUIRE(loc.try_locate(x).has_value());
  }
  // The sliver between chord and arc is still located.
  const Vec2 on_arc = Vec2::polar(m.radius(), 0.5 * (m.nodes()[m.boundary()[0].a].angle() + m.nodes()[m.boundary()[0].b].angle()));
  CHECK(loc.try_locate(on_arc).has_value());
  CHECK_THROWS_AS(loc.locate({m.radius() * 1.01, 0.0}), PointOutsideDomain);
}

TEST_CASE("node count estimate") {
  const MeshOptions opt = small_options();
  const double est = estimate_node_count(opt);
  const double actual = static_cast<double>(build_mesh(opt).node_count());
  CHECK(est / actual == doctest::Approx(1.0).epsilon(0.25));
}

TEST_CASE("invalid options") {
  MeshOptions opt;
  opt.h = 0.0;
  CHECK_THROWS_AS(build_mesh(opt), ConfigInvalid);
  opt.h = 0.5;
  opt.screen_factor = 0.5;
  CHECK_THROWS_AS(build_mesh(opt), ConfigInvalid);
  opt.screen_factor = 1.0;
  opt.max_vertices = 50;
  CHECK_THROWS_AS(build_mesh(opt), MeshQuality);
}

TEST_CASE("reference-scale node count is of order three million") {
  MeshOptions opt;
  opt.radius = 190.0;
  opt.h = 0.3;
  const double est = estimate_node_count(opt);
  MESSAGE("estimated quadratic nodes at R=190, h=0.3: " << est);
  CHECK(est > 3e5);
  CHECK(est < 3e7);
}

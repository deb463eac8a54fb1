#include "doctest.h"

#include <fstream>
#include <map>
#include <sstream>

#include "tbscat/pipeline.hpp"

using namespace tbscat;
namespace fs = std::filesystem;

namespace {

RunConfig small_config() {
  return RunConfig::parse(R"(
    # small end-to-end run
    energy = 4
    q.k1 = 1
    q.p1 = sqrt(3)
    field.r1 = 2
    field.r2 = 4
    mesh.radius = 8
    mesh.h = 0.5
    mesh.screen_factor = 1
    mesh.window_factor = 1
    diagnostics.radii = 5, 6
    diagnostics.profile_radius = 6
    diagnostics.profile_samples = 360
    dump.grid_points = 21
  )");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tbscat_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("number syntax") {
  CHECK(parse_number("1.5") == 1.5);
  CHECK(parse_number("sqrt(3)") == doctest::Approx(std::sqrt(3.0)));
  CHECK(parse_number(" 2*sqrt(2) ") == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(parse_number("-sqrt(0.25)") == -0.5);
  CHECK_THROWS_AS(parse_number("abc"), ConfigInvalid);
  CHECK_THROWS_AS(parse_number("sqrt(-1)"), ConfigInvalid);
  CHECK_THROWS_AS(parse_number("2 sqrt(2)"), ConfigInvalid);
}

TEST_CASE("configuration parsing and validation") {
  const RunConfig c = small_config();
  CHECK(c.p1 == doctest::Approx(std::sqrt(3.0)));
  CHECK(c.probe_radii == std::vector<double>{5.0, 6.0});
  CHECK_NOTHROW(c.validate());
  CHECK(c.hash().size() == 16);
  CHECK(RunConfig::parse(c.canonical()).canonical() == c.canonical());

  CHECK_THROWS_AS(RunConfig::parse("unknown.key = 1"), ConfigInvalid);
  CHECK_THROWS_AS(RunConfig::parse("energy 4"), ConfigInvalid);
  RunConfig bad = c;
  bad.p1 = 1.7;
  CHECK_THROWS_AS(bad.validate(), ConfigInvalid);
  bad = c;
  bad.r2 = 9.0;
  CHECK_THROWS_AS(bad.validate(), ConfigInvalid);
  bad = c;
  bad.r1 = 5.0;
  CHECK_THROWS_AS(bad.validate(), ConfigInvalid);
  bad = c;
  bad.probe_radii = {7.5};
  CHECK_THROWS_AS(bad.validate(), ConfigInvalid);

  RunConfig other = c;
  other.bc = BoundaryCondition::kCorrected;
  CHECK(other.hash() != c.hash());
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("reference-scale configuration is accepted") {
  RunConfig c = RunConfig::load(TBSCAT_SOURCE_DIR "/configs/reference.cfg");
  CHECK_NOTHROW(c.validate());
  CHECK(c.mesh_radius == 190.0);
  CHECK(c.r2 == 14.5);
  CHECK(c.canonical().find("mesh.radius = 190") != std::string::npos);
}

TEST_CASE("end-to-end run is reproducible and cached") {
  const fs::path out = scratch("e2e");
  Pipeline a(small_config(), out);
  a.run(Stage::kAll);
  const std::vector<std::string> files{"pair_table.csv", "field_grid.csv",    "mesh.txt",   "solution.csv",
                                       "solution_grid.csv", "radial.csv", "profile.csv", "summary.txt"};
  std::map<std::string, std::string> first;
  for (const auto& f : files) {
    REQUIRE(fs::exists(out / f));
    first[f] = slurp(out / f);
    if (f != "summary.txt") CHECK(first[f].find("config " + a.hash()) != std::string::npos);
  }
  REQUIRE(a.results().solve.has_value());
  CHECK(a.results().solve->residual < 1e-8);
  REQUIRE(a.results().audit.has_value());
  for (double n : a.results().audit->n) CHECK(n > 0.0);
  CHECK(a.results().symmetry_defect.has_value());

  // Second run loads mesh and solution from disk.
  Pipeline b(small_config(), out);
  b.run(Stage::kAll);
  CHECK(b.records()[2].cached);
  CHECK(b.records()[3].cached);
  CHECK(b.results().solve->residual == a.results().solve->residual);
  for (const auto& f : files)
    if (f != "summary.txt") CHECK(slurp(out / f) == first[f]);

  // A fresh directory reproduces the artifacts byte for byte.
  const fs::path out2 = scratch("e2e_fresh");
  Pipeline c(small_config(), out2);
  c.run(Stage::kAll);
  for (const auto& f : files)
    if (f != "summary.txt") CHECK(slurp(out2 / f) == first[f]);
  fs::remove_all(out);
  fs::remove_all(out2);
}

TEST_CASE("free system reproduces the plane wave") {
  RunConfig c = small_config();
  c.potential_shape = "zero";
  const fs::path out = scratch("free");
  Pipeline p(c, out);
  p.run(Stage::kSolve);
  const FieldModel& m = p.model();
  const KVector q = c.q();
  std::vector<Vec2> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(Vec2::polar(0.15 * i, 0.7 * i));
  const auto psi = total_field(m, p.solution(), pts);
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    worst = std::max(worst, std::abs(psi[i] - std::exp(kI * dot(q.chart(), pts[i]))));
  // h = 0.5 at k = 2: pointwise P2 error of a few 1e-3.
  CHECK(worst < 1e-2);
  fs::remove_all(out);
}

TEST_CASE("stage errors keep their category and name the stage") {
  RunConfig c = small_config();
  c.r1 = 0.3;  // does not separate the potential strips
  Pipeline p(c, scratch("err"));
  try {
    p.run(Stage::kField);
    FAIL("expected ConfigInvalid");
  } catch (const ConfigInvalid& e) {
    CHECK(std::string(e.what()).find("stage field") != std::string::npos);
  }
  CHECK(parse_stage("mesh") == Stage::kMesh);
  CHECK_THROWS_AS(parse_stage("plot"), ConfigInvalid);
  fs::remove_all(scratch("err"));
}

#include "tbscat/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace tbscat {

Stage parse_stage(const std::string& name) {
  if (name == "pair") return Stage::kPair;
  if (name == "field") return Stage::kField;
  if (name == "mesh") return Stage::kMesh;
  if (name == "solve") return Stage::kSolve;
  if (name == "diagnose") return Stage::kDiagnose;
  if (name == "all") return Stage::kAll;
  throw ConfigInvalid("unknown stage '" + name + "'");
}

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::kPair: return "pair";
    case Stage::kField: return "field";
    case Stage::kMesh: return "mesh";
    case Stage::kSolve: return "solve";
    case Stage::kDiagnose: return "diagnose";
    case Stage::kAll: return "all";
  }
  return "unknown";
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

template <class F>
void guarded(const char* name, F&& f) {
  try {
    f();
  } catch (const ConfigInvalid& e) {
    throw ConfigInvalid(std::string("stage ") + name + ": " + e.what());
  } catch (const NumericalFailure& e) {
    throw NumericalFailure(std::string("stage ") + name + ": " + e.what());
  }
}

}  // namespace

Pipeline::Pipeline(RunConfig config, std::filesystem::path out_dir)
    : config_(std::move(config)), out_(std::move(out_dir)) {
  config_.validate();
  hash_ = config_.hash();
}

std::string Pipeline::header(const char* what) const { return std::string("tbscat ") + what + " config " + hash_; }

bool Pipeline::cached(const std::string& file) const {
  std::ifstream in(out_ / file);
  if (!in) return false;
  std::string line;
  const std::string tag = "config " + hash_;
  while (std::getline(in, line) && !line.empty() && line[0] == '#')
    if (line.find(tag) != std::string::npos) return true;
  return false;
}

void Pipeline::write_file(const std::string& file, const std::string& content) const {
  std::filesystem::create_directories(out_);
  const auto path = out_ / file;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << content;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

const FieldModel& Pipeline::model() {
  if (!model_) model_ = std::make_unique<FieldModel>(config_.field_params());
  return *model_;
}

std::shared_ptr<const Mesh> Pipeline::mesh() {
  if (mesh_) return mesh_;
  if (cached("mesh.txt")) {
    std::ifstream in(out_ / "mesh.txt");
    mesh_ = std::make_shared<const Mesh>(Mesh::read(in));
  } else {
    mesh_ = std::make_shared<const Mesh>(build_mesh(config_.mesh_options(model())));
    std::ostringstream os;
    mesh_->write(os, header("mesh"));
    write_file("mesh.txt", os.str());
  }
  results_.mesh = mesh_->stats();
  return mesh_;
}

const FemField& Pipeline::solution() {
  if (solution_) return *solution_;
  const auto m = mesh();
  SolveReport rep;
  bool loaded = false;
  if (cached("solution.csv")) {
    std::ifstream in(out_ / "solution.csv");
    std::string line;
    VectorC values(static_cast<Eigen::Index>(m->node_count()));
    std::size_t count = 0;
    bool ok = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line[0] == '#') {
        std::istringstream c(line.substr(1));
        std::string key;
        c >> key;
        if (key == "solve") c >> rep.method >> rep.iterations >> rep.residual;
        continue;
      }
      if (line.rfind("node,", 0) == 0) continue;
      char* p = nullptr;
      const long id = std::strtol(line.c_str(), &p, 10);
      double f[4];
      for (double& v : f) v = std::strtod(p + 1, &p);
      if (id < 0 || static_cast<std::size_t>(id) >= m->node_count()) {
        ok = false;
        break;
      }
      values[id] = {f[2], f[3]};
      ++count;
    }
    if (ok && count == m->node_count()) {
      solution_ = std::make_unique<FemField>(m, std::move(values));
      loaded = true;
    }
  }
  if (!loaded) {
    const FemProblem problem = assemble(m, physics_source(model()), config_.bc);
    VectorC x = solve(problem, config_.solver_options(), &rep);
    solution_ = std::make_unique<FemField>(m, std::move(x));
    std::ostringstream os;
    solution_->write_csv(os, header("solution") + "\n# solve " + rep.method + " " + std::to_string(rep.iterations) +
                                 " " + g17(rep.residual));
    write_file("solution.csv", os.str());
    std::ostringstream grid;
    write_solution_grid_csv(grid, *solution_, {config_.mesh_radius, config_.grid_points}, header("solution grid"));
    write_file("solution_grid.csv", grid.str());
  }
  results_.solve = rep;
  results_.xi_l2 = solution_->l2_norm();
  const FemField zero(m, VectorC::Zero(static_cast<Eigen::Index>(m->node_count())));
  const FieldModel& fm = model();
  results_.psi1_l2 = zero.l2_error([&fm](Vec2 x) { return fm.psi_one(x); });
  return *solution_;
}

void Pipeline::stage_pair() {
  std::set<double> ks(config_.pair_k.begin(), config_.pair_k.end());
  for (const auto& p : model().pairs()) ks.insert(p.k());
  std::string out = "# " + header("pair") + "\n";
  out += "k,re_s,im_s,re_r,im_r,unitarity_defect\n";
  const PairPotential pot = config_.potential();
  for (double k : ks) {
    const PairScattering p = solve_pair(pot, k);
    out += g17(k) + "," + g17(p.s().real()) + "," + g17(p.s().imag()) + "," + g17(p.r().real()) + "," +
           g17(p.r().imag()) + "," + g17(p.unitarity_defect()) + "\n";
  }
  write_file("pair_table.csv", out);
}

void Pipeline::stage_field() {
  std::ostringstream os;
  write_field_grid_csv(os, model(), {config_.mesh_radius, config_.grid_points}, config_.mesh_radius, header("field"));
  write_file("field_grid.csv", os.str());
}

void Pipeline::stage_mesh() { mesh(); }

void Pipeline::stage_solve() { solution(); }

void Pipeline::stage_diagnose() {
  const FemField& xi = solution();
  const double e = config_.energy;
  results_.audit = boundary_norms(xi, e, config_.probe_radii, config_.circle_samples);
  std::ostringstream radial;
  write_radial_csv(radial, *results_.audit, e, header("radial"));
  write_file("radial.csv", radial.str());

  const AngularProfile prof = angular_profile(xi, model(), config_.profile_radius, config_.profile_samples);
  results_.peaks = dominant_peaks(prof);
  std::ostringstream profile;
  write_profile_csv(profile, prof, header("profile"));
  write_file("profile.csv", profile.str());

  if (const auto j = swap_symmetry(config_.q()))
    results_.symmetry_defect = symmetry_defect(xi, *j, config_.mesh_radius - 2.0 * config_.mesh_h);
}

void Pipeline::run(Stage stage) {
  std::vector<Stage> order;
  switch (stage) {
    case Stage::kAll: order = {Stage::kPair, Stage::kField, Stage::kMesh, Stage::kSolve, Stage::kDiagnose}; break;
    case Stage::kSolve: order = {Stage::kMesh, Stage::kSolve}; break;
    case Stage::kDiagnose: order = {Stage::kMesh, Stage::kSolve, Stage::kDiagnose}; break;
    default: order = {stage};
  }
  for (Stage s : order) {
    const char* name = stage_name(s);
    const auto start = std::chrono::steady_clock::now();
    StageRecord rec{name, 0.0, false};
    guarded(name, [&] {
      switch (s) {
        case Stage::kPair: stage_pair(); break;
        case Stage::kField: stage_field(); break;
        case Stage::kMesh:
          rec.cached = !mesh_ && cached("mesh.txt");
          stage_mesh();
          break;
        case Stage::kSolve:
          rec.cached = !solution_ && cached("solution.csv");
          stage_solve();
          break;
        case Stage::kDiagnose: stage_diagnose(); break;
        case Stage::kAll: break;
      }
    });
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    records_.push_back(rec);
  }
  write_summary();
}

std::string Pipeline::describe() {
  const FieldModel& m = model();
  std::ostringstream os;
  os << "config hash " << hash_ << "\n";
  const KVector q = config_.q();
  os << "q = (" << fmt("%.6f", q.at(1)) << ", " << fmt("%.6f", q.at(2)) << ", " << fmt("%.6f", q.at(3))
     << "), E = " << config_.energy << "\n";
  const SectorFan fan = build_fan(q, deg_to_rad(config_.delta_in_deg), deg_to_rad(config_.delta_out_deg));
  os << "rays (deg):";
  for (double r : fan.rays) os << " " << fmt("%.4f", rad_to_deg(r));
  os << "\nsectors:";
  for (const Sector& s : fan.sectors) os << " [" << (s.label.sign > 0 ? "+" : "-") << "l" << s.label.screen << "]";
  os << "\nscreen half-lines (deg):";
  for (int j = 1; j <= 3; ++j)
    for (int sign : {1, -1})
      os << " " << (sign > 0 ? "+" : "-") << "l" << j << "=" << fmt("%.1f", rad_to_deg(half_line_angle({j, sign})));
  os << "\n";
  const char* names[2] = {"q23", "q21"};
  for (int w = 0; w < 2; ++w) {
    const WindowAngles a = m.window_angles(w);
    os << "window " << names[w] << " (deg): center " << fmt("%.4f", rad_to_deg(a.center)) << ", inner ["
       << fmt("%.4f", rad_to_deg(a.inner_lo)) << ", " << fmt("%.4f", rad_to_deg(a.inner_hi)) << "], outer ["
       << fmt("%.4f", rad_to_deg(a.outer_lo)) << ", " << fmt("%.4f", rad_to_deg(a.outer_hi)) << "]\n";
  }
  const KVector c = m.canonical_q();
  os << "canonical q = (" << fmt("%.6f", c.at(1)) << ", " << fmt("%.6f", c.at(2)) << ", " << fmt("%.6f", c.at(3))
     << ")\n";
  for (const auto& p : m.pairs())
    os << "pair |k| = " << fmt("%.6f", p.k()) << ": s = " << fmt("%.10f", p.s().real()) << fmt("%+.10fi", p.s().imag())
       << ", r = " << fmt("%.10f", p.r().real()) << fmt("%+.10fi", p.r().imag())
       << ", unitarity defect " << fmt("%.3e", p.unitarity_defect()) << "\n";
  return os.str();
}

void Pipeline::write_summary() const {
  std::ostringstream os;
  os << "tbscat run summary\n";
  os << "config_hash = " << hash_ << "\n\n[config]\n" << config_.canonical() << "\n[stages]\n";
  for (const StageRecord& r : records_)
    os << r.name << " " << fmt("%.3f", r.seconds) << " s" << (r.cached ? " (cached)" : "") << "\n";
  if (results_.mesh) {
    const MeshStats& s = *results_.mesh;
    os << "\n[mesh]\nvertices = " << s.vertices << "\ntriangles = " << s.triangles << "\ndof = " << s.nodes
       << "\nboundary_edges = " << s.boundary_edges << "\nmin_angle_deg = " << fmt("%.4f", s.min_angle_deg)
       << "\nmax_angle_deg = " << fmt("%.4f", s.max_angle_deg) << "\nedge_range = " << fmt("%.5f", s.min_edge) << " "
       << fmt("%.5f", s.max_edge) << "\nmean_edge_generic_screen_window = " << fmt("%.5f", s.mean_edge[0]) << " "
       << fmt("%.5f", s.mean_edge[1]) << " " << fmt("%.5f", s.mean_edge[2])
       << "\nmax_boundary_deviation = " << fmt("%.3e", s.max_boundary_deviation) << "\n";
  }
  if (results_.solve) {
    const SolveReport& r = *results_.solve;
    os << "\n[solve]\nmethod = " << r.method << "\niterations = " << r.iterations
       << "\nrelative_residual = " << fmt("%.3e", r.residual) << "\nxi_l2 = " << fmt("%.6e", results_.xi_l2)
       << "\npsi1_l2 = " << fmt("%.6e", results_.psi1_l2) << "\n";
  }
  if (results_.audit) {
    const RadialAudit& a = *results_.audit;
    os << "\n[radiation]\n# r N M M/(E N)\n";
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < a.radii.size(); ++i) {
      os << fmt("%.3f", a.radii[i]) << " " << fmt("%.6e", a.n[i]) << " " << fmt("%.6e", a.m[i]) << " "
         << fmt("%.4e", a.n[i] > 0 ? a.m[i] / (config_.energy * a.n[i]) : 0.0) << "\n";
      lo = std::min(lo, a.n[i]);
      hi = std::max(hi, a.n[i]);
    }
    if (!a.radii.empty())
      os << "N_variation = " << fmt("%.4f", (hi - lo) / lo) << "  # (max - min) / min over the probe radii\n";
  }
  if (results_.peaks) {
    const PeakCheck& p = *results_.peaks;
    os << "\n[profile]\n";
    for (int k = 0; k < 2; ++k)
      os << "peak" << k + 1 << " = " << fmt("%.3f", rad_to_deg(p.angle[k])) << " deg, |xi| " << fmt("%.4e", p.value[k])
         << ", window " << (p.window[k] == 0 ? "q23" : p.window[k] == 1 ? "q21" : "none") << "\n";
    os << "peaks_in_windows = " << (p.pass ? "yes" : "no") << "\n";
  }
  if (results_.symmetry_defect) os << "symmetry_defect = " << fmt("%.4e", *results_.symmetry_defect) << "\n";
  write_file("summary.txt", os.str());
}

}  // namespace tbscat

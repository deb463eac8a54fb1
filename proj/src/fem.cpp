#include "tbscat/fem.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/UmfPackSupport>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "tbscat/wavefield.hpp"

namespace tbscat {

const char* bc_name(BoundaryCondition bc) { return bc == BoundaryCondition::kPlain ? "plain" : "corrected"; }

BoundaryCondition parse_bc(const std::string& name) {
  if (name == "plain") return BoundaryCondition::kPlain;
  if (name == "corrected") return BoundaryCondition::kCorrected;
  throw ConfigInvalid("unknown boundary condition '" + name + "' (expected plain or corrected)");
}

SourceTerms physics_source(const FieldModel& model) {
  SourceTerms s;
  s.energy = model.energy();
  const FieldModel* m = &model;
  s.potential = [m](Vec2 x) { return m->potential_sum(x); };
  s.rhs = [m](Vec2 x) { return -m->discrepancy(x); };
  return s;
}

namespace {

double robin_shift(BoundaryCondition bc, double radius) {
  return bc == BoundaryCondition::kCorrected ? 0.5 / radius : 0.0;
}

}  // namespace

SourceTerms manufactured_source(const ManufacturedSolution& u, double energy, std::function<double(Vec2)> potential,
                                BoundaryCondition bc, double radius) {
  SourceTerms s;
  s.energy = energy;
  s.potential = potential;
  const cplx beta = kI * std::sqrt(energy) - robin_shift(bc, radius);
  s.rhs = [u, energy, potential](Vec2 x) {
    const double v = potential ? potential(x) : 0.0;
    return -u.laplacian(x) + (v - energy) * u.value(x);
  };
  s.boundary_data = [u, beta](Vec2 x, Vec2 n) {
    const auto g = u.gradient(x);
    return g[0] * n.x + g[1] * n.y - beta * u.value(x);
  };
  return s;
}

namespace {

struct QuadPoint {
  double l0, l1, l2, w;
};

// Symmetric triangle rules; weights sum to one.
constexpr double kA4 = 0.44594849091596488632, kW4a = 0.22338158967801146570;
constexpr double kB4 = 0.09157621350977074346, kW4b = 0.10995174365532186764;
constexpr std::array<QuadPoint, 6> kRule4{{
    {kA4, kA4, 1.0 - 2.0 * kA4, kW4a},
    {kA4, 1.0 - 2.0 * kA4, kA4, kW4a},
    {1.0 - 2.0 * kA4, kA4, kA4, kW4a},
    {kB4, kB4, 1.0 - 2.0 * kB4, kW4b},
    {kB4, 1.0 - 2.0 * kB4, kB4, kW4b},
    {1.0 - 2.0 * kB4, kB4, kB4, kW4b},
}};

constexpr double kA5 = 0.47014206410511508977, kW5a = 0.13239415278850618074;
constexpr double kB5 = 0.10128650732345633880, kW5b = 0.12593918054482715260;
constexpr std::array<QuadPoint, 7> kRule5{{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
    {kA5, kA5, 1.0 - 2.0 * kA5, kW5a},
    {kA5, 1.0 - 2.0 * kA5, kA5, kW5a},
    {1.0 - 2.0 * kA5, kA5, kA5, kW5a},
    {kB5, kB5, 1.0 - 2.0 * kB5, kW5b},
    {kB5, 1.0 - 2.0 * kB5, kB5, kW5b},
    {1.0 - 2.0 * kB5, kB5, kB5, kW5b},
}};

// Gauss-Legendre on [0, 1].
const double kGaussOff = 0.5 * std::sqrt(0.6);
const std::array<double, 3> kGaussT{0.5 - kGaussOff, 0.5, 0.5 + kGaussOff};
constexpr std::array<double, 3> kGaussW{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// Edge basis in the order (a, mid, b).
std::array<double, 3> edge_basis(double t) {
  return {(1.0 - t) * (1.0 - 2.0 * t), 4.0 * t * (1.0 - t), t * (2.0 * t - 1.0)};
}

struct Element {
  std::array<Vec2, 3> p;
  std::array<Vec2, 3> grad_l;  // gradients of the barycentric coordinates
  double area = 0.0;
};

Element element_of(const Mesh& mesh, const std::array<int, 6>& t) {
  Element e;
  for (int k = 0; k < 3; ++k) e.p[k] = mesh.nodes()[t[k]];
  const Vec2 e1 = e.p[1] - e.p[0], e2 = e.p[2] - e.p[0];
  const double det = cross(e1, e2);
  const double scale = std::max(e1.norm2(), e2.norm2());
  if (!(det > 1e-14 * scale)) throw QuadratureFailure("degenerate or inverted triangle");
  e.area = 0.5 * det;
  e.grad_l[1] = {e2.y / det, -e2.x / det};
  e.grad_l[2] = {-e1.y / det, e1.x / det};
  e.grad_l[0] = -1.0 * (e.grad_l[1] + e.grad_l[2]);
  return e;
}

std::array<double, 6> p2_values(const std::array<double, 3>& l) {
  return {l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
          4.0 * l[0] * l[1],          4.0 * l[1] * l[2],          4.0 * l[2] * l[0]};
}

std::array<Vec2, 6> p2_gradients(const std::array<double, 3>& l, const std::array<Vec2, 3>& g) {
  return {(4.0 * l[0] - 1.0) * g[0],
          (4.0 * l[1] - 1.0) * g[1],
          (4.0 * l[2] - 1.0) * g[2],
          4.0 * (l[0] * g[1] + l[1] * g[0]),
          4.0 * (l[1] * g[2] + l[2] * g[1]),
          4.0 * (l[2] * g[0] + l[0] * g[2])};
}

Vec2 at(const Element& e, const QuadPoint& q) { return q.l0 * e.p[0] + q.l1 * e.p[1] + q.l2 * e.p[2]; }

struct ElementData {
  std::array<double, 36> k;
  std::array<cplx, 6> f;
};

// Symmetric pattern of the P2 connectivity, values zero.
SparseMatrixC pattern_of(const Mesh& mesh) {
  const int n = static_cast<int>(mesh.node_count());
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const auto& t : mesh.triangles())
    for (int a : t)
      for (int b : t) adj[a].push_back(b);
  std::size_t nnz = 0;
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    nnz += row.size();
  }
  SparseMatrixC m(n, n);
  m.resizeNonZeros(static_cast<Eigen::Index>(nnz));
  int* outer = m.outerIndexPtr();
  int* inner = m.innerIndexPtr();
  cplx* val = m.valuePtr();
  std::size_t pos = 0;
  for (int j = 0; j < n; ++j) {
    outer[j] = static_cast<int>(pos);
    for (int i : adj[j]) {
      inner[pos] = i;
      val[pos] = 0.0;
      ++pos;
    }
  }
  outer[n] = static_cast<int>(pos);
  return m;
}

cplx& entry(SparseMatrixC& m, int row, int col) {
  int* begin = m.innerIndexPtr() + m.outerIndexPtr()[col];
  int* end = m.innerIndexPtr() + m.outerIndexPtr()[col + 1];
  int* it = std::lower_bound(begin, end, row);
  return m.valuePtr()[it - m.innerIndexPtr()];
}

}  // namespace

FemProblem assemble(std::shared_ptr<const Mesh> mesh_ptr, const SourceTerms& source, BoundaryCondition bc) {
  const Mesh& mesh = *mesh_ptr;
  const double energy = source.energy;
  if (!(energy > 0.0)) throw ConfigInvalid("energy must be positive");
  SparseMatrixC a = pattern_of(mesh);
  VectorC b = VectorC::Zero(static_cast<Eigen::Index>(mesh.node_count()));

  const std::size_t nt = mesh.triangles().size();
  constexpr std::size_t kBlock = 8192;
  std::vector<ElementData> data;
  for (std::size_t first = 0; first < nt; first += kBlock) {
    const std::size_t count = std::min(kBlock, nt - first);
    data.assign(count, ElementData{});
    parallel_for(count, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t k = lo; k < hi; ++k) {
        const Element e = element_of(mesh, mesh.triangles()[first + k]);
        ElementData& d = data[k];
        d.k.fill(0.0);
        d.f.fill(0.0);
        for (const QuadPoint& q : kRule4) {
          const std::array<double, 3> l{q.l0, q.l1, q.l2};
          const auto n = p2_values(l);
          const auto g = p2_gradients(l, e.grad_l);
          const Vec2 x = at(e, q);
          const double w = q.w * e.area;
          const double c = (source.potential ? source.potential(x) : 0.0) - energy;
          for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) d.k[6 * i + j] += w * (dot(g[i], g[j]) + c * n[i] * n[j]);
          if (source.rhs) {
            const cplx f = source.rhs(x);
            for (int i = 0; i < 6; ++i) d.f[i] += w * f * n[i];
          }
        }
      }
    });
    for (std::size_t k = 0; k < count; ++k) {
      const auto& t = mesh.triangles()[first + k];
      const ElementData& d = data[k];
      for (int j = 0; j < 6; ++j) {
        for (int i = 0; i < 6; ++i) entry(a, t[i], t[j]) += d.k[6 * i + j];
        b[t[j]] += d.f[j];
      }
    }
  }

  // Boundary: -(i sqrt(E) - c/(2R)) * edge mass, plus the data g.
  const cplx beta = -(kI * std::sqrt(energy) - robin_shift(bc, mesh.radius()));
  static constexpr double kEdgeMass[3][3] = {{4.0, 2.0, -1.0}, {2.0, 16.0, 2.0}, {-1.0, 2.0, 4.0}};
  for (const BoundaryEdge& e : mesh.boundary()) {
    const Vec2 pa = mesh.nodes()[e.a], pb = mesh.nodes()[e.b];
    const Vec2 d = pb - pa;
    const double len = d.norm();
    const std::array<int, 3> ids{e.a, e.mid, e.b};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) entry(a, ids[i], ids[j]) += beta * (len * kEdgeMass[i][j] / 30.0);
    if (source.boundary_data) {
      const Vec2 normal{d.y / len, -d.x / len};
      for (int q = 0; q < 3; ++q) {
        const auto phi = edge_basis(kGaussT[q]);
        const cplx g = source.boundary_data(pa + kGaussT[q] * d, normal);
        for (int i = 0; i < 3; ++i) b[ids[i]] += kGaussW[q] * len * g * phi[i];
      }
    }
  }
  return FemProblem(std::move(mesh_ptr), std::move(a), std::move(b), bc, energy);
}

namespace {

double relative_residual(const SparseMatrixC& a, const VectorC& x, const VectorC& b) {
  const double nb = b.norm();
  return nb > 0.0 ? (a * x - b).norm() / nb : (a * x).norm();
}

}  // namespace

VectorC solve(const FemProblem& problem, const SolverOptions& options, SolveReport* report) {
  const auto start = std::chrono::steady_clock::now();
  const SparseMatrixC& a = problem.matrix();
  const VectorC& b = problem.rhs();
  SolveReport rep;
  VectorC x = VectorC::Zero(b.size());
  constexpr double kRequired = 1e-8;

  if (b.norm() == 0.0) {
    rep.method = "trivial";
  } else if (static_cast<std::size_t>(b.size()) <= options.direct_threshold) {
    rep.method = "direct";
    Eigen::UmfPackLU<SparseMatrixC> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw NonConvergence("sparse LU factorization failed");
    x = lu.solve(b);
    rep.residual = relative_residual(a, x, b);
    rep.history.push_back(rep.residual);
    // A few steps of iterative refinement if round-off left the residual high.
    for (int step = 0; step < 3 && rep.residual > 1e-12; ++step) {
      const VectorC r = b - a * x;
      x += lu.solve(r);
      const double res = relative_residual(a, x, b);
      rep.history.push_back(res);
      if (!(res < rep.residual)) break;
      rep.residual = res;
      ++rep.iterations;
    }
  } else {
    rep.method = "bicgstab";
    Eigen::BiCGSTAB<SparseMatrixC, Eigen::IncompleteLUT<cplx>> it;
    it.preconditioner().setDroptol(options.ilut_drop);
    it.preconditioner().setFillfactor(options.ilut_fill);
    it.compute(a);
    if (it.info() != Eigen::Success) throw NonConvergence("incomplete LU preconditioner failed");
    constexpr int kChunk = 100;
    it.setTolerance(options.tolerance);
    while (rep.iterations < options.max_iterations) {
      it.setMaxIterations(std::min(kChunk, options.max_iterations - rep.iterations));
      x = it.solveWithGuess(b, x);
      rep.iterations += static_cast<int>(it.iterations());
      rep.residual = relative_residual(a, x, b);
      rep.history.push_back(rep.residual);
      if (rep.residual <= options.tolerance || it.info() == Eigen::Success || it.iterations() == 0) break;
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (report) *report = rep;
  if (!(rep.residual < kRequired) && rep.method != "trivial") {
    std::ostringstream msg;
    msg << rep.method << " solve stalled at relative residual " << rep.residual << " after " << rep.iterations
        << " iterations; history:";
    for (double h : rep.history) msg << " " << h;
    throw NonConvergence(msg.str());
  }
  return x;
}

FemField::FemField(std::shared_ptr<const Mesh> mesh, VectorC values)
    : mesh_(std::move(mesh)), values_(std::move(values)), locator_(*mesh_) {
  if (static_cast<std::size_t>(values_.size()) != mesh_->node_count())
    throw std::invalid_argument("one value per mesh node required");
}

std::optional<cplx> FemField::try_value(Vec2 x) const {
  const auto hit = locator_.try_locate(x);
  if (!hit) return std::nullopt;
  const auto& t = mesh_->triangles()[hit->triangle];
  const auto n = p2_values(hit->bary);
  cplx v = 0.0;
  for (int i = 0; i < 6; ++i) v += n[i] * values_[t[i]];
  return v;
}

cplx FemField::value(Vec2 x) const {
  const auto hit = locator_.locate(x);
  const auto& t = mesh_->triangles()[hit.triangle];
  const auto n = p2_values(hit.bary);
  cplx v = 0.0;
  for (int i = 0; i < 6; ++i) v += n[i] * values_[t[i]];
  return v;
}

std::array<cplx, 2> FemField::gradient(Vec2 x) const {
  const auto hit = locator_.locate(x);
  const auto& t = mesh_->triangles()[hit.triangle];
  const Element e = element_of(*mesh_, t);
  const auto g = p2_gradients(hit.bary, e.grad_l);
  std::array<cplx, 2> out{0.0, 0.0};
  for (int i = 0; i < 6; ++i) {
    out[0] += g[i].x * values_[t[i]];
    out[1] += g[i].y * values_[t[i]];
  }
  return out;
}

double FemField::l2_error(const std::function<cplx(Vec2)>& exact) const {
  const auto& tris = mesh_->triangles();
  std::vector<double> part(tris.size(), 0.0);
  parallel_for(tris.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const Element e = element_of(*mesh_, tris[k]);
      double s = 0.0;
      for (const QuadPoint& q : kRule5) {
        const auto n = p2_values({q.l0, q.l1, q.l2});
        cplx v = 0.0;
        for (int i = 0; i < 6; ++i) v += n[i] * values_[tris[k][i]];
        if (exact) v -= exact(at(e, q));
        s += q.w * std::norm(v);
      }
      part[k] = s * e.area;
    }
  });
  double total = 0.0;
  for (double p : part) total += p;
  return std::sqrt(total);
}

double FemField::l2_norm() const { return l2_error({}); }

void FemField::write_csv(std::ostream& os, const std::string& header) const {
  std::string out;
  if (!header.empty()) out += "# " + header + "\n";
  out += "node,x,y,re,im\n";
  char buf[160];
  for (std::size_t i = 0; i < mesh_->node_count(); ++i) {
    const Vec2 p = mesh_->nodes()[i];
    const cplx v = values_[static_cast<Eigen::Index>(i)];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", i, p.x, p.y, v.real(), v.imag());
    out += buf;
  }
  os << out;
}

}  // namespace tbscat

#include "tbscat/mesh.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "tbscat/geometry.hpp"

namespace tbscat {

const char* region_name(Region r) {
  switch (r) {
    case Region::kGeneric: return "generic";
    case Region::kScreen: return "screen";
    case Region::kWindow: return "window";
  }
  return "unknown";
}

bool AngularRange::contains(double angle) const {
  const double mid = 0.5 * (lo + hi);
  return std::abs(wrap_difference(angle - mid)) < 0.5 * (hi - lo);
}

Region region_at(const MeshOptions& opt, Vec2 x) {
  const ConfigPoint p = ConfigPoint::from_chart(x);
  const double strip = opt.strip_halfwidth + opt.h;
  if (std::min({std::abs(p.at(1)), std::abs(p.at(2)), std::abs(p.at(3))}) <= strip) return Region::kScreen;
  if (x.norm2() > 0.0) {
    const double a = x.angle();
    for (const AngularRange& w : opt.windows)
      if (w.contains(a)) return Region::kWindow;
  }
  return Region::kGeneric;
}

double mesh_size_at(const MeshOptions& opt, Vec2 x) {
  double f = 1.0;
  const ConfigPoint p = ConfigPoint::from_chart(x);
  const double strip = opt.strip_halfwidth + opt.h;
  if (std::min({std::abs(p.at(1)), std::abs(p.at(2)), std::abs(p.at(3))}) <= strip) f = std::max(f, opt.screen_factor);
  if (x.norm2() > 0.0) {
    const double a = x.angle();
    for (const AngularRange& w : opt.windows)
      if (w.contains(a)) f = std::max(f, opt.window_factor);
  }
  return opt.h / f;
}

namespace {

using Real = long double;

Real orient(Vec2 a, Vec2 b, Vec2 c) {
  return (static_cast<Real>(b.x) - a.x) * (static_cast<Real>(c.y) - a.y) -
         (static_cast<Real>(b.y) - a.y) * (static_cast<Real>(c.x) - a.x);
}

// > 0 when d lies inside the circumcircle of the counterclockwise triangle abc.
Real incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const Real adx = static_cast<Real>(a.x) - d.x, ady = static_cast<Real>(a.y) - d.y;
  const Real bdx = static_cast<Real>(b.x) - d.x, bdy = static_cast<Real>(b.y) - d.y;
  const Real cdx = static_cast<Real>(c.x) - d.x, cdy = static_cast<Real>(c.y) - d.y;
  const Real a2 = adx * adx + ady * ady;
  const Real b2 = bdx * bdx + bdy * bdy;
  const Real c2 = cdx * cdx + cdy * cdy;
  return a2 * (bdx * cdy - cdx * bdy) + b2 * (cdx * ady - adx * cdy) + c2 * (adx * bdy - bdx * ady);
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  const double bx = b.x - a.x, by = b.y - a.y;
  const double cx = c.x - a.x, cy = c.y - a.y;
  const double d = 2.0 * (bx * cy - by * cx);
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  return {a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
}

// Incremental Bowyer-Watson triangulation inside a large enclosing triangle.
class Delaunay {
 public:
  struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> n{-1, -1, -1};  // n[i] is across the edge opposite v[i]
    bool alive = true;
    unsigned stamp = 0;
  };

  explicit Delaunay(double extent) {
    const double d = 100.0 * extent;
    pts_ = {{0.0, 2.0 * d}, {-std::sqrt(3.0) * d, -d}, {std::sqrt(3.0) * d, -d}};
    tris_.push_back(Tri{{0, 1, 2}, {-1, -1, -1}, true, 0});
  }

  static constexpr int kSuper = 3;

  const std::vector<Vec2>& points() const { return pts_; }
  const std::vector<Tri>& tris() const { return tris_; }
  const std::vector<int>& created() const { return created_; }
  bool is_super(int v) const { return v < kSuper; }

  int locate(Vec2 p, int hint) const {
    int t = (hint >= 0 && hint < static_cast<int>(tris_.size()) && tris_[hint].alive) ? hint : last_;
    if (t < 0 || !tris_[t].alive) t = first_alive();
    for (std::size_t step = 0; step < 4 * tris_.size() + 16; ++step) {
      const Tri& tr = tris_[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int i = (k + static_cast<int>(step)) % 3;
        if (orient(pts_[tr.v[(i + 1) % 3]], pts_[tr.v[(i + 2) % 3]], p) < 0) {
          next = tr.n[i];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    // Fallback: exhaustive search.
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
      if (!tris_[i].alive) continue;
      const Tri& tr = tris_[i];
      if (orient(pts_[tr.v[0]], pts_[tr.v[1]], p) >= 0 && orient(pts_[tr.v[1]], pts_[tr.v[2]], p) >= 0 &&
          orient(pts_[tr.v[2]], pts_[tr.v[0]], p) >= 0)
        return i;
    }
    throw MeshQuality("point location failed");
  }

  // Inserts p; returns the new vertex index, or -1 when p duplicates a vertex.
  int insert(Vec2 p, int hint, double dup_tol) {
    created_.clear();
    const int t0 = locate(p, hint);
    for (int v : tris_[t0].v)
      if ((pts_[v] - p).norm() <= dup_tol) return -1;

    ++epoch_;
    if (mark_.size() < tris_.size()) mark_.resize(tris_.size(), 0);
    cavity_.clear();
    cavity_.push_back(t0);
    mark_[t0] = epoch_;
    for (std::size_t k = 0; k < cavity_.size(); ++k) {
      const Tri& tr = tris_[cavity_[k]];
      for (int i = 0; i < 3; ++i) {
        const int nb = tr.n[i];
        if (nb < 0 || mark_[nb] == epoch_) continue;
        const Tri& o = tris_[nb];
        if (incircle(pts_[o.v[0]], pts_[o.v[1]], pts_[o.v[2]], p) > 0) {
          mark_[nb] = epoch_;
          cavity_.push_back(nb);
        }
      }
    }

    // Boundary of the cavity; grow it until every boundary edge sees p.
    struct Edge {
      int a, b, outside;
    };
    std::vector<Edge> edges;
    for (;;) {
      edges.clear();
      int grow = -1;
      for (int t : cavity_) {
        const Tri& tr = tris_[t];
        for (int i = 0; i < 3; ++i) {
          const int nb = tr.n[i];
          if (nb >= 0 && mark_[nb] == epoch_) continue;
          const int a = tr.v[(i + 1) % 3];
          const int b = tr.v[(i + 2) % 3];
          if (orient(pts_[a], pts_[b], p) <= 0) {
            if (nb < 0) throw MeshQuality("point outside the enclosing triangle");
            grow = nb;
            break;
          }
          edges.push_back({a, b, nb});
        }
        if (grow >= 0) break;
      }
      if (grow < 0) break;
      mark_[grow] = epoch_;
      cavity_.push_back(grow);
    }

    const int pv = static_cast<int>(pts_.size());
    pts_.push_back(p);
    for (int t : cavity_) {
      tris_[t].alive = false;
      free_.push_back(t);
    }
    std::sort(free_.begin(), free_.end(), std::greater<>());

    std::unordered_map<int, int> start;
    start.reserve(edges.size() * 2);
    for (const Edge& e : edges) {
      int slot;
      if (!free_.empty()) {
        slot = free_.back();
        free_.pop_back();
      } else {
        slot = static_cast<int>(tris_.size());
        tris_.emplace_back();
      }
      Tri& tr = tris_[slot];
      tr.v = {e.a, e.b, pv};
      tr.n = {-1, -1, e.outside};
      tr.alive = true;
      ++tr.stamp;
      if (e.outside >= 0) {
        Tri& o = tris_[e.outside];
        for (int i = 0; i < 3; ++i) {
          if (o.v[(i + 1) % 3] == e.b && o.v[(i + 2) % 3] == e.a) o.n[i] = slot;
        }
      }
      start[e.a] = slot;
      created_.push_back(slot);
    }
    for (int slot : created_) {
      Tri& tr = tris_[slot];
      const int other = start.at(tr.v[1]);
      tr.n[0] = other;
      tris_[other].n[1] = slot;
    }
    if (mark_.size() < tris_.size()) mark_.resize(tris_.size(), 0);
    last_ = created_.empty() ? last_ : created_.front();
    return pv;
  }

 private:
  int first_alive() const {
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i)
      if (tris_[i].alive) return i;
    return -1;
  }

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<int> created_;
  std::vector<int> cavity_;
  std::vector<unsigned> mark_;
  unsigned epoch_ = 0;
  int last_ = 0;
};

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

// Adds midside nodes to straight-sided corner triangles.
Mesh promote(double radius, std::vector<Vec2> nodes, const std::vector<std::array<int, 3>>& corners,
             const std::vector<std::pair<int, int>>& chords, std::vector<Region> regions) {
  const std::size_t nv = nodes.size();
  std::unordered_map<std::uint64_t, int> mids;
  mids.reserve(corners.size() * 2);
  std::vector<std::array<int, 6>> tris;
  tris.reserve(corners.size());
  for (const auto& c : corners) {
    std::array<int, 6> t{c[0], c[1], c[2], 0, 0, 0};
    for (int e = 0; e < 3; ++e) {
      const int a = c[e];
      const int b = c[(e + 1) % 3];
      const auto [it, fresh] = mids.try_emplace(edge_key(a, b), static_cast<int>(nodes.size()));
      if (fresh) nodes.push_back(0.5 * (nodes[a] + nodes[b]));
      t[3 + e] = it->second;
    }
    tris.push_back(t);
  }
  std::vector<BoundaryEdge> boundary;
  boundary.reserve(chords.size());
  for (const auto& [a, b] : chords) {
    const auto it = mids.find(edge_key(a, b));
    if (it == mids.end()) throw MeshQuality("boundary chord missing from the triangulation");
    boundary.push_back({a, b, it->second});
  }
  return Mesh(radius, std::move(nodes), nv, std::move(tris), std::move(boundary), std::move(regions));
}

double min_angle_of(Vec2 a, Vec2 b, Vec2 c) {
  const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
  auto ang = [](double opp, double s1, double s2) {
    return std::acos(std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2), -1.0, 1.0));
  };
  return std::min({ang(la, lb, lc), ang(lb, lc, la), ang(lc, la, lb)});
}

}  // namespace

Mesh::Mesh(double radius, std::vector<Vec2> nodes, std::size_t vertex_count, std::vector<std::array<int, 6>> triangles,
           std::vector<BoundaryEdge> boundary, std::vector<Region> regions)
    : radius_(radius),
      nodes_(std::move(nodes)),
      vertex_count_(vertex_count),
      triangles_(std::move(triangles)),
      boundary_(std::move(boundary)),
      regions_(std::move(regions)) {
  if (regions_.size() != triangles_.size()) throw std::invalid_argument("one region tag per triangle required");
}

MeshStats Mesh::stats() const {
  MeshStats s;
  s.vertices = vertex_count_;
  s.triangles = triangles_.size();
  s.nodes = nodes_.size();
  s.boundary_edges = boundary_.size();
  s.min_angle_deg = 180.0;
  s.min_edge = 1e300;
  std::array<double, 3> sum{};
  std::array<std::size_t, 3> count{};
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tr = triangles_[t];
    const Vec2 a = nodes_[tr[0]], b = nodes_[tr[1]], c = nodes_[tr[2]];
    const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    const double mn = rad_to_deg(min_angle_of(a, b, c));
    auto ang = [](double opp, double s1, double s2) {
      return std::acos(std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2), -1.0, 1.0));
    };
    const double mx = rad_to_deg(std::max({ang(la, lb, lc), ang(lb, lc, la), ang(lc, la, lb)}));
    s.min_angle_deg = std::min(s.min_angle_deg, mn);
    s.max_angle_deg = std::max(s.max_angle_deg, mx);
    s.min_edge = std::min({s.min_edge, la, lb, lc});
    s.max_edge = std::max({s.max_edge, la, lb, lc});
    const auto r = static_cast<std::size_t>(regions_[t]);
    sum[r] += (la + lb + lc) / 3.0;
    ++count[r];
  }
  for (int r = 0; r < 3; ++r) {
    s.region_triangles[r] = count[r];
    s.mean_edge[r] = count[r] ? sum[r] / count[r] : 0.0;
  }
  for (const BoundaryEdge& e : boundary_)
    for (int v : {e.a, e.b}) s.max_boundary_deviation = std::max(s.max_boundary_deviation, std::abs(nodes_[v].norm() - radius_));
  return s;
}

void Mesh::write(std::ostream& os, const std::string& header) const {
  std::ostringstream out;
  out.precision(17);
  out << "# tbscat mesh\n";
  if (!header.empty()) out << "# " << header << "\n";
  out << "# radius " << radius_ << "\n";
  out << "# vertices " << vertex_count_ << "\n";
  out << nodes_.size() << "\n";
  for (const Vec2& p : nodes_) out << p.x << " " << p.y << "\n";
  out << triangles_.size() << "\n";
  for (const auto& t : triangles_) out << t[0] << " " << t[1] << " " << t[2] << " " << t[3] << " " << t[4] << " " << t[5] << "\n";
  out << boundary_.size() << "\n";
  for (const BoundaryEdge& e : boundary_) out << e.a << " " << e.b << " " << e.mid << "\n";
  out << regions_.size() << "\n";
  for (Region r : regions_) out << static_cast<int>(r) << "\n";
  os << out.str();
}

Mesh Mesh::read(std::istream& is) {
  double radius = 0.0;
  std::size_t vertex_count = 0;
  std::string line;
  std::stringstream body;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] == '#') {
      std::istringstream c(line.substr(1));
      std::string key;
      c >> key;
      if (key == "radius") c >> radius;
      if (key == "vertices") c >> vertex_count;
      continue;
    }
    body << line << "\n";
  }
  auto fail = [] { return std::runtime_error("malformed mesh file"); };
  std::size_t n = 0;
  if (!(body >> n)) throw fail();
  std::vector<Vec2> nodes(n);
  for (auto& p : nodes)
    if (!(body >> p.x >> p.y)) throw fail();
  std::size_t nt = 0;
  if (!(body >> nt)) throw fail();
  std::vector<std::array<int, 6>> tris(nt);
  for (auto& t : tris)
    for (int& i : t)
      if (!(body >> i) || i < 0 || static_cast<std::size_t>(i) >= n) throw fail();
  std::size_t nb = 0;
  if (!(body >> nb)) throw fail();
  std::vector<BoundaryEdge> boundary(nb);
  for (auto& e : boundary)
    if (!(body >> e.a >> e.b >> e.mid)) throw fail();
  std::size_t nr = 0;
  if (!(body >> nr) || nr != nt) throw fail();
  std::vector<Region> regions(nr);
  for (auto& r : regions) {
    int v = 0;
    if (!(body >> v) || v < 0 || v > 2) throw fail();
    r = static_cast<Region>(v);
  }
  if (vertex_count == 0 || radius <= 0.0) throw fail();
  return Mesh(radius, std::move(nodes), vertex_count, std::move(tris), std::move(boundary), std::move(regions));
}

Mesh build_mesh(const MeshOptions& opt) {
  if (!(opt.radius > 0.0) || !(opt.h > 0.0)) throw ConfigInvalid("mesh radius and h must be positive");
  if (!(opt.screen_factor >= 1.0) || !(opt.window_factor >= 1.0))
    throw ConfigInvalid("refinement factors must be at least 1");
  if (!(opt.min_angle_deg > 0.0 && opt.min_angle_deg <= 30.0)) throw ConfigInvalid("minimum angle must be in (0, 30]");
  const double radius = opt.radius;
  const double ratio_bound = 1.0 / (2.0 * std::sin(deg_to_rad(opt.min_angle_deg)));
  const double dup_tol = 1e-12 * radius;

  Delaunay dt(radius);
  dt.insert({0.0, 0.0}, -1, dup_tol);

  // Boundary vertices keyed by angle; consecutive entries are polygon chords.
  std::map<double, int> ring;
  const int nb = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * radius / opt.h)));
  for (int i = 0; i < nb; ++i) {
    const double a = 2.0 * kPi * i / nb;
    const int v = dt.insert(Vec2::polar(radius, a), -1, dup_tol);
    if (v < 0) throw MeshQuality("duplicate boundary vertex");
    ring.emplace(a, v);
  }

  auto chord_at = [&](double angle) {
    auto hi = ring.upper_bound(angle);
    if (hi == ring.end()) hi = ring.begin();
    auto lo = hi == ring.begin() ? std::prev(ring.end()) : std::prev(hi);
    return std::pair{lo, hi};
  };

  struct Item {
    double priority;
    int tri;
    unsigned stamp;
    bool operator<(const Item& o) const {
      if (priority != o.priority) return priority < o.priority;
      return tri > o.tri;
    }
  };
  std::priority_queue<Item> queue;
  const auto& pts = dt.points();
  const auto& tris = dt.tris();

  auto badness = [&](int t) -> double {
    const auto& tr = tris[t];
    for (int v : tr.v)
      if (dt.is_super(v)) return 0.0;
    const Vec2 a = pts[tr.v[0]], b = pts[tr.v[1]], c = pts[tr.v[2]];
    const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    const double lmax = std::max({la, lb, lc});
    const double lmin = std::min({la, lb, lc});
    const double area2 = std::abs(static_cast<double>(orient(a, b, c)));
    const double circ = la * lb * lc / (2.0 * area2);
    const Vec2 g = (1.0 / 3.0) * (a + b + c);
    const double hloc = std::min({mesh_size_at(opt, a), mesh_size_at(opt, b), mesh_size_at(opt, c), mesh_size_at(opt, g)});
    const double p = std::max(lmax / hloc, circ / lmin / ratio_bound);
    return p > 1.0 + 1e-9 ? p : 0.0;
  };
  auto push = [&](int t) {
    const double p = badness(t);
    if (p > 0.0) queue.push({p, t, tris[t].stamp});
  };
  for (int t = 0; t < static_cast<int>(tris.size()); ++t)
    if (tris[t].alive) push(t);

  auto split_chord = [&](std::map<double, int>::iterator lo, std::map<double, int>::iterator hi, int hint) {
    const Vec2 a = pts[lo->second], b = pts[hi->second];
    const Vec2 s = a + b;
    const Vec2 m = (radius / s.norm()) * s;
    const int v = dt.insert(m, hint, dup_tol);
    if (v < 0) return false;
    ring.emplace(m.angle(), v);
    for (int t : dt.created()) push(t);
    return true;
  };

  std::size_t stuck = 0;
  while (!queue.empty()) {
    const Item item = queue.top();
    queue.pop();
    if (!tris[item.tri].alive || tris[item.tri].stamp != item.stamp) continue;
    if (pts.size() > opt.max_vertices) throw MeshQuality("mesh vertex budget exceeded");
    const auto& tr = tris[item.tri];
    const Vec2 c = circumcenter(pts[tr.v[0]], pts[tr.v[1]], pts[tr.v[2]]);

    // Encroachment of the boundary chord spanning c's direction or its neighbours.
    bool split = false;
    if (c.norm2() > 0.0) {
      auto [lo, hi] = chord_at(c.angle());
      auto prev_lo = lo == ring.begin() ? std::prev(ring.end()) : std::prev(lo);
      auto next_hi = std::next(hi) == ring.end() ? ring.begin() : std::next(hi);
      const std::array<std::pair<std::map<double, int>::iterator, std::map<double, int>::iterator>, 3> cand{
          {{lo, hi}, {prev_lo, lo}, {hi, next_hi}}};
      for (const auto& [u, w] : cand) {
        const Vec2 a = pts[u->second], b = pts[w->second];
        const bool outside = orient(a, b, c) <= 0;
        const bool encroached = (c - 0.5 * (a + b)).norm() < 0.5 * (a - b).norm();
        if (outside || encroached) {
          if (!split_chord(u, w, item.tri)) ++stuck;
          split = true;
          break;
        }
      }
    }
    if (!split) {
      const int v = dt.insert(c, item.tri, dup_tol);
      if (v < 0) {
        ++stuck;
        continue;
      }
      for (int t : dt.created()) push(t);
    }
    if (tris[item.tri].alive && tris[item.tri].stamp == item.stamp) push(item.tri);
    if (stuck > 1000) throw MeshQuality("Delaunay refinement stalled");
  }

  // Extract interior triangles and renumber vertices.
  std::vector<int> remap(pts.size(), -1);
  std::vector<Vec2> nodes;
  nodes.reserve(pts.size());
  for (std::size_t v = Delaunay::kSuper; v < pts.size(); ++v) {
    remap[v] = static_cast<int>(nodes.size());
    nodes.push_back(pts[v]);
  }
  std::vector<std::array<int, 3>> corners;
  std::vector<Region> regions;
  double worst = kPi;
  for (const auto& tr : tris) {
    if (!tr.alive || dt.is_super(tr.v[0]) || dt.is_super(tr.v[1]) || dt.is_super(tr.v[2])) continue;
    const Vec2 a = pts[tr.v[0]], b = pts[tr.v[1]], c = pts[tr.v[2]];
    worst = std::min(worst, min_angle_of(a, b, c));
    corners.push_back({remap[tr.v[0]], remap[tr.v[1]], remap[tr.v[2]]});
    regions.push_back(region_at(opt, (1.0 / 3.0) * (a + b + c)));
  }
  if (rad_to_deg(worst) < opt.min_angle_deg - 1e-6) {
    std::ostringstream msg;
    msg << "minimum angle " << rad_to_deg(worst) << " deg below the bound " << opt.min_angle_deg;
    throw MeshQuality(msg.str());
  }
  std::vector<std::pair<int, int>> chords;
  for (auto it = ring.begin(); it != ring.end(); ++it) {
    auto nx = std::next(it) == ring.end() ? ring.begin() : std::next(it);
    chords.emplace_back(remap[it->second], remap[nx->second]);
  }
  return promote(radius, std::move(nodes), corners, chords, std::move(regions));
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Vec2> nodes = mesh.nodes();
  for (const BoundaryEdge& e : mesh.boundary()) {
    const Vec2 m = nodes[e.mid];
    nodes[e.mid] = (mesh.radius() / m.norm()) * m;
  }
  std::vector<std::array<int, 3>> corners;
  std::vector<Region> regions;
  corners.reserve(4 * mesh.triangles().size());
  regions.reserve(4 * mesh.triangles().size());
  for (std::size_t t = 0; t < mesh.triangles().size(); ++t) {
    const auto& n = mesh.triangles()[t];
    corners.push_back({n[0], n[3], n[5]});
    corners.push_back({n[3], n[1], n[4]});
    corners.push_back({n[5], n[4], n[2]});
    corners.push_back({n[3], n[4], n[5]});
    for (int k = 0; k < 4; ++k) regions.push_back(mesh.regions()[t]);
  }
  std::vector<std::pair<int, int>> chords;
  for (const BoundaryEdge& e : mesh.boundary()) {
    chords.emplace_back(e.a, e.mid);
    chords.emplace_back(e.mid, e.b);
  }
  return promote(mesh.radius(), std::move(nodes), corners, chords, std::move(regions));
}

double estimate_node_count(const MeshOptions& opt) {
  // Refined meshes settle at about kDensity vertices per h_local^2; each
  // vertex carries roughly three edges, hence four quadratic nodes.
  constexpr double kDensity = 2.55;
  const int nr = 400;
  const int na = 1440;
  double sum = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = opt.radius * (i + 0.5) / nr;
    double ring = 0.0;
    for (int j = 0; j < na; ++j) {
      const double h = mesh_size_at(opt, Vec2::polar(r, 2.0 * kPi * (j + 0.5) / na));
      ring += 1.0 / (h * h);
    }
    sum += ring / na * 2.0 * kPi * r * (opt.radius / nr);
  }
  return 4.0 * kDensity * sum;
}

TriangleLocator::TriangleLocator(const Mesh& mesh) : mesh_(&mesh) {
  const double r = mesh.radius();
  const std::size_t nt = std::max<std::size_t>(1, mesh.triangles().size());
  x0_ = -r * (1.0 + 1e-9);
  y0_ = -r * (1.0 + 1e-9);
  cell_ = std::max(2.0 * r * std::sqrt(1.0 / static_cast<double>(nt)), 1e-12);
  nx_ = static_cast<int>(std::ceil(2.0 * r * (1.0 + 1e-9) / cell_)) + 1;
  ny_ = nx_;
  std::vector<int> count(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  auto cell_range = [&](const std::array<int, 6>& t, int& i0, int& i1, int& j0, int& j1) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (int k = 0; k < 3; ++k) {
      const Vec2 p = mesh.nodes()[t[k]];
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    i0 = std::clamp(static_cast<int>((xmin - x0_) / cell_), 0, nx_ - 1);
    i1 = std::clamp(static_cast<int>((xmax - x0_) / cell_), 0, nx_ - 1);
    j0 = std::clamp(static_cast<int>((ymin - y0_) / cell_), 0, ny_ - 1);
    j1 = std::clamp(static_cast<int>((ymax - y0_) / cell_), 0, ny_ - 1);
  };
  for (const auto& t : mesh.triangles()) {
    int i0, i1, j0, j1;
    cell_range(t, i0, i1, j0, j1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) ++count[static_cast<std::size_t>(j) * nx_ + i + 1];
  }
  for (std::size_t k = 1; k < count.size(); ++k) count[k] += count[k - 1];
  start_ = count;
  items_.assign(static_cast<std::size_t>(start_.back()), 0);
  std::vector<int> fill(start_.begin(), start_.end() - 1);
  for (std::size_t ti = 0; ti < mesh.triangles().size(); ++ti) {
    int i0, i1, j0, j1;
    cell_range(mesh.triangles()[ti], i0, i1, j0, j1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) items_[fill[static_cast<std::size_t>(j) * nx_ + i]++] = static_cast<int>(ti);
  }
}

std::optional<TriangleLocator::Hit> TriangleLocator::try_locate(Vec2 x) const {
  if (x.norm() > mesh_->radius() * (1.0 + 1e-12)) return std::nullopt;
  const int ci = std::clamp(static_cast<int>((x.x - x0_) / cell_), 0, nx_ - 1);
  const int cj = std::clamp(static_cast<int>((x.y - y0_) / cell_), 0, ny_ - 1);
  Hit best;
  double best_min = -1e300;
  for (int ring = 0; ring <= 1; ++ring) {
    for (int j = std::max(0, cj - ring); j <= std::min(ny_ - 1, cj + ring); ++j)
      for (int i = std::max(0, ci - ring); i <= std::min(nx_ - 1, ci + ring); ++i) {
        const std::size_t cell = static_cast<std::size_t>(j) * nx_ + i;
        for (int k = start_[cell]; k < start_[cell + 1]; ++k) {
          const auto& t = mesh_->triangles()[items_[k]];
          const Vec2 a = mesh_->nodes()[t[0]], b = mesh_->nodes()[t[1]], c = mesh_->nodes()[t[2]];
          const double det = cross(b - a, c - a);
          const double l1 = cross(x - a, c - a) / det;
          const double l2 = cross(b - a, x - a) / det;
          const double l0 = 1.0 - l1 - l2;
          const double mn = std::min({l0, l1, l2});
          if (mn > best_min) {
            best_min = mn;
            best = {items_[k], {l0, l1, l2}};
          }
        }
      }
    if (best_min >= -1e-12) return best;
  }
  // Between a boundary chord and the arc: extrapolate from the nearest element.
  if (best.triangle >= 0 && best_min > -0.5) return best;
  return std::nullopt;
}

TriangleLocator::Hit TriangleLocator::locate(Vec2 x) const {
  const auto hit = try_locate(x);
  if (!hit) {
    std::ostringstream msg;
    msg << "point (" << x.x << ", " << x.y << ") lies outside the mesh";
    throw PointOutsideDomain(msg.str());
  }
  return *hit;
}

}  // namespace tbscat

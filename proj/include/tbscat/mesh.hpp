#pragma once

// Quadratic triangular meshes of a disk.
//
// build_mesh produces a Delaunay-refined triangulation whose boundary vertices
// lie on the circle |x| = R and whose edge lengths follow a piecewise size
// field: h inside generic regions, h / screen_factor in the strips
// |x_j| <= b/2 + h around the three screen lines, h / window_factor in the
// angular windows. Triangles are then promoted to six-node elements with
// midside nodes on the straight edges.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tbscat/common.hpp"

namespace tbscat {

enum class Region : std::uint8_t { kGeneric = 0, kScreen = 1, kWindow = 2 };

const char* region_name(Region r);

struct AngularRange {
  double lo = 0.0;  // chart angle, may be negative or exceed 2 pi
  double hi = 0.0;
  bool contains(double angle) const;
};

struct MeshOptions {
  double radius = 10.0;
  double h = 0.5;
  double screen_factor = 1.0;
  double window_factor = 1.0;
  double strip_halfwidth = 0.25;  // b/2; the refined strip is |x_j| <= b/2 + h
  std::vector<AngularRange> windows;
  double min_angle_deg = 20.0;
  std::size_t max_vertices = 20'000'000;
};

// Target edge length at x.
double mesh_size_at(const MeshOptions& opt, Vec2 x);
Region region_at(const MeshOptions& opt, Vec2 x);

struct BoundaryEdge {
  int a = 0;    // vertex, counterclockwise order along the circle
  int b = 0;    // vertex
  int mid = 0;  // midside node
};

struct MeshStats {
  std::size_t vertices = 0;
  std::size_t triangles = 0;
  std::size_t nodes = 0;  // quadratic degrees of freedom
  std::size_t boundary_edges = 0;
  double min_angle_deg = 0.0;
  double max_angle_deg = 0.0;
  double min_edge = 0.0;
  double max_edge = 0.0;
  std::array<double, 3> mean_edge{};  // per region
  std::array<std::size_t, 3> region_triangles{};
  double max_boundary_deviation = 0.0;  // max | |x| - R | over boundary vertices
};

class Mesh {
 public:
  Mesh() = default;
  Mesh(double radius, std::vector<Vec2> nodes, std::size_t vertex_count, std::vector<std::array<int, 6>> triangles,
       std::vector<BoundaryEdge> boundary, std::vector<Region> regions);

  double radius() const { return radius_; }
  const std::vector<Vec2>& nodes() const { return nodes_; }
  // Corner vertices occupy indices [0, vertex_count); midside nodes follow.
  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<std::array<int, 6>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary() const { return boundary_; }
  const std::vector<Region>& regions() const { return regions_; }

  MeshStats stats() const;

  // Plain-text format:
  //   # comment lines (radius, config hash)
  //   N            then N lines "x y"
  //   T            then T lines of six node indices (3 corners ccw, then
  //                midsides of edges 01, 12, 20)
  //   B            then B lines "a b mid" (boundary edges, ccw along the circle)
  //   T            then T lines with the region tag (0 generic, 1 screen, 2 window)
  void write(std::ostream& os, const std::string& header = {}) const;
  static Mesh read(std::istream& is);

 private:
  double radius_ = 0.0;
  std::vector<Vec2> nodes_;
  std::size_t vertex_count_ = 0;
  std::vector<std::array<int, 6>> triangles_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<Region> regions_;
};

// Throws MeshQuality when the refinement cannot reach the angle bound within
// the vertex budget; ConfigInvalid for non-positive sizes.
Mesh build_mesh(const MeshOptions& options);

// Splits every triangle into four through its midside nodes. New boundary
// vertices are projected onto the circle. Region tags are inherited.
Mesh refine_uniform(const Mesh& mesh);

// Expected number of quadratic nodes for the options, from the size field
// and an empirical vertex density calibrated on built meshes.
double estimate_node_count(const MeshOptions& options);

// Bucket-grid point location over the triangles of a mesh.
class TriangleLocator {
 public:
  explicit TriangleLocator(const Mesh& mesh);

  struct Hit {
    int triangle = -1;
    std::array<double, 3> bary{};  // barycentric coordinates w.r.t. the corners
  };

  // Containing triangle; points in the thin gap between a boundary chord and
  // the circle are assigned to the adjacent triangle by extrapolation. Throws
  // PointOutsideDomain when |x| exceeds the radius.
  Hit locate(Vec2 x) const;
  std::optional<Hit> try_locate(Vec2 x) const;

 private:
  const Mesh* mesh_;
  double x0_ = 0.0, y0_ = 0.0, cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<int> start_;
  std::vector<int> items_;
};

}  // namespace tbscat

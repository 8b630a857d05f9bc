#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace meyers {

using Point = Eigen::Vector2d;
using TriangleIndices = std::array<int, 3>;

/// Raised for malformed domains and meshes.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Convex polygon with counterclockwise vertex order.
class Polygon {
 public:
  /// Clockwise input is reversed. Throws MeshError for fewer than three
  /// vertices, repeated or collinear consecutive vertices, or a non-convex
  /// or self-intersecting outline.
  explicit Polygon(std::vector<Point> vertices);

  static Polygon rectangle(double x0, double y0, double x1, double y1);
  static Polygon unit_square() { return rectangle(0.0, 0.0, 1.0, 1.0); }

  const std::vector<Point>& vertices() const { return vertices_; }
  double area() const;
  double diameter() const;

  /// True when p lies on an edge, within `tol` (absolute).
  bool on_boundary(const Point& p, double tol) const;
  bool contains(const Point& p, double tol) const;

  /// Corners (lower-left, upper-right) when the polygon is an axis-aligned
  /// rectangle.
  std::optional<std::pair<Point, Point>> axis_rectangle() const;

 private:
  std::vector<Point> vertices_;
};

/// Conforming triangle mesh of a convex polygon. Immutable.
///
/// Triangles are stored counterclockwise. `boundary_vertices` holds every
/// vertex lying on the polygon boundary, sorted.
class Triangulation {
 public:
  /// Computes all derived per-triangle data. Throws MeshError on
  /// out-of-range indices or zero-area triangles; admissibility is not
  /// checked here (see regularity_report).
  Triangulation(Polygon domain, std::vector<Point> points,
                std::vector<TriangleIndices> triangles);

  const Polygon& domain() const { return domain_; }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<TriangleIndices>& triangles() const { return triangles_; }
  const std::vector<int>& boundary_vertices() const { return boundary_; }
  bool is_boundary(int v) const { return is_boundary_[static_cast<std::size_t>(v)] != 0; }

  int vertex_count() const { return static_cast<int>(points_.size()); }
  int triangle_count() const { return static_cast<int>(triangles_.size()); }

  double area(int t) const { return area_[static_cast<std::size_t>(t)]; }
  /// h_T, the longest side.
  double diameter(int t) const { return diam_[static_cast<std::size_t>(t)]; }
  /// rho_T, twice the inradius.
  double inner_diameter(int t) const { return rho_[static_cast<std::size_t>(t)]; }

  /// h = max h_T.
  double mesh_size() const { return h_; }
  /// sigma = max h_T / rho_T.
  double regularity() const { return sigma_; }

  /// Unique undirected edges (i < j), sorted.
  std::vector<std::pair<int, int>> edges() const;

  double total_area() const;

 private:
  Polygon domain_;
  std::vector<Point> points_;
  std::vector<TriangleIndices> triangles_;
  std::vector<int> boundary_;
  std::vector<char> is_boundary_;
  std::vector<double> area_, diam_, rho_;
  double h_ = 0.0;
  double sigma_ = 0.0;
};

/// Structured union-jack mesh for axis-aligned rectangles (h_target is the
/// grid spacing; the cell count per side is ceil(side / h_target)).
/// Other convex polygons get a centroid fan refined red until
/// mesh_size() <= h_target.
Triangulation triangulate(const Polygon& polygon, double h_target);

/// Splits every triangle into four similar children through edge midpoints.
Triangulation refine_red(const Triangulation& tri);

struct AdmissibilityViolation {
  int first = -1;
  int second = -1;
  std::string reason;
};

struct RegularityReport {
  double h = 0.0;
  double sigma = 0.0;
  bool admissible = true;
  std::vector<AdmissibilityViolation> violations;
  /// |sum of triangle areas - polygon area| / polygon area.
  double area_defect = 0.0;
  /// Every flagged boundary vertex is on the polygon boundary and no
  /// interior vertex is.
  bool boundary_consistent = true;
};

/// Exact h and sigma plus a pairwise admissibility audit. Candidate pairs
/// come from a uniform bucket grid; vertices are identified after snapping
/// to a lattice of spacing 1e-12 * diam(domain). Violations are reported,
/// never thrown: one entry per foreign vertex touching a triangle, per
/// proper edge crossing, and per duplicated triangle.
RegularityReport regularity_report(const Triangulation& tri);

/// Plain-text export: `vertices N triangles M`, N lines `x y`, M lines
/// `i j k`, then `boundary i1 i2 ...`. Vertices are sorted
/// lexicographically and triangles re-indexed accordingly.
void write_mesh(std::ostream& out, const Triangulation& tri);

/// Reads one `x y` pair per line; blank lines and `#` comments are skipped.
Polygon read_polygon(std::istream& in);

}  // namespace meyers

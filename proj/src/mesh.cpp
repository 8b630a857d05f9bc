#include "meyers/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace meyers {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * cross(b - a, c - a);
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (a + s * ab - p).norm();
}

}  // namespace

// ---------------------------------------------------------------- Polygon

Polygon::Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw MeshError("polygon needs at least 3 vertices, got " + std::to_string(n));
  for (const Point& p : vertices_) {
    if (!std::isfinite(p.x()) || !std::isfinite(p.y())) throw MeshError("polygon vertex is not finite");
  }

  double twice_area = 0.0;
  for (std::size_t i = 0; i < n; ++i) twice_area += cross(vertices_[i], vertices_[(i + 1) % n]);
  if (twice_area < 0.0) std::reverse(vertices_.begin(), vertices_.end());

  const double scale = diameter();
  if (!(scale > 0.0)) throw MeshError("degenerate polygon: zero diameter");

  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point e0 = vertices_[(i + 1) % n] - vertices_[i];
    const Point e1 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
    if (e0.norm() <= 1e-12 * scale) throw MeshError("degenerate polygon: repeated vertex " + std::to_string(i));
    const double c = cross(e0, e1);
    if (c <= 1e-12 * e0.norm() * e1.norm()) {
      std::ostringstream msg;
      msg << "polygon is not strictly convex at vertex " << (i + 1) % n
          << " (cross product of consecutive edges = " << c << ")";
      throw MeshError(msg.str());
    }
    turning += std::atan2(c, e0.dot(e1));
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-9) {
    throw MeshError("polygon is self-intersecting (total turning " + std::to_string(turning) + ")");
  }
}

Polygon Polygon::rectangle(double x0, double y0, double x1, double y1) {
  return Polygon({Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)});
}

double Polygon::area() const {
  double s = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) s += cross(vertices_[i], vertices_[(i + 1) % n]);
  return 0.5 * s;
}

double Polygon::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    for (std::size_t j = i + 1; j < vertices_.size(); ++j) d = std::max(d, (vertices_[i] - vertices_[j]).norm());
  return d;
}

bool Polygon::on_boundary(const Point& p, double tol) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_segment_distance(p, vertices_[i], vertices_[(i + 1) % n]) <= tol) return true;
  }
  return false;
}

bool Polygon::contains(const Point& p, double tol) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = vertices_[i];
    const Point& b = vertices_[(i + 1) % n];
    if (cross(b - a, p - a) < -tol * (b - a).norm()) return false;
  }
  return true;
}

std::optional<std::pair<Point, Point>> Polygon::axis_rectangle() const {
  if (vertices_.size() != 4) return std::nullopt;
  for (std::size_t i = 0; i < 4; ++i) {
    const Point e = vertices_[(i + 1) % 4] - vertices_[i];
    if (e.x() != 0.0 && e.y() != 0.0) return std::nullopt;
  }
  Point lo = vertices_[0], hi = vertices_[0];
  for (const Point& p : vertices_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return std::make_pair(lo, hi);
}

// ----------------------------------------------------------- Triangulation

Triangulation::Triangulation(Polygon domain, std::vector<Point> points, std::vector<TriangleIndices> triangles)
    : domain_(std::move(domain)), points_(std::move(points)), triangles_(std::move(triangles)) {
  const int nv = vertex_count();
  const std::size_t nt = triangles_.size();
  area_.resize(nt);
  diam_.resize(nt);
  rho_.resize(nt);
  h_ = 0.0;
  sigma_ = 0.0;
  for (std::size_t t = 0; t < nt; ++t) {
    auto& tri = triangles_[t];
    for (int v : tri) {
      if (v < 0 || v >= nv) throw MeshError("triangle " + std::to_string(t) + " references vertex " + std::to_string(v));
    }
    double a = signed_area(points_[tri[0]], points_[tri[1]], points_[tri[2]]);
    if (a < 0.0) {
      std::swap(tri[1], tri[2]);
      a = -a;
    }
    if (!(a > 0.0)) throw MeshError("triangle " + std::to_string(t) + " has zero area");
    const double l0 = (points_[tri[1]] - points_[tri[0]]).norm();
    const double l1 = (points_[tri[2]] - points_[tri[1]]).norm();
    const double l2 = (points_[tri[0]] - points_[tri[2]]).norm();
    area_[t] = a;
    diam_[t] = std::max({l0, l1, l2});
    rho_[t] = 4.0 * a / (l0 + l1 + l2);
    h_ = std::max(h_, diam_[t]);
    sigma_ = std::max(sigma_, diam_[t] / rho_[t]);
  }

  const double tol = 1e-12 * domain_.diameter();
  is_boundary_.assign(static_cast<std::size_t>(nv), 0);
  for (int v = 0; v < nv; ++v) {
    if (domain_.on_boundary(points_[static_cast<std::size_t>(v)], tol)) {
      is_boundary_[static_cast<std::size_t>(v)] = 1;
      boundary_.push_back(v);
    }
  }
}

std::vector<std::pair<int, int>> Triangulation::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(triangles_.size() * 3);
  for (const auto& t : triangles_) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[static_cast<std::size_t>(k)];
      const int b = t[static_cast<std::size_t>((k + 1) % 3)];
      out.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double Triangulation::total_area() const {
  double s = 0.0;
  for (double a : area_) s += a;
  return s;
}

// ------------------------------------------------------------ construction

namespace {

Triangulation union_jack(const Polygon& poly, const Point& lo, const Point& hi, double spacing) {
  const double w = hi.x() - lo.x();
  const double ht = hi.y() - lo.y();
  const int nx = std::max(1, static_cast<int>(std::ceil(w / spacing - 1e-9)));
  const int ny = std::max(1, static_cast<int>(std::ceil(ht / spacing - 1e-9)));
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? hi.x() : lo.x() + w * i / nx;
      const double y = (j == ny) ? hi.y() : lo.y() + ht * j / ny;
      pts.emplace_back(x, y);
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<TriangleIndices> tris;
  tris.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      }
    }
  }
  return Triangulation(poly, std::move(pts), std::move(tris));
}

}  // namespace

Triangulation triangulate(const Polygon& polygon, double h_target) {
  const double diam = polygon.diameter();
  if (!(h_target > 0.0) || !(h_target < diam)) {
    throw std::invalid_argument("triangulate: h_target must lie in (0, diameter = " + std::to_string(diam) + ")");
  }
  if (auto rect = polygon.axis_rectangle()) {
    return union_jack(polygon, rect->first, rect->second, h_target);
  }
  const auto& vs = polygon.vertices();
  Point centroid = Point::Zero();
  for (const Point& p : vs) centroid += p;
  centroid /= static_cast<double>(vs.size());
  std::vector<Point> pts(vs.begin(), vs.end());
  pts.push_back(centroid);
  const int c = static_cast<int>(vs.size());
  std::vector<TriangleIndices> tris;
  for (int i = 0; i < c; ++i) tris.push_back({i, (i + 1) % c, c});
  Triangulation tri(polygon, std::move(pts), std::move(tris));
  while (tri.mesh_size() > h_target) tri = refine_red(tri);
  return tri;
}

Triangulation refine_red(const Triangulation& tri) {
  std::vector<Point> pts = tri.points();
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = static_cast<int>(pts.size());
    pts.push_back(0.5 * (tri.points()[static_cast<std::size_t>(a)] + tri.points()[static_cast<std::size_t>(b)]));
    midpoint.emplace(key, id);
    return id;
  };
  std::vector<TriangleIndices> out;
  out.reserve(tri.triangles().size() * 4);
  for (const auto& t : tri.triangles()) {
    const int ab = mid(t[0], t[1]);
    const int bc = mid(t[1], t[2]);
    const int ca = mid(t[2], t[0]);
    out.push_back({t[0], ab, ca});
    out.push_back({ab, t[1], bc});
    out.push_back({ca, bc, t[2]});
    out.push_back({ab, bc, ca});
  }
  return Triangulation(tri.domain(), std::move(pts), std::move(out));
}

// ------------------------------------------------------------ admissibility

namespace {

using Snapped = std::pair<std::int64_t, std::int64_t>;

struct SnapGrid {
  Point origin;
  double spacing;
  Snapped operator()(const Point& p) const {
    return {std::llround((p.x() - origin.x()) / spacing), std::llround((p.y() - origin.y()) / spacing)};
  }
};

int orient(const Snapped& a, const Snapped& b, const Snapped& c) {
  const __int128 abx = b.first - a.first, aby = b.second - a.second;
  const __int128 acx = c.first - a.first, acy = c.second - a.second;
  const __int128 d = abx * acy - aby * acx;
  return (d > 0) - (d < 0);
}

bool in_closed_triangle(const Snapped& p, const std::array<Snapped, 3>& t) {
  return orient(t[0], t[1], p) >= 0 && orient(t[1], t[2], p) >= 0 && orient(t[2], t[0], p) >= 0;
}

bool proper_crossing(const Snapped& a, const Snapped& b, const Snapped& c, const Snapped& d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

}  // namespace

RegularityReport regularity_report(const Triangulation& tri) {
  RegularityReport rep;
  rep.h = tri.mesh_size();
  rep.sigma = tri.regularity();
  const double poly_area = tri.domain().area();
  rep.area_defect = std::abs(tri.total_area() - poly_area) / poly_area;

  const double diam = tri.domain().diameter();
  const double tol = 1e-12 * diam;
  for (int v = 0; v < tri.vertex_count(); ++v) {
    const bool geometric = tri.domain().on_boundary(tri.points()[static_cast<std::size_t>(v)], tol);
    if (geometric != tri.is_boundary(v)) rep.boundary_consistent = false;
  }

  Point lo = tri.points().front(), hi = lo;
  for (const Point& p : tri.points()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const SnapGrid snap{lo, 1e-12 * diam};
  const int nt = tri.triangle_count();
  std::vector<std::array<Snapped, 3>> st(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      st[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] =
          snap(tri.points()[static_cast<std::size_t>(tri.triangles()[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)])]);
    }
  }

  // Bucket grid with cell size ~ h.
  const double cell = std::max(rep.h, 1e-300);
  const int gx = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / cell)));
  const int gy = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / cell)));
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(gx * gy));
  auto cell_of = [&](double v, double o, int g) { return std::clamp(static_cast<int>((v - o) / cell), 0, g - 1); };
  std::vector<std::array<int, 4>> boxes(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    const auto& ids = tri.triangles()[static_cast<std::size_t>(t)];
    Point a = tri.points()[static_cast<std::size_t>(ids[0])], b = a;
    for (int v : ids) {
      a = a.cwiseMin(tri.points()[static_cast<std::size_t>(v)]);
      b = b.cwiseMax(tri.points()[static_cast<std::size_t>(v)]);
    }
    auto& box = boxes[static_cast<std::size_t>(t)];
    box = {cell_of(a.x(), lo.x(), gx), cell_of(a.y(), lo.y(), gy), cell_of(b.x(), lo.x(), gx), cell_of(b.y(), lo.y(), gy)};
    for (int j = box[1]; j <= box[3]; ++j)
      for (int i = box[0]; i <= box[2]; ++i) buckets[static_cast<std::size_t>(j * gx + i)].push_back(t);
  }

  std::set<std::tuple<int, std::int64_t, std::int64_t, int>> seen_vertex_hits;
  std::set<std::pair<int, int>> seen_pairs;
  auto record = [&](int a, int b, std::string why) {
    rep.violations.push_back({std::min(a, b), std::max(a, b), std::move(why)});
  };

  for (std::size_t bi = 0; bi < buckets.size(); ++bi) {
    const auto& bucket = buckets[bi];
    const int ci = static_cast<int>(bi) % gx, cj = static_cast<int>(bi) / gx;
    for (std::size_t x = 0; x < bucket.size(); ++x) {
      for (std::size_t y = x + 1; y < bucket.size(); ++y) {
        const int ta = std::min(bucket[x], bucket[y]);
        const int tb = std::max(bucket[x], bucket[y]);
        // Visit each pair once: in the first cell shared by both boxes.
        const auto& ba = boxes[static_cast<std::size_t>(ta)];
        const auto& bb = boxes[static_cast<std::size_t>(tb)];
        if (ci != std::max(ba[0], bb[0]) || cj != std::max(ba[1], bb[1])) continue;

        const auto& A = st[static_cast<std::size_t>(ta)];
        const auto& B = st[static_cast<std::size_t>(tb)];
        int shared = 0;
        for (const auto& p : A)
          for (const auto& q : B) shared += (p == q);
        if (shared == 3) {
          record(ta, tb, "duplicate triangle");
          continue;
        }
        auto foreign_vertices = [&](const std::array<Snapped, 3>& P, const std::array<Snapped, 3>& Q, int tp, int tq) {
          for (const auto& p : P) {
            if (std::find(Q.begin(), Q.end(), p) != Q.end()) continue;
            if (in_closed_triangle(p, Q) && seen_vertex_hits.emplace(tq, p.first, p.second, 0).second) {
              record(tp, tq, "vertex of triangle " + std::to_string(tp) + " lies on triangle " + std::to_string(tq) +
                                 " without being one of its vertices");
            }
          }
        };
        foreign_vertices(A, B, ta, tb);
        foreign_vertices(B, A, tb, ta);
        bool crossing = false;
        for (int i = 0; i < 3 && !crossing; ++i)
          for (int j = 0; j < 3 && !crossing; ++j)
            crossing = proper_crossing(A[static_cast<std::size_t>(i)], A[static_cast<std::size_t>((i + 1) % 3)],
                                       B[static_cast<std::size_t>(j)], B[static_cast<std::size_t>((j + 1) % 3)]);
        if (crossing && seen_pairs.emplace(ta, tb).second) record(ta, tb, "edges cross");
      }
    }
  }
  std::sort(rep.violations.begin(), rep.violations.end(),
            [](const auto& a, const auto& b) { return std::tie(a.first, a.second) < std::tie(b.first, b.second); });
  rep.admissible = rep.violations.empty();
  return rep;
}

// ---------------------------------------------------------------------- I/O

void write_mesh(std::ostream& out, const Triangulation& tri) {
  const int nv = tri.vertex_count();
  std::vector<int> order(static_cast<std::size_t>(nv));
  for (int i = 0; i < nv; ++i) order[static_cast<std::size_t>(i)] = i;
  const auto& pts = tri.points();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Point& p = pts[static_cast<std::size_t>(a)];
    const Point& q = pts[static_cast<std::size_t>(b)];
    return std::tie(p.x(), p.y()) < std::tie(q.x(), q.y());
  });
  std::vector<int> rank(static_cast<std::size_t>(nv));
  for (int i = 0; i < nv; ++i) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;

  std::vector<TriangleIndices> tris;
  for (const auto& t : tri.triangles()) {
    TriangleIndices r{rank[static_cast<std::size_t>(t[0])], rank[static_cast<std::size_t>(t[1])],
                      rank[static_cast<std::size_t>(t[2])]};
    // Keep orientation, start at the smallest index.
    std::rotate(r.begin(), std::min_element(r.begin(), r.end()), r.end());
    tris.push_back(r);
  }
  std::sort(tris.begin(), tris.end());

  std::vector<int> boundary;
  for (int v : tri.boundary_vertices()) boundary.push_back(rank[static_cast<std::size_t>(v)]);
  std::sort(boundary.begin(), boundary.end());

  const auto old_precision = out.precision(17);
  out << "vertices " << nv << " triangles " << tris.size() << '\n';
  for (int i : order) out << pts[static_cast<std::size_t>(i)].x() << ' ' << pts[static_cast<std::size_t>(i)].y() << '\n';
  for (const auto& t : tris) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "boundary";
  for (int v : boundary) out << ' ' << v;
  out << '\n';
  out.precision(old_precision);
}

Polygon read_polygon(std::istream& in) {
  std::vector<Point> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double x, y;
    if (!(ss >> x)) continue;
    if (!(ss >> y)) throw MeshError("polygon file line " + std::to_string(lineno) + ": expected `x y`");
    pts.emplace_back(x, y);
  }
  return Polygon(std::move(pts));
}

}  // namespace meyers

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "meyers/mesh.hpp"

using namespace meyers;

namespace {

double right_isoceles_sigma() {
  // Legs 1: diameter sqrt 2, inradius (2 - sqrt 2) / 2.
  return std::sqrt(2.0) / (2.0 - std::sqrt(2.0));
}

}  // namespace

TEST_CASE("unit square at h 1/2 gives 8 congruent right triangles") {
  const Triangulation tri = triangulate(Polygon::unit_square(), 0.5);
  CHECK(tri.triangle_count() == 8);
  CHECK(tri.vertex_count() == 9);
  CHECK(tri.mesh_size() == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
  CHECK(tri.regularity() == doctest::Approx(right_isoceles_sigma()).epsilon(1e-13));
  for (int t = 0; t < tri.triangle_count(); ++t) CHECK(tri.area(t) == doctest::Approx(0.125).epsilon(1e-15));
  const RegularityReport rep = regularity_report(tri);
  CHECK(rep.admissible);
  CHECK(rep.violations.empty());
  CHECK(rep.boundary_consistent);
  CHECK(rep.h == doctest::Approx(std::sqrt(2.0) / 2));
}

TEST_CASE("unit square at h 1/4 has 32 triangles and the same sigma") {
  const Triangulation tri = triangulate(Polygon::unit_square(), 0.25);
  CHECK(tri.triangle_count() == 32);
  CHECK(tri.regularity() == doctest::Approx(right_isoceles_sigma()).epsilon(1e-13));
}

TEST_CASE("[-1,1]^2 at h 1/2 has 32 triangles and the origin as a vertex") {
  const Triangulation tri = triangulate(Polygon::rectangle(-1, -1, 1, 1), 0.5);
  CHECK(tri.triangle_count() == 32);
  bool origin = false;
  for (const Point& p : tri.points()) origin = origin || p.norm() == 0.0;
  CHECK(origin);
}

TEST_CASE("red refinement") {
  const Triangulation tri = triangulate(Polygon::unit_square(), 0.5);
  const Triangulation once = refine_red(tri);
  CHECK(once.triangle_count() == 32);
  CHECK(once.mesh_size() == doctest::Approx(tri.mesh_size() / 2).epsilon(1e-14));
  CHECK(once.regularity() == doctest::Approx(tri.regularity()).epsilon(1e-13));
  const Triangulation twice = refine_red(once);
  CHECK(twice.triangle_count() == 128);
  CHECK(twice.mesh_size() == doctest::Approx(tri.mesh_size() / 4).epsilon(1e-14));
  CHECK(regularity_report(twice).admissible);

  // sigma is invariant for a generic triangle too.
  const Polygon p({Point(0, 0), Point(3, 0.4), Point(1.1, 2)});
  const Triangulation single(p, p.vertices(), {{0, 1, 2}});
  const Triangulation r1 = refine_red(single);
  const Triangulation r3 = refine_red(refine_red(r1));
  CHECK(r1.regularity() == doctest::Approx(single.regularity()).epsilon(1e-12));
  CHECK(r3.regularity() == doctest::Approx(single.regularity()).epsilon(1e-12));
  CHECK(r3.mesh_size() == doctest::Approx(single.mesh_size() / 8).epsilon(1e-14));
  CHECK(regularity_report(r3).admissible);
}

TEST_CASE("equilateral triangle has sigma sqrt 3") {
  const double s = 2.0;
  const Polygon p({Point(0, 0), Point(s, 0), Point(s / 2, s * std::sqrt(3.0) / 2)});
  const Triangulation tri(p, p.vertices(), {{0, 1, 2}});
  CHECK(tri.regularity() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(tri.inner_diameter(0) == doctest::Approx(s / std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("a hanging node is one violation") {
  const Polygon sq = Polygon::unit_square();
  const std::vector<Point> pts{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1), Point(0.5, 0.5)};
  const Triangulation tri(sq, pts, {{0, 1, 2}, {0, 4, 3}, {4, 2, 3}});
  const RegularityReport rep = regularity_report(tri);
  CHECK_FALSE(rep.admissible);
  CHECK(rep.violations.size() == 1);
  CHECK(rep.area_defect < 1e-15);
}

TEST_CASE("every produced mesh covers its domain and is admissible") {
  const std::vector<Polygon> domains{
      Polygon::unit_square(), Polygon::rectangle(-1, -1, 1, 1), Polygon::rectangle(0, 0, 3, 1),
      Polygon({Point(0, 0), Point(2, 0), Point(2.5, 1), Point(1, 2.2), Point(-0.4, 1)})};
  for (const Polygon& p : domains) {
    for (double h : {0.5, 0.2, 0.1}) {
      const Triangulation tri = triangulate(p, h);
      const RegularityReport rep = regularity_report(tri);
      CHECK(rep.area_defect < 1e-12);
      CHECK(rep.admissible);
      CHECK(rep.boundary_consistent);
      CHECK(tri.mesh_size() <= h * std::sqrt(2.0) + 1e-12);
    }
  }
}

TEST_CASE("sigma is constant across a structured refinement family") {
  const double sigma = triangulate(Polygon::unit_square(), 0.5).regularity();
  for (int level = 2; level <= 6; ++level)
    CHECK(triangulate(Polygon::unit_square(), std::ldexp(1.0, -level)).regularity() ==
          doctest::Approx(sigma).epsilon(1e-12));
}

TEST_CASE("Euler relation V - E + F = 1") {
  for (double h : {0.5, 0.125}) {
    const Triangulation tri = triangulate(Polygon({Point(0, 0), Point(2, 0), Point(1, 1.5)}), h);
    CHECK(tri.vertex_count() - static_cast<int>(tri.edges().size()) + tri.triangle_count() == 1);
  }
}

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(Polygon({Point(0, 0), Point(1, 0)}), MeshError);
  CHECK_THROWS_AS(Polygon({Point(0, 0), Point(1, 0), Point(2, 0)}), MeshError);
  CHECK_THROWS_AS(Polygon({Point(0, 0), Point(2, 0), Point(0.5, 0.5), Point(0, 2)}), MeshError);
  // Clockwise input is accepted and reoriented.
  const Polygon cw({Point(0, 0), Point(0, 1), Point(1, 1), Point(1, 0)});
  CHECK(cw.area() == doctest::Approx(1.0));
  CHECK_THROWS_AS(Triangulation(Polygon::unit_square(), {Point(0, 0), Point(1, 0), Point(2, 0)}, {{0, 1, 2}}),
                  MeshError);
}

TEST_CASE("mesh export is sorted and reads back as a polygon file") {
  std::istringstream poly("# square\n0 0\n1 0\n\n1 1\n0 1\n");
  const Polygon p = read_polygon(poly);
  CHECK(p.vertices().size() == 4);
  const Triangulation tri = triangulate(p, 0.5);
  std::ostringstream out;
  write_mesh(out, tri);
  std::istringstream in(out.str());
  std::string word;
  int nv = 0, nt = 0;
  in >> word >> nv >> word >> nt;
  CHECK(nv == 9);
  CHECK(nt == 8);
  double px = -1, py = -1;
  for (int i = 0; i < nv; ++i) {
    double x, y;
    in >> x >> y;
    CHECK((x > px || (x == px && y > py)));
    px = x;
    py = y;
  }
  for (int i = 0; i < nt; ++i) {
    int a, b, c;
    in >> a >> b >> c;
    CHECK(std::max({a, b, c}) < nv);
  }
  in >> word;
  CHECK(word == "boundary");
  int count = 0, v;
  while (in >> v) ++count;
  CHECK(count == 8);
}

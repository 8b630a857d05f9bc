#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "meyers/fit.hpp"
#include "meyers/galerkin.hpp"
#include "oracles.hpp"

using namespace meyers;

namespace {

Triangulation square(int level) { return triangulate(Polygon::unit_square(), std::ldexp(1.0, -level)); }

P1System torsion_system(int level) {
  P1System sys = assemble(square(level), CoefficientField::identity());
  set_load(sys, moments_from_callable(sys, [](const Point&) { return -1.0; }));
  return sys;
}

int vertex_at(const Triangulation& tri, double x, double y) {
  for (int v = 0; v < tri.vertex_count(); ++v)
    if ((tri.points()[v] - Point(x, y)).norm() < 1e-12) return v;
  return -1;
}

}  // namespace

TEST_CASE("identity stiffness on the 8-triangle square") {
  const P1System sys = assemble(square(1), CoefficientField::identity());
  REQUIRE(sys.unknowns() == 1);
  CHECK(sys.stiffness.coeff(0, 0) == doctest::Approx(4.0).epsilon(1e-14));
  // Same entry from the reconstructed hat function.
  const P1Field hat(sys.mesh, sys.expand(Eigen::VectorXd::Ones(1)));
  CHECK(std::pow(hat.grad_lp_norm(2.0), 2) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(sys.symmetric);
}

TEST_CASE("stiffness is linear in A") {
  const Triangulation tri = square(3);
  const P1System one = assemble(tri, CoefficientField::checkerboard(1, 4));
  const P1System two = assemble(tri, CoefficientField::checkerboard(2, 8));
  CHECK(Eigen::MatrixXd(two.stiffness - 2.0 * one.stiffness).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("nonsymmetric coefficient") {
  Eigen::Matrix2d a;
  a << 1, 1, 0, 1;
  const CoefficientField field = CoefficientField::constant(a);
  CHECK(field.ellipticity() == doctest::Approx(0.5));
  const P1System sys = assemble(square(3), field);
  CHECK_FALSE(sys.symmetric);
  // A constant antisymmetric part integrates to zero against gradients of
  // functions vanishing on the boundary, so K stays symmetric.
  const Eigen::MatrixXd k(sys.stiffness);
  CHECK((k - k.transpose()).cwiseAbs().maxCoeff() < 1e-14);

  const CoefficientField varying(
      "shear",
      [](const Point& x) {
        Eigen::Matrix2d m;
        m << 1.0, std::sin(6.0 * x.x() + 2.0 * x.y()), 0.0, 1.0;
        return m;
      },
      0.5, 1.0);
  const P1System vsys = assemble(square(3), varying);
  CHECK_FALSE(vsys.symmetric);
  const Eigen::MatrixXd kv(vsys.stiffness);
  CHECK((kv - kv.transpose()).cwiseAbs().maxCoeff() > 1e-3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (kv + kv.transpose()));
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK(coercivity_constant(vsys) > 0.0);
  P1System loaded = vsys;
  set_load(loaded, moments_from_callable(loaded, [](const Point& p) { return std::sin(3 * p.x()) + p.y(); }));
  const Solution lu = solve(loaded);
  CHECK(lu.residual < 1e-10);
  CHECK(lhuh_defect(loaded, lu) < 1e-9);
  const Solution it = solve(loaded, SolverKind::bicgstab);
  CHECK((it.u - lu.u).cwiseAbs().maxCoeff() < 1e-8 * lu.u.cwiseAbs().maxCoeff());
}

TEST_CASE("loads") {
  P1System sys = assemble(square(3), CoefficientField::identity());
  CHECK(moments_from_callable(sys, [](const Point&) { return 0.0; }).isZero(0.0));
  const Eigen::VectorXd ones = moments_from_callable(sys, [](const Point&) { return 1.0; });
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(sys.unknowns());
  const Triangulation& tri = sys.mesh;
  for (int t = 0; t < tri.triangle_count(); ++t)
    for (int v : tri.triangles()[t])
      if (sys.unknown[v] >= 0) expected[sys.unknown[v]] += tri.area(t) / 3.0;
  CHECK((ones - expected).cwiseAbs().maxCoeff() < 1e-15);
  set_load(sys, ones);
  CHECK((sys.load + expected).cwiseAbs().maxCoeff() < 1e-15);
  const RealFunction samples = RealFunction::Ones(tri.vertex_count());
  CHECK((moments_from_samples(sys, samples) - expected).cwiseAbs().maxCoeff() < 1e-15);
  const Eigen::VectorXd div = moments_from_divergence(sys, [](const Point&) { return Eigen::Vector2d(1.0, 0.0); });
  CHECK(div.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("zero load gives zero solution") {
  P1System sys = assemble(square(3), CoefficientField::smooth());
  set_load(sys, Eigen::VectorXd::Zero(sys.unknowns()));
  const Solution s = solve(sys);
  CHECK(s.u.isZero(0.0));
  CHECK(apply_Lh(sys, RealFunction(RealFunction::Zero(sys.mesh.vertex_count()))).isZero(0.0));
}

TEST_CASE("torsion problem: series oracle and reconstruction at the center") {
  const double ref = oracle::torsion_double_series(0.5, 0.5);
  CHECK(ref == doctest::Approx(0.0736713).epsilon(2e-6));
  const TorsionSolution single;
  for (const Point& p : {Point(0.5, 0.5), Point(0.2, 0.7), Point(0.9, 0.1), Point(0.35, 0.5)})
    CHECK(single.u(p) == doctest::Approx(oracle::torsion_double_series(p.x(), p.y())).epsilon(1e-6));
  // Gradient by central differences of the single series.
  const double d = 1e-5;
  const Point p(0.3, 0.6);
  const Eigen::Vector2d fd((single.u(p + Point(d, 0)) - single.u(p - Point(d, 0))) / (2 * d),
                           (single.u(p + Point(0, d)) - single.u(p - Point(0, d))) / (2 * d));
  CHECK((single.grad(p) - fd).norm() < 1e-8);

  const P1System sys = torsion_system(5);
  const Solution s = solve(sys);
  CHECK(lhuh_defect(sys, s) < 1e-9);
  const P1Field field(sys.mesh, s.u);
  CHECK(std::abs(field(Point(0.5, 0.5)) - ref) <= 0.002);
}

TEST_CASE("Galerkin orthogonality and the discrete operator identity") {
  P1System sys = assemble(square(4), CoefficientField::checkerboard(1, 4));
  set_load(sys, moments_from_callable(sys, [](const Point& p) { return 1.0 + p.x() * p.y(); }));
  const Solution s = solve(sys);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd v(sys.unknowns());
    for (auto& c : v) c = n(rng);
    const RealFunction vf = sys.expand(v);
    const double q = bilinear_form(sys, s.u, vf);
    const double f_rv = v.dot(sys.moments);
    CHECK(std::abs(q + f_rv) <= 1e-9 * std::abs(f_rv));
  }
  const RealFunction lhu = apply_Lh(sys, s.u);
  const RealFunction fh = discrete_load(sys);
  CHECK((lhu + fh).cwiseAbs().maxCoeff() <= 1e-9 * fh.cwiseAbs().maxCoeff());
}

TEST_CASE("hat functions") {
  const P1System sys = assemble(square(3), CoefficientField::identity());
  const Eigen::VectorXd m = sys.unknown_measure();
  for (int i : {0, 10, 24, 48}) {
    const RealFunction delta = sys.expand(Eigen::VectorXd::Unit(sys.unknowns(), i));
    const P1Field hat(sys.mesh, delta);
    CHECK(std::pow(hat.grad_lp_norm(2.0), 2) == doctest::Approx(sys.stiffness.coeff(i, i)).epsilon(1e-13));
    CHECK(m[i] * apply_Lh(sys, delta)[sys.interior[i]] == doctest::Approx(sys.stiffness.coeff(i, i)).epsilon(1e-13));
  }
  const RealFunction u = RealFunction::Random(sys.mesh.vertex_count());
  const P1Field field(sys.mesh, u);
  for (int v = 0; v < sys.mesh.vertex_count(); ++v) CHECK(field(sys.mesh.points()[v]) == doctest::Approx(u[v]).epsilon(1e-13));
}

TEST_CASE("transfer to a finer mesh keeps coarse nodal values") {
  const Triangulation coarse = square(3), fine = square(4);
  const RealFunction u = RealFunction::Random(coarse.vertex_count());
  const RealFunction moved = transfer(P1Field(coarse, u), fine);
  for (int v = 0; v < coarse.vertex_count(); ++v) {
    const int w = vertex_at(fine, coarse.points()[v].x(), coarse.points()[v].y());
    REQUIRE(w >= 0);
    CHECK(moved[w] == doctest::Approx(u[v]).epsilon(1e-13));
  }
}

TEST_CASE("norm equivalence brackets are finite and positive") {
  const auto brackets = norm_equivalence_study(square(4), {2.0, 2.2, 4.0}, 0.5, 20, 3);
  REQUIRE(brackets.size() == 3);
  for (const auto& b : brackets) {
    CHECK(b.lp_min > 0.0);
    CHECK(b.lp_min <= b.lp_max);
    CHECK(b.grad_min > 0.0);
    CHECK(b.grad_min <= b.grad_max);
    CHECK(b.holder_min > 0.0);
    CHECK(b.holder_min <= b.holder_max);
    CHECK(std::isfinite(b.lp_max + b.grad_max + b.holder_max));
  }
}

TEST_CASE("operator norms of L_h and its inverse are h-independent") {
  std::vector<double> inverse, forward;
  for (int level = 2; level <= 5; ++level) {
    const OperatorNorms n = hilbert_operator_norms(assemble(square(level), CoefficientField::identity()));
    inverse.push_back(n.inverse_norm);
    forward.push_back(n.norm);
  }
  CHECK(spread(inverse) < 2.0);
  CHECK(spread(forward) < 2.0);
}

TEST_CASE("radial example: annihilation where the cutoff is one") {
  const double eps = 0.5;
  const CoefficientField a = CoefficientField::meyers(eps);
  const MeyersSolution sol(eps);
  CHECK(sol.critical_exponent() == doctest::Approx(4.0));
  const std::vector<Point> pts{Point(0.1, 0.05), Point(-0.08, 0.15), Point(0.02, -0.2), Point(-0.12, -0.1)};
  double prev = 0.0;
  for (double delta : {4e-3, 2e-3, 1e-3}) {
    double worst = 0.0;
    for (const Point& p : pts) worst = std::max(worst, std::abs(oracle::fd_divergence(a, sol, p, delta)));
    if (prev > 0.0) CHECK(worst < prev / 3.0);
    prev = worst;
  }
  CHECK(prev < 1e-3);
  for (const Point& p : pts) CHECK(sol.f(p) == 0.0);
  // In the cutoff annulus the closed form f matches the difference quotient.
  for (const Point& p : {Point(0.4, 0.1), Point(-0.3, 0.35), Point(0.1, -0.6)})
    CHECK(sol.f(p) == doctest::Approx(oracle::fd_divergence(a, sol, p, 1e-4)).epsilon(1e-6));
}

TEST_CASE("radial coefficient constants and integrability threshold") {
  const CoefficientField a = CoefficientField::meyers(0.5);
  CHECK(a.ellipticity() == doctest::Approx(0.25));
  CHECK(a.bound() == doctest::Approx(1.0));
  const EllipticityAudit audit = audit_coefficient(a, triangulate(Polygon::rectangle(-1, -1, 1, 1), 0.125), 5);
  CHECK(audit.ellipticity_ok);
  CHECK(audit.bound_ok);
  CHECK(audit.observed_ellipticity >= 0.25 - 1e-12);
  CHECK(audit.observed_ellipticity <= 0.26);
  const MeyersSolution sol(0.5);
  // |grad u| ~ r^{eps - 1} near the origin.
  const double g1 = sol.grad(Point(0.02, 0.01)).norm(), g2 = sol.grad(Point(0.01, 0.005)).norm();
  CHECK(g2 / g1 == doctest::Approx(std::pow(2.0, 0.5)).epsilon(1e-12));
  // int_delta^1 r^{(eps - 1) p + 1} dr settles as delta -> 0 iff p < 4.
  auto radial = [](double p, double delta) {
    const int n = 20000;
    const double a0 = std::log(delta), step = -a0 / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = std::exp(a0 + (i + 0.5) * step);
      s += std::pow(r, -0.5 * p + 2.0) * step;  // extra r from dr = r d(log r)
    }
    return s;
  };
  CHECK(radial(3.5, 1e-12) - radial(3.5, 1e-8) < 0.1);
  CHECK(radial(4.5, 1e-12) - radial(4.5, 1e-8) > 100.0);
}

TEST_CASE("solution export") {
  const P1System sys = torsion_system(2);
  const Solution s = solve(sys);
  std::ostringstream out;
  write_solution(out, sys, s.u);
  CHECK(out.str().rfind("vertex_id,x,y,u\n", 0) == 0);
}

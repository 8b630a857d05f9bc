#include <cmath>
#include <random>

#include "doctest.h"
#include "meyers/fit.hpp"
#include "meyers/spaces.hpp"
#include "oracles.hpp"

using namespace meyers;

namespace {

WeightedGraph square_mesh_graph(int level) {
  return from_triangulation(triangulate(Polygon::unit_square(), std::ldexp(1.0, -level)));
}

RealFunction zero_boundary_random(const WeightedGraph& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  RealFunction f(g.vertex_count());
  for (int x = 0; x < g.vertex_count(); ++x) f[x] = g.is_boundary(x) ? 0.0 : n(rng);
  return f;
}

// Per-vertex comparison of sum_y |df|^p mu with m h_x^{-p} (sum_y |f(y) - f(x)|^2)^{p/2}.
double edge_gradient_bracket(const WeightedGraph& g, double p) {
  const double n = g.max_degree();
  const double upper = g.weight_ratio() * std::pow(n, std::max(0.0, 1.0 / p - 0.5));
  const double lower = std::pow(n * g.measure_ratio(), 1.0 / p) * std::pow(n, std::max(0.0, 0.5 - 1.0 / p));
  return std::max(upper, lower);
}

}  // namespace

TEST_CASE("differential") {
  const WeightedGraph two = path_graph({2.0});
  const auto df = differential(two, RealFunction((RealFunction(2) << 0.0, 6.0).finished()));
  CHECK(df.at(two, 0, 0) == 3.0);
  CHECK(df.at(two, 0, 1) == -3.0);
  std::mt19937_64 rng(1);
  const WeightedGraph g = oracle::random_graph(20, 20, rng);
  CHECK(differential(g, RealFunction(RealFunction::Constant(20, 4.2))).values.isZero(0.0));
  const RealFunction f = RealFunction::Random(20), h = RealFunction::Random(20);
  const auto lin = differential(g, RealFunction(2.5 * f - 0.7 * h));
  const RealFunction expected = 2.5 * differential(g, f).values - 0.7 * differential(g, h).values;
  CHECK((lin.values - expected).cwiseAbs().maxCoeff() < 1e-14);
  // Both orientations of every edge.
  const auto df2 = differential(g, f);
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    CHECK(df2.at(g, e, ed.u) == doctest::Approx((f[ed.v] - f[ed.u]) / ed.h));
    CHECK(df2.at(g, e, ed.v) == -df2.at(g, e, ed.u));
  }
}

TEST_CASE("gradient length") {
  const WeightedGraph star(4, {{0, 1, 1.0, 1.0}, {0, 2, 1.0, 1.0}, {0, 3, 1.0, 1.0}});
  const RealFunction ind = RealFunction::Unit(4, 0);
  CHECK(gradient_length(star, ind)[0] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(gradient_length(star, RealFunction(RealFunction::Constant(4, -2.0))).isZero(0.0));
}

TEST_CASE("edge and vertex gradient norms are equivalent") {
  std::mt19937_64 rng(2);
  for (const WeightedGraph& g : {square_mesh_graph(3), oracle::random_graph(30, 45, rng)}) {
    for (double p : {1.5, 2.0, 4.0}) {
      const double k = edge_gradient_bracket(g, p);
      for (int trial = 0; trial < 10; ++trial) {
        const RealFunction f = RealFunction::Random(g.vertex_count());
        const double ratio = edge_lp_norm(g, differential(g, f), p) / lp_norm(g, gradient_length(g, f), p);
        CHECK(ratio <= k);
        CHECK(ratio >= 1.0 / k);
      }
    }
  }
}

TEST_CASE("norms of indicators and two-point Hoelder seminorm") {
  const WeightedGraph g = square_mesh_graph(2);
  for (int x : {0, 7, 12}) {
    const RealFunction ind = RealFunction::Unit(g.vertex_count(), x);
    for (double p : {1.0, 1.5, 2.0, 4.0}) CHECK(lp_norm(g, ind, p) == doctest::Approx(std::pow(g.m(x), 1.0 / p)).epsilon(1e-14));
    CHECK(lp_norm(g, ind, kInfinity) == 1.0);
  }
  const RealFunction f = (RealFunction(3) << 1.0, -4.0, 2.0).finished();
  CHECK(lp_norm(path_graph({1, 1}), f, kInfinity) == 4.0);
  const WeightedGraph two = path_graph({1.0});
  CHECK(holder_seminorm(two, RealFunction(RealFunction::Unit(2, 0)), 0.5).seminorm == 1.0);
}

TEST_CASE("Hoelder seminorm against all pairs") {
  std::mt19937_64 rng(4);
  const WeightedGraph g = oracle::random_graph(25, 30, rng);
  const Eigen::MatrixXd d = oracle::all_pairs(g);
  const RealFunction f = RealFunction::Random(25);
  for (double eta : {0.25, 0.5, 1.0}) {
    double best = 0.0;
    for (int x = 0; x < 25; ++x)
      for (int y = 0; y < 25; ++y)
        if (x != y) best = std::max(best, std::abs(f[x] - f[y]) / std::pow(d(x, y), eta));
    const HolderResult r = holder_seminorm(g, f, eta);
    CHECK(r.exact);
    CHECK(r.seminorm == doctest::Approx(best).epsilon(1e-14));
    const NormReport rep = norm_report(g, f, 2.0, eta);
    CHECK(rep.holder_norm == doctest::Approx(best + f.cwiseAbs().maxCoeff()).epsilon(1e-14));
  }
}

TEST_CASE("W1p is a norm") {
  std::mt19937_64 rng(6);
  const WeightedGraph g = oracle::random_graph(30, 30, rng);
  for (double p : {1.5, 2.0, 3.0}) {
    for (int trial = 0; trial < 10; ++trial) {
      const RealFunction f = RealFunction::Random(30), h = RealFunction::Random(30);
      const double nf = w1p_norm(g, f, p), nh = w1p_norm(g, h, p);
      CHECK(w1p_norm(g, RealFunction(-3.5 * f), p) == doctest::Approx(3.5 * nf).epsilon(1e-12));
      CHECK(w1p_norm(g, RealFunction(f + h), p) <= (nf + nh) * (1 + 1e-12));
    }
  }
}

TEST_CASE("dual norm closed form with one interior vertex") {
  const WeightedGraph g = square_mesh_graph(1);
  const int x = g.interior()[0];
  CHECK(dual_norm(g, RealFunction(RealFunction::Zero(g.vertex_count())), 2.0, DualMode::exact_p2).value == 0.0);
  CHECK(dual_norm(g, RealFunction(RealFunction::Zero(g.vertex_count())), 3.0, DualMode::ascent).value == 0.0);
  // v = s delta_x: <f, v> = m s, ||v||^2 = m s^2 + 2 s^2 sum mu / h^2.
  double energy = g.m(x);
  for (const auto& inc : g.neighbors(x)) energy += 2.0 * g.edge(inc.edge).mu / std::pow(g.edge(inc.edge).h, 2);
  const DualResult r = dual_norm(g, RealFunction(RealFunction::Unit(g.vertex_count(), x)), 2.0, DualMode::exact_p2);
  CHECK(r.value == doctest::Approx(g.m(x) / std::sqrt(energy)).epsilon(1e-14));
  CHECK(r.value == doctest::Approx(3.0 / std::sqrt(19.0)).epsilon(1e-14));
}

TEST_CASE("dual norm modes and duality") {
  const WeightedGraph g = square_mesh_graph(3);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 4; ++trial) {
    const RealFunction f = zero_boundary_random(g, rng);
    const DualResult exact = dual_norm(g, f, 2.0, DualMode::exact_p2);
    DualOptions hilbert;
    hilbert.norm = TestNorm::hilbert_edge;
    const DualResult ascent = dual_norm(g, f, 2.0, DualMode::ascent, hilbert);
    CHECK(ascent.value <= exact.value * (1 + 1e-9));
    CHECK(ascent.value >= 0.98 * exact.value);
    // Sum-type test norm: between the Hilbertian value divided by sqrt 2 and the Hilbertian value.
    const DualResult summed = dual_norm(g, f, 2.0, DualMode::ascent, DualOptions{TestNorm::sum_edge});
    CHECK(summed.value <= exact.value * (1 + 1e-9));
    CHECK(summed.value >= exact.value / std::sqrt(2.0) * 0.98);
    const DualResult graded = dual_norm(g, f, 2.2, DualMode::ascent);
    CHECK(graded.value <= graded.upper_bound * (1 + 1e-12));

    // <f, v> <= ||f||_* ||v|| for the Hilbertian test norm.
    for (int k = 0; k < 10; ++k) {
      const RealFunction v = zero_boundary_random(g, rng);
      const double nv = std::sqrt(std::pow(lp_norm(g, v, 2.0), 2) + std::pow(edge_lp_norm(g, differential(g, v), 2.0), 2));
      CHECK(pairing(g, f, v) <= exact.value * nv * (1 + 1e-12));
    }
    const RealFunction h = zero_boundary_random(g, rng);
    const double nh = dual_norm(g, h, 2.0, DualMode::exact_p2).value;
    CHECK(dual_norm(g, RealFunction(f + h), 2.0, DualMode::exact_p2).value <= (exact.value + nh) * (1 + 1e-12));
    CHECK(dual_norm(g, RealFunction(-2.0 * f), 2.0, DualMode::exact_p2).value == doctest::Approx(2 * exact.value));
  }
  CHECK_THROWS(dual_norm(g, RealFunction(RealFunction::Ones(g.vertex_count())), 2.5, DualMode::exact_p2));
}

TEST_CASE("L2 embeds into W^{-1,p} with a refinement-stable constant") {
  std::vector<double> ratios;
  for (int level = 2; level <= 5; ++level) {
    const WeightedGraph g = square_mesh_graph(level);
    RealFunction f(g.vertex_count());
    for (int x = 0; x < g.vertex_count(); ++x) f[x] = g.is_boundary(x) ? 0.0 : 1.0;
    const DualResult r = dual_norm(g, f, 2.2, DualMode::ascent);
    ratios.push_back(r.value / lp_norm(g, f, 2.0));
  }
  CHECK(spread(ratios) < 2.0);
}

TEST_CASE("maximal function") {
  const WeightedGraph g = square_mesh_graph(2);
  const RealFunction c = RealFunction::Constant(g.vertex_count(), 1.7);
  CHECK((maximal_function(g, c).array() - 1.7).abs().maxCoeff() < 1e-14);
  const RealFunction spike = -3.0 * RealFunction::Unit(g.vertex_count(), 12);
  CHECK(maximal_function(g, spike)[12] == doctest::Approx(3.0));

  std::mt19937_64 rng(10);
  for (int n : {6, 15, 28, 40}) {
    const WeightedGraph rg = oracle::random_graph(n, n / 2, rng);
    const RealFunction f = RealFunction::Random(n);
    const RealFunction mf = maximal_function(rg, f);
    const Eigen::VectorXd ref = oracle::maximal_function(rg, f);
    CHECK((mf - ref).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((mf.array() >= f.cwiseAbs().array() - 1e-15).all());
    CHECK((maximal_function(rg, RealFunction(4.0 * f)) - 4.0 * mf).cwiseAbs().maxCoeff() < 1e-13);
  }
  const WeightedGraph path = path_graph({1, 2, 0.5, 1, 3});
  const RealFunction f = (RealFunction(6) << 0, 5, -1, 2, 0, 7).finished();
  CHECK((maximal_function(path, f) - oracle::maximal_function(path, f)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("embedding exponents") {
  const WeightedGraph g = square_mesh_graph(2);
  const EmbeddingReport sob = embedding_report(g, 1.5, 8, 1);
  CHECK(sob.p_star == doctest::Approx(6.0));
  CHECK(sob.sobolev_ratio_max > 0.0);
  const EmbeddingReport hol = embedding_report(g, 4.0, 8, 1);
  CHECK(hol.eta == doctest::Approx(0.5));
  CHECK(hol.holder_ratio_max > 0.0);
  CHECK_THROWS(embedding_report(g, 2.0, 8, 1));
}

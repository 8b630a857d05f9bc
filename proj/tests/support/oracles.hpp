#pragma once

// Independent reference computations for the tests. Everything here is
// dense, slow and written from the defining formulas, sharing no code
// path with the library beyond graph accessors.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "meyers/elliptic.hpp"
#include "meyers/graph.hpp"

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// -Laplace u = 1 on the unit square, zero boundary, by the double sine
/// series (16/pi^4) sum_{m,n odd} sin(m pi x) sin(n pi y) / (m n (m^2 + n^2)).
inline double torsion_double_series(double x, double y, int odd_terms = 2000) {
  double s = 0.0;
  for (int i = 0; i < odd_terms; ++i) {
    const double m = 2 * i + 1;
    const double sx = std::sin(m * kPi * x);
    double row = 0.0;
    for (int j = 0; j < odd_terms; ++j) {
      const double n = 2 * j + 1;
      row += std::sin(n * kPi * y) / (n * (m * m + n * n));
    }
    s += sx * row / m;
  }
  return 16.0 / std::pow(kPi, 4) * s;
}

/// Floyd-Warshall all-pairs distances.
inline Eigen::MatrixXd all_pairs(const meyers::WeightedGraph& g) {
  const int n = g.vertex_count();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, kInf);
  for (int x = 0; x < n; ++x) d(x, x) = 0.0;
  for (const auto& e : g.edges()) {
    d(e.u, e.v) = std::min(d(e.u, e.v), e.h);
    d(e.v, e.u) = d(e.u, e.v);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return d;
}

inline std::vector<int> ball(const Eigen::MatrixXd& d, int x, double r) {
  std::vector<int> out;
  for (int y = 0; y < d.rows(); ++y)
    if (d(x, y) < r) out.push_back(y);
  return out;
}

/// sup over every ball B(z, r) containing x of the mean of |f| on B.
inline Eigen::VectorXd maximal_function(const meyers::WeightedGraph& g, const Eigen::VectorXd& f) {
  const Eigen::MatrixXd d = all_pairs(g);
  const int n = g.vertex_count();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int z = 0; z < n; ++z) {
    std::set<double> radii;
    for (int y = 0; y < n; ++y) radii.insert(d(z, y));
    for (double rad : radii) {
      // {y : d(z, y) <= rad} is the ball of any radius just above rad.
      double mass = 0.0, vol = 0.0;
      for (int y = 0; y < n; ++y)
        if (d(z, y) <= rad) {
          mass += std::abs(f[y]) * g.m(y);
          vol += g.m(y);
        }
      for (int x = 0; x < n; ++x)
        if (d(z, x) <= rad) out[x] = std::max(out[x], mass / vol);
    }
  }
  return out;
}

/// Optimal C in sum_B |f - f_B|^2 m <= C r^2 sum_B |grad f|^2 m, where
/// grad f at ball vertices uses all neighbours (values outside B free).
/// Both quadratic forms are recovered by polarization of their defining
/// sums over the vertices of B and its neighbours.
inline double poincare_constant(const meyers::WeightedGraph& g, int x, double r) {
  const Eigen::MatrixXd d = all_pairs(g);
  const std::vector<int> members = ball(d, x, r);
  if (members.size() <= 1) return 0.0;
  std::vector<int> vars = members;
  for (int y : members)
    for (const auto& inc : g.neighbors(y))
      if (std::find(vars.begin(), vars.end(), inc.neighbor) == vars.end()) vars.push_back(inc.neighbor);
  const int k = static_cast<int>(vars.size());
  auto full = [&](const Eigen::VectorXd& local) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(g.vertex_count());
    for (int i = 0; i < k; ++i) f[vars[i]] = local[i];
    return f;
  };
  auto lhs = [&](const Eigen::VectorXd& f) {
    double mass = 0.0, vol = 0.0;
    for (int y : members) {
      mass += f[y] * g.m(y);
      vol += g.m(y);
    }
    const double mean = mass / vol;
    double s = 0.0;
    for (int y : members) s += (f[y] - mean) * (f[y] - mean) * g.m(y);
    return s;
  };
  auto rhs = [&](const Eigen::VectorXd& f) {
    double s = 0.0;
    for (int y : members) {
      double q = 0.0;
      for (const auto& inc : g.neighbors(y)) q += (f[inc.neighbor] - f[y]) * (f[inc.neighbor] - f[y]);
      s += q / (g.h_x(y) * g.h_x(y)) * g.m(y);
    }
    return r * r * s;
  };
  auto gram = [&](auto&& form) {
    Eigen::MatrixXd a(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        Eigen::VectorXd ei = Eigen::VectorXd::Unit(k, i), ej = Eigen::VectorXd::Unit(k, j);
        a(i, j) = 0.5 * (form(full(ei + ej)) - form(full(ei)) - form(full(ej)));
      }
    return a;
  };
  // Orthonormal complement of the constants.
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(k, k);
  q.col(0).setOnes();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
  const Eigen::MatrixXd basis = Eigen::MatrixXd(qr.householderQ()).rightCols(k - 1);
  const Eigen::MatrixXd a = basis.transpose() * gram(lhs) * basis;
  const Eigen::MatrixXd b = basis.transpose() * gram(rhs) * basis;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Dense matrix of L from the operator formula.
inline Eigen::MatrixXcd operator_matrix(const meyers::WeightedGraph& g, const meyers::EdgeCoefficients& c) {
  const int n = g.vertex_count();
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n, n);
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    const std::complex<double> w = c.edge_sum(e) * ed.mu / (ed.h * ed.h);
    l(ed.u, ed.u) += w / g.m(ed.u);
    l(ed.u, ed.v) -= w / g.m(ed.u);
    l(ed.v, ed.v) += w / g.m(ed.v);
    l(ed.v, ed.u) -= w / g.m(ed.v);
  }
  return l;
}

/// Real symmetric coefficients: M^{1/2} L M^{-1/2} is symmetric, so
/// f(L) = M^{-1/2} V f(D) V^T M^{1/2}.
struct SymmetricSpectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  Eigen::VectorXd sqrt_m;

  SymmetricSpectrum(const meyers::WeightedGraph& g, const meyers::EdgeCoefficients& c) {
    const Eigen::MatrixXd l = operator_matrix(g, c).real();
    sqrt_m = g.measure().cwiseSqrt();
    Eigen::MatrixXd s = sqrt_m.asDiagonal() * l * sqrt_m.cwiseInverse().asDiagonal();
    s = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    values = es.eigenvalues();
    vectors = es.eigenvectors();
  }

  template <class F>
  Eigen::VectorXd apply(F&& fn, const Eigen::VectorXd& v) const {
    const Eigen::VectorXd w = vectors.transpose() * (sqrt_m.asDiagonal() * v);
    Eigen::VectorXd scaled(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) scaled[i] = fn(values[i]) * w[i];
    return sqrt_m.cwiseInverse().asDiagonal() * (vectors * scaled);
  }

  /// K_t(., y) = e^{-tL} delta_y / m(y).
  Eigen::VectorXd heat_kernel(double t, int y) const {
    const Eigen::VectorXd delta = Eigen::VectorXd::Unit(values.size(), y);
    return apply([t](double ev) { return std::exp(-t * ev); }, delta) / (sqrt_m[y] * sqrt_m[y]);
  }

  Eigen::VectorXd resolvent(double lambda, const Eigen::VectorXd& f) const {
    return apply([lambda](double ev) { return 1.0 / (ev + lambda); }, f);
  }
};

/// Exact half-angle of the numerical range of u -> <Lu, u>_m on the
/// complement of the constants: the smallest w with
/// Herm(i e^{-iw} A) and Herm(-i e^{iw} A) positive semidefinite.
inline double exact_accretivity_angle(const meyers::WeightedGraph& g, const meyers::EdgeCoefficients& c) {
  const int n = g.vertex_count();
  const Eigen::MatrixXcd a = g.measure().cast<std::complex<double>>().asDiagonal() * operator_matrix(g, c);
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
  q.col(0).setOnes();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
  const Eigen::MatrixXcd basis = Eigen::MatrixXd(qr.householderQ()).rightCols(n - 1).cast<std::complex<double>>();
  // <Lu, u>_m = u^* (M L) u.
  const Eigen::MatrixXcd form = basis.adjoint() * a * basis;
  auto min_eig = [&](std::complex<double> rot) {
    const Eigen::MatrixXcd r = rot * form;
    const Eigen::MatrixXcd h = 0.5 * (r + r.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  };
  const double slack = -1e-13 * form.norm();
  auto inside = [&](double w) {
    const std::complex<double> i(0.0, 1.0);
    return min_eig(i * std::exp(-i * w)) >= slack && min_eig(-i * std::exp(i * w)) >= slack;
  };
  double lo = 0.0, hi = kPi / 2;
  if (inside(lo)) return 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? hi : lo) = mid;
  }
  return hi;
}

/// div(A grad u) for the radial/tangential example by central differences
/// of the exact flux A grad u with step delta.
template <class Coefficient, class Solution>
double fd_divergence(const Coefficient& a, const Solution& sol, const meyers::Point& x, double delta) {
  auto flux = [&](const meyers::Point& p) -> Eigen::Vector2d { return a(p) * sol.grad(p); };
  const meyers::Point ex(delta, 0.0), ey(0.0, delta);
  return (flux(x + ex)[0] - flux(x - ex)[0]) / (2 * delta) + (flux(x + ey)[1] - flux(x - ey)[1]) / (2 * delta);
}

/// Connected random graph: a random spanning tree plus extra edges.
inline meyers::WeightedGraph random_graph(int n, int extra, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(0.5, 2.0);
  std::set<std::pair<int, int>> seen;
  std::vector<meyers::Edge> edges;
  auto add = [&](int a, int b) {
    if (a == b) return;
    const auto key = std::minmax(a, b);
    if (!seen.insert({key.first, key.second}).second) return;
    edges.push_back({key.first, key.second, w(rng), w(rng)});
  };
  for (int v = 1; v < n; ++v) add(v, std::uniform_int_distribution<int>(0, v - 1)(rng));
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int i = 0; i < extra; ++i) add(pick(rng), pick(rng));
  return meyers::WeightedGraph(n, std::move(edges));
}

}  // namespace oracle

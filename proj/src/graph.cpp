#include "meyers/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <queue>
#include <string>

#include <Eigen/Eigenvalues>

namespace meyers {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

WeightedGraph::WeightedGraph(int vertex_count, std::vector<Edge> edges, std::vector<int> boundary,
                             std::vector<Point> positions)
    : n_(vertex_count), edges_(std::move(edges)), positions_(std::move(positions)) {
  if (n_ < 1) throw GraphError("graph needs at least one vertex");
  if (!positions_.empty() && static_cast<int>(positions_.size()) != n_)
    throw GraphError("positions size does not match vertex count");

  for (auto& e : edges_) {
    if (e.u == e.v) throw GraphError("self-loop at vertex " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u < 0 || e.v >= n_) throw GraphError("edge endpoint out of range");
    if (!(e.h > 0.0) || !std::isfinite(e.h)) throw GraphError("edge weight must be positive and finite");
    if (!(e.mu > 0.0) || !std::isfinite(e.mu)) throw GraphError("edge measure must be positive and finite");
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v)
      throw GraphError("duplicate edge " + std::to_string(edges_[i].u) + "-" + std::to_string(edges_[i].v));
  }

  offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[static_cast<std::size_t>(e.u) + 1];
    ++offsets_[static_cast<std::size_t>(e.v) + 1];
  }
  for (int i = 0; i < n_; ++i) offsets_[static_cast<std::size_t>(i) + 1] += offsets_[static_cast<std::size_t>(i)];
  adjacency_.resize(edges_.size() * 2);
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto& e = edges_[k];
    adjacency_[static_cast<std::size_t>(fill[static_cast<std::size_t>(e.u)]++)] = {e.v, static_cast<int>(k)};
    adjacency_[static_cast<std::size_t>(fill[static_cast<std::size_t>(e.v)]++)] = {e.u, static_cast<int>(k)};
  }

  m_ = Eigen::VectorXd::Zero(n_);
  hx_ = Eigen::VectorXd::Zero(n_);
  min_h_ = edges_.empty() ? 0.0 : kInf;
  for (int x = 0; x < n_; ++x) {
    double hmin = kInf, hmax = 0.0, mmin = kInf, mmax = 0.0;
    for (const auto& inc : neighbors(x)) {
      const Edge& e = edges_[static_cast<std::size_t>(inc.edge)];
      m_[x] += e.mu;
      hmin = std::min(hmin, e.h);
      hmax = std::max(hmax, e.h);
      mmin = std::min(mmin, e.mu);
      mmax = std::max(mmax, e.mu);
    }
    hx_[x] = hmax;
    max_degree_ = std::max(max_degree_, degree(x));
    if (degree(x) > 0) {
      c_w_ = std::max(c_w_, hmax / hmin);
      c_mu_ = std::max(c_mu_, mmax / mmin);
      min_h_ = std::min(min_h_, hmin);
      max_h_ = std::max(max_h_, hmax);
    }
  }

  // Connectivity.
  std::vector<char> seen(static_cast<std::size_t>(n_), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    for (const auto& inc : neighbors(x)) {
      if (!seen[static_cast<std::size_t>(inc.neighbor)]) {
        seen[static_cast<std::size_t>(inc.neighbor)] = 1;
        ++reached;
        stack.push_back(inc.neighbor);
      }
    }
  }
  if (reached != n_) {
    throw GraphError("graph is disconnected: " + std::to_string(reached) + " of " + std::to_string(n_) +
                     " vertices reachable from vertex 0");
  }

  is_boundary_.assign(static_cast<std::size_t>(n_), 0);
  for (int b : boundary) {
    if (b < 0 || b >= n_) throw GraphError("boundary vertex out of range");
    is_boundary_[static_cast<std::size_t>(b)] = 1;
  }
  for (int x = 0; x < n_; ++x) (is_boundary_[static_cast<std::size_t>(x)] ? boundary_ : interior_).push_back(x);
  if (interior_.empty()) throw GraphError("boundary must be a strict subset of the vertices");
}

WeightedGraph from_triangulation(const Triangulation& tri) {
  std::vector<Edge> edges;
  for (const auto& [a, b] : tri.edges()) {
    const double h = (tri.points()[static_cast<std::size_t>(a)] - tri.points()[static_cast<std::size_t>(b)]).norm();
    edges.push_back({a, b, h, h * h});
  }
  return WeightedGraph(tri.vertex_count(), std::move(edges), tri.boundary_vertices(), tri.points());
}

WeightedGraph square_lattice(int nx, int ny) {
  if (nx < 1 || ny < 1 || nx * ny < 2) throw GraphError("lattice needs at least two vertices");
  std::vector<Edge> edges;
  std::vector<Point> pos;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int id = j * nx + i;
      pos.emplace_back(i, j);
      if (i + 1 < nx) edges.push_back({id, id + 1, 1.0, 1.0});
      if (j + 1 < ny) edges.push_back({id, id + nx, 1.0, 1.0});
    }
  }
  return WeightedGraph(nx * ny, std::move(edges), {}, std::move(pos));
}

WeightedGraph path_graph(const std::vector<double>& weights) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < weights.size(); ++i)
    edges.push_back({static_cast<int>(i), static_cast<int>(i) + 1, weights[i], 1.0});
  return WeightedGraph(static_cast<int>(weights.size()) + 1, std::move(edges));
}

std::pair<double, double> measure_bracket(const WeightedGraph& g) {
  double lo = kInf, hi = 0.0;
  for (int x = 0; x < g.vertex_count(); ++x) {
    const double r = g.m(x) / (g.h_x(x) * g.h_x(x));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo, hi};
}

// ------------------------------------------------------------------ metric

std::vector<double> distances_within(const WeightedGraph& g, int x, double radius) {
  if (x < 0 || x >= g.vertex_count()) throw GraphError("vertex out of range: " + std::to_string(x));
  std::vector<double> dist(static_cast<std::size_t>(g.vertex_count()), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[static_cast<std::size_t>(x)] = 0.0;
  queue.emplace(0.0, x);
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    for (const auto& inc : g.neighbors(u)) {
      const double nd = d + g.edge(inc.edge).h;
      if (nd < radius && nd < dist[static_cast<std::size_t>(inc.neighbor)]) {
        dist[static_cast<std::size_t>(inc.neighbor)] = nd;
        queue.emplace(nd, inc.neighbor);
      }
    }
  }
  return dist;
}

std::vector<double> distances_from(const WeightedGraph& g, int x) { return distances_within(g, x, kInf); }

double distance(const WeightedGraph& g, int x, int y) {
  const double d = distances_from(g, x)[static_cast<std::size_t>(y)];
  if (!std::isfinite(d)) throw GraphError("vertex " + std::to_string(y) + " unreachable");
  return d;
}

std::vector<int> ball(const WeightedGraph& g, int x, double r) {
  const auto dist = distances_within(g, x, r);
  std::vector<int> out;
  for (int y = 0; y < g.vertex_count(); ++y)
    if (dist[static_cast<std::size_t>(y)] < r) out.push_back(y);
  return out;
}

double volume(const WeightedGraph& g, const std::vector<int>& vertices) {
  double v = 0.0;
  for (int y : vertices) v += g.m(y);
  return v;
}

double volume(const WeightedGraph& g, int x, double r) { return volume(g, ball(g, x, r)); }

// ------------------------------------------------------------- geometry

double poincare_constant(const WeightedGraph& g, int x, double r) {
  const std::vector<int> members = ball(g, x, r);
  const int k = static_cast<int>(members.size());
  if (k <= 1) return 0.0;
  std::vector<int> local(static_cast<std::size_t>(g.vertex_count()), -1);
  for (int i = 0; i < k; ++i) local[static_cast<std::size_t>(members[static_cast<std::size_t>(i)])] = i;

  Eigen::VectorXd mb(k);
  for (int i = 0; i < k; ++i) mb[i] = g.m(members[static_cast<std::size_t>(i)]);
  const double vol = mb.sum();
  Eigen::MatrixXd lhs = Eigen::MatrixXd(mb.asDiagonal()) - mb * mb.transpose() / vol;

  // Gradient form: sum_{y in B} w_y sum_{z ~ y} (f(z) - f(y))^2, w_y = m(y)/h_y^2.
  // Values outside B are free; minimizing over them gives a Schur complement.
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(k, k);
  std::vector<std::vector<std::pair<int, double>>> exterior(static_cast<std::size_t>(g.vertex_count()));
  std::vector<int> touched;
  for (int i = 0; i < k; ++i) {
    const int y = members[static_cast<std::size_t>(i)];
    const double w = g.m(y) / (g.h_x(y) * g.h_x(y));
    for (const auto& inc : g.neighbors(y)) {
      const int j = local[static_cast<std::size_t>(inc.neighbor)];
      if (j >= 0) {
        rhs(i, i) += w;
        rhs(j, j) += w;
        rhs(i, j) -= w;
        rhs(j, i) -= w;
      } else {
        auto& list = exterior[static_cast<std::size_t>(inc.neighbor)];
        if (list.empty()) touched.push_back(inc.neighbor);
        list.emplace_back(i, w);
      }
    }
  }
  // Within-ball edges were visited from both ends with each end's own weight;
  // the loop above adds w_y from y and w_z from z, as the formula requires.
  for (int z : touched) {
    const auto& list = exterior[static_cast<std::size_t>(z)];
    double wsum = 0.0;
    for (const auto& [i, w] : list) {
      rhs(i, i) += w;
      wsum += w;
    }
    for (const auto& [i, wi] : list)
      for (const auto& [j, wj] : list) rhs(i, j) -= wi * wj / wsum;
  }

  // Restrict to the complement of constants: basis e_i - e_0.
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(k, k - 1);
  for (int i = 1; i < k; ++i) {
    basis(0, i - 1) = -1.0;
    basis(i, i - 1) = 1.0;
  }
  const Eigen::MatrixXd a = basis.transpose() * lhs * basis;
  const Eigen::MatrixXd b = basis.transpose() * rhs * basis;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, b, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw GraphError("Poincare eigenproblem failed on ball around " + std::to_string(x));
  return solver.eigenvalues().maxCoeff() / (r * r);
}

GeometryReport geometry_report(const WeightedGraph& g, double r0, int sample_count) {
  if (sample_count < 1) throw GraphError("geometry_report: empty sample");
  if (!(r0 > g.min_weight())) throw GraphError("geometry_report: r0 must exceed the smallest edge weight");
  GeometryReport rep;
  rep.r0 = r0;
  rep.lower_volume = kInf;
  const int n = g.vertex_count();
  const int count = std::min(sample_count, n);
  for (int s = 0; s < count; ++s) {
    const int x = static_cast<int>((static_cast<long long>(s) * n) / count);
    for (double r : {r0 / 4.0, r0 / 2.0, r0}) {
      const double v1 = volume(g, x, r);
      const double v2 = volume(g, x, 2.0 * r);
      rep.doubling = std::max(rep.doubling, v2 / v1);
      rep.lower_volume = std::min(rep.lower_volume, v1 / (r * r));
      rep.poincare = std::max(rep.poincare, poincare_constant(g, x, r));
      ++rep.balls;
    }
  }
  rep.doubling_exponent = std::log2(rep.doubling);
  return rep;
}

WeightedGraph rescale(const WeightedGraph& g, double alpha) {
  if (!(alpha > 0.0)) throw GraphError("rescale: alpha must be positive");
  std::vector<Edge> edges = g.edges();
  for (auto& e : edges) {
    e.h *= alpha;
    e.mu *= alpha * alpha;
  }
  return WeightedGraph(g.vertex_count(), std::move(edges), g.boundary(), g.positions());
}

// ------------------------------------------------------------------ h*

namespace {

double sup_over_ball(const WeightedGraph& g, const std::vector<double>& dist, double radius, HStarMode mode) {
  double sup = 0.0;
  for (int z = 0; z < g.vertex_count(); ++z) {
    if (!(dist[static_cast<std::size_t>(z)] < radius)) continue;
    if (mode == HStarMode::either_endpoint) {
      sup = std::max(sup, g.h_x(z));
    } else {
      for (const auto& inc : g.neighbors(z)) {
        if (dist[static_cast<std::size_t>(inc.neighbor)] < radius) sup = std::max(sup, g.edge(inc.edge).h);
      }
    }
  }
  return sup;
}

}  // namespace

double h_star_directed(const WeightedGraph& g, int x, int y, HStarMode mode) {
  if (x == y) return 0.0;
  const double r = distance(g, x, y);
  return sup_over_ball(g, distances_within(g, x, r), r, mode);
}

double h_star(const WeightedGraph& g, int x, int y, HStarMode mode) {
  if (x == y) return 0.0;
  return std::min(h_star_directed(g, x, y, mode), h_star_directed(g, y, x, mode));
}

std::vector<double> h_star_column(const WeightedGraph& g, int y, HStarMode mode) {
  const int n = g.vertex_count();
  const std::vector<double> dy = distances_from(g, y);
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int x = 0; x < n; ++x) {
    if (x == y) continue;
    const double r = dy[static_cast<std::size_t>(x)];
    const double from_y = sup_over_ball(g, dy, r, mode);
    const double from_x = sup_over_ball(g, distances_within(g, x, r), r, mode);
    out[static_cast<std::size_t>(x)] = std::min(from_x, from_y);
  }
  return out;
}

void write_graph(std::ostream& out, const WeightedGraph& g) {
  char buf[128];
  for (int x = 0; x < g.vertex_count(); ++x) {
    std::snprintf(buf, sizeof buf, "vertex %d %.17g\n", x, g.m(x));
    out << buf;
  }
  for (const auto& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "edge %d %d %.17g %.17g\n", e.u, e.v, e.h, e.mu);
    out << buf;
  }
}

}  // namespace meyers

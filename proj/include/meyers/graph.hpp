#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "meyers/mesh.hpp"

namespace meyers {

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Undirected edge, stored once with u < v.
struct Edge {
  int u = 0;
  int v = 0;
  double h = 1.0;   ///< length h_xy
  double mu = 1.0;  ///< measure mu_xy
};

struct Incidence {
  int neighbor;
  int edge;  ///< index into WeightedGraph::edges()
};

/// Finite connected graph with symmetric edge weights and measures.
///
/// m(x) is the sum of incident edge measures. h_x is the largest incident
/// weight. Immutable after construction.
class WeightedGraph {
 public:
  /// Throws GraphError on self-loops, duplicate edges, nonpositive
  /// weights or measures, disconnected graphs, or a boundary that covers
  /// every vertex.
  WeightedGraph(int vertex_count, std::vector<Edge> edges, std::vector<int> boundary = {},
                std::vector<Point> positions = {});

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }

  std::span<const Incidence> neighbors(int x) const {
    const auto b = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(x)]);
    const auto e = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(x) + 1]);
    return {adjacency_.data() + b, e - b};
  }
  int degree(int x) const { return offsets_[static_cast<std::size_t>(x) + 1] - offsets_[static_cast<std::size_t>(x)]; }

  double m(int x) const { return m_[x]; }
  const Eigen::VectorXd& measure() const { return m_; }
  double h_x(int x) const { return hx_[x]; }
  const Eigen::VectorXd& local_size() const { return hx_; }
  double total_measure() const { return m_.sum(); }

  const std::vector<int>& boundary() const { return boundary_; }
  bool is_boundary(int x) const { return is_boundary_[static_cast<std::size_t>(x)] != 0; }
  /// Vertices not in the boundary, ascending.
  const std::vector<int>& interior() const { return interior_; }

  /// Coordinates when the graph came from a mesh or lattice; else empty.
  const std::vector<Point>& positions() const { return positions_; }

  /// N: maximal degree.
  int max_degree() const { return max_degree_; }
  /// C_W: max ratio of two weights incident to a common vertex.
  double weight_ratio() const { return c_w_; }
  /// C_mu: max ratio of two measures incident to a common vertex.
  double measure_ratio() const { return c_mu_; }
  double min_weight() const { return min_h_; }
  double max_weight() const { return max_h_; }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<int> offsets_;
  std::vector<Incidence> adjacency_;
  Eigen::VectorXd m_, hx_;
  std::vector<int> boundary_, interior_;
  std::vector<char> is_boundary_;
  std::vector<Point> positions_;
  int max_degree_ = 0;
  double c_w_ = 1.0, c_mu_ = 1.0, min_h_ = 0.0, max_h_ = 0.0;
};

/// Mesh graph: x ~ y along triangle edges, h_xy = |x - y|, mu_xy = h_xy^2,
/// boundary = mesh vertices on the polygon boundary.
WeightedGraph from_triangulation(const Triangulation& tri);

/// nx-by-ny box of Z^2 with unit weights and measures, no boundary.
/// Vertex (i, j) has index j * nx + i and position (i, j).
WeightedGraph square_lattice(int nx, int ny);

/// Path 0 - 1 - ... - k with the given weights, unit measures.
WeightedGraph path_graph(const std::vector<double>& weights);

/// [min, max] of m(x) / h_x^2 over all vertices.
std::pair<double, double> measure_bracket(const WeightedGraph& g);

/// Shortest-path distances from x (Dijkstra).
std::vector<double> distances_from(const WeightedGraph& g, int x);

/// Distances from x, exploring only vertices with distance < radius;
/// the rest are +inf.
std::vector<double> distances_within(const WeightedGraph& g, int x, double radius);

double distance(const WeightedGraph& g, int x, int y);

/// B(x, r) = {y : d(x, y) < r}, ascending.
std::vector<int> ball(const WeightedGraph& g, int x, double r);
double volume(const WeightedGraph& g, int x, double r);
double volume(const WeightedGraph& g, const std::vector<int>& vertices);

struct GeometryReport {
  double r0 = 0.0;
  int balls = 0;
  double doubling = 1.0;          ///< C_D
  double lower_volume = 0.0;      ///< c_L in V(x, r) >= c_L r^2
  double poincare = 0.0;          ///< C_P for q = 2
  double doubling_exponent = 0.0; ///< D = log2 C_D
};

/// Optimal constant C in the scaled L^2 Poincare inequality on B(x, r),
/// with the gradient at ball vertices taken over all neighbours. Zero for
/// single-vertex balls.
double poincare_constant(const WeightedGraph& g, int x, double r);

/// Samples `sample_count` centers spread evenly over the vertex range and
/// radii {r0/4, r0/2, r0}. Throws on sample_count < 1.
GeometryReport geometry_report(const WeightedGraph& g, double r0, int sample_count);

/// Gamma_alpha: weights alpha h, measures alpha^2 mu.
WeightedGraph rescale(const WeightedGraph& g, double alpha);

enum class HStarMode {
  either_endpoint,  ///< edges with at least one endpoint in the ball
  both_endpoints,   ///< edges with both endpoints in the ball
};

/// Directed h*_{x->y}: sup of weights over edges touching B(x, d(x, y)).
double h_star_directed(const WeightedGraph& g, int x, int y, HStarMode mode = HStarMode::either_endpoint);

/// h*_{xy} = min(h*_{x->y}, h*_{y->x}); zero when x == y.
double h_star(const WeightedGraph& g, int x, int y, HStarMode mode = HStarMode::either_endpoint);

/// h*_{xy} for all x with y fixed.
std::vector<double> h_star_column(const WeightedGraph& g, int y, HStarMode mode = HStarMode::either_endpoint);

/// `vertex u m(u)` lines then `edge u v h mu` lines, sorted.
void write_graph(std::ostream& out, const WeightedGraph& g);

}  // namespace meyers

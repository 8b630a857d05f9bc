#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "meyers/graph.hpp"

namespace meyers {

template <class T>
using VertexFunction = Eigen::Matrix<T, Eigen::Dynamic, 1>;
using RealFunction = VertexFunction<double>;
using ComplexFunction = VertexFunction<std::complex<double>>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Antisymmetric function on oriented edges. values[e] is F(u, v) for the
/// stored orientation u < v of edge e; F(v, u) = -F(u, v).
template <class T>
struct EdgeFunction {
  VertexFunction<T> values;

  T at(const WeightedGraph& g, int edge, int from) const {
    return g.edge(edge).u == from ? values[edge] : -values[edge];
  }
};

/// df(x, y) = (f(y) - f(x)) / h_xy.
template <class T>
EdgeFunction<T> differential(const WeightedGraph& g, const VertexFunction<T>& f);

/// grad f(x) = (1/h_x) (sum_{y~x} |f(y) - f(x)|^2)^{1/2}.
template <class T>
RealFunction gradient_length(const WeightedGraph& g, const VertexFunction<T>& f);

/// (sum_x |f(x)|^p m(x))^{1/p}; p = kInfinity gives max |f|.
template <class T>
double lp_norm(const WeightedGraph& g, const VertexFunction<T>& f, double p);

/// L^p(E, mu) over ordered pairs, so every edge is counted twice.
template <class T>
double edge_lp_norm(const WeightedGraph& g, const EdgeFunction<T>& F, double p);

/// ||f||_p + ||grad f||_p.
template <class T>
double w1p_norm(const WeightedGraph& g, const VertexFunction<T>& f, double p);

struct HolderOptions {
  /// Above this many pairs, rows are subsampled.
  double max_exact_pairs = 2.5e7;
  int sampled_rows = 512;
  /// Restricts both points of each pair; empty means all vertices.
  std::vector<int> subset;
};

struct HolderResult {
  double seminorm = 0.0;
  bool exact = true;
  std::int64_t pairs = 0;
};

/// sup_{x != y} |f(x) - f(y)| / d(x, y)^eta for each function, sharing one
/// Dijkstra per row.
template <class T>
std::vector<HolderResult> holder_seminorms(const WeightedGraph& g, const std::vector<VertexFunction<T>>& fs,
                                           double eta, const HolderOptions& options = {});

template <class T>
HolderResult holder_seminorm(const WeightedGraph& g, const VertexFunction<T>& f, double eta,
                             const HolderOptions& options = {});

struct NormReport {
  double p = 2.0;
  double eta = 0.0;
  double lp = 0.0;
  double grad_lp = 0.0;
  double w1p = 0.0;
  double edge_lp = 0.0;
  double holder_semi = 0.0;
  double holder_norm = 0.0;
  bool holder_exact = true;

  /// `graph_id,p,eta,lp,grad_lp,w1p,holder_semi,holder_norm`
  static std::string csv_header();
  std::string csv_row(const std::string& graph_id) const;
};

/// All norms at once. eta <= 0 skips the Hoelder part.
template <class T>
NormReport norm_report(const WeightedGraph& g, const VertexFunction<T>& f, double p, double eta);

/// Pairing <f, v> = sum f(x) v(x) m(x).
double pairing(const WeightedGraph& g, const RealFunction& f, const RealFunction& v);

enum class DualMode { exact_p2, ascent };

/// Norm on W^{1,p'}_0 used by the ascent mode.
enum class TestNorm {
  grad_sum,     ///< ||v||_{p'} + ||grad v||_{p'}
  hilbert_edge,  ///< (||v||_{p'}^{p'} + ||dv||_{L^{p'}(E)}^{p'})^{1/p'}
  sum_edge,      ///< ||v||_{p'} + ||dv||_{L^{p'}(E)}
};

struct DualOptions {
  TestNorm norm = TestNorm::grad_sum;
  double tolerance = 1e-6;
  int max_iterations = 5000;
  /// Start from f itself instead of the Riesz representative.
  bool start_from_f = false;
};

struct DualResult {
  /// exact_p2: the dual norm for the Hilbertian test norm. ascent: best
  /// value of <f, v> / ||v|| found, a lower bound.
  double value = 0.0;
  /// ||f||_{L^p}, an upper bound for the grad_sum norm.
  double upper_bound = 0.0;
  bool converged = true;
  int iterations = 0;
  RealFunction maximizer;
  std::string variant;
};

/// Dual norm of W^{1,p'}_0 (W^{1,p'} without boundary) for real f. Values
/// of f on boundary vertices are ignored. exact_p2 uses the test norm
/// (||v||_2^2 + ||dv||_{L^2(E)}^2)^{1/2} and requires p = 2.
DualResult dual_norm(const WeightedGraph& g, const RealFunction& f, double p, DualMode mode,
                     const DualOptions& options = {});

/// Uncentered maximal function sup_{B containing x} V(B)^{-1} sum_B |f| m.
template <class T>
RealFunction maximal_function(const WeightedGraph& g, const VertexFunction<T>& f);

struct EmbeddingReport {
  double p = 0.0;
  double p_star = 0.0;  ///< set for p < 2
  double eta = 0.0;     ///< set for p > 2
  double sobolev_ratio_max = 0.0;
  double holder_ratio_max = 0.0;
  std::string sobolev_argmax;
  std::string holder_argmax;
};

/// p* = 2p / (2 - p) and eta = 1 - 2/p for graphs with (L_2). Candidates
/// vanish on the boundary: `trials` random functions, vertex indicators,
/// the distance to the boundary, and distance bumps. p < 2 fills the
/// Sobolev ratio, p > 2 the Hoelder ratio; p == 2 throws.
EmbeddingReport embedding_report(const WeightedGraph& g, double p, int trials, std::uint64_t seed);

}  // namespace meyers

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "meyers/coefficients.hpp"
#include "meyers/graph.hpp"
#include "meyers/mesh.hpp"
#include "meyers/spaces.hpp"

namespace meyers {

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Galerkin system for int A grad u . grad phi = -<f, phi> over the P1
/// functions vanishing on the boundary. Rows and columns are interior
/// vertices in ascending order.
struct P1System {
  Triangulation mesh;
  WeightedGraph graph;
  std::vector<int> interior;  ///< mesh vertex of each unknown
  std::vector<int> unknown;   ///< unknown of each mesh vertex, -1 on the boundary
  Eigen::SparseMatrix<double> stiffness;  ///< K[x][y] = int A grad phi_y . grad phi_x
  Eigen::VectorXd moments;                ///< <f, phi_x>
  Eigen::VectorXd load;                   ///< b[x] = -<f, phi_x>
  bool symmetric = true;

  int unknowns() const { return static_cast<int>(interior.size()); }
  /// m(x) of the mesh graph at every unknown.
  Eigen::VectorXd unknown_measure() const;
  /// Zero-boundary vertex function from unknown values, and back.
  RealFunction expand(const Eigen::VectorXd& values) const;
  Eigen::VectorXd restrict(const RealFunction& f) const;
};

/// Stiffness with constant P1 gradients and A sampled at barycenters.
/// Throws std::runtime_error naming the barycenter where A is not finite.
P1System assemble(const Triangulation& tri, const CoefficientField& a);

/// <f, phi_x> for the P1 interpolant of vertex samples (exact mass matrix).
Eigen::VectorXd moments_from_samples(const P1System& sys, const RealFunction& samples);
/// <f, phi_x> by the per-triangle vertex rule, exact for P1 integrands.
Eigen::VectorXd moments_from_callable(const P1System& sys, const std::function<double(const Point&)>& f);
/// <div F, phi_x> = -int F . grad phi_x with the edge-midpoint rule.
Eigen::VectorXd moments_from_divergence(const P1System& sys, const std::function<Eigen::Vector2d(const Point&)>& F);

/// Stores the moments and sets load = -moments.
void set_load(P1System& sys, const Eigen::VectorXd& moments);

/// f_h(x) = <f, phi_x> / m(x) at interior vertices, zero on the boundary.
RealFunction discrete_load(const P1System& sys);

enum class SolverKind { direct, bicgstab };

struct Solution {
  RealFunction u;        ///< zero-boundary vertex values
  double residual = 0.0; ///< ||K u - b|| / ||b||
  std::string method;
};

/// Solves K u = b. Direct: LDL^T for symmetric K, sparse LU otherwise.
/// Throws SolveError when the relative residual exceeds 1e-10.
Solution solve(const P1System& sys, SolverKind kind = SolverKind::direct);

/// L_h u(x) = (K u)[x] / m(x) at interior vertices, zero on the boundary.
RealFunction apply_Lh(const P1System& sys, const RealFunction& u);

/// max_x |L_h u(x) + f_h(x)| / max_x |f_h(x)|.
double lhuh_defect(const P1System& sys, const Solution& sol);

/// Q_h(u, v) = v^T K u for zero-boundary vertex functions.
double bilinear_form(const P1System& sys, const RealFunction& u, const RealFunction& v);

/// Smallest eigenvalue of the symmetric part of K divided by that of the
/// Gram matrix of ||v||_2^2 + ||dv||_{L^2(E)}^2 (dense; small systems).
double coercivity_constant(const P1System& sys);

/// Norms of L_h : W^{1,2}_0 -> W^{-1,2} and of its inverse for the
/// Hilbertian test norm, by power iteration.
struct OperatorNorms {
  double norm = 0.0;
  double inverse_norm = 0.0;
  int iterations = 0;
};
OperatorNorms hilbert_operator_norms(const P1System& sys, int max_iterations = 500, double tolerance = 1e-10);

/// R_h u: continuous piecewise-linear field on the mesh.
class P1Field {
 public:
  P1Field(const Triangulation& tri, RealFunction values);

  const Triangulation& mesh() const { return *tri_; }
  const RealFunction& values() const { return values_; }

  /// Value at x; throws if x lies outside the mesh.
  double operator()(const Point& x) const;
  Eigen::Vector2d gradient(int triangle) const;

  /// Order-4 quadrature of |u|^p (p < inf) or the vertex max (p = inf).
  double lp_norm(double p) const;
  /// Exact sum_T area(T) |grad u|_T|^p.
  double grad_lp_norm(double p) const;
  double w1p_norm(double p) const { return lp_norm(p) + grad_lp_norm(p); }
  /// Euclidean Hoelder seminorm over vertices and edge midpoints.
  double holder_seminorm(double eta) const;
  /// sup |u| + holder_seminorm(eta).
  double holder_norm(double eta) const;

  /// ||u - w||_{L^p} and ||grad(u - w)||_{L^p} against a reference.
  struct Errors {
    double lp = 0.0;
    double grad_lp = 0.0;
  };
  Errors error(const std::function<double(const Point&)>& u, const std::function<Eigen::Vector2d(const Point&)>& grad,
               double p) const;

 private:
  const Triangulation* tri_;
  RealFunction values_;
  mutable std::vector<std::vector<int>> buckets_;
  mutable Point lo_, cell_;
  mutable int nx_ = 0, ny_ = 0;
  int locate(const Point& x) const;
};

/// Hoelder seminorms of several fields on the same mesh, sharing the
/// pair distances.
std::vector<double> holder_seminorms(const std::vector<const P1Field*>& fields, double eta);

/// P1 interpolation of a coarse field onto a finer mesh of the same domain.
RealFunction transfer(const P1Field& coarse, const Triangulation& fine);

/// Ratios of discrete to reconstructed norms over random zero-boundary
/// functions: L^p, gradient L^p and C^eta, with their [min, max].
struct EquivalenceBracket {
  double p = 2.0;
  double eta = 0.5;
  double lp_min = 0.0, lp_max = 0.0;
  double grad_min = 0.0, grad_max = 0.0;
  double holder_min = 0.0, holder_max = 0.0;
};
std::vector<EquivalenceBracket> norm_equivalence_study(const Triangulation& tri, const std::vector<double>& p_list,
                                                       double eta, int samples, std::uint64_t seed);

/// CSV `vertex_id,x,y,u`.
void write_solution(std::ostream& out, const P1System& sys, const RealFunction& u);
/// Matrix-market coordinate text of K.
void write_system(std::ostream& out, const P1System& sys);

}  // namespace meyers

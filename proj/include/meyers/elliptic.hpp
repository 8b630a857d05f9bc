#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "meyers/fit.hpp"
#include "meyers/graph.hpp"
#include "meyers/spaces.hpp"

namespace meyers {

using Complex = std::complex<double>;

/// Oriented coefficients c_xy on the edges of a graph. Only the sums
/// c_xy + c_yx enter the operator.
class EdgeCoefficients {
 public:
  /// forward[e] = c_uv and backward[e] = c_vu for edge e = (u, v), u < v.
  /// Throws std::invalid_argument when delta_edge <= 0.
  EdgeCoefficients(std::vector<Complex> forward, std::vector<Complex> backward);

  static EdgeCoefficients uniform(const WeightedGraph& g, Complex c);
  /// c_xy = 1 + amplitude (a_xy + i b_xy), a antisymmetric and b symmetric,
  /// both uniform in [-1, 1].
  static EdgeCoefficients perturbed(const WeightedGraph& g, double amplitude, std::uint64_t seed);
  /// c_xy = 1 + amplitude a_xy with a real antisymmetric.
  static EdgeCoefficients antisymmetric_real(const WeightedGraph& g, double amplitude, std::uint64_t seed);

  Complex at(const WeightedGraph& g, int edge, int from) const {
    return g.edge(edge).u == from ? forward_[static_cast<std::size_t>(edge)] : backward_[static_cast<std::size_t>(edge)];
  }
  /// c_uv + c_vu.
  Complex edge_sum(int edge) const {
    return forward_[static_cast<std::size_t>(edge)] + backward_[static_cast<std::size_t>(edge)];
  }
  std::size_t size() const { return forward_.size(); }
  bool is_real() const;

  /// C_inf = max |c_xy|.
  double sup_norm() const { return c_inf_; }
  /// min over edges of Re(c_xy + c_yx) / 2.
  double delta_edge() const { return delta_edge_; }

 private:
  std::vector<Complex> forward_, backward_;
  double c_inf_ = 0.0;
  double delta_edge_ = 0.0;
};

/// Sharp ellipticity constant: min over non-constant u of
/// Re form(u, u) / sum_{ordered pairs} |du|^2 mu (dense; small graphs).
double exact_ellipticity(const WeightedGraph& g, const EdgeCoefficients& c);

/// (Lu)(z) = m(z)^{-1} sum_{y~z} (c_zy + c_yz) mu_zy (u(z) - u(y)) / h_zy^2.
class EllipticOperator {
 public:
  EllipticOperator(const WeightedGraph& g, EdgeCoefficients c);

  const WeightedGraph& graph() const { return g_; }
  const EdgeCoefficients& coefficients() const { return c_; }
  bool is_real() const { return real_; }
  const Eigen::SparseMatrix<Complex>& matrix() const { return matrix_; }
  /// Real part of the matrix; equals matrix() when is_real().
  const Eigen::SparseMatrix<double>& real_matrix() const { return real_matrix_; }

  ComplexFunction apply(const ComplexFunction& u) const { return matrix_ * u; }
  /// sum_{ordered (x,y)} c_xy du(x,y) conj(dv(x,y)) mu_xy.
  Complex form(const ComplexFunction& u, const ComplexFunction& v) const;
  /// <Lu, v>_m = sum_x Lu(x) conj(v(x)) m(x).
  Complex pairing(const ComplexFunction& u, const ComplexFunction& v) const;

 private:
  WeightedGraph g_;
  EdgeCoefficients c_;
  bool real_;
  Eigen::SparseMatrix<Complex> matrix_;
  Eigen::SparseMatrix<double> real_matrix_;
};

struct AccretivityEstimate {
  double omega = 0.0;  ///< max |arg <Lu, u>| found; a lower bound
  ComplexFunction probe;
  int probes = 0;
  int skipped = 0;
};

/// Random complex probes followed by ascent on |Im F(u)| / Re F(u) from
/// the worst probes, F(u) = <Lu, u>_m.
AccretivityEstimate accretivity_angle(const EllipticOperator& op, std::uint64_t seed, int random_probes = 1000,
                                      int refined = 10);

/// Point of the sector Sigma_mu, mu = pi/2 + (pi/2 - omega)/2.
struct SectorPoint {
  Complex lambda;
  double omega = 0.0;
  double mu_sector = 0.0;

  SectorPoint(Complex l, double accretivity_angle);
  bool inside() const;
};

/// Factorized L + lambda for repeated solves.
class ResolventSolver {
 public:
  ResolventSolver(const EllipticOperator& op, Complex lambda);
  ~ResolventSolver();
  ResolventSolver(ResolventSolver&&) noexcept;

  /// Throws std::runtime_error when the relative residual exceeds 1e-10.
  ComplexFunction solve(const ComplexFunction& f) const;
  /// Real op, real lambda and real f stay real.
  RealFunction solve_real(const RealFunction& f) const;
  /// Solves (L + lambda)^T w = f.
  ComplexFunction solve_transpose(const ComplexFunction& f) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Solves (L + lambda) u = f; refuses lambda outside the sector.
ComplexFunction resolvent_solve(const EllipticOperator& op, const SectorPoint& lambda, const ComplexFunction& f);

struct ResolventRow {
  Complex lambda;
  std::string ray;
  int sample = 0;
  double f_l2 = 0.0;
  double u_inf = 0.0;
  double u_holder = 0.0;
  double r_inf = 0.0;  ///< ||u||_inf |lambda|^{1/2} / ||f||_2
  double r_eta = 0.0;  ///< |u|_eta |lambda|^{(1-eta)/2} / ||f||_2
};

struct ResolventSweep {
  double eta = 0.0;
  std::vector<ResolventRow> rows;
  /// Worst max/min of R over lambda, per (ray, sample).
  double r_inf_spread = 0.0;
  double r_eta_spread = 0.0;
  /// Fitted slopes of ||u||_inf and |u|_eta vs |lambda|, per (ray, sample).
  std::vector<FitResult> inf_slopes;
  std::vector<FitResult> holder_slopes;
};

/// Runs every lambda on every named ray (lambda = |lambda| e^{i arg}) for
/// every sample. Sup norms and Hoelder seminorms are taken over `window`
/// (all vertices when empty). With extremal_center >= 0 one more sample
/// is added per lambda: the f maximizing |u(center)| / ||f||_2.
ResolventSweep resolvent_bound_sweep(const EllipticOperator& op, const std::vector<double>& magnitudes,
                                     const std::vector<std::pair<std::string, double>>& rays,
                                     const std::vector<ComplexFunction>& f_samples, double eta,
                                     const std::vector<int>& window, int extremal_center = -1);

/// Composite Gauss-Legendre rule on the contour made of two rays
/// r e^{+-i theta}, 1/t <= r <= truncation / (t |cos theta|), and the arc
/// of radius 1/t through the positive axis.
struct ContourRule {
  double theta = 0.75 * 3.14159265358979323846;
  double truncation = 18.0 * 2.302585092994046;
  int ray_panels = 10;
  int ray_nodes = 20;
  int arc_panels = 4;
  int arc_nodes = 16;
};

/// e^{-tL} v by the Cauchy integral (2 pi i)^{-1} int e^{t lambda}
/// (L + lambda)^{-1} v d lambda. Uses conjugate symmetry when L and v are
/// real.
ComplexFunction semigroup_apply(const EllipticOperator& op, double t, const ComplexFunction& v,
                                const ContourRule& rule = {});

/// K_t(., y) = (e^{-tL} delta_y) / m(y).
ComplexFunction semigroup_kernel(const EllipticOperator& op, double t, int y, const ContourRule& rule = {});

/// Dense scaling-and-squaring exponential e^{-t_base L}; columns for
/// integer multiples of t_base by repeated products.
class ExpmOracle {
 public:
  ExpmOracle(const EllipticOperator& op, double t_base);
  /// Throws std::invalid_argument unless t / t_base is a positive integer.
  ComplexFunction kernel(double t, int y) const;

 private:
  Eigen::MatrixXcd e_;
  Eigen::VectorXd m_;
  double t_base_;
};

struct KernelRow {
  double t = 0.0;
  int y = 0;
  int x = 0;
  double d = 0.0;
  double h_star = 0.0;
  char regime = 'b';  ///< 'a': t <= C' h* d, 'b' otherwise
  Complex k;
  double bound = 0.0;  ///< fitted bound for the row's regime
};

struct KernelTable {
  std::vector<KernelRow> rows;
  static std::string csv_header();  ///< t,y,x,d,h_star,regime,K_re,K_im,bound_value
  void write_csv(std::ostream& out) const;
};

/// Rows for every x in `window` (all vertices when empty) and every t,
/// with regimes tagged for C' = c_prime.
KernelTable kernel_table(const EllipticOperator& op, const std::vector<double>& times, int y,
                         const std::vector<int>& window, double c_prime = 1.0, const ContourRule& rule = {},
                         HStarMode mode = HStarMode::either_endpoint);

struct KernelFit {
  double c_prime = 1.0;
  double C = 0.0;       ///< 2 max_t t |K_t(y, y)|
  double beta_b = 0.0;  ///< Gaussian regime
  double beta_a = 0.0;  ///< short-time regime (0 when no pairs)
  double C2 = 0.0;      ///< Hoelder increment constant
  double eta = 0.0;
  double pass_a = 1.0, pass_b = 1.0, pass_holder = 1.0;
  int pairs_a = 0, pairs_b = 0, pairs_holder = 0;
  bool ok = false;
  std::string failure;  ///< violating pair when no positive beta exists
};

/// Smallest constants for both regimes and the Hoelder increment over
/// neighbour pairs inside the table; fills row bounds. Regimes are
/// re-tagged for c_prime.
KernelFit kernel_bound_check(const EllipticOperator& op, KernelTable& table, double c_prime = 1.0);

/// Vertices of a lattice box at least margin * side away from its edge.
std::vector<int> interior_window(const WeightedGraph& lattice, int nx, int ny, double margin = 0.25);

}  // namespace meyers

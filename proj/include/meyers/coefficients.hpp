#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include <Eigen/Core>

#include "meyers/mesh.hpp"

namespace meyers {

/// Matrix-valued coefficient A(x) on a planar domain, with the declared
/// ellipticity constant c (A xi . xi >= c |xi|^2) and entry bound.
class CoefficientField {
 public:
  using Evaluator = std::function<Eigen::Matrix2d(const Point&)>;

  CoefficientField(std::string kind, Evaluator a, double ellipticity, double bound);

  Eigen::Matrix2d operator()(const Point& x) const { return a_(x); }
  const std::string& kind() const { return kind_; }
  double ellipticity() const { return c_; }
  double bound() const { return bound_; }

  /// A(x) = M everywhere. c is the smallest eigenvalue of the symmetric part.
  static CoefficientField constant(const Eigen::Matrix2d& m);
  static CoefficientField identity() { return constant(Eigen::Matrix2d::Identity()); }
  /// a1 I and a2 I on alternating cells of a cells-by-cells grid over [lo, hi].
  static CoefficientField checkerboard(double a1, double a2, int cells = 4, const Point& lo = Point(0, 0),
                                       const Point& hi = Point(1, 1));
  /// P + eps^2 (I - P), P = x x^T / |x|^2; eps^2 I at the origin.
  static CoefficientField meyers(double eps);
  /// [[2 + sin(pi x), 1/2], [1/2, 2 + cos(pi y)]].
  static CoefficientField smooth();

 private:
  std::string kind_;
  Evaluator a_;
  double c_;
  double bound_;
};

struct EllipticityAudit {
  /// min over samples of A xi . xi / |xi|^2
  double observed_ellipticity = 0.0;
  /// max over samples of |A_ij|
  double observed_bound = 0.0;
  bool ellipticity_ok = false;
  bool bound_ok = false;
  int samples = 0;
};

/// Spot-checks the declared constants at triangle barycenters and edge
/// midpoints with random directions.
EllipticityAudit audit_coefficient(const CoefficientField& a, const Triangulation& tri, std::uint64_t seed);

/// Reference data for the radial/tangential counterexample on [-1, 1]^2:
/// u = chi(r) r^eps cos(theta), f = div(A_eps grad u), critical exponent
/// 2 / (1 - eps).
class MeyersSolution {
 public:
  explicit MeyersSolution(double eps);

  double eps() const { return eps_; }
  double critical_exponent() const { return 2.0 / (1.0 - eps_); }

  /// Quintic smoothstep cutoff: 1 for r <= 1/4, 0 for r >= 3/4.
  static double cutoff(double r);
  static double cutoff_d1(double r);
  static double cutoff_d2(double r);

  double u(const Point& x) const;
  Eigen::Vector2d grad(const Point& x) const;
  /// cos(theta) [chi'' r^eps + (2 eps + 1) chi' r^(eps-1)]; zero for r <= 1/4.
  double f(const Point& x) const;

 private:
  double eps_;
};

/// -Laplace u = 1 on the unit square, u = 0 on the boundary, by the
/// single sine series in the direction farther from the boundary.
class TorsionSolution {
 public:
  /// Truncation so that neglected terms are below `tolerance`.
  explicit TorsionSolution(double tolerance = 1e-14);

  double u(const Point& x) const;
  Eigen::Vector2d grad(const Point& x) const;
  /// Integral of u over the square (equals the energy integral of grad u).
  double integral() const;

 private:
  double tol_;
  double u_swapped(double x, double y) const;
  Eigen::Vector2d grad_swapped(double x, double y) const;
};

}  // namespace meyers

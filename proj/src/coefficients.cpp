#include "meyers/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace meyers {

namespace {
constexpr double kPi = std::numbers::pi;
}

CoefficientField::CoefficientField(std::string kind, Evaluator a, double ellipticity, double bound)
    : kind_(std::move(kind)), a_(std::move(a)), c_(ellipticity), bound_(bound) {
  if (!a_) throw std::invalid_argument("coefficient field needs an evaluator");
  if (!(c_ > 0.0)) throw std::invalid_argument("ellipticity constant must be positive");
  if (!(bound_ >= c_ / 2.0)) throw std::invalid_argument("bound is inconsistent with the ellipticity constant");
}

CoefficientField CoefficientField::constant(const Eigen::Matrix2d& m) {
  const Eigen::Matrix2d sym = 0.5 * (m + m.transpose());
  const double c = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(sym).eigenvalues().minCoeff();
  return CoefficientField("constant", [m](const Point&) { return m; }, c, m.cwiseAbs().maxCoeff());
}

CoefficientField CoefficientField::checkerboard(double a1, double a2, int cells, const Point& lo, const Point& hi) {
  if (!(a1 > 0.0 && a2 > 0.0)) throw std::invalid_argument("checkerboard values must be positive");
  if (cells < 1) throw std::invalid_argument("checkerboard needs at least one cell");
  auto eval = [=](const Point& x) -> Eigen::Matrix2d {
    const int i = std::clamp(static_cast<int>(std::floor(cells * (x.x() - lo.x()) / (hi.x() - lo.x()))), 0, cells - 1);
    const int j = std::clamp(static_cast<int>(std::floor(cells * (x.y() - lo.y()) / (hi.y() - lo.y()))), 0, cells - 1);
    return ((i + j) % 2 == 0 ? a1 : a2) * Eigen::Matrix2d::Identity();
  };
  return CoefficientField("checkerboard", eval, std::min(a1, a2), std::max(a1, a2));
}

CoefficientField CoefficientField::meyers(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("meyers coefficient needs 0 < eps < 1");
  const double e2 = eps * eps;
  auto eval = [e2](const Point& x) -> Eigen::Matrix2d {
    const double r2 = x.squaredNorm();
    if (r2 == 0.0) return e2 * Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d p = x * x.transpose() / r2;
    return p + e2 * (Eigen::Matrix2d::Identity() - p);
  };
  return CoefficientField("meyers", eval, e2, 1.0);
}

CoefficientField CoefficientField::smooth() {
  auto eval = [](const Point& x) -> Eigen::Matrix2d {
    Eigen::Matrix2d a;
    a << 2.0 + std::sin(kPi * x.x()), 0.5, 0.5, 2.0 + std::cos(kPi * x.y());
    return a;
  };
  return CoefficientField("smooth", eval, 0.5, 3.0);
}

EllipticityAudit audit_coefficient(const CoefficientField& a, const Triangulation& tri, std::uint64_t seed) {
  EllipticityAudit out;
  out.observed_ellipticity = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  auto probe = [&](const Point& x) {
    const Eigen::Matrix2d m = a(x);
    if (!m.allFinite()) throw std::runtime_error("coefficient not finite at (" + std::to_string(x.x()) + ", " +
                                                 std::to_string(x.y()) + ")");
    const double phi = angle(rng);
    const Eigen::Vector2d xi(std::cos(phi), std::sin(phi));
    out.observed_ellipticity = std::min(out.observed_ellipticity, xi.dot(m * xi));
    out.observed_bound = std::max(out.observed_bound, m.cwiseAbs().maxCoeff());
    ++out.samples;
  };
  for (const auto& t : tri.triangles()) {
    const Point& p0 = tri.points()[static_cast<std::size_t>(t[0])];
    const Point& p1 = tri.points()[static_cast<std::size_t>(t[1])];
    const Point& p2 = tri.points()[static_cast<std::size_t>(t[2])];
    probe((p0 + p1 + p2) / 3.0);
    probe(0.5 * (p0 + p1));
  }
  out.ellipticity_ok = out.observed_ellipticity >= a.ellipticity() * (1.0 - 1e-12);
  out.bound_ok = out.observed_bound <= a.bound() * (1.0 + 1e-12);
  return out;
}

// ------------------------------------------------------------------ Meyers

MeyersSolution::MeyersSolution(double eps) : eps_(eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("MeyersSolution needs 0 < eps < 1");
}

double MeyersSolution::cutoff(double r) {
  if (r <= 0.25) return 1.0;
  if (r >= 0.75) return 0.0;
  const double s = (r - 0.25) / 0.5;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double MeyersSolution::cutoff_d1(double r) {
  if (r <= 0.25 || r >= 0.75) return 0.0;
  const double s = (r - 0.25) / 0.5;
  return -30.0 * s * s * (1.0 - s) * (1.0 - s) / 0.5;
}

double MeyersSolution::cutoff_d2(double r) {
  if (r <= 0.25 || r >= 0.75) return 0.0;
  const double s = (r - 0.25) / 0.5;
  return -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / 0.25;
}

double MeyersSolution::u(const Point& x) const {
  const double r = x.norm();
  if (r == 0.0) return 0.0;
  // r^eps cos(theta) = r^(eps - 1) x
  return cutoff(r) * std::pow(r, eps_ - 1.0) * x.x();
}

Eigen::Vector2d MeyersSolution::grad(const Point& x) const {
  const double r = x.norm();
  if (r == 0.0) return Eigen::Vector2d::Zero();
  const double w = std::pow(r, eps_ - 1.0) * x.x();
  const Eigen::Vector2d grad_w =
      std::pow(r, eps_ - 1.0) * Eigen::Vector2d::UnitX() + (eps_ - 1.0) * std::pow(r, eps_ - 3.0) * x.x() * x;
  return cutoff(r) * grad_w + w * cutoff_d1(r) * x / r;
}

double MeyersSolution::f(const Point& x) const {
  const double r = x.norm();
  if (r <= 0.25 || r >= 0.75) return 0.0;
  const double cos_theta = x.x() / r;
  return cos_theta * (cutoff_d2(r) * std::pow(r, eps_) + (2.0 * eps_ + 1.0) * cutoff_d1(r) * std::pow(r, eps_ - 1.0));
}

// ----------------------------------------------------------------- torsion

namespace {

// cosh(a) / cosh(b) and sinh(a) / cosh(b) for |a| <= b without overflow.
double cosh_ratio(double a, double b) {
  const double aa = std::abs(a);
  return std::exp(aa - b) * (1.0 + std::exp(-2.0 * aa)) / (1.0 + std::exp(-2.0 * b));
}

double sinh_ratio(double a, double b) {
  const double aa = std::abs(a);
  const double s = std::exp(aa - b) * (1.0 - std::exp(-2.0 * aa)) / (1.0 + std::exp(-2.0 * b));
  return a < 0.0 ? -s : s;
}

constexpr int kMaxTerms = 2000001;

}  // namespace

TorsionSolution::TorsionSolution(double tolerance) : tol_(tolerance) {}

double TorsionSolution::u_swapped(double x, double y) const {
  // The cosh factor decays like exp(-m pi D), D = min(y, 1 - y).
  const double d = std::min(y, 1.0 - y);
  double s = 0.0;
  for (int m = 1; m < kMaxTerms; m += 2) {
    const double a = m * kPi * (y - 0.5), b = m * kPi * 0.5;
    const double coef = 4.0 / (kPi * kPi * kPi * m * m * m);
    const double decay = std::exp(-m * kPi * d);
    s += coef * std::sin(m * kPi * x) * cosh_ratio(a, b);
    if (coef * decay < tol_ * 1e-2) break;
  }
  return 0.5 * x * (1.0 - x) - s;
}

Eigen::Vector2d TorsionSolution::grad_swapped(double x, double y) const {
  const double d = std::min(y, 1.0 - y);
  double gx = 0.0, gy = 0.0;
  for (int m = 1; m < kMaxTerms; m += 2) {
    const double a = m * kPi * (y - 0.5), b = m * kPi * 0.5;
    const double coef = 4.0 / (kPi * kPi * m * m);
    const double decay = std::exp(-m * kPi * d);
    gx += coef * std::cos(m * kPi * x) * cosh_ratio(a, b);
    gy += coef * std::sin(m * kPi * x) * sinh_ratio(a, b);
    if (coef * decay < tol_ * 1e-2) break;
  }
  return {0.5 - x - gx, -gy};
}

double TorsionSolution::u(const Point& p) const {
  const double dx = std::min(p.x(), 1.0 - p.x());
  const double dy = std::min(p.y(), 1.0 - p.y());
  if (dx <= 0.0 || dy <= 0.0) return 0.0;
  return dy >= dx ? u_swapped(p.x(), p.y()) : u_swapped(p.y(), p.x());
}

Eigen::Vector2d TorsionSolution::grad(const Point& p) const {
  const double dx = std::min(p.x(), 1.0 - p.x());
  const double dy = std::min(p.y(), 1.0 - p.y());
  if (dy >= dx) return grad_swapped(p.x(), p.y());
  const Eigen::Vector2d g = grad_swapped(p.y(), p.x());
  return {g.y(), g.x()};
}

double TorsionSolution::integral() const {
  // 1/12 - sum_{m odd} 16 tanh(m pi / 2) / (pi^5 m^5)
  double s = 0.0;
  for (int m = 1; m < 100001; m += 2) {
    const double term = 16.0 * std::tanh(m * kPi / 2.0) / (std::pow(kPi, 5) * std::pow(m, 5));
    s += term;
    if (term < 1e-18) break;
  }
  return 1.0 / 12.0 - s;
}

}  // namespace meyers

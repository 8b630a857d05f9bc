#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

#include "meyers/elliptic.hpp"
#include "meyers/parallel.hpp"

namespace meyers {

namespace {

constexpr double kPi = std::numbers::pi;

struct GaussRule {
  std::vector<double> nodes, weights;  // on [-1, 1]
};

GaussRule gauss_legendre(int n) {
  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[static_cast<std::size_t>(i)] = x;
    r.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

struct ContourNode {
  Complex lambda;
  Complex weight;  // includes d lambda / d parameter
};

// Nodes of the upper ray, the arc over [phi0, theta], and (optionally)
// the lower ray, oriented with increasing imaginary part.
std::vector<ContourNode> contour_nodes(double t, const ContourRule& rule, bool upper_only) {
  const double r0 = 1.0 / t;
  const double rmax = rule.truncation / (t * std::abs(std::cos(rule.theta)));
  if (!(rmax > r0)) throw std::invalid_argument("contour truncation radius does not exceed 1/t");
  const GaussRule ray = gauss_legendre(rule.ray_nodes);
  const GaussRule arc = gauss_legendre(rule.arc_nodes);
  std::vector<ContourNode> out;
  const Complex up = std::polar(1.0, rule.theta);
  const Complex down = std::polar(1.0, -rule.theta);
  for (int p = 0; p < rule.ray_panels; ++p) {
    const double a = r0 * std::pow(rmax / r0, static_cast<double>(p) / rule.ray_panels);
    const double b = r0 * std::pow(rmax / r0, static_cast<double>(p + 1) / rule.ray_panels);
    for (std::size_t k = 0; k < ray.nodes.size(); ++k) {
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * ray.nodes[k];
      const double w = 0.5 * (b - a) * ray.weights[k];
      out.push_back({r * up, w * up});
      if (!upper_only) out.push_back({r * down, -w * down});
    }
  }
  const int panels = upper_only ? std::max(1, rule.arc_panels / 2) : rule.arc_panels;
  const double lo = upper_only ? 0.0 : -rule.theta;
  const double hi = rule.theta;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + (hi - lo) * p / panels;
    const double b = lo + (hi - lo) * (p + 1) / panels;
    for (std::size_t k = 0; k < arc.nodes.size(); ++k) {
      const double phi = 0.5 * (a + b) + 0.5 * (b - a) * arc.nodes[k];
      const Complex lambda = std::polar(r0, phi);
      out.push_back({lambda, 0.5 * (b - a) * arc.weights[k] * Complex(0.0, 1.0) * lambda});
    }
  }
  return out;
}

bool is_real_vector(const ComplexFunction& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i].imag() != 0.0) return false;
  return true;
}

}  // namespace

ComplexFunction semigroup_apply(const EllipticOperator& op, double t, const ComplexFunction& v, const ContourRule& rule) {
  if (!(t > 0.0)) throw std::invalid_argument("semigroup_apply needs t > 0");
  const int n = op.graph().vertex_count();
  if (v.size() != n) throw std::invalid_argument("semigroup_apply: vector size mismatch");
  const bool conjugate_symmetric = op.is_real() && is_real_vector(v);
  const std::vector<ContourNode> nodes = contour_nodes(t, rule, conjugate_symmetric);

  std::vector<ComplexFunction> terms(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) {
    const ContourNode& node = nodes[k];
    const ResolventSolver solver(op, node.lambda);
    terms[k] = (std::exp(t * node.lambda) * node.weight) * solver.solve(v);
  });
  const ComplexFunction sum = tree_sum(terms);

  if (conjugate_symmetric) {
    // Lower half is the conjugate mirror: total = 2i Im(upper), over 2 pi i.
    return (sum.imag() / kPi).cast<Complex>();
  }
  return sum / Complex(0.0, 2.0 * kPi);
}

ComplexFunction semigroup_kernel(const EllipticOperator& op, double t, int y, const ContourRule& rule) {
  const WeightedGraph& g = op.graph();
  if (y < 0 || y >= g.vertex_count()) throw std::out_of_range("semigroup_kernel: source vertex out of range");
  ComplexFunction delta = ComplexFunction::Zero(g.vertex_count());
  delta[y] = 1.0;
  return semigroup_apply(op, t, delta, rule) / g.m(y);
}

// ----------------------------------------------------------- ExpmOracle

ExpmOracle::ExpmOracle(const EllipticOperator& op, double t_base) : m_(op.graph().measure()), t_base_(t_base) {
  if (!(t_base > 0.0)) throw std::invalid_argument("ExpmOracle needs t_base > 0");
  if (op.is_real()) {
    const Eigen::MatrixXd a = -t_base * Eigen::MatrixXd(op.real_matrix());
    e_ = a.exp().cast<Complex>();
  } else {
    const Eigen::MatrixXcd a = Complex(-t_base) * Eigen::MatrixXcd(op.matrix());
    e_ = a.exp();
  }
}

ComplexFunction ExpmOracle::kernel(double t, int y) const {
  const double ratio = t / t_base_;
  const long k = std::lround(ratio);
  if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-9 * ratio)
    throw std::invalid_argument("ExpmOracle: t / t_base = " + std::to_string(ratio) + " is not a positive integer");
  if (y < 0 || y >= e_.cols()) throw std::out_of_range("ExpmOracle: source vertex out of range");
  ComplexFunction v = e_.col(y);
  for (long i = 1; i < k; ++i) v = e_ * v;
  return v / m_[y];
}

// ---------------------------------------------------------- kernel table

std::string KernelTable::csv_header() { return "t,y,x,d,h_star,regime,K_re,K_im,bound_value"; }

void KernelTable::write_csv(std::ostream& out) const {
  out << csv_header() << '\n';
  char buf[512];
  for (const KernelRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%.17g,%.17g,%c,%.17g,%.17g,%.17g\n", r.t, r.y, r.x, r.d, r.h_star,
                  r.regime, r.k.real(), r.k.imag(), r.bound);
    out << buf;
  }
}

KernelTable kernel_table(const EllipticOperator& op, const std::vector<double>& times, int y,
                         const std::vector<int>& window, double c_prime, const ContourRule& rule, HStarMode mode) {
  const WeightedGraph& g = op.graph();
  std::vector<int> win = window;
  if (win.empty()) {
    for (int x = 0; x < g.vertex_count(); ++x) win.push_back(x);
  }
  const std::vector<double> d = distances_from(g, y);
  const std::vector<double> hs = h_star_column(g, y, mode);
  KernelTable table;
  for (double t : times) {
    const ComplexFunction k = semigroup_kernel(op, t, y, rule);
    for (int x : win) {
      KernelRow row;
      row.t = t;
      row.y = y;
      row.x = x;
      row.d = d[static_cast<std::size_t>(x)];
      row.h_star = hs[static_cast<std::size_t>(x)];
      row.regime = t <= c_prime * row.h_star * row.d ? 'a' : 'b';
      row.k = k[x];
      table.rows.push_back(row);
    }
  }
  return table;
}

KernelFit kernel_bound_check(const EllipticOperator& op, KernelTable& table, double c_prime) {
  constexpr double kShrink = 1.0 - 1e-12;
  constexpr double kSlack = 1.0 + 1e-12;
  const WeightedGraph& g = op.graph();
  KernelFit fit;
  fit.c_prime = c_prime;
  for (KernelRow& r : table.rows) r.regime = r.t <= c_prime * r.h_star * r.d ? 'a' : 'b';

  for (const KernelRow& r : table.rows)
    if (r.x == r.y) fit.C = std::max(fit.C, 2.0 * r.t * std::abs(r.k));
  if (!(fit.C > 0.0)) {
    fit.failure = "no diagonal entry K_t(y, y) in the table";
    return fit;
  }

  // Largest admissible beta per regime: beta <= scale * ln(C / (t |K|)).
  fit.beta_a = kInfinity;
  fit.beta_b = kInfinity;
  for (const KernelRow& r : table.rows) {
    if (r.d <= 0.0) continue;
    const double tk = r.t * std::abs(r.k);
    if (tk == 0.0) continue;
    const double log_ratio = std::log(fit.C / tk);
    const double scale = r.regime == 'a' ? r.h_star / r.d : r.t / (r.d * r.d);
    if (!(log_ratio > 0.0)) {
      fit.failure = "no positive beta for regime " + std::string(1, r.regime) + " at t=" + std::to_string(r.t) +
                    " x=" + std::to_string(r.x) + " y=" + std::to_string(r.y);
      fit.beta_a = fit.beta_b = 0.0;
      return fit;
    }
    double& beta = r.regime == 'a' ? fit.beta_a : fit.beta_b;
    beta = std::min(beta, scale * log_ratio * kShrink);
  }

  int pass_a = 0, pass_b = 0;
  for (KernelRow& r : table.rows) {
    if (r.regime == 'a') {
      ++fit.pairs_a;
      const double beta = std::isfinite(fit.beta_a) ? fit.beta_a : 0.0;
      r.bound = r.d > 0.0 ? fit.C / r.t * std::exp(-beta * r.d / r.h_star) : fit.C / r.t;
      if (std::abs(r.k) <= r.bound * kSlack) ++pass_a;
    } else {
      ++fit.pairs_b;
      const double beta = std::isfinite(fit.beta_b) ? fit.beta_b : 0.0;
      r.bound = fit.C / r.t * std::exp(-beta * r.d * r.d / r.t);
      if (std::abs(r.k) <= r.bound * kSlack) ++pass_b;
    }
  }
  if (fit.pairs_a == 0) fit.beta_a = 0.0;
  if (fit.pairs_b == 0) fit.beta_b = 0.0;
  fit.pass_a = fit.pairs_a ? static_cast<double>(pass_a) / fit.pairs_a : 1.0;
  fit.pass_b = fit.pairs_b ? static_cast<double>(pass_b) / fit.pairs_b : 1.0;

  // Hoelder increments over neighbour pairs with both ends tabulated.
  struct Increment {
    double t, d, value;
  };
  std::map<std::pair<double, int>, Complex> lookup;
  for (const KernelRow& r : table.rows) lookup[{r.t, r.x}] = r.k;
  std::vector<Increment> incs;
  std::map<double, double> worst;
  for (const KernelRow& r : table.rows) {
    for (const Incidence& inc : g.neighbors(r.x)) {
      if (inc.neighbor < r.x) continue;
      const auto it = lookup.find({r.t, inc.neighbor});
      if (it == lookup.end()) continue;
      const double value = r.t * std::abs(r.k - it->second);
      const double d = g.edge(inc.edge).h;
      incs.push_back({r.t, d, value});
      worst[r.t] = std::max(worst[r.t], value / d);
    }
  }
  fit.pairs_holder = static_cast<int>(incs.size());
  if (worst.size() >= 3) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [t, v] : worst)
      if (v > 0.0) pts.emplace_back(t, v);
    if (pts.size() >= 3) fit.eta = std::min(1.0, -2.0 * fit_loglog(pts).slope);
  }
  if (!(fit.eta > 0.0)) {
    if (fit.failure.empty()) fit.failure = "Hoelder increment fit gives eta = " + std::to_string(fit.eta);
  } else {
    for (const Increment& i : incs)
      fit.C2 = std::max(fit.C2, i.value * std::pow(std::sqrt(i.t) / i.d, fit.eta));
    int pass_h = 0;
    for (const Increment& i : incs)
      if (i.value <= fit.C2 * std::pow(i.d / std::sqrt(i.t), fit.eta) * kSlack) ++pass_h;
    fit.pass_holder = incs.empty() ? 1.0 : static_cast<double>(pass_h) / static_cast<double>(incs.size());
  }

  fit.ok = fit.failure.empty() && fit.beta_b > 0.0 && (fit.pairs_a == 0 || fit.beta_a > 0.0) && fit.pass_a == 1.0 &&
           fit.pass_b == 1.0 && fit.pass_holder == 1.0 && fit.eta > 0.0;
  return fit;
}

}  // namespace meyers

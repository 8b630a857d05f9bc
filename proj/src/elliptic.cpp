#include "meyers/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "meyers/parallel.hpp"

namespace meyers {

namespace {
constexpr double kPi = std::numbers::pi;
}

// ------------------------------------------------------- EdgeCoefficients

EdgeCoefficients::EdgeCoefficients(std::vector<Complex> forward, std::vector<Complex> backward)
    : forward_(std::move(forward)), backward_(std::move(backward)) {
  if (forward_.size() != backward_.size()) throw std::invalid_argument("edge coefficient arrays differ in length");
  delta_edge_ = forward_.empty() ? 0.0 : kInfinity;
  for (std::size_t e = 0; e < forward_.size(); ++e) {
    if (!std::isfinite(std::abs(forward_[e])) || !std::isfinite(std::abs(backward_[e])))
      throw std::invalid_argument("edge coefficient is not finite");
    c_inf_ = std::max({c_inf_, std::abs(forward_[e]), std::abs(backward_[e])});
    delta_edge_ = std::min(delta_edge_, 0.5 * (forward_[e] + backward_[e]).real());
  }
  if (!(delta_edge_ > 0.0)) {
    throw std::invalid_argument("edge coefficients are not elliptic: min Re(c_xy + c_yx)/2 = " +
                                std::to_string(delta_edge_));
  }
}

EdgeCoefficients EdgeCoefficients::uniform(const WeightedGraph& g, Complex c) {
  return EdgeCoefficients(std::vector<Complex>(static_cast<std::size_t>(g.edge_count()), c),
                          std::vector<Complex>(static_cast<std::size_t>(g.edge_count()), c));
}

EdgeCoefficients EdgeCoefficients::perturbed(const WeightedGraph& g, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<Complex> fw, bw;
  for (int e = 0; e < g.edge_count(); ++e) {
    const double a = unif(rng);
    const double b = unif(rng);
    fw.emplace_back(1.0 + amplitude * a, amplitude * b);
    bw.emplace_back(1.0 - amplitude * a, amplitude * b);
  }
  return EdgeCoefficients(std::move(fw), std::move(bw));
}

EdgeCoefficients EdgeCoefficients::antisymmetric_real(const WeightedGraph& g, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<Complex> fw, bw;
  for (int e = 0; e < g.edge_count(); ++e) {
    const double a = unif(rng);
    fw.emplace_back(1.0 + amplitude * a, 0.0);
    bw.emplace_back(1.0 - amplitude * a, 0.0);
  }
  return EdgeCoefficients(std::move(fw), std::move(bw));
}

bool EdgeCoefficients::is_real() const {
  for (std::size_t e = 0; e < forward_.size(); ++e)
    if (forward_[e].imag() != 0.0 || backward_[e].imag() != 0.0) return false;
  return true;
}

double exact_ellipticity(const WeightedGraph& g, const EdgeCoefficients& c) {
  const int n = g.vertex_count();
  if (n < 2) return kInfinity;
  Eigen::MatrixXd num = Eigen::MatrixXd::Zero(n, n), den = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    const double w = ed.mu / (ed.h * ed.h);
    const double wn = c.edge_sum(e).real() * w;
    const double wd = 2.0 * w;
    for (auto [mat, val] : {std::pair{&num, wn}, std::pair{&den, wd}}) {
      (*mat)(ed.u, ed.u) += val;
      (*mat)(ed.v, ed.v) += val;
      (*mat)(ed.u, ed.v) -= val;
      (*mat)(ed.v, ed.u) -= val;
    }
  }
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, n - 1);
  for (int i = 1; i < n; ++i) {
    basis(0, i - 1) = -1.0;
    basis(i, i - 1) = 1.0;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      basis.transpose() * num * basis, basis.transpose() * den * basis, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("exact ellipticity eigenproblem failed");
  return solver.eigenvalues().minCoeff();
}

// ------------------------------------------------------ EllipticOperator

EllipticOperator::EllipticOperator(const WeightedGraph& g, EdgeCoefficients c)
    : g_(g), c_(std::move(c)), real_(c_.is_real()) {
  if (static_cast<int>(c_.size()) != g_.edge_count()) throw std::invalid_argument("coefficient count differs from edge count");
  const int n = g_.vertex_count();
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(g_.edge_count()) * 4);
  for (int e = 0; e < g_.edge_count(); ++e) {
    const Edge& ed = g_.edge(e);
    const Complex w = c_.edge_sum(e) * ed.mu / (ed.h * ed.h);
    trips.emplace_back(ed.u, ed.u, w / g_.m(ed.u));
    trips.emplace_back(ed.u, ed.v, -w / g_.m(ed.u));
    trips.emplace_back(ed.v, ed.v, w / g_.m(ed.v));
    trips.emplace_back(ed.v, ed.u, -w / g_.m(ed.v));
  }
  matrix_.resize(n, n);
  matrix_.setFromTriplets(trips.begin(), trips.end());
  matrix_.makeCompressed();
  real_matrix_ = matrix_.real();
}

Complex EllipticOperator::form(const ComplexFunction& u, const ComplexFunction& v) const {
  std::vector<Complex> terms(static_cast<std::size_t>(g_.edge_count()));
  for (int e = 0; e < g_.edge_count(); ++e) {
    const Edge& ed = g_.edge(e);
    const Complex du = (u[ed.v] - u[ed.u]) / ed.h;
    const Complex dv = (v[ed.v] - v[ed.u]) / ed.h;
    terms[static_cast<std::size_t>(e)] = c_.edge_sum(e) * du * std::conj(dv) * ed.mu;
  }
  return tree_sum(terms);
}

Complex EllipticOperator::pairing(const ComplexFunction& u, const ComplexFunction& v) const {
  const ComplexFunction lu = apply(u);
  std::vector<Complex> terms(static_cast<std::size_t>(g_.vertex_count()));
  for (int x = 0; x < g_.vertex_count(); ++x) terms[static_cast<std::size_t>(x)] = lu[x] * std::conj(v[x]) * g_.m(x);
  return tree_sum(terms);
}

// ------------------------------------------------------------ accretivity

AccretivityEstimate accretivity_angle(const EllipticOperator& op, std::uint64_t seed, int random_probes, int refined) {
  const WeightedGraph& g = op.graph();
  const int n = g.vertex_count();
  // F = diag(m) M_L, <Lu, u>_m = u^H F u = a + i b with a = u^H H u, b = u^H S u.
  Eigen::SparseMatrix<Complex> f = g.measure().cast<Complex>().asDiagonal() * op.matrix();
  const Eigen::SparseMatrix<Complex> fh = f.adjoint();
  const Eigen::SparseMatrix<Complex> herm = 0.5 * (f + fh);
  const Eigen::SparseMatrix<Complex> skew = (f - fh) * Complex(0.0, -0.5);

  auto angle_of = [&](const ComplexFunction& u, double& a, double& b) {
    a = u.dot(herm * u).real();  // dot conjugates the first argument
    b = u.dot(skew * u).real();
    return std::atan2(std::abs(b), a);
  };

  AccretivityEstimate est;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::pair<double, ComplexFunction>> probes;
  for (int k = 0; k < random_probes; ++k) {
    ComplexFunction u(n);
    for (int x = 0; x < n; ++x) u[x] = Complex(unif(rng), unif(rng));
    double a, b;
    const double ang = angle_of(u, a, b);
    if (std::abs(Complex(a, b)) <= 1e-14 * u.squaredNorm()) {
      ++est.skipped;
      continue;
    }
    ++est.probes;
    probes.emplace_back(ang, std::move(u));
  }
  std::stable_sort(probes.begin(), probes.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
  if (!probes.empty()) {
    est.omega = probes.front().first;
    est.probe = probes.front().second;
  }

  const int count = std::min<int>(refined, static_cast<int>(probes.size()));
  for (int k = 0; k < count; ++k) {
    ComplexFunction u = probes[static_cast<std::size_t>(k)].second;
    double a, b;
    double best = angle_of(u, a, b);
    double step = 0.1;
    for (int it = 0; it < 300 && step > 1e-10; ++it) {
      // Ascent direction for rho = b / a, signed towards larger |rho|.
      const double sign = b >= 0.0 ? 1.0 : -1.0;
      ComplexFunction grad = (skew * u - (b / a) * (herm * u)) * (sign / a);
      const double gn = grad.norm();
      if (!(gn > 0.0)) break;
      ComplexFunction trial = u + (step * u.norm() / gn) * grad;
      double ta, tb;
      const double ang = angle_of(trial, ta, tb);
      if (ang > best) {
        u = trial / trial.norm();
        best = ang;
        a = ta / trial.squaredNorm();
        b = tb / trial.squaredNorm();
        step *= 2.0;
      } else {
        step *= 0.5;
      }
    }
    if (best > est.omega) {
      est.omega = best;
      est.probe = u;
    }
  }
  return est;
}

SectorPoint::SectorPoint(Complex l, double accretivity_angle)
    : lambda(l), omega(accretivity_angle), mu_sector(kPi / 2.0 + 0.5 * (kPi / 2.0 - accretivity_angle)) {}

bool SectorPoint::inside() const { return lambda == Complex(0.0) || std::abs(std::arg(lambda)) < mu_sector; }

// ------------------------------------------------------------- resolvent

struct ResolventSolver::Impl {
  const EllipticOperator* op = nullptr;
  Complex lambda;
  bool real = false;
  Eigen::SparseMatrix<double> a_real;
  Eigen::SparseMatrix<Complex> a_complex;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_real;
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu_complex;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<Complex>>> lu_transpose;
  Eigen::SparseMatrix<Complex> a_transpose;
};

ResolventSolver::ResolventSolver(const EllipticOperator& op, Complex lambda) : impl_(std::make_unique<Impl>()) {
  impl_->op = &op;
  impl_->lambda = lambda;
  impl_->real = op.is_real() && lambda.imag() == 0.0;
  const int n = op.graph().vertex_count();
  if (impl_->real) {
    Eigen::SparseMatrix<double> id(n, n);
    id.setIdentity();
    impl_->a_real = op.real_matrix() + lambda.real() * id;
    impl_->lu_real.compute(impl_->a_real);
    if (impl_->lu_real.info() != Eigen::Success) throw std::runtime_error("resolvent factorization failed");
  } else {
    Eigen::SparseMatrix<Complex> id(n, n);
    id.setIdentity();
    impl_->a_complex = op.matrix() + lambda * id;
    impl_->lu_complex.compute(impl_->a_complex);
    if (impl_->lu_complex.info() != Eigen::Success) throw std::runtime_error("resolvent factorization failed");
  }
}

ResolventSolver::~ResolventSolver() = default;
ResolventSolver::ResolventSolver(ResolventSolver&&) noexcept = default;

namespace {
void check_residual(double residual, double scale) {
  if (scale > 0.0 && !(residual <= 1e-10 * scale))
    throw std::runtime_error("resolvent solve residual " + std::to_string(residual / scale) + " exceeds 1e-10");
}
}  // namespace

ComplexFunction ResolventSolver::solve(const ComplexFunction& f) const {
  ComplexFunction u;
  if (impl_->real) {
    const RealFunction ur = impl_->lu_real.solve(f.real());
    const RealFunction ui = impl_->lu_real.solve(f.imag());
    u = ur.cast<Complex>() + Complex(0.0, 1.0) * ui.cast<Complex>();
    check_residual((impl_->a_real.cast<Complex>() * u - f).norm(), f.norm());
  } else {
    u = impl_->lu_complex.solve(f);
    check_residual((impl_->a_complex * u - f).norm(), f.norm());
  }
  return u;
}

RealFunction ResolventSolver::solve_real(const RealFunction& f) const {
  if (!impl_->real) return solve(f.cast<Complex>()).real();
  RealFunction u = impl_->lu_real.solve(f);
  check_residual((impl_->a_real * u - f).norm(), f.norm());
  return u;
}

ComplexFunction ResolventSolver::solve_transpose(const ComplexFunction& f) const {
  if (!impl_->lu_transpose) {
    const int n = impl_->op->graph().vertex_count();
    Eigen::SparseMatrix<Complex> id(n, n);
    id.setIdentity();
    impl_->a_transpose = Eigen::SparseMatrix<Complex>(impl_->op->matrix().transpose()) + impl_->lambda * id;
    impl_->lu_transpose = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<Complex>>>(impl_->a_transpose);
    if (impl_->lu_transpose->info() != Eigen::Success) throw std::runtime_error("transpose factorization failed");
  }
  ComplexFunction w = impl_->lu_transpose->solve(f);
  check_residual((impl_->a_transpose * w - f).norm(), f.norm());
  return w;
}

ComplexFunction resolvent_solve(const EllipticOperator& op, const SectorPoint& lambda, const ComplexFunction& f) {
  if (!lambda.inside()) {
    throw std::invalid_argument("lambda = " + std::to_string(lambda.lambda.real()) + " + " +
                                std::to_string(lambda.lambda.imag()) + "i lies outside the sector of half-angle " +
                                std::to_string(lambda.mu_sector));
  }
  return ResolventSolver(op, lambda.lambda).solve(f);
}

ResolventSweep resolvent_bound_sweep(const EllipticOperator& op, const std::vector<double>& magnitudes,
                                     const std::vector<std::pair<std::string, double>>& rays,
                                     const std::vector<ComplexFunction>& f_samples, double eta,
                                     const std::vector<int>& window, int extremal_center) {
  const WeightedGraph& g = op.graph();
  std::vector<int> win = window;
  if (win.empty()) {
    for (int x = 0; x < g.vertex_count(); ++x) win.push_back(x);
  }
  ResolventSweep sweep;
  sweep.eta = eta;
  std::vector<ComplexFunction> solutions;
  for (const auto& [ray, arg] : rays) {
    for (double mag : magnitudes) {
      const Complex lambda = std::polar(mag, arg);
      const ResolventSolver solver(op, lambda);
      std::vector<ComplexFunction> samples = f_samples;
      if (extremal_center >= 0) {
        // u(c) = sum_x R_cx f(x); the maximizer over ||f||_2 = 1 is conj(R_c.) / m.
        ComplexFunction delta = ComplexFunction::Zero(g.vertex_count());
        delta[extremal_center] = 1.0;
        const ComplexFunction row_c = solver.solve_transpose(delta);
        samples.push_back(row_c.conjugate().cwiseQuotient(g.measure().cast<Complex>()));
      }
      for (std::size_t s = 0; s < samples.size(); ++s) {
        ResolventRow row;
        row.lambda = lambda;
        row.ray = ray;
        row.sample = static_cast<int>(s);
        row.f_l2 = lp_norm(g, samples[s], 2.0);
        ComplexFunction u = solver.solve(samples[s]);
        for (int x : win) row.u_inf = std::max(row.u_inf, std::abs(u[x]));
        sweep.rows.push_back(row);
        solutions.push_back(std::move(u));
      }
    }
  }
  HolderOptions opts;
  opts.subset = win;
  const auto semis = holder_seminorms(g, solutions, eta, opts);
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    auto& r = sweep.rows[i];
    const double mag = std::abs(r.lambda);
    r.u_holder = semis[i].seminorm;
    r.r_inf = r.u_inf * std::sqrt(mag) / r.f_l2;
    r.r_eta = r.u_holder * std::pow(mag, 0.5 * (1.0 - eta)) / r.f_l2;
  }
  for (const auto& [ray, arg] : rays) {
    const std::size_t sample_count = f_samples.size() + (extremal_center >= 0 ? 1 : 0);
    for (std::size_t s = 0; s < sample_count; ++s) {
      std::vector<double> ri, re;
      std::vector<std::pair<double, double>> pi, ph;
      for (const auto& r : sweep.rows) {
        if (r.ray != ray || r.sample != static_cast<int>(s)) continue;
        ri.push_back(r.r_inf);
        re.push_back(r.r_eta);
        pi.emplace_back(std::abs(r.lambda), r.u_inf);
        ph.emplace_back(std::abs(r.lambda), r.u_holder);
      }
      sweep.r_inf_spread = std::max(sweep.r_inf_spread, spread(ri));
      sweep.r_eta_spread = std::max(sweep.r_eta_spread, spread(re));
      if (pi.size() >= 3) {
        sweep.inf_slopes.push_back(fit_loglog(pi));
        sweep.holder_slopes.push_back(fit_loglog(ph));
      }
    }
  }
  return sweep;
}

std::vector<int> interior_window(const WeightedGraph& lattice, int nx, int ny, double margin) {
  if (nx * ny != lattice.vertex_count()) throw std::invalid_argument("interior_window: box size mismatch");
  const int i0 = static_cast<int>(std::ceil(margin * (nx - 1))), i1 = static_cast<int>(std::floor((1.0 - margin) * (nx - 1)));
  const int j0 = static_cast<int>(std::ceil(margin * (ny - 1))), j1 = static_cast<int>(std::floor((1.0 - margin) * (ny - 1)));
  std::vector<int> out;
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) out.push_back(j * nx + i);
  return out;
}

}  // namespace meyers

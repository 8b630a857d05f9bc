#include "meyers/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "meyers/parallel.hpp"

namespace meyers {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct LocalGeometry {
  std::array<Point, 3> p;
  std::array<Eigen::Vector2d, 3> grad;  ///< gradients of the barycentric coordinates
  double area;
};

LocalGeometry local_geometry(const Triangulation& tri, int t) {
  LocalGeometry g;
  const auto& ids = tri.triangles()[static_cast<std::size_t>(t)];
  for (int k = 0; k < 3; ++k) g.p[static_cast<std::size_t>(k)] = tri.points()[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])];
  g.area = tri.area(t);
  for (int i = 0; i < 3; ++i) {
    const Point& pj = g.p[static_cast<std::size_t>((i + 1) % 3)];
    const Point& pk = g.p[static_cast<std::size_t>((i + 2) % 3)];
    g.grad[static_cast<std::size_t>(i)] = Eigen::Vector2d(pj.y() - pk.y(), pk.x() - pj.x()) / (2.0 * g.area);
  }
  return g;
}

// Degree-4 symmetric rule on triangles (6 points); weights sum to 1.
struct QuadraturePoint {
  double l0, l1, l2, w;
};
constexpr std::array<QuadraturePoint, 6> kQuad4{{
    {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
    {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.816847572980459, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.091576213509771, 0.816847572980459, 0.109951743655322},
}};

SparseMatrix hilbert_gram(const P1System& sys) {
  const int k = sys.unknowns();
  std::vector<Triplet> trips;
  for (int i = 0; i < k; ++i) trips.emplace_back(i, i, sys.graph.m(sys.interior[static_cast<std::size_t>(i)]));
  for (const auto& e : sys.graph.edges()) {
    const double w = 2.0 * e.mu / (e.h * e.h);
    const int a = sys.unknown[static_cast<std::size_t>(e.u)], b = sys.unknown[static_cast<std::size_t>(e.v)];
    if (a >= 0) trips.emplace_back(a, a, w);
    if (b >= 0) trips.emplace_back(b, b, w);
    if (a >= 0 && b >= 0) {
      trips.emplace_back(a, b, -w);
      trips.emplace_back(b, a, -w);
    }
  }
  SparseMatrix g(k, k);
  g.setFromTriplets(trips.begin(), trips.end());
  return g;
}

}  // namespace

Eigen::VectorXd P1System::unknown_measure() const {
  Eigen::VectorXd m(unknowns());
  for (int i = 0; i < unknowns(); ++i) m[i] = graph.m(interior[static_cast<std::size_t>(i)]);
  return m;
}

RealFunction P1System::expand(const Eigen::VectorXd& values) const {
  RealFunction f = RealFunction::Zero(mesh.vertex_count());
  for (int i = 0; i < unknowns(); ++i) f[interior[static_cast<std::size_t>(i)]] = values[i];
  return f;
}

Eigen::VectorXd P1System::restrict(const RealFunction& f) const {
  Eigen::VectorXd v(unknowns());
  for (int i = 0; i < unknowns(); ++i) v[i] = f[interior[static_cast<std::size_t>(i)]];
  return v;
}

P1System assemble(const Triangulation& tri, const CoefficientField& a) {
  P1System sys{tri, from_triangulation(tri), {}, {}, {}, {}, {}, true};
  sys.unknown.assign(static_cast<std::size_t>(tri.vertex_count()), -1);
  for (int x = 0; x < tri.vertex_count(); ++x) {
    if (!tri.is_boundary(x)) {
      sys.unknown[static_cast<std::size_t>(x)] = static_cast<int>(sys.interior.size());
      sys.interior.push_back(x);
    }
  }
  const int k = sys.unknowns();
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(tri.triangle_count()) * 9);
  for (int t = 0; t < tri.triangle_count(); ++t) {
    const LocalGeometry geo = local_geometry(tri, t);
    const Point bary = (geo.p[0] + geo.p[1] + geo.p[2]) / 3.0;
    const Eigen::Matrix2d m = a(bary);
    if (!m.allFinite()) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "coefficient is not finite at barycenter (%.17g, %.17g) of triangle %d",
                    bary.x(), bary.y(), t);
      throw std::runtime_error(buf);
    }
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 0.0) sys.symmetric = false;
    const auto& ids = tri.triangles()[static_cast<std::size_t>(t)];
    for (int i = 0; i < 3; ++i) {
      const int row = sys.unknown[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])];
      if (row < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int col = sys.unknown[static_cast<std::size_t>(ids[static_cast<std::size_t>(j)])];
        if (col < 0) continue;
        trips.emplace_back(row, col, geo.area * geo.grad[static_cast<std::size_t>(i)].dot(m * geo.grad[static_cast<std::size_t>(j)]));
      }
    }
  }
  sys.stiffness.resize(k, k);
  sys.stiffness.setFromTriplets(trips.begin(), trips.end());
  sys.stiffness.makeCompressed();
  sys.moments = Eigen::VectorXd::Zero(k);
  sys.load = Eigen::VectorXd::Zero(k);
  return sys;
}

Eigen::VectorXd moments_from_samples(const P1System& sys, const RealFunction& samples) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sys.unknowns());
  const auto& tri = sys.mesh;
  for (int t = 0; t < tri.triangle_count(); ++t) {
    const auto& ids = tri.triangles()[static_cast<std::size_t>(t)];
    const double a12 = tri.area(t) / 12.0;
    const double sum = samples[ids[0]] + samples[ids[1]] + samples[ids[2]];
    for (int i = 0; i < 3; ++i) {
      const int row = sys.unknown[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])];
      if (row >= 0) out[row] += a12 * (sum + samples[ids[static_cast<std::size_t>(i)]]);
    }
  }
  return out;
}

Eigen::VectorXd moments_from_callable(const P1System& sys, const std::function<double(const Point&)>& f) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sys.unknowns());
  const auto& tri = sys.mesh;
  for (int t = 0; t < tri.triangle_count(); ++t) {
    const auto& ids = tri.triangles()[static_cast<std::size_t>(t)];
    for (int i = 0; i < 3; ++i) {
      const int v = ids[static_cast<std::size_t>(i)];
      const int row = sys.unknown[static_cast<std::size_t>(v)];
      if (row >= 0) out[row] += tri.area(t) / 3.0 * f(tri.points()[static_cast<std::size_t>(v)]);
    }
  }
  return out;
}

Eigen::VectorXd moments_from_divergence(const P1System& sys, const std::function<Eigen::Vector2d(const Point&)>& F) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sys.unknowns());
  const auto& tri = sys.mesh;
  for (int t = 0; t < tri.triangle_count(); ++t) {
    const LocalGeometry geo = local_geometry(tri, t);
    const Eigen::Vector2d mean =
        (F(0.5 * (geo.p[0] + geo.p[1])) + F(0.5 * (geo.p[1] + geo.p[2])) + F(0.5 * (geo.p[2] + geo.p[0]))) / 3.0;
    const auto& ids = tri.triangles()[static_cast<std::size_t>(t)];
    for (int i = 0; i < 3; ++i) {
      const int row = sys.unknown[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])];
      if (row >= 0) out[row] -= geo.area * mean.dot(geo.grad[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

void set_load(P1System& sys, const Eigen::VectorXd& moments) {
  if (moments.size() != sys.unknowns()) throw std::invalid_argument("set_load: size mismatch");
  sys.moments = moments;
  sys.load = -moments;
}

RealFunction discrete_load(const P1System& sys) {
  return sys.expand(sys.moments.cwiseQuotient(sys.unknown_measure()));
}

Solution solve(const P1System& sys, SolverKind kind) {
  Solution sol;
  const double bnorm = sys.load.norm();
  if (bnorm == 0.0) {
    sol.u = RealFunction::Zero(sys.mesh.vertex_count());
    sol.method = "trivial";
    return sol;
  }
  Eigen::VectorXd x;
  if (kind == SolverKind::direct && sys.symmetric) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(sys.stiffness);
    if (ldlt.info() != Eigen::Success) throw SolveError("LDL^T factorization failed", 1.0);
    x = ldlt.solve(sys.load);
    sol.method = "ldlt";
  } else if (kind == SolverKind::direct) {
    Eigen::SparseLU<SparseMatrix> lu;
    lu.analyzePattern(sys.stiffness);
    lu.factorize(sys.stiffness);
    if (lu.info() != Eigen::Success) throw SolveError("sparse LU factorization failed: " + lu.lastErrorMessage(), 1.0);
    x = lu.solve(sys.load);
    sol.method = "sparse_lu";
  } else {
    Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> it;
    it.setTolerance(1e-13);
    it.setMaxIterations(20000);
    it.compute(sys.stiffness);
    x = it.solve(sys.load);
    sol.method = "bicgstab";
  }
  sol.residual = (sys.stiffness * x - sys.load).norm() / bnorm;
  if (!(sol.residual <= 1e-10)) throw SolveError(sol.method + " solve did not reach residual 1e-10", sol.residual);
  sol.u = sys.expand(x);
  return sol;
}

RealFunction apply_Lh(const P1System& sys, const RealFunction& u) {
  const Eigen::VectorXd ku = sys.stiffness * sys.restrict(u);
  return sys.expand(ku.cwiseQuotient(sys.unknown_measure()));
}

double lhuh_defect(const P1System& sys, const Solution& sol) {
  const RealFunction fh = discrete_load(sys);
  const double scale = fh.cwiseAbs().maxCoeff();
  const double defect = (apply_Lh(sys, sol.u) + fh).cwiseAbs().maxCoeff();
  return scale > 0.0 ? defect / scale : defect;
}

double bilinear_form(const P1System& sys, const RealFunction& u, const RealFunction& v) {
  return sys.restrict(v).dot(sys.stiffness * sys.restrict(u));
}

double coercivity_constant(const P1System& sys) {
  const Eigen::MatrixXd k = Eigen::MatrixXd(sys.stiffness);
  const Eigen::MatrixXd sym = 0.5 * (k + k.transpose());
  const Eigen::MatrixXd gram = Eigen::MatrixXd(hilbert_gram(sys));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("coercivity eigenproblem failed");
  return solver.eigenvalues().minCoeff();
}

OperatorNorms hilbert_operator_norms(const P1System& sys, int max_iterations, double tolerance) {
  const SparseMatrix gram = hilbert_gram(sys);
  Eigen::SimplicialLDLT<SparseMatrix> g_inv(gram);
  Eigen::SparseLU<SparseMatrix> k_lu(sys.stiffness);
  const SparseMatrix kt = sys.stiffness.transpose();
  Eigen::SparseLU<SparseMatrix> kt_lu(kt);
  if (g_inv.info() != Eigen::Success || k_lu.info() != Eigen::Success || kt_lu.info() != Eigen::Success)
    throw std::runtime_error("operator norm factorizations failed");

  // Both maps are self-adjoint and positive in the G inner product; the
  // G-Rayleigh quotient of the iterate converges to the top eigenvalue.
  auto power = [&](auto&& apply, int& iterations) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(sys.unknowns());
    v /= std::sqrt(v.dot(gram * v));
    double lambda = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
      const Eigen::VectorXd w = apply(v);
      const double next = v.dot(gram * w);
      v = w / std::sqrt(w.dot(gram * w));
      iterations = std::max(iterations, it + 1);
      if (std::abs(next - lambda) <= tolerance * std::abs(next)) {
        lambda = next;
        break;
      }
      lambda = next;
    }
    return lambda;
  };
  OperatorNorms out;
  const double top = power([&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return g_inv.solve(kt * g_inv.solve(sys.stiffness * v));
  }, out.iterations);
  const double inv_top = power([&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return k_lu.solve(gram * kt_lu.solve(gram * v));
  }, out.iterations);
  out.norm = std::sqrt(top);
  out.inverse_norm = std::sqrt(inv_top);
  return out;
}

// ------------------------------------------------------------------ P1Field

P1Field::P1Field(const Triangulation& tri, RealFunction values) : tri_(&tri), values_(std::move(values)) {
  if (values_.size() != tri.vertex_count()) throw std::invalid_argument("P1Field: value count mismatch");
}

Eigen::Vector2d P1Field::gradient(int t) const {
  const LocalGeometry geo = local_geometry(*tri_, t);
  const auto& ids = tri_->triangles()[static_cast<std::size_t>(t)];
  return values_[ids[0]] * geo.grad[0] + values_[ids[1]] * geo.grad[1] + values_[ids[2]] * geo.grad[2];
}

int P1Field::locate(const Point& x) const {
  const auto& tri = *tri_;
  if (buckets_.empty()) {
    lo_ = tri.points().front();
    Point hi = lo_;
    for (const Point& p : tri.points()) {
      lo_ = lo_.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    nx_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(tri.triangle_count()))));
    ny_ = nx_;
    cell_ = Point((hi.x() - lo_.x()) / nx_, (hi.y() - lo_.y()) / ny_);
    buckets_.assign(static_cast<std::size_t>(nx_ * ny_), {});
    for (int t = 0; t < tri.triangle_count(); ++t) {
      const auto& ids = tri.triangles()[static_cast<std::size_t>(t)];
      Point a = tri.points()[static_cast<std::size_t>(ids[0])], b = a;
      for (int v : ids) {
        a = a.cwiseMin(tri.points()[static_cast<std::size_t>(v)]);
        b = b.cwiseMax(tri.points()[static_cast<std::size_t>(v)]);
      }
      const int i0 = std::clamp(static_cast<int>((a.x() - lo_.x()) / cell_.x()), 0, nx_ - 1);
      const int i1 = std::clamp(static_cast<int>((b.x() - lo_.x()) / cell_.x()), 0, nx_ - 1);
      const int j0 = std::clamp(static_cast<int>((a.y() - lo_.y()) / cell_.y()), 0, ny_ - 1);
      const int j1 = std::clamp(static_cast<int>((b.y() - lo_.y()) / cell_.y()), 0, ny_ - 1);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j * nx_ + i)].push_back(t);
    }
  }
  const int i = std::clamp(static_cast<int>((x.x() - lo_.x()) / cell_.x()), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>((x.y() - lo_.y()) / cell_.y()), 0, ny_ - 1);
  const double tol = 1e-12;
  for (int t : buckets_[static_cast<std::size_t>(j * nx_ + i)]) {
    const LocalGeometry geo = local_geometry(tri, t);
    bool inside = true;
    for (int k = 0; k < 3 && inside; ++k) {
      const double l = 1.0 / 3.0 + geo.grad[static_cast<std::size_t>(k)].dot(x - (geo.p[0] + geo.p[1] + geo.p[2]) / 3.0);
      inside = l >= -tol;
    }
    if (inside) return t;
  }
  return -1;
}

double P1Field::operator()(const Point& x) const {
  const int t = locate(x);
  if (t < 0) throw std::out_of_range("P1Field: point outside the mesh");
  const LocalGeometry geo = local_geometry(*tri_, t);
  const auto& ids = tri_->triangles()[static_cast<std::size_t>(t)];
  const Point c = (geo.p[0] + geo.p[1] + geo.p[2]) / 3.0;
  double v = 0.0;
  for (int k = 0; k < 3; ++k) v += values_[ids[static_cast<std::size_t>(k)]] * (1.0 / 3.0 + geo.grad[static_cast<std::size_t>(k)].dot(x - c));
  return v;
}

double P1Field::lp_norm(double p) const {
  if (std::isinf(p)) return values_.cwiseAbs().maxCoeff();
  std::vector<double> terms(static_cast<std::size_t>(tri_->triangle_count()));
  for (int t = 0; t < tri_->triangle_count(); ++t) {
    const auto& ids = tri_->triangles()[static_cast<std::size_t>(t)];
    double s = 0.0;
    for (const auto& q : kQuad4) {
      const double v = q.l0 * values_[ids[0]] + q.l1 * values_[ids[1]] + q.l2 * values_[ids[2]];
      s += q.w * std::pow(std::abs(v), p);
    }
    terms[static_cast<std::size_t>(t)] = tri_->area(t) * s;
  }
  return std::pow(tree_sum(terms), 1.0 / p);
}

double P1Field::grad_lp_norm(double p) const {
  if (std::isinf(p)) {
    double m = 0.0;
    for (int t = 0; t < tri_->triangle_count(); ++t) m = std::max(m, gradient(t).norm());
    return m;
  }
  std::vector<double> terms(static_cast<std::size_t>(tri_->triangle_count()));
  for (int t = 0; t < tri_->triangle_count(); ++t)
    terms[static_cast<std::size_t>(t)] = tri_->area(t) * std::pow(gradient(t).norm(), p);
  return std::pow(tree_sum(terms), 1.0 / p);
}

std::vector<double> holder_seminorms(const std::vector<const P1Field*>& fields, double eta) {
  if (fields.empty()) return {};
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("Hoelder exponent must lie in (0, 1]");
  const Triangulation& tri = fields.front()->mesh();
  std::vector<Point> pts(tri.points());
  const auto edges = tri.edges();
  for (const auto& [a, b] : edges) pts.push_back(0.5 * (tri.points()[static_cast<std::size_t>(a)] + tri.points()[static_cast<std::size_t>(b)]));
  const std::size_t np = pts.size();

  // values[f][i]
  std::vector<std::vector<double>> values(fields.size(), std::vector<double>(np));
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const RealFunction& v = fields[f]->values();
    for (int i = 0; i < tri.vertex_count(); ++i) values[f][static_cast<std::size_t>(i)] = v[i];
    for (std::size_t e = 0; e < edges.size(); ++e)
      values[f][static_cast<std::size_t>(tri.vertex_count()) + e] = 0.5 * (v[edges[e].first] + v[edges[e].second]);
  }

  std::vector<std::vector<double>> row_best(np, std::vector<double>(fields.size(), 0.0));
  const double half_eta = 0.5 * eta;
  parallel_for(np, [&](std::size_t i) {
    std::vector<double> scale(np - i - 1);
    for (std::size_t j = i + 1; j < np; ++j) scale[j - i - 1] = std::pow((pts[i] - pts[j]).squaredNorm(), -half_eta);
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const auto& v = values[f];
      double best = 0.0;
      for (std::size_t j = i + 1; j < np; ++j) best = std::max(best, std::abs(v[i] - v[j]) * scale[j - i - 1]);
      row_best[i][f] = best;
    }
  });
  std::vector<double> out(fields.size(), 0.0);
  for (const auto& rb : row_best)
    for (std::size_t f = 0; f < fields.size(); ++f) out[f] = std::max(out[f], rb[f]);
  return out;
}

double P1Field::holder_seminorm(double eta) const { return meyers::holder_seminorms({this}, eta).front(); }

double P1Field::holder_norm(double eta) const { return lp_norm(kInfinity) + holder_seminorm(eta); }

P1Field::Errors P1Field::error(const std::function<double(const Point&)>& u,
                               const std::function<Eigen::Vector2d(const Point&)>& grad, double p) const {
  std::vector<double> lp(static_cast<std::size_t>(tri_->triangle_count()));
  std::vector<double> gp(lp.size());
  for (int t = 0; t < tri_->triangle_count(); ++t) {
    const LocalGeometry geo = local_geometry(*tri_, t);
    const auto& ids = tri_->triangles()[static_cast<std::size_t>(t)];
    const Eigen::Vector2d gh = gradient(t);
    double sl = 0.0, sg = 0.0;
    for (const auto& q : kQuad4) {
      const Point x = q.l0 * geo.p[0] + q.l1 * geo.p[1] + q.l2 * geo.p[2];
      const double vh = q.l0 * values_[ids[0]] + q.l1 * values_[ids[1]] + q.l2 * values_[ids[2]];
      sl += q.w * std::pow(std::abs(vh - u(x)), p);
      sg += q.w * std::pow((gh - grad(x)).norm(), p);
    }
    lp[static_cast<std::size_t>(t)] = geo.area * sl;
    gp[static_cast<std::size_t>(t)] = geo.area * sg;
  }
  return {std::pow(tree_sum(lp), 1.0 / p), std::pow(tree_sum(gp), 1.0 / p)};
}

RealFunction transfer(const P1Field& coarse, const Triangulation& fine) {
  RealFunction out(fine.vertex_count());
  for (int v = 0; v < fine.vertex_count(); ++v) out[v] = coarse(fine.points()[static_cast<std::size_t>(v)]);
  return out;
}

std::vector<EquivalenceBracket> norm_equivalence_study(const Triangulation& tri, const std::vector<double>& p_list,
                                                       double eta, int samples, std::uint64_t seed) {
  const WeightedGraph g = from_triangulation(tri);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<RealFunction> funcs;
  for (int s = 0; s < samples; ++s) {
    RealFunction u = RealFunction::Zero(g.vertex_count());
    for (int x : g.interior()) u[x] = unif(rng);
    funcs.push_back(std::move(u));
  }
  std::vector<P1Field> fields;
  for (const auto& u : funcs) fields.emplace_back(tri, u);
  std::vector<const P1Field*> field_ptrs;
  for (const auto& f : fields) field_ptrs.push_back(&f);

  const auto graph_semi = holder_seminorms(g, funcs, eta);
  const auto cont_semi = holder_seminorms(field_ptrs, eta);
  std::vector<double> holder_ratio(funcs.size());
  for (std::size_t s = 0; s < funcs.size(); ++s) {
    const double sup = funcs[s].cwiseAbs().maxCoeff();
    holder_ratio[s] = (sup + graph_semi[s].seminorm) / (sup + cont_semi[s]);
  }

  std::vector<EquivalenceBracket> out;
  for (double p : p_list) {
    EquivalenceBracket br;
    br.p = p;
    br.eta = eta;
    br.lp_min = br.grad_min = br.holder_min = kInfinity;
    for (std::size_t s = 0; s < funcs.size(); ++s) {
      const double rl = lp_norm(g, funcs[s], p) / fields[s].lp_norm(p);
      const double rg = lp_norm(g, gradient_length(g, funcs[s]), p) / fields[s].grad_lp_norm(p);
      br.lp_min = std::min(br.lp_min, rl);
      br.lp_max = std::max(br.lp_max, rl);
      br.grad_min = std::min(br.grad_min, rg);
      br.grad_max = std::max(br.grad_max, rg);
      br.holder_min = std::min(br.holder_min, holder_ratio[s]);
      br.holder_max = std::max(br.holder_max, holder_ratio[s]);
    }
    out.push_back(br);
  }
  return out;
}

void write_solution(std::ostream& out, const P1System& sys, const RealFunction& u) {
  out << "vertex_id,x,y,u\n";
  char buf[160];
  for (int v = 0; v < sys.mesh.vertex_count(); ++v) {
    const Point& p = sys.mesh.points()[static_cast<std::size_t>(v)];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", v, p.x(), p.y(), u[v]);
    out << buf;
  }
}

void write_system(std::ostream& out, const P1System& sys) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << sys.stiffness.rows() << ' ' << sys.stiffness.cols() << ' ' << sys.stiffness.nonZeros() << '\n';
  char buf[96];
  for (int c = 0; c < sys.stiffness.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(sys.stiffness, c); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(it.row() + 1), static_cast<long>(it.col() + 1),
                    it.value());
      out << buf;
    }
  }
}

}  // namespace meyers

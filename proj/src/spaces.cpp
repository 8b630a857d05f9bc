#include "meyers/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <random>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "meyers/parallel.hpp"

namespace meyers {

namespace {

double power_sum_root(const std::vector<double>& terms, double p) { return std::pow(tree_sum(terms), 1.0 / p); }

}  // namespace

template <class T>
EdgeFunction<T> differential(const WeightedGraph& g, const VertexFunction<T>& f) {
  EdgeFunction<T> out;
  out.values.resize(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    out.values[e] = (f[ed.v] - f[ed.u]) / ed.h;
  }
  return out;
}

template <class T>
RealFunction gradient_length(const WeightedGraph& g, const VertexFunction<T>& f) {
  RealFunction out(g.vertex_count());
  for (int x = 0; x < g.vertex_count(); ++x) {
    double s = 0.0;
    for (const auto& inc : g.neighbors(x)) s += std::norm(f[inc.neighbor] - f[x]);
    out[x] = std::sqrt(s) / g.h_x(x);
  }
  return out;
}

template <class T>
double lp_norm(const WeightedGraph& g, const VertexFunction<T>& f, double p) {
  if (std::isinf(p)) return f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
  std::vector<double> terms(static_cast<std::size_t>(f.size()));
  for (Eigen::Index x = 0; x < f.size(); ++x)
    terms[static_cast<std::size_t>(x)] = std::pow(std::abs(f[x]), p) * g.m(static_cast<int>(x));
  return power_sum_root(terms, p);
}

template <class T>
double edge_lp_norm(const WeightedGraph& g, const EdgeFunction<T>& F, double p) {
  if (std::isinf(p)) return F.values.size() ? F.values.cwiseAbs().maxCoeff() : 0.0;
  std::vector<double> terms(static_cast<std::size_t>(F.values.size()));
  for (Eigen::Index e = 0; e < F.values.size(); ++e)
    terms[static_cast<std::size_t>(e)] = 2.0 * std::pow(std::abs(F.values[e]), p) * g.edge(static_cast<int>(e)).mu;
  return power_sum_root(terms, p);
}

template <class T>
double w1p_norm(const WeightedGraph& g, const VertexFunction<T>& f, double p) {
  return lp_norm(g, f, p) + lp_norm(g, gradient_length(g, f), p);
}

template <class T>
std::vector<HolderResult> holder_seminorms(const WeightedGraph& g, const std::vector<VertexFunction<T>>& fs,
                                           double eta, const HolderOptions& options) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("Hoelder exponent must lie in (0, 1]");
  std::vector<int> points = options.subset;
  if (points.empty()) {
    points.resize(static_cast<std::size_t>(g.vertex_count()));
    for (int x = 0; x < g.vertex_count(); ++x) points[static_cast<std::size_t>(x)] = x;
  }
  const auto k = static_cast<std::int64_t>(points.size());
  const std::int64_t all_pairs = k * (k - 1) / 2;
  const bool exact = static_cast<double>(all_pairs) <= options.max_exact_pairs;

  std::vector<std::size_t> rows;
  if (exact) {
    for (std::size_t i = 0; i + 1 < points.size(); ++i) rows.push_back(i);
  } else {
    const auto count = static_cast<std::size_t>(std::max(1, options.sampled_rows));
    for (std::size_t s = 0; s < count; ++s) rows.push_back(s * points.size() / count);
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  }

  // row_best[r][f]: sup for function f over pairs anchored at row r.
  std::vector<std::vector<double>> row_best(rows.size(), std::vector<double>(fs.size(), 0.0));
  std::vector<std::int64_t> row_pairs(rows.size(), 0);
  parallel_for(rows.size(), [&](std::size_t r) {
    const std::size_t i = rows[r];
    const int x = points[i];
    const std::vector<double> dist = distances_from(g, x);
    // Exact mode visits j > i; sampled rows pair with every other point.
    const std::size_t j0 = exact ? i + 1 : 0;
    std::vector<double> scale;
    std::vector<int> ys;
    for (std::size_t j = j0; j < points.size(); ++j) {
      if (j == i) continue;
      ys.push_back(points[j]);
      scale.push_back(std::pow(dist[static_cast<std::size_t>(points[j])], -eta));
    }
    row_pairs[r] = static_cast<std::int64_t>(ys.size());
    for (std::size_t fi = 0; fi < fs.size(); ++fi) {
      const auto& f = fs[fi];
      double best = 0.0;
      for (std::size_t j = 0; j < ys.size(); ++j) best = std::max(best, std::abs(f[x] - f[ys[j]]) * scale[j]);
      row_best[r][fi] = best;
    }
  });

  std::vector<HolderResult> out(fs.size());
  std::int64_t pairs = 0;
  for (auto c : row_pairs) pairs += c;
  for (std::size_t fi = 0; fi < fs.size(); ++fi) {
    out[fi].exact = exact;
    out[fi].pairs = pairs;
    for (const auto& rb : row_best) out[fi].seminorm = std::max(out[fi].seminorm, rb[fi]);
  }
  return out;
}

template <class T>
HolderResult holder_seminorm(const WeightedGraph& g, const VertexFunction<T>& f, double eta,
                             const HolderOptions& options) {
  return holder_seminorms<T>(g, {f}, eta, options).front();
}

std::string NormReport::csv_header() { return "graph_id,p,eta,lp,grad_lp,w1p,holder_semi,holder_norm"; }

std::string NormReport::csv_row(const std::string& graph_id) const {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", graph_id.c_str(), p, eta, lp,
                grad_lp, w1p, holder_semi, holder_norm);
  return buf;
}

template <class T>
NormReport norm_report(const WeightedGraph& g, const VertexFunction<T>& f, double p, double eta) {
  NormReport r;
  r.p = p;
  r.eta = eta;
  r.lp = lp_norm(g, f, p);
  r.grad_lp = lp_norm(g, gradient_length(g, f), p);
  r.w1p = r.lp + r.grad_lp;
  r.edge_lp = edge_lp_norm(g, differential(g, f), p);
  if (eta > 0.0) {
    const HolderResult h = holder_seminorm(g, f, eta);
    r.holder_semi = h.seminorm;
    r.holder_exact = h.exact;
    r.holder_norm = lp_norm(g, f, kInfinity) + h.seminorm;
  }
  return r;
}

double pairing(const WeightedGraph& g, const RealFunction& f, const RealFunction& v) {
  std::vector<double> terms(static_cast<std::size_t>(f.size()));
  for (Eigen::Index x = 0; x < f.size(); ++x) terms[static_cast<std::size_t>(x)] = f[x] * v[x] * g.m(static_cast<int>(x));
  return tree_sum(terms);
}

// ---------------------------------------------------------------- dual norm

namespace {

/// Test-norm value and gradient on the free (non-boundary) vertices.
class TestNormEvaluator {
 public:
  TestNormEvaluator(const WeightedGraph& g, const std::vector<int>& free, double q, TestNorm kind)
      : g_(g), free_(free), q_(q), kind_(kind), full_(RealFunction::Zero(g.vertex_count())) {}

  double value(const RealFunction& v, RealFunction* grad) {
    for (std::size_t i = 0; i < free_.size(); ++i) full_[free_[i]] = v[static_cast<Eigen::Index>(i)];
    RealFunction ga = RealFunction::Zero(g_.vertex_count());
    RealFunction gb = RealFunction::Zero(g_.vertex_count());

    const double a = lp_norm(g_, full_, q_);
    if (grad && a > 0.0) {
      for (int x = 0; x < g_.vertex_count(); ++x) {
        const double vx = full_[x];
        ga[x] = g_.m(x) * std::pow(std::abs(vx), q_ - 1.0) * (vx > 0 ? 1.0 : (vx < 0 ? -1.0 : 0.0)) /
                std::pow(a, q_ - 1.0);
      }
    }

    double b = 0.0;
    if (kind_ == TestNorm::grad_sum) {
      const RealFunction grad_len = gradient_length(g_, full_);
      b = lp_norm(g_, grad_len, q_);
      if (grad && b > 0.0) {
        const double scale = 1.0 / std::pow(b, q_ - 1.0);
        for (int x = 0; x < g_.vertex_count(); ++x) {
          const double G = grad_len[x];
          if (G <= 0.0) continue;
          const double c = scale * g_.m(x) * std::pow(G, q_ - 2.0) / (g_.h_x(x) * g_.h_x(x));
          for (const auto& inc : g_.neighbors(x)) {
            const double diff = full_[inc.neighbor] - full_[x];
            gb[inc.neighbor] += c * diff;
            gb[x] -= c * diff;
          }
        }
      }
    } else {
      const EdgeFunction<double> dv = differential(g_, full_);
      b = edge_lp_norm(g_, dv, q_);
      if (grad && b > 0.0) {
        const double scale = 2.0 / std::pow(b, q_ - 1.0);
        for (int e = 0; e < g_.edge_count(); ++e) {
          const Edge& ed = g_.edge(e);
          const double D = dv.values[e];
          if (D == 0.0) continue;
          const double c = scale * ed.mu * std::pow(std::abs(D), q_ - 2.0) * D / ed.h;
          gb[ed.v] += c;
          gb[ed.u] -= c;
        }
      }
    }

    double n = 0.0;
    double wa = 1.0, wb = 1.0;
    if (kind_ == TestNorm::hilbert_edge) {
      n = std::pow(std::pow(a, q_) + std::pow(b, q_), 1.0 / q_);
      if (n > 0.0) {
        wa = std::pow(a / n, q_ - 1.0);
        wb = std::pow(b / n, q_ - 1.0);
      }
    } else {
      n = a + b;
    }
    if (grad) {
      grad->resize(static_cast<Eigen::Index>(free_.size()));
      for (std::size_t i = 0; i < free_.size(); ++i)
        (*grad)[static_cast<Eigen::Index>(i)] = wa * ga[free_[i]] + wb * gb[free_[i]];
    }
    return n;
  }

 private:
  const WeightedGraph& g_;
  const std::vector<int>& free_;
  double q_;
  TestNorm kind_;
  RealFunction full_;
};

const char* test_norm_name(TestNorm n) {
  switch (n) {
    case TestNorm::grad_sum: return "grad_sum";
    case TestNorm::hilbert_edge: return "hilbert_edge";
    case TestNorm::sum_edge: return "sum_edge";
  }
  return "?";
}

}  // namespace

DualResult dual_norm(const WeightedGraph& g, const RealFunction& f, double p, DualMode mode,
                     const DualOptions& options) {
  if (!(p > 1.0 && p < kInfinity)) throw std::invalid_argument("dual_norm requires 1 < p < infinity");
  if (f.size() != g.vertex_count()) throw std::invalid_argument("dual_norm: function size mismatch");
  const std::vector<int>& free = g.interior();
  const auto k = static_cast<Eigen::Index>(free.size());
  std::vector<int> local(static_cast<std::size_t>(g.vertex_count()), -1);
  for (std::size_t i = 0; i < free.size(); ++i) local[static_cast<std::size_t>(free[i])] = static_cast<int>(i);

  DualResult result;
  RealFunction f0 = f;
  for (int b : g.boundary()) f0[b] = 0.0;
  result.upper_bound = lp_norm(g, f0, p);

  Eigen::VectorXd rhs(k);
  for (Eigen::Index i = 0; i < k; ++i) rhs[i] = f[free[static_cast<std::size_t>(i)]] * g.m(free[static_cast<std::size_t>(i)]);
  if (rhs.isZero(0.0)) {
    result.value = 0.0;
    result.maximizer = RealFunction::Zero(g.vertex_count());
    result.variant = mode == DualMode::exact_p2 ? "exact_p2" : test_norm_name(options.norm);
    return result;
  }

  // Gram matrix of (||v||_2^2 + ||dv||_{L^2(E)}^2) on the free vertices.
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index i = 0; i < k; ++i) trips.emplace_back(i, i, g.m(free[static_cast<std::size_t>(i)]));
  for (const auto& e : g.edges()) {
    const double w = 2.0 * e.mu / (e.h * e.h);
    const int a = local[static_cast<std::size_t>(e.u)], b = local[static_cast<std::size_t>(e.v)];
    if (a >= 0) trips.emplace_back(a, a, w);
    if (b >= 0) trips.emplace_back(b, b, w);
    if (a >= 0 && b >= 0) {
      trips.emplace_back(a, b, -w);
      trips.emplace_back(b, a, -w);
    }
  }
  Eigen::SparseMatrix<double> gram(k, k);
  gram.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(gram);
  if (chol.info() != Eigen::Success) throw std::runtime_error("dual_norm: Gram factorization failed");
  const Eigen::VectorXd riesz = chol.solve(rhs);

  auto expand = [&](const Eigen::VectorXd& v) {
    RealFunction full = RealFunction::Zero(g.vertex_count());
    for (Eigen::Index i = 0; i < k; ++i) full[free[static_cast<std::size_t>(i)]] = v[i];
    return full;
  };

  if (mode == DualMode::exact_p2) {
    if (p != 2.0) throw std::invalid_argument("exact_p2 dual norm requires p = 2");
    result.value = std::sqrt(std::max(0.0, rhs.dot(riesz)));
    result.maximizer = expand(riesz / result.value);
    result.variant = "exact_p2";
    return result;
  }

  const double q = p / (p - 1.0);
  TestNormEvaluator norm(g, free, q, options.norm);
  result.variant = test_norm_name(options.norm);

  Eigen::VectorXd v = riesz;
  if (options.start_from_f) {
    for (Eigen::Index i = 0; i < k; ++i) v[i] = f[free[static_cast<std::size_t>(i)]];
  }
  double nv = norm.value(v, nullptr);
  if (!(nv > 0.0)) {
    v = riesz;
    nv = norm.value(v, nullptr);
  }
  v /= nv;
  double J = rhs.dot(v);
  if (J < 0.0) {
    v = -v;
    J = -J;
  }

  double step = 0.25;
  int quiet = 0;
  bool converged = false;
  int it = 0;
  Eigen::VectorXd grad_n;
  for (; it < options.max_iterations; ++it) {
    norm.value(v, &grad_n);
    // N(v) = 1 here, so grad J = g - J grad N.
    const Eigen::VectorXd grad_j = rhs - J * grad_n;
    Eigen::VectorXd dir = chol.solve(grad_j);
    const double dn = std::sqrt(std::max(0.0, dir.dot(gram * dir)));
    const double vn = std::sqrt(std::max(0.0, v.dot(gram * v)));
    if (!(dn > 1e-300)) {
      converged = true;
      break;
    }
    dir *= vn / dn;

    bool accepted = false;
    while (step > 1e-14) {
      Eigen::VectorXd trial = v + step * dir;
      const double nt = norm.value(trial, nullptr);
      if (nt > 0.0) {
        trial /= nt;
        const double Jt = rhs.dot(trial);
        if (Jt > J) {
          const double gain = (Jt - J) / Jt;
          v = trial;
          J = Jt;
          step = std::min(1.0, 2.0 * step);
          accepted = true;
          quiet = gain < options.tolerance ? quiet + 1 : 0;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted || quiet >= 5) {
      converged = true;
      break;
    }
  }
  result.value = J;
  result.iterations = it;
  result.converged = converged;
  result.maximizer = expand(v);
  return result;
}

// ------------------------------------------------------------ maximal

template <class T>
RealFunction maximal_function(const WeightedGraph& g, const VertexFunction<T>& f) {
  const int n = g.vertex_count();
  std::vector<RealFunction> per_center(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t c) {
    const std::vector<double> dist = distances_from(g, static_cast<int>(c));
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return dist[static_cast<std::size_t>(a)] != dist[static_cast<std::size_t>(b)]
                 ? dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)]
                 : a < b;
    });
    // Balls around c are prefixes ending at a distance group boundary.
    std::vector<std::size_t> group_end;
    std::vector<double> group_avg;
    double mass = 0.0, vol = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const int y = order[i];
      mass += std::abs(f[y]) * g.m(y);
      vol += g.m(y);
      const bool last = i + 1 == order.size() ||
                        dist[static_cast<std::size_t>(order[i + 1])] != dist[static_cast<std::size_t>(y)];
      if (last) {
        group_end.push_back(i + 1);
        group_avg.push_back(mass / vol);
      }
    }
    for (std::size_t j = group_avg.size(); j-- > 1;) group_avg[j - 1] = std::max(group_avg[j - 1], group_avg[j]);
    RealFunction best(n);
    std::size_t gidx = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      while (i >= group_end[gidx]) ++gidx;
      best[order[i]] = group_avg[gidx];
    }
    per_center[c] = std::move(best);
  });
  RealFunction out = RealFunction::Zero(n);
  for (const auto& b : per_center) out = out.cwiseMax(b);
  return out;
}

// ------------------------------------------------------------ embeddings

namespace {

std::vector<double> distance_to_set(const WeightedGraph& g, const std::vector<int>& sources) {
  std::vector<double> dist(static_cast<std::size_t>(g.vertex_count()), kInfinity);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (int s : sources) {
    dist[static_cast<std::size_t>(s)] = 0.0;
    queue.emplace(0.0, s);
  }
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    for (const auto& inc : g.neighbors(u)) {
      const double nd = d + g.edge(inc.edge).h;
      if (nd < dist[static_cast<std::size_t>(inc.neighbor)]) {
        dist[static_cast<std::size_t>(inc.neighbor)] = nd;
        queue.emplace(nd, inc.neighbor);
      }
    }
  }
  return dist;
}

}  // namespace

EmbeddingReport embedding_report(const WeightedGraph& g, double p, int trials, std::uint64_t seed) {
  if (p == 2.0) throw std::invalid_argument("embedding_report: p = 2 is neither p < sigma = 2 nor p > sigma = 2");
  if (!(p >= 1.0)) throw std::invalid_argument("embedding_report: p must be at least 1");
  EmbeddingReport rep;
  rep.p = p;
  const int n = g.vertex_count();
  const std::vector<int>& interior = g.interior();

  std::vector<RealFunction> cands;
  std::vector<std::string> names;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    RealFunction f = RealFunction::Zero(n);
    for (int x : interior) f[x] = unif(rng);
    cands.push_back(std::move(f));
    names.push_back("random_" + std::to_string(t));
  }
  const std::size_t picks = std::min<std::size_t>(16, interior.size());
  for (std::size_t s = 0; s < picks; ++s) {
    const int x = interior[s * interior.size() / picks];
    RealFunction f = RealFunction::Zero(n);
    f[x] = 1.0;
    cands.push_back(std::move(f));
    names.push_back("indicator_" + std::to_string(x));
  }
  std::vector<double> to_boundary;
  if (!g.boundary().empty()) {
    to_boundary = distance_to_set(g, g.boundary());
    RealFunction f(n);
    for (int x = 0; x < n; ++x) f[x] = to_boundary[static_cast<std::size_t>(x)];
    cands.push_back(std::move(f));
    names.push_back("distance_to_boundary");
  }
  const std::size_t bumps = std::min<std::size_t>(8, interior.size());
  for (std::size_t s = 0; s < bumps; ++s) {
    const int c = interior[(2 * s + 1) * interior.size() / (2 * bumps)];
    const std::vector<double> dc = distances_from(g, c);
    double radius = 0.0;
    if (!to_boundary.empty()) {
      radius = to_boundary[static_cast<std::size_t>(c)];
    } else {
      for (double d : dc) radius = std::max(radius, d);
      radius /= 4.0;
    }
    RealFunction f(n);
    for (int x = 0; x < n; ++x) f[x] = std::max(0.0, radius - dc[static_cast<std::size_t>(x)]);
    cands.push_back(std::move(f));
    names.push_back("bump_" + std::to_string(c));
  }

  if (p < 2.0) {
    rep.p_star = 2.0 * p / (2.0 - p);
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const double denom = lp_norm(g, gradient_length(g, cands[i]), p);
      if (!(denom > 0.0)) continue;
      const double r = lp_norm(g, cands[i], rep.p_star) / denom;
      if (r > rep.sobolev_ratio_max) {
        rep.sobolev_ratio_max = r;
        rep.sobolev_argmax = names[i];
      }
    }
  } else {
    rep.eta = 1.0 - 2.0 / p;
    const auto semis = holder_seminorms(g, cands, rep.eta);
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const double denom = w1p_norm(g, cands[i], p);
      if (!(denom > 0.0)) continue;
      const double r = (lp_norm(g, cands[i], kInfinity) + semis[i].seminorm) / denom;
      if (r > rep.holder_ratio_max) {
        rep.holder_ratio_max = r;
        rep.holder_argmax = names[i];
      }
    }
  }
  return rep;
}

// ------------------------------------------------------ instantiations

#define MEYERS_INSTANTIATE(T)                                                                                   \
  template EdgeFunction<T> differential(const WeightedGraph&, const VertexFunction<T>&);                        \
  template RealFunction gradient_length(const WeightedGraph&, const VertexFunction<T>&);                        \
  template double lp_norm(const WeightedGraph&, const VertexFunction<T>&, double);                              \
  template double edge_lp_norm(const WeightedGraph&, const EdgeFunction<T>&, double);                           \
  template double w1p_norm(const WeightedGraph&, const VertexFunction<T>&, double);                             \
  template std::vector<HolderResult> holder_seminorms(const WeightedGraph&, const std::vector<VertexFunction<T>>&, \
                                                      double, const HolderOptions&);                            \
  template HolderResult holder_seminorm(const WeightedGraph&, const VertexFunction<T>&, double,                 \
                                        const HolderOptions&);                                                  \
  template NormReport norm_report(const WeightedGraph&, const VertexFunction<T>&, double, double);              \
  template RealFunction maximal_function(const WeightedGraph&, const VertexFunction<T>&);

MEYERS_INSTANTIATE(double)
MEYERS_INSTANTIATE(std::complex<double>)

#undef MEYERS_INSTANTIATE

}  // namespace meyers

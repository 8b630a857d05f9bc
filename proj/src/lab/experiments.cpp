#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "meyers/coefficients.hpp"
#include "meyers/elliptic.hpp"
#include "meyers/galerkin.hpp"
#include "meyers/lab.hpp"
#include "meyers/parallel.hpp"

namespace meyers::lab {

namespace {

constexpr double kPi = std::numbers::pi;

using Tables = std::map<std::string, Table>;

// ------------------------------------------------------------- schemas

const std::map<std::string, std::map<std::string, std::vector<std::string>>>& schemas() {
  static const std::map<std::string, std::map<std::string, std::vector<std::string>>> s = {
      {"meyers_sweep",
       {{"", {"level", "h", "vertices", "unknowns", "p", "residual", "lhuh_defect", "f_l2", "lp", "grad_lp", "w1p",
              "ratio"}}}},
      {"counterexample",
       {{"", {"level", "h", "vertices", "eps", "p", "p_c", "residual", "lhuh_defect", "lp", "grad_lp", "w1p",
              "error_grad_lp"}}}},
      {"holder_convergence",
       {{"", {"level", "h", "vertices", "p", "eta", "residual", "lhuh_defect", "sup", "holder_semi", "holder_norm"}},
        {"cauchy", {"coarse_level", "fine_level", "eta", "diff_sup", "diff_holder_semi", "diff_holder_norm"}}}},
      {"rate_theta",
       {{"", {"level", "h", "vertices", "reference", "p", "eps_probe", "residual", "lhuh_defect", "error_lp",
              "error_grad_lp", "error_w1p", "center_value"}}}},
      {"resolvent_sweep",
       {{"", {"coefficient", "ray", "arg", "lambda_abs", "lambda_re", "lambda_im", "sample", "eta", "f_l2", "u_inf",
              "u_holder", "r_inf", "r_eta", "inside_sector"}},
        {"accretivity", {"coefficient", "omega", "mu_sector", "probes", "skipped", "delta_edge", "sup_norm"}},
        {"scaling", {"lambda", "max_abs_diff", "max_abs_u"}}}},
      {"kernel_bounds",
       {{"", {"t", "y", "x", "d", "h_star", "regime", "K_re", "K_im", "bound_value"}},
        {"fit", {"c_prime", "C", "beta_a", "beta_b", "C2", "eta", "pairs_a", "pairs_b", "pairs_holder", "pass_a",
                 "pass_b", "pass_holder", "ok"}},
        {"oracle", {"t", "max_abs_dev", "mass"}}}},
      {"embeddings",
       {{"", {"level", "h", "vertices", "p", "p_star", "eta", "sobolev_ratio_max", "holder_ratio_max",
              "sobolev_argmax", "holder_argmax"}}}},
      {"geometry",
       {{"", {"level", "h", "vertices", "r0", "balls", "doubling", "lower_volume", "poincare",
              "doubling_exponent"}}}},
  };
  return s;
}

Tables empty_tables(const std::string& experiment) {
  Tables t;
  for (const auto& [suffix, header] : schemas().at(experiment)) t.emplace(suffix, Table(header));
  return t;
}

// Cells run concurrently; each fills its own tables, merged in cell order.
void run_cells(RunResult& result, const std::vector<std::string>& names,
               const std::function<void(std::size_t, Tables&)>& body) {
  std::vector<Tables> parts(names.size(), empty_tables(result.experiment));
  std::vector<std::string> errors(names.size());
  parallel_for(names.size(), [&](std::size_t i) {
    try {
      body(i, parts[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      parts[i] = empty_tables(result.experiment);
    }
  });
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!errors[i].empty()) result.aborted.push_back(names[i] + ": " + errors[i]);
    for (auto& [suffix, table] : parts[i]) result.tables.at(suffix).append(table);
  }
}

// ------------------------------------------------------------ builders

Polygon domain_polygon(const Config& c, const std::string& fallback) {
  const std::string d = c.text("domain", fallback);
  if (d == "unit_square") return Polygon::unit_square();
  if (d == "centered_square") return Polygon::rectangle(-1.0, -1.0, 1.0, 1.0);
  if (d == "rectangle") {
    const auto b = c.numbers("domain_bounds", {});
    if (b.size() != 4) throw ConfigError("domain_bounds must list x0, y0, x1, y1");
    return Polygon::rectangle(b[0], b[1], b[2], b[3]);
  }
  if (d == "polygon") {
    std::ifstream in(c.text("polygon_file"));
    if (!in) throw ConfigError("cannot open polygon_file " + c.text("polygon_file"));
    return read_polygon(in);
  }
  throw ConfigError("unknown domain '" + d + "'");
}

std::pair<Point, Point> bounding_box(const Polygon& poly) {
  Point lo = poly.vertices().front(), hi = lo;
  for (const Point& v : poly.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {lo, hi};
}

CoefficientField coefficient_field(const Config& c, const Polygon& poly, const std::string& fallback) {
  const std::string kind = c.text("coefficient", fallback);
  if (kind == "identity") return CoefficientField::identity();
  if (kind == "checkerboard") {
    const auto [lo, hi] = bounding_box(poly);
    return CoefficientField::checkerboard(c.number("a1", 1.0), c.number("a2", 4.0), c.integer("cells", 4), lo, hi);
  }
  if (kind == "meyers") return CoefficientField::meyers(c.number("eps", 0.5));
  if (kind == "smooth") return CoefficientField::smooth();
  if (kind == "constant") {
    const auto m = c.numbers("matrix", {});
    if (m.size() != 4) throw ConfigError("matrix must list a11, a12, a21, a22");
    Eigen::Matrix2d a;
    a << m[0], m[1], m[2], m[3];
    return CoefficientField::constant(a);
  }
  throw ConfigError("unknown coefficient '" + kind + "'");
}

std::function<double(const Point&)> load_function(const Config& c, const std::string& fallback) {
  const std::string kind = c.text("f", fallback);
  if (kind == "constant") {
    const double v = c.number("f_value", 1.0);
    return [v](const Point&) { return v; };
  }
  if (kind == "meyers") {
    const MeyersSolution sol(c.number("eps", 0.5));
    return [sol](const Point& x) { return sol.f(x); };
  }
  throw ConfigError("unknown f '" + kind + "'");
}

double level_spacing(int level) { return std::ldexp(1.0, -level); }

std::vector<int> levels(const Config& c, const std::vector<int>& fallback) {
  auto out = c.integers("levels", fallback);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (int l : out)
    if (l < 0 || l > 12) throw ConfigError("levels must lie in [0, 12]");
  return out;
}

std::vector<std::string> level_names(const std::vector<int>& ls) {
  std::vector<std::string> out;
  for (int l : ls) out.push_back("level=" + std::to_string(l));
  return out;
}

double l2_norm_of(const Triangulation& tri, const std::function<double(const Point&)>& f) {
  const P1Field zero(tri, RealFunction::Zero(tri.vertex_count()));
  return zero.error(f, [](const Point&) { return Eigen::Vector2d::Zero().eval(); }, 2.0).lp;
}

struct Solved {
  P1System sys;
  Solution sol;
  double defect = 0.0;
};

Solved solve_level(const Polygon& poly, int level, const CoefficientField& a,
                   const std::function<double(const Point&)>& f) {
  const Triangulation tri = triangulate(poly, level_spacing(level));
  Solved s{assemble(tri, a), {}, 0.0};
  set_load(s.sys, moments_from_callable(s.sys, f));
  s.sol = solve(s.sys);
  s.defect = lhuh_defect(s.sys, s.sol);
  return s;
}

// ---------------------------------------------------------- experiments

void meyers_sweep(const Config& c, RunResult& r) {
  const Polygon poly = domain_polygon(c, "unit_square");
  const CoefficientField a = coefficient_field(c, poly, "checkerboard");
  const auto f = load_function(c, "constant");
  const auto ps = c.numbers("p", {2.2});
  for (double p : ps)
    if (!(p > 2.0)) throw ConfigError("meyers_sweep needs p > 2");
  const auto ls = levels(c, {3, 4, 5, 6});
  run_cells(r, level_names(ls), [&](std::size_t i, Tables& t) {
    const Solved s = solve_level(poly, ls[i], a, f);
    const P1Field field(s.sys.mesh, s.sol.u);
    const double f_l2 = l2_norm_of(s.sys.mesh, f);
    for (double p : ps) {
      const double lp = field.lp_norm(p), gp = field.grad_lp_norm(p);
      Row row;
      row << ls[i] << level_spacing(ls[i]) << s.sys.mesh.vertex_count() << s.sys.unknowns() << p << s.sol.residual
          << s.defect << f_l2 << lp << gp << lp + gp << (lp + gp) / f_l2;
      t.at("").add(row.cells);
    }
  });
}

void counterexample(const Config& c, RunResult& r) {
  const double eps = c.number("eps", 0.5);
  const Polygon poly = domain_polygon(c, "centered_square");
  const CoefficientField a = CoefficientField::meyers(eps);
  const MeyersSolution exact(eps);
  const auto f = [exact](const Point& x) { return exact.f(x); };
  const auto ps = c.numbers("p", {2.5, 6.0});
  const auto ls = levels(c, {3, 4, 5, 6});
  run_cells(r, level_names(ls), [&](std::size_t i, Tables& t) {
    const Solved s = solve_level(poly, ls[i], a, f);
    const P1Field field(s.sys.mesh, s.sol.u);
    for (double p : ps) {
      const double lp = field.lp_norm(p), gp = field.grad_lp_norm(p);
      const auto err = field.error([&](const Point& x) { return exact.u(x); },
                                   [&](const Point& x) { return exact.grad(x); }, p);
      Row row;
      row << ls[i] << level_spacing(ls[i]) << s.sys.mesh.vertex_count() << eps << p << exact.critical_exponent()
          << s.sol.residual << s.defect << lp << gp << lp + gp << err.grad_lp;
      t.at("").add(row.cells);
    }
  });
}

void holder_convergence(const Config& c, RunResult& r) {
  const Polygon poly = domain_polygon(c, "unit_square");
  const CoefficientField a = coefficient_field(c, poly, "checkerboard");
  const auto f = load_function(c, "constant");
  const double p = c.number("p", 2.2);
  if (!(p > 2.0)) throw ConfigError("holder_convergence needs p > 2");
  const double eta = c.number("eta", 1.0 - 2.0 / p);
  const auto ls = levels(c, {3, 4, 5, 6});
  std::vector<std::unique_ptr<Solved>> solved(ls.size());
  run_cells(r, level_names(ls), [&](std::size_t i, Tables& t) {
    solved[i] = std::make_unique<Solved>(solve_level(poly, ls[i], a, f));
    const Solved& s = *solved[i];
    const P1Field field(s.sys.mesh, s.sol.u);
    const double sup = field.lp_norm(kInfinity), semi = field.holder_seminorm(eta);
    Row row;
    row << ls[i] << level_spacing(ls[i]) << s.sys.mesh.vertex_count() << p << eta << s.sol.residual << s.defect
        << sup << semi << sup + semi;
    t.at("").add(row.cells);
  });
  std::vector<std::string> pairs;
  for (std::size_t i = 0; i + 1 < ls.size(); ++i)
    pairs.push_back("levels=" + std::to_string(ls[i]) + "," + std::to_string(ls[i + 1]));
  run_cells(r, pairs, [&](std::size_t i, Tables& t) {
    if (!solved[i] || !solved[i + 1]) throw std::runtime_error("a level solve was aborted");
    const Solved& coarse = *solved[i];
    const Solved& fine = *solved[i + 1];
    const RealFunction lifted = transfer(P1Field(coarse.sys.mesh, coarse.sol.u), fine.sys.mesh);
    const P1Field diff(fine.sys.mesh, lifted - fine.sol.u);
    const double sup = diff.lp_norm(kInfinity), semi = diff.holder_seminorm(eta);
    Row row;
    row << ls[i] << ls[i + 1] << eta << sup << semi << sup + semi;
    t.at("cauchy").add(row.cells);
  });
}

void rate_theta(const Config& c, RunResult& r) {
  const Polygon poly = domain_polygon(c, "unit_square");
  const std::string coefficient = c.text("coefficient", "identity");
  const CoefficientField a = coefficient_field(c, poly, "identity");
  const std::string f_kind = c.text("f", "constant");
  const double f_value = c.number("f_value", -1.0);
  Config fc = c;
  fc.set("f_value", format_number(f_value));
  const auto load = load_function(fc, "constant");
  const double p = c.number("p", 2.2);
  const double eps_probe = c.number("eps_probe", 0.5);
  if (!(p > 2.0 && p < 2.0 + eps_probe)) throw ConfigError("rate_theta needs 2 < p < 2 + eps_probe");
  const bool torsion = coefficient == "identity" && f_kind == "constant" && f_value == -1.0 &&
                       poly.axis_rectangle() && poly.axis_rectangle()->first == Point(0, 0) &&
                       poly.axis_rectangle()->second == Point(1, 1);
  const std::string reference = c.text("reference", torsion ? "exact" : "finest");
  if (reference == "exact" && !torsion) throw ConfigError("reference = exact needs the torsion problem");
  if (reference != "exact" && reference != "finest") throw ConfigError("reference must be exact or finest");
  const auto ls = levels(c, {2, 3, 4, 5, 6});
  const std::vector<double> ps = {2.0, p, 2.0 + eps_probe};

  std::vector<std::unique_ptr<Solved>> solved(ls.size());
  const TorsionSolution exact;
  run_cells(r, level_names(ls), [&](std::size_t i, Tables& t) {
    solved[i] = std::make_unique<Solved>(solve_level(poly, ls[i], a, load));
    if (reference != "exact") return;
    const Solved& s = *solved[i];
    const P1Field field(s.sys.mesh, s.sol.u);
    const double center = field(Point(0.5, 0.5));
    for (double q : ps) {
      const auto err = field.error([&](const Point& x) { return exact.u(x); },
                                   [&](const Point& x) { return exact.grad(x); }, q);
      Row row;
      row << ls[i] << level_spacing(ls[i]) << s.sys.mesh.vertex_count() << reference << q << eps_probe
          << s.sol.residual << s.defect << err.lp << err.grad_lp << err.lp + err.grad_lp << center;
      t.at("").add(row.cells);
    }
  });
  if (reference == "exact") return;
  if (ls.size() < 2) throw ConfigError("reference = finest needs at least two levels");
  std::vector<std::string> names(level_names(ls));
  names.pop_back();
  run_cells(r, names, [&](std::size_t i, Tables& t) {
    if (!solved[i] || !solved.back()) throw std::runtime_error("a level solve was aborted");
    const Solved& s = *solved[i];
    const Solved& fine = *solved.back();
    const P1Field coarse(s.sys.mesh, s.sol.u);
    const P1Field diff(fine.sys.mesh, transfer(coarse, fine.sys.mesh) - fine.sol.u);
    const double center = coarse(Point(0.5 * (poly.vertices()[0].x() + poly.vertices()[2].x()),
                                       0.5 * (poly.vertices()[0].y() + poly.vertices()[2].y())));
    for (double q : ps) {
      const double el = diff.lp_norm(q), eg = diff.grad_lp_norm(q);
      Row row;
      row << ls[i] << level_spacing(ls[i]) << s.sys.mesh.vertex_count() << reference << q << eps_probe
          << s.sol.residual << s.defect << el << eg << el + eg << center;
      t.at("").add(row.cells);
    }
  });
}

struct RayChoice {
  std::string name;
  double arg;
};

void resolvent_sweep(const Config& c, RunResult& r) {
  const int n = c.integer("lattice", 64);
  if (n < 4) throw ConfigError("lattice must be at least 4");
  const WeightedGraph g = square_lattice(n, n);
  const auto coefficients = c.texts("coefficients", {"uniform", "perturbed"});
  const double amplitude = c.number("amplitude", 0.3);
  const auto magnitudes = c.numbers("lambda", {1.0, 10.0, 100.0, 1000.0});
  const auto angles = c.numbers("ray_angles_pi", {0.0, 0.6});
  const double eta = c.number("eta", 0.5);
  const auto sample_names = c.texts("samples", {"delta", "bump", "extremal"});
  const auto scaling = c.numbers("scaling_lambda", {4.0, 25.0, 100.0});
  const std::uint64_t seed = c.seed();
  const std::vector<int> window = interior_window(g, n, n, c.number("margin", 0.25));
  const int center = (n / 2) * n + n / 2;

  std::vector<std::pair<std::string, double>> rays;
  for (double a : angles) rays.emplace_back(a == 0.0 ? "real" : "arg=" + brief(a) + "pi", a * kPi);

  std::vector<ComplexFunction> fixed;
  bool extremal = false;
  std::vector<std::string> ordered_names;
  for (const auto& s : sample_names) {
    if (s == "extremal") {
      extremal = true;
      continue;
    }
    ComplexFunction f = ComplexFunction::Zero(g.vertex_count());
    if (s == "delta") {
      f[center] = 1.0;
    } else if (s == "bump") {
      const double width = n / 8.0;
      const Point pc = g.positions()[static_cast<std::size_t>(center)];
      for (int x = 0; x < g.vertex_count(); ++x)
        f[x] = std::exp(-(g.positions()[static_cast<std::size_t>(x)] - pc).squaredNorm() / (2.0 * width * width));
    } else {
      throw ConfigError("unknown sample '" + s + "'");
    }
    fixed.push_back(std::move(f));
    ordered_names.push_back(s);
  }
  if (extremal) ordered_names.push_back("extremal");

  std::vector<std::string> cells;
  for (const auto& k : coefficients) cells.push_back("coefficient=" + k);
  cells.push_back("scaling");
  run_cells(r, cells, [&](std::size_t i, Tables& t) {
    if (i == coefficients.size()) {
      const EllipticOperator op(g, EdgeCoefficients::uniform(g, 1.0));
      for (double lambda : scaling) {
        RealFunction f(g.vertex_count());
        for (int x = 0; x < g.vertex_count(); ++x) f[x] = std::cos(0.37 * x) + 0.5;
        const RealFunction u = ResolventSolver(op, lambda).solve_real(f);
        const WeightedGraph gs = rescale(g, std::sqrt(lambda));
        const EllipticOperator ops(gs, EdgeCoefficients::uniform(gs, 1.0));
        const RealFunction v = ResolventSolver(ops, 1.0).solve_real(f / lambda);
        Row row;
        row << lambda << (u - v).cwiseAbs().maxCoeff() << u.cwiseAbs().maxCoeff();
        t.at("scaling").add(row.cells);
      }
      return;
    }
    const std::string& kind = coefficients[i];
    EdgeCoefficients coeffs = kind == "uniform"     ? EdgeCoefficients::uniform(g, 1.0)
                              : kind == "perturbed" ? EdgeCoefficients::perturbed(g, amplitude, seed)
                                                    : throw ConfigError("unknown coefficients '" + kind + "'");
    const EllipticOperator op(g, coeffs);
    const AccretivityEstimate acc = accretivity_angle(op, seed + 1);
    const SectorPoint probe(Complex(1.0), acc.omega);
    {
      Row row;
      row << kind << acc.omega << probe.mu_sector << acc.probes << acc.skipped << op.coefficients().delta_edge()
          << op.coefficients().sup_norm();
      t.at("accretivity").add(row.cells);
    }
    const ResolventSweep sweep =
        resolvent_bound_sweep(op, magnitudes, rays, fixed, eta, window, extremal ? center : -1);
    for (const ResolventRow& row_data : sweep.rows) {
      double arg = 0.0;
      for (const auto& [name, a] : rays)
        if (name == row_data.ray) arg = a;
      const SectorPoint sp(row_data.lambda, acc.omega);
      Row row;
      row << kind << row_data.ray << arg << std::abs(row_data.lambda) << row_data.lambda.real()
          << row_data.lambda.imag() << ordered_names[static_cast<std::size_t>(row_data.sample)] << eta
          << row_data.f_l2 << row_data.u_inf << row_data.u_holder << row_data.r_inf << row_data.r_eta
          << (sp.inside() ? 1 : 0);
      t.at("").add(row.cells);
    }
  });
}

void kernel_bounds(const Config& c, RunResult& r) {
  const int n = c.integer("lattice", 48);
  if (n < 4) throw ConfigError("lattice must be at least 4");
  const WeightedGraph g = square_lattice(n, n);
  auto times = c.numbers("t", {0.5, 1.0, 2.0, 4.0, 8.0});
  std::sort(times.begin(), times.end());
  for (double t : times)
    if (!(t > 0.0)) throw ConfigError("t must be positive");
  const auto c_primes = c.numbers("c_prime", {0.5, 1.0, 2.0});
  const std::string kind = c.text("coefficients", "uniform");
  const std::string mode_name = c.text("h_star", "either_endpoint");
  const HStarMode mode = mode_name == "either_endpoint" ? HStarMode::either_endpoint
                         : mode_name == "both_endpoints"
                             ? HStarMode::both_endpoints
                             : throw ConfigError("h_star must be either_endpoint or both_endpoints");
  const bool oracle = c.integer("oracle", 1) != 0;
  const std::vector<int> window = interior_window(g, n, n, c.number("margin", 0.25));
  const int y = (n / 2) * n + n / 2;

  run_cells(r, {"kernel"}, [&](std::size_t, Tables& t) {
    EdgeCoefficients coeffs = kind == "uniform"     ? EdgeCoefficients::uniform(g, 1.0)
                              : kind == "perturbed" ? EdgeCoefficients::perturbed(g, c.number("amplitude", 0.3), c.seed())
                                                    : throw ConfigError("unknown coefficients '" + kind + "'");
    const EllipticOperator op(g, coeffs);
    const KernelTable base = kernel_table(op, times, y, window, 1.0, ContourRule{}, mode);
    if (oracle) {
      const ExpmOracle ex(op, times.front());
      for (double tt : times) {
        const ComplexFunction k = semigroup_kernel(op, tt, y);
        const ComplexFunction ko = ex.kernel(tt, y);
        const double dev = (k - ko).cwiseAbs().maxCoeff();
        if (dev > 1e-6)
          throw std::runtime_error("contour kernel deviates from the exponential oracle by " + format_number(dev) +
                                   " at t=" + format_number(tt));
        const double mass = (k.cwiseProduct(g.measure().cast<Complex>())).sum().real();
        Row row;
        row << tt << dev << mass;
        t.at("oracle").add(row.cells);
      }
    }
    KernelTable reported;
    bool have_reported = false;
    for (double cp : c_primes) {
      KernelTable table = base;
      const KernelFit fit = kernel_bound_check(op, table, cp);
      Row row;
      row << cp << fit.C << fit.beta_a << fit.beta_b << fit.C2 << fit.eta << fit.pairs_a << fit.pairs_b
          << fit.pairs_holder << fit.pass_a << fit.pass_b << fit.pass_holder << (fit.ok ? 1 : 0);
      t.at("fit").add(row.cells);
      if (cp == 1.0 || !have_reported) {
        reported = std::move(table);
        have_reported = true;
      }
    }
    for (const KernelRow& k : reported.rows) {
      Row row;
      row << k.t << k.y << k.x << k.d << k.h_star << std::string(1, k.regime) << k.k.real() << k.k.imag() << k.bound;
      t.at("").add(row.cells);
    }
  });
}

void embeddings(const Config& c, RunResult& r) {
  const Polygon poly = domain_polygon(c, "unit_square");
  const auto ps = c.numbers("p", {1.5, 4.0});
  const int trials = c.integer("trials", 64);
  const std::uint64_t seed = c.seed();
  const auto ls = levels(c, {2, 3, 4, 5});
  run_cells(r, level_names(ls), [&](std::size_t i, Tables& t) {
    const WeightedGraph g = from_triangulation(triangulate(poly, level_spacing(ls[i])));
    for (double p : ps) {
      const EmbeddingReport e = embedding_report(g, p, trials, seed);
      Row row;
      row << ls[i] << level_spacing(ls[i]) << g.vertex_count() << p << e.p_star << e.eta << e.sobolev_ratio_max
          << e.holder_ratio_max << (e.sobolev_argmax.empty() ? "-" : e.sobolev_argmax)
          << (e.holder_argmax.empty() ? "-" : e.holder_argmax);
      t.at("").add(row.cells);
    }
  });
}

void geometry(const Config& c, RunResult& r) {
  const Polygon poly = domain_polygon(c, "unit_square");
  const double r0 = c.number("r0", 0.5);
  const int samples = c.integer("samples", 8);
  const auto ls = levels(c, {2, 3, 4, 5});
  run_cells(r, level_names(ls), [&](std::size_t i, Tables& t) {
    const WeightedGraph g = from_triangulation(triangulate(poly, level_spacing(ls[i])));
    const GeometryReport rep = geometry_report(g, r0, samples);
    Row row;
    row << ls[i] << level_spacing(ls[i]) << g.vertex_count() << r0 << rep.balls << rep.doubling << rep.lower_volume
        << rep.poincare << rep.doubling_exponent;
    t.at("").add(row.cells);
  });
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"meyers_sweep",    "counterexample", "holder_convergence",
                                                 "rate_theta",      "resolvent_sweep", "kernel_bounds",
                                                 "embeddings",      "geometry"};
  return names;
}

bool RunResult::passed() const {
  if (!aborted.empty()) return false;
  for (const Verdict& v : verdicts)
    if (v.gating && !v.pass) return false;
  return true;
}

RunResult run(const Config& config) {
  RunResult r;
  r.experiment = config.text("experiment");
  if (!schemas().count(r.experiment)) throw ConfigError("unknown experiment '" + r.experiment + "'");
  r.tables = empty_tables(r.experiment);
  static const std::map<std::string, void (*)(const Config&, RunResult&)> dispatch = {
      {"meyers_sweep", meyers_sweep},       {"counterexample", counterexample}, {"holder_convergence", holder_convergence},
      {"rate_theta", rate_theta},           {"resolvent_sweep", resolvent_sweep}, {"kernel_bounds", kernel_bounds},
      {"embeddings", embeddings},           {"geometry", geometry},
  };
  dispatch.at(r.experiment)(config, r);
  r.verdicts = evaluate(r.experiment, r.tables);
  return r;
}

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const Table& table) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    table.write(out);
  };
  for (const auto& [suffix, table] : result.tables)
    write(result.experiment + (suffix.empty() ? "" : "_" + suffix) + ".csv", table);
  write(result.experiment + "_verdicts.csv", verdict_table(result.verdicts));
  if (!result.aborted.empty()) {
    Table aborted({"cell", "error"});
    for (const auto& a : result.aborted) {
      const auto colon = a.find(": ");
      std::string msg = a.substr(colon + 2);
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      std::string cell = a.substr(0, colon);
      std::replace(cell.begin(), cell.end(), ',', ';');
      aborted.add({cell, msg});
    }
    write(result.experiment + "_aborted.csv", aborted);
  }
}

std::string schema_help() {
  std::ostringstream out;
  for (const auto& name : experiment_names()) {
    for (const auto& [suffix, header] : schemas().at(name)) {
      out << "  " << name << (suffix.empty() ? "" : "_" + suffix) << ".csv: ";
      for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
      out << '\n';
    }
    out << "  " << name << "_verdicts.csv: verdict,value,requirement,pass,gating\n";
  }
  return out.str();
}

}  // namespace meyers::lab

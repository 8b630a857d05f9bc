#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "meyers/fit.hpp"
#include "meyers/lab.hpp"

namespace meyers::lab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string label(const std::string& name, const std::string& key, double v) {
  return name + "[" + key + "=" + brief(v) + "]";
}

Verdict make(std::string name, double value, std::string requirement, bool pass, bool gating = true) {
  return {std::move(name), value, std::move(requirement), pass && std::isfinite(value), gating};
}

Verdict at_most(std::string name, double value, double bound, bool gating = true) {
  return make(std::move(name), value, "<= " + brief(bound), value <= bound, gating);
}

Verdict below(std::string name, double value, double bound, bool gating = true) {
  return make(std::move(name), value, "< " + brief(bound), value < bound, gating);
}

Verdict at_least(std::string name, double value, double bound, bool gating = true) {
  return make(std::move(name), value, ">= " + brief(bound), value >= bound, gating);
}

Verdict above(std::string name, double value, double bound, bool gating = true) {
  return make(std::move(name), value, "> " + brief(bound), value > bound, gating);
}

Verdict within(std::string name, double value, double lo, double hi, bool gating = true) {
  return make(std::move(name), value, "in [" + brief(lo) + " .. " + brief(hi) + "]",
              value >= lo && value <= hi, gating);
}

std::vector<double> distinct(const Table& t, const std::string& column) {
  std::set<double> s;
  for (std::size_t i = 0; i < t.size(); ++i) s.insert(t.value(i, column));
  return {s.begin(), s.end()};
}

std::vector<std::size_t> rows_where(const Table& t, const std::string& column, double v) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t.value(i, column) == v) out.push_back(i);
  return out;
}

double slope(const Table& t, const std::vector<std::size_t>& rows, const std::string& x, const std::string& y) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i : rows) pts.emplace_back(t.value(i, x), t.value(i, y));
  if (pts.size() < 3) return kNaN;
  try {
    return fit_loglog(pts).slope;
  } catch (const std::invalid_argument&) {
    return kNaN;
  }
}

double column_spread(const Table& t, const std::vector<std::size_t>& rows, const std::string& column) {
  std::vector<double> v;
  for (std::size_t i : rows) v.push_back(t.value(i, column));
  return v.size() < 2 ? kNaN : spread(v);
}

std::vector<std::size_t> all_rows(const Table& t) {
  std::vector<std::size_t> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = i;
  return out;
}

double column_max(const Table& t, const std::string& column) {
  if (t.size() == 0) return kNaN;
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) m = std::max(m, t.value(i, column));
  return m;
}

Verdict defect_verdict(const Table& t) { return at_most("lhuh_defect_max", column_max(t, "lhuh_defect"), 1e-9); }

std::vector<Verdict> meyers_sweep(const std::map<std::string, Table>& ts) {
  const Table& t = ts.at("");
  std::vector<Verdict> out;
  for (double p : distinct(t, "p")) {
    const auto rows = rows_where(t, "p", p);
    const double s = slope(t, rows, "h", "ratio");
    out.push_back(make(label("ratio_slope", "p", p), s, "|x| <= 0.05", std::abs(s) <= 0.05));
    out.push_back(at_most(label("ratio_spread", "p", p), column_spread(t, rows, "ratio"), 1.3));
  }
  out.push_back(defect_verdict(t));
  return out;
}

std::vector<Verdict> counterexample(const std::map<std::string, Table>& ts) {
  const Table& t = ts.at("");
  std::vector<Verdict> out;
  for (double p : distinct(t, "p")) {
    const auto rows = rows_where(t, "p", p);
    const double pc = t.value(rows.front(), "p_c");
    if (p > pc) {
      out.push_back(at_most(label("w1p_slope", "p", p), slope(t, rows, "h", "w1p"), -0.2));
    } else if (p < pc) {
      out.push_back(at_most(label("w1p_spread", "p", p), column_spread(t, rows, "w1p"), 1.5));
    } else {
      out.push_back(at_most(label("w1p_spread", "p", p), column_spread(t, rows, "w1p"), 1.5, false));
    }
  }
  out.push_back(defect_verdict(t));
  return out;
}

std::vector<Verdict> holder_convergence(const std::map<std::string, Table>& ts) {
  const Table& t = ts.at("");
  const Table& c = ts.at("cauchy");
  std::vector<Verdict> out;
  out.push_back(at_most("holder_norm_spread", column_spread(t, all_rows(t), "holder_norm"), 2.0));
  double worst = c.size() >= 3 ? 0.0 : kNaN;
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    worst = std::max(worst, c.value(i + 1, "diff_holder_norm") / c.value(i, "diff_holder_norm"));
  out.push_back(below("cauchy_ratio_max", worst, 1.0));
  out.push_back(defect_verdict(t));
  return out;
}

std::vector<Verdict> rate_theta(const std::map<std::string, Table>& ts) {
  const Table& t = ts.at("");
  std::vector<Verdict> out;
  if (t.size() == 0) return {make("rows", 0.0, "> 0", false)};
  const double eps = t.value(0, "eps_probe");
  const double q = 2.0 + eps;
  double p = kNaN;
  for (double v : distinct(t, "p"))
    if (v > 2.0 && v < q) p = v;
  auto order = [&](double exponent) { return slope(t, rows_where(t, "p", exponent), "h", "error_w1p"); };
  const double o2 = order(2.0), op = order(p), oq = order(q);
  const double theta = (1.0 / p - 1.0 / q) / (0.5 - 1.0 / q);
  const double predicted = theta * o2 + (1.0 - theta) * oq;
  out.push_back(at_least("w12_order", o2, 0.9));
  out.push_back(make("w1p_order_minus_interpolated", op - predicted, "|x| <= 0.15", std::abs(op - predicted) <= 0.15));
  out.push_back(
      make("w1p_order_minus_theta", op - theta, "|x| <= 0.15 (informational)", std::abs(op - theta) <= 0.15, false));
  if (t.cell(0, "reference") == "exact") {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t.value(i, "level") != 5.0 || t.value(i, "p") != 2.0) continue;
      out.push_back(at_most("center_value_error", std::abs(t.value(i, "center_value") - 0.07367), 0.002));
    }
  }
  out.push_back(defect_verdict(t));
  return out;
}

std::vector<Verdict> resolvent_sweep(const std::map<std::string, Table>& ts) {
  const Table& t = ts.at("");
  std::vector<Verdict> out;
  std::set<std::string> coefficients;
  for (std::size_t i = 0; i < t.size(); ++i) coefficients.insert(t.cell(i, "coefficient"));
  for (const auto& coef : coefficients) {
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
    int outside = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t.cell(i, "coefficient") != coef) continue;
      groups[{t.cell(i, "ray"), t.cell(i, "sample")}].push_back(i);
      if (t.value(i, "inside_sector") == 0.0) ++outside;
    }
    double inf_spread = 0.0, eta_spread = 0.0, worst_slope = -0.5;
    for (const auto& [key, rows] : groups) {
      inf_spread = std::max(inf_spread, column_spread(t, rows, "r_inf"));
      eta_spread = std::max(eta_spread, column_spread(t, rows, "r_eta"));
      const double s = slope(t, rows, "lambda_abs", "u_inf");
      if (!std::isfinite(s) || std::abs(s + 0.5) > std::abs(worst_slope + 0.5)) worst_slope = s;
    }
    out.push_back(at_most("r_inf_spread[" + coef + "]", inf_spread, 3.0));
    out.push_back(within("u_inf_slope_worst[" + coef + "]", worst_slope, -0.6, -0.4));
    out.push_back(at_most("r_eta_spread[" + coef + "]", eta_spread, 4.0));
    out.push_back(at_most("lambda_outside_sector[" + coef + "]", outside, 0.0));
  }
  const Table& s = ts.at("scaling");
  if (s.size() > 0) out.push_back(at_most("scaling_max_abs_diff", column_max(s, "max_abs_diff"), 1e-13));
  return out;
}

std::vector<Verdict> kernel_bounds(const std::map<std::string, Table>& ts) {
  const Table& t = ts.at("");
  const Table& fit = ts.at("fit");
  const Table& oracle = ts.at("oracle");
  std::vector<Verdict> out;
  if (oracle.size() > 0) {
    out.push_back(at_most("oracle_max_abs_dev", column_max(oracle, "max_abs_dev"), 1e-8));
    double mass = 0.0;
    for (std::size_t i = 0; i < oracle.size(); ++i) mass = std::max(mass, std::abs(oracle.value(i, "mass") - 1.0));
    out.push_back(at_most("mass_defect_max", mass, 1e-8));
  }
  int violations = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double k = std::hypot(t.value(i, "K_re"), t.value(i, "K_im"));
    if (k > t.value(i, "bound_value") * (1.0 + 1e-12)) ++violations;
  }
  out.push_back(at_most("table_bound_violations", violations, 0.0));
  for (std::size_t i = 0; i < fit.size(); ++i) {
    const double cp = fit.value(i, "c_prime");
    const bool primary = cp == 1.0;
    out.push_back(above(label("beta_b", "c_prime", cp), fit.value(i, "beta_b"), 0.0, primary));
    out.push_back(at_least(label("pass_b", "c_prime", cp), fit.value(i, "pass_b"), 1.0, primary));
    if (fit.value(i, "pairs_a") > 0) {
      out.push_back(above(label("beta_a", "c_prime", cp), fit.value(i, "beta_a"), 0.0, primary));
      out.push_back(at_least(label("pass_a", "c_prime", cp), fit.value(i, "pass_a"), 1.0, primary));
    }
    out.push_back(above(label("holder_eta", "c_prime", cp), fit.value(i, "eta"), 0.0, primary));
    out.push_back(at_least(label("pass_holder", "c_prime", cp), fit.value(i, "pass_holder"), 1.0, primary));
  }
  return out;
}

std::vector<Verdict> embeddings(const std::map<std::string, Table>& ts) {
  const Table& t = ts.at("");
  std::vector<Verdict> out;
  for (double p : distinct(t, "p")) {
    const auto rows = rows_where(t, "p", p);
    if (p < 2.0) out.push_back(below(label("sobolev_ratio_spread", "p", p), column_spread(t, rows, "sobolev_ratio_max"), 2.0));
    if (p > 2.0) out.push_back(below(label("holder_ratio_spread", "p", p), column_spread(t, rows, "holder_ratio_max"), 2.0));
  }
  return out;
}

std::vector<Verdict> geometry(const std::map<std::string, Table>& ts) {
  const Table& t = ts.at("");
  const auto rows = all_rows(t);
  return {below("doubling_spread", column_spread(t, rows, "doubling"), 2.0),
          below("lower_volume_spread", column_spread(t, rows, "lower_volume"), 2.0),
          below("poincare_spread", column_spread(t, rows, "poincare"), 2.0)};
}

}  // namespace

std::vector<Verdict> evaluate(const std::string& experiment, const std::map<std::string, Table>& tables) {
  using Fn = std::vector<Verdict> (*)(const std::map<std::string, Table>&);
  static const std::map<std::string, Fn> dispatch = {
      {"meyers_sweep", meyers_sweep},   {"counterexample", counterexample}, {"holder_convergence", holder_convergence},
      {"rate_theta", rate_theta},       {"resolvent_sweep", resolvent_sweep}, {"kernel_bounds", kernel_bounds},
      {"embeddings", embeddings},       {"geometry", geometry},
  };
  const auto it = dispatch.find(experiment);
  if (it == dispatch.end()) throw std::invalid_argument("unknown experiment '" + experiment + "'");
  return it->second(tables);
}

Table verdict_table(const std::vector<Verdict>& verdicts) {
  Table t({"verdict", "value", "requirement", "pass", "gating"});
  for (const Verdict& v : verdicts) {
    Row row;
    row << v.name << v.value << v.requirement << (v.pass ? 1 : 0) << (v.gating ? 1 : 0);
    t.add(row.cells);
  }
  return t;
}

}  // namespace meyers::lab

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "meyers/fit.hpp"
#include "meyers/galerkin.hpp"
#include "meyers/lab.hpp"

using namespace meyers;
using namespace meyers::lab;

namespace {

Config parse(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("log-log fits") {
  std::vector<std::pair<double, double>> sq, flat;
  for (double h : {0.5, 0.25, 0.125, 0.0625}) {
    sq.emplace_back(h, h * h);
    flat.emplace_back(h, 3.0);
  }
  const FitResult a = fit_loglog(sq);
  CHECK(a.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(a.r_squared == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a.samples == 4);
  CHECK(fit_loglog(flat).slope == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(fit_loglog({{1, 1}, {2, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_loglog({{1, 1}, {2, 0}, {3, 1}}), std::invalid_argument);
  CHECK(spread({2.0, 1.0, 4.0}) == 4.0);
  CHECK(std::isinf(spread({0.0, 1.0})));
}

TEST_CASE("torsion W^{1,2} errors converge at first order") {
  const TorsionSolution exact;
  std::vector<std::pair<double, double>> errors;
  for (int level = 2; level <= 5; ++level) {
    const double h = std::ldexp(1.0, -level);
    P1System sys = assemble(triangulate(Polygon::unit_square(), h), CoefficientField::identity());
    set_load(sys, moments_from_callable(sys, [](const Point&) { return -1.0; }));
    const P1Field field(sys.mesh, solve(sys).u);
    const auto e = field.error([&](const Point& x) { return exact.u(x); }, [&](const Point& x) { return exact.grad(x); }, 2.0);
    errors.emplace_back(h, e.lp + e.grad_lp);
  }
  CHECK(fit_loglog(errors).slope == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("config parsing") {
  const Config c = parse("# header\nexperiment = meyers_sweep  # trailing\n\nlevels = 3, 4,5\np=2.2\nname = a b\n");
  CHECK(c.text("experiment") == "meyers_sweep");
  CHECK(c.integers("levels", {}) == std::vector<int>{3, 4, 5});
  CHECK(c.number("p", 0.0) == 2.2);
  CHECK(c.number("missing", 7.0) == 7.0);
  CHECK(c.text("name") == "a b");
  CHECK(c.seed() == 1);
  CHECK_THROWS_AS(c.text("missing"), ConfigError);
  CHECK_THROWS_AS(parse("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("just words\n"), ConfigError);
  CHECK_THROWS_AS(parse(" = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("p = 2.x\n").number("p", 0.0), ConfigError);
  CHECK_THROWS_AS(parse("levels = 2.5\n").integers("levels", {}), ConfigError);
  CHECK_THROWS_AS(parse("seed = -1\n").seed(), ConfigError);
  CHECK_THROWS_AS(parse("levels = ,\n").integers("levels", {}), ConfigError);
  CHECK_THROWS_AS(run(parse("experiment = nonsense\n")), ConfigError);
}

TEST_CASE("tables round trip") {
  Table t({"a", "b", "label"});
  Row r;
  r << 0.1 << 3 << "x";
  t.add(r.cells);
  Row r2;
  r2 << 1e-300 << -7 << "";
  t.add(r2.cells);
  std::ostringstream out;
  t.write(out);
  CHECK(out.str() == "a,b,label\n0.10000000000000001,3,x\n1e-300,-7,\n");
  std::istringstream in(out.str());
  const Table back = Table::read(in);
  CHECK(back.header() == t.header());
  CHECK(back.rows() == t.rows());
  CHECK(back.value(0, "a") == 0.1);
  CHECK_THROWS(back.value(0, "label"));
  CHECK_THROWS(back.column("nope"));
  CHECK_THROWS(t.add({"1"}));
  Row bad;
  CHECK_THROWS(bad << "a,b");
  CHECK(format_number(2.2) == "2.2000000000000002");
  CHECK(brief(2.2000000000000002) == "2.2");
}

TEST_CASE("verdicts are recomputed from the tables alone") {
  const Config c = parse("experiment = embeddings\nlevels = 2, 3, 4\np = 1.5, 4\ntrials = 8\nseed = 3\n");
  const RunResult result = run(c);
  CHECK(result.aborted.empty());
  CHECK(result.tables.at("").size() == 6);
  const auto again = evaluate(result.experiment, result.tables);
  REQUIRE(again.size() == result.verdicts.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].name == result.verdicts[i].name);
    CHECK(again[i].value == result.verdicts[i].value);
    CHECK(again[i].pass == result.verdicts[i].pass);
  }
  // Through CSV text as well.
  std::map<std::string, Table> reread;
  for (const auto& [suffix, table] : result.tables) {
    std::ostringstream out;
    table.write(out);
    std::istringstream in(out.str());
    reread[suffix] = Table::read(in);
  }
  const auto third = evaluate(result.experiment, reread);
  for (std::size_t i = 0; i < third.size(); ++i) CHECK(third[i].value == result.verdicts[i].value);
}

TEST_CASE("same seed, same bytes") {
  const auto base = std::filesystem::temp_directory_path() / "meyers_lab_determinism";
  std::filesystem::remove_all(base);
  const Config c = parse("experiment = geometry\nlevels = 2, 3\nr0 = 0.5\nsamples = 3\n");
  const Config e = parse("experiment = embeddings\nlevels = 2, 3\np = 1.5, 4\ntrials = 6\nseed = 5\n");
  for (const Config* cfg : {&c, &e}) {
    write_outputs(run(*cfg), base / "one");
    write_outputs(run(*cfg), base / "two");
  }
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(base / "one")) {
    ++files;
    CHECK(slurp(entry.path()) == slurp(base / "two" / entry.path().filename()));
  }
  CHECK(files >= 4);
  CHECK(std::filesystem::exists(base / "one" / "embeddings_verdicts.csv"));
  std::filesystem::remove_all(base);
}

TEST_CASE("every experiment documents its schema") {
  const std::string help = schema_help();
  for (const auto& name : experiment_names()) CHECK(help.find(name) != std::string::npos);
  CHECK(experiment_names().size() == 8);
}

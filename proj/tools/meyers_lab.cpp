#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "meyers/lab.hpp"
#include "meyers/mesh.hpp"

namespace {

using meyers::lab::Verdict;

void print_verdicts(const std::string& experiment, const std::vector<Verdict>& verdicts) {
  for (const Verdict& v : verdicts) {
    std::printf("%s %-4s %s = %.6g (%s)%s\n", experiment.c_str(), v.pass ? "PASS" : "FAIL", v.name.c_str(), v.value,
                v.requirement.c_str(), v.gating ? "" : " [info]");
  }
}

bool all_pass(const std::vector<Verdict>& verdicts) {
  for (const Verdict& v : verdicts)
    if (v.gating && !v.pass) return false;
  return true;
}

int run_command(const std::string& config_file, const std::string& output_override) {
  const auto config = meyers::lab::Config::load(config_file);
  const auto result = meyers::lab::run(config);
  const std::filesystem::path out = output_override.empty() ? config.text("output", ".") : output_override;
  meyers::lab::write_outputs(result, out);
  for (const auto& a : result.aborted) std::printf("%s ABORTED %s\n", result.experiment.c_str(), a.c_str());
  print_verdicts(result.experiment, result.verdicts);
  return result.passed() ? 0 : 2;
}

int mesh_command(const std::string& polygon_file, double h, const std::string& output) {
  std::ifstream in(polygon_file);
  if (!in) throw std::runtime_error("cannot open " + polygon_file);
  const meyers::Triangulation tri = meyers::triangulate(meyers::read_polygon(in), h);
  const meyers::RegularityReport rep = meyers::regularity_report(tri);
  if (output.empty()) {
    meyers::write_mesh(std::cout, tri);
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + output);
    meyers::write_mesh(out, tri);
  }
  std::fprintf(stderr, "triangles %d vertices %d h %.17g sigma %.17g admissible %s violations %zu\n",
               tri.triangle_count(), tri.vertex_count(), rep.h, rep.sigma, rep.admissible ? "yes" : "no",
               rep.violations.size());
  return rep.admissible && rep.boundary_consistent ? 0 : 2;
}

int report_command(const std::vector<std::string>& files) {
  // Group tables by experiment using the file name: <experiment>[_<suffix>].csv.
  std::map<std::string, std::map<std::string, meyers::lab::Table>> groups;
  for (const auto& file : files) {
    const std::string stem = std::filesystem::path(file).stem().string();
    std::string experiment;
    for (const auto& name : meyers::lab::experiment_names())
      if ((stem == name || stem.rfind(name + "_", 0) == 0) && name.size() > experiment.size()) experiment = name;
    if (experiment.empty()) throw std::runtime_error("cannot tell the experiment of " + file);
    const std::string suffix = stem.size() > experiment.size() ? stem.substr(experiment.size() + 1) : "";
    if (suffix == "verdicts" || suffix == "aborted") continue;
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file);
    groups[experiment][suffix] = meyers::lab::Table::read(in);
  }
  bool pass = true;
  for (const auto& [experiment, tables] : groups) {
    const auto verdicts = meyers::lab::evaluate(experiment, tables);
    print_verdicts(experiment, verdicts);
    pass = pass && all_pass(verdicts);
  }
  return pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Galerkin, graph Sobolev and heat-kernel experiments"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 all verdicts pass, 2 some verdict fails, 1 execution error.\n\nCSV schemas:\n" +
             meyers::lab::schema_help());

  std::string config_file, output_override;
  auto* run = app.add_subcommand("run", "Run the experiment described by a key = value config file");
  run->add_option("config", config_file, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--output", output_override, "Output directory (overrides the config's output key)");

  std::string polygon_file, mesh_output;
  double h = 0.0;
  auto* mesh = app.add_subcommand("mesh", "Triangulate a convex polygon given as `x y` lines");
  mesh->add_option("polygon", polygon_file, "Polygon file")->required()->check(CLI::ExistingFile);
  mesh->set_help_flag("--help", "Print this help message and exit");
  mesh->add_option("--h", h, "Target mesh spacing")->required()->check(CLI::PositiveNumber);
  mesh->add_option("--output", mesh_output, "Mesh file (stdout when omitted)");

  std::vector<std::string> csv_files;
  auto* report = app.add_subcommand("report", "Recompute verdicts from emitted CSV files");
  report->add_option("csv", csv_files, "CSV files named <experiment>[_<suffix>].csv")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return run_command(config_file, output_override);
    if (*mesh) return mesh_command(polygon_file, h, mesh_output);
    if (*report) return report_command(csv_files);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

#include <CLI11.hpp>

#include <iostream>

#include "bragg/commands.hpp"

namespace {

using bragg::cli::RunConfig;

void add_input(CLI::App* app, RunConfig& c) {
  app->add_option("--input", c.input, "point set or measure JSON")->required();
  app->add_option("--out", c.output, "output file (default: stdout)");
}

void add_family(CLI::App* app, RunConfig& c) {
  app->add_option("--family", c.family, "geometric:N[:s0] or list:s1,s2,...");
  app->add_option("--eps-atom", c.eps_atom, "convergence tolerance per atom");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  CLI::App app{"Diffraction, Bragg peaks and Meyer-set checks for point sets in R^d"};
  app.require_subcommand(1);
  app.add_option("--seed", c.seed, "seed for every sampler");

  auto* gen = app.add_subcommand("generate", "write a point set or measure as JSON");
  gen->add_option("--lattice", c.lattice, "row-major lattice basis (1, 4 or 9 entries)")->delimiter(',');
  gen->add_flag("--fibonacci", c.fibonacci, "Fibonacci model set");
  gen->add_option("--paper-example", c.paper_example, "zpz | union2d | z-union-third");
  gen->add_option("--window", c.window, "lo hi, or lo_1..lo_d hi_1..hi_d")->delimiter(',');
  gen->add_option("--range", c.range, "zpz: keep pi*n for |n| <= range");
  gen->add_option("--out", c.output, "output JSON (default: stdout)");
  gen->add_option("--csv", c.report, "also write the points as CSV");

  auto* dif = app.add_subcommand("diffract", "estimate Bragg peaks");
  add_input(dif, c);
  add_family(dif, c);
  dif->add_option("--dual-window", c.dual_window, "frequency window")->delimiter(',');
  dif->add_option("--grid", c.grid, "coarse grid resolution for generic inputs");
  dif->add_option("--report", c.report, "JSON report with per-peak traces");

  auto* mey = app.add_subcommand("meyer", "windowed Meyer check");
  add_input(mey, c);
  mey->add_option("--scales", c.scales, "window half-widths (default: quarter, half, full input window)")->delimiter(',');
  mey->add_option("--k-box", c.k_box, "side of the counting box");

  auto* kre = app.add_subcommand("krein", "Krein inequality and Gram checks on a measure");
  add_input(kre, c);
  kre->add_option("--tol", c.krein_tol, "Krein tolerance relative to mu({0})^2");
  kre->add_option("--eps-psd", c.eps_psd, "Gram eigenvalue tolerance");

  auto* aut = app.add_subcommand("autocorr", "finite-volume autocorrelation");
  add_input(aut, c);
  add_family(aut, c);
  aut->add_option("--box", c.box, "half-width of the averaging box (default: input window)");
  aut->add_option("--report", c.report, "JSON convergence trace along the family");

  auto* spa = app.add_subcommand("sparse", "sparseness check");
  add_input(spa, c);
  spa->add_option("--a", c.a, "intensity level")->required();
  spa->add_option("--k-box", c.k_box, "side of the counting box");

  auto* rig = app.add_subcommand("rigidity", "positive definiteness versus subgroup test");
  add_input(rig, c);

  auto* eps = app.add_subcommand("epsdual", "eps-dual region or the Theorem 2 construction");
  add_input(eps, c);
  eps->add_option("--eps", c.eps, "eps");
  eps->add_option("--dual-window", c.dual_window, "dual domain")->delimiter(',');
  eps->add_option("--window", c.window, "physical domain (with --theorem2)")->delimiter(',');
  eps->add_option("--spacing", c.spacing, "grid spacing");
  eps->add_flag("--theorem2", c.theorem2, "run the visible-peak construction");

  auto* th1 = app.add_subcommand("theorem1", "Meyer check of the visible Bragg set I(a)");
  add_input(th1, c);
  add_family(th1, c);
  auto* a_abs = th1->add_option("--a", c.a, "intensity level");
  th1->add_option("--a-rel", c.a_rel, "intensity level as a fraction of gamma^({0})")->excludes(a_abs);
  th1->add_option("--dual-scales", c.dual_scales, "dual window half-widths")->delimiter(',');
  th1->add_option("--grid", c.grid, "coarse grid resolution for generic inputs");
  th1->add_option("--k-box", c.k_box, "side of the counting box");

  auto* rep = app.add_subcommand("reproduce", "evidence bundle for a named example");
  rep->add_option("case", c.case_name, "zpz | union2d | fibonacci | theorem2_lattice")->required();
  rep->add_option("--out", c.output, "bundle directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return bragg::cli::kError;
  }
  c.command = app.get_subcommands().front()->get_name();
  try {
    return bragg::cli::run(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bragg::cli::kError;
  }
}

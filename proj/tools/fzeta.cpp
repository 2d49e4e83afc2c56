// Command-line front end: parses arguments into a RunConfig and runs it.
#include <iostream>

#include <CLI11.hpp>

#include "fzeta/cli/run.hpp"

int main(int argc, char** argv) {
  using fzeta::cli::RunConfig;
  RunConfig cfg;
  CLI::App app{"Fractal zeta functions: strings, sets, complex dimensions"};
  app.require_subcommand(1);

  std::vector<double> s, im_range, re_range, ratios;
  double period = 0.0;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--catalog", cfg.catalog, "Named closed-form zeta, e.g. cantor-geometric");
    c->add_option("--spec", cfg.spec, "Fractal string: name, JSON, or @file");
    c->add_option("--set", cfg.set, "Bounded set: name, JSON, or @file");
    c->add_option("--tube-csv", cfg.tube_csv, "Tube samples written by `tube`");
    c->add_option("--s", s, "Evaluation point RE IM")->expected(2);
    c->add_option("--delta", cfg.delta, "Neighbourhood radius");
    c->add_option("--eps", cfg.eps, "Truncation tolerance");
    c->add_option("--resolution", cfg.resolution, "2-D grid cells per side (power of two)");
    c->add_option("--k-max", cfg.k_max, "Highest Fourier index for residues");
    c->add_option("--radius", cfg.radius, "Contour radius");
    c->add_option("--im-range", im_range, "Imaginary window LO HI")->expected(2);
    c->add_option("--re-range", re_range, "Real window LO HI")->expected(2);
    c->add_option("--t-min", cfg.t_min, "Smallest tube radius");
    c->add_option("--t-max", cfg.t_max, "Largest tube radius");
    c->add_option("--per-decade", cfg.per_decade, "Tube samples per decade");
    c->add_option("--period", period, "Known oscillation period in log(1/t)");
    c->add_option("--out", cfg.out, "Output file (default stdout)");
    c->add_option("--format", cfg.format, "csv, json or text")->check(CLI::IsMember({"csv", "json", "text"}));
    c->add_option("--seed", cfg.seed, "Seed for sampled evaluation points");
  };

  const char* commands[][2] = {
      {"construct", "Describe a string, catalog or set"},
      {"eval", "Evaluate a zeta function at --s"},
      {"poles", "List complex dimensions in a window"},
      {"residues", "Residues by contour integration or from the tube profile"},
      {"tube", "Sample the tube function"},
      {"fit", "Fit Minkowski dimension and content"},
      {"verify", "Run verification checks"},
      {"report", "Consolidated JSON report for one target"},
  };
  for (const auto& [name, help] : commands) {
    auto* c = app.add_subcommand(name, help);
    add_common(c);
    if (std::string(name) == "poles") c->add_flag("--numeric", cfg.numeric, "Search numerically, ignoring the catalog");
    if (std::string(name) == "residues") c->add_flag("--tube-zeta", cfg.tube_zeta, "Report tube zeta residues");
    if (std::string(name) == "verify") {
      c->add_option("--check", cfg.check, "functional-equation, residue-content, moran, hyperfractal or all")
          ->required();
      c->add_option("--points", cfg.points, "Number of s points");
      c->add_option("--tol", cfg.tol, "Pass tolerance (default per check)");
      c->add_option("--ratios", ratios, "Scaling ratios for the Moran check");
      c->add_option("--dimension", cfg.dimension, "Dimension D for the hyperfractal check");
      c->add_option("--K", cfg.K, "Number of lattices in the hyperfractal check");
      c->add_option("--m-start", cfg.m_start, "First m_k (m_k = m_start + k - 1)");
      c->add_option("--window", cfg.window, "Imaginary window length");
      c->add_option("--gap-target", cfg.gap_target, "Largest acceptable gap");
    }
    if (std::string(name) == "report") {
      c->add_option("--artifacts", cfg.artifacts, "Directory with fit.json and residues.json");
      c->add_option("--tol", cfg.tol, "Pass tolerance (default per check)");
      c->add_option("--points", cfg.points, "Number of s points");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fzeta::cli::kConfigError;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (!s.empty()) cfg.s = fzeta::cplx{s[0], s[1]};
  if (!im_range.empty()) cfg.im_range = {im_range[0], im_range[1]};
  if (!re_range.empty()) cfg.re_range = std::array<double, 2>{re_range[0], re_range[1]};
  if (period > 0.0) cfg.period = period;
  cfg.ratios = ratios;
  return fzeta::cli::run(cfg, std::cout, std::cerr);
}

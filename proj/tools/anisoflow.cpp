// Command-line front end: run, sweep, verify, emit-plot.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "anisoflow/app.hpp"
#include "anisoflow/check/sampling.hpp"
#include "anisoflow/version.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"anisoflow: anisotropic contracting curvature flow of star-shaped hypersurfaces"};
  cli.set_version_flag("--version", anisoflow::kVersion);
  cli.require_subcommand(1);

  std::string config, out_dir, series;
  auto* run = cli.add_subcommand("run", "integrate one experiment and write series.csv, snapshots/, summary.json");
  run->add_option("config", config, "experiment config file")->required();
  run->add_option("-o,--output", out_dir, "output directory (overrides output.directory)");

  auto* sweep = cli.add_subcommand("sweep", "run the Cartesian product of the [sweep] lists; writes sweep.csv");
  sweep->add_option("config", config, "sweep config file")->required();
  sweep->add_option("-o,--output", out_dir, "output directory (overrides output.directory)");

  anisoflow::check::VerifyOptions vopts;
  vopts.seed = anisoflow::check::seed_from_env();
  if (const char* f = std::getenv("ANISOFLOW_VERIFY_FAULT")) vopts.fault = f;
  auto* verify = cli.add_subcommand("verify", "run the property and oracle suite");
  verify->add_option("--samples", vopts.samples, "random samples per inequality")->check(CLI::PositiveNumber);

  auto* plot = cli.add_subcommand("emit-plot", "split series.csv into two-column <observable>.dat files");
  plot->add_option("series", series, "series.csv from a run")->required()->check(CLI::ExistingFile);
  plot->add_option("-o,--output", out_dir, "output directory (default: <series dir>/plot)");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return cli.exit(e) == 0 ? 0 : anisoflow::app::kBadConfig;
  }

  if (*run) return anisoflow::app::cmd_run(config, std::cout, std::cerr, out_dir);
  if (*sweep) return anisoflow::app::cmd_sweep(config, std::cout, std::cerr, out_dir);
  if (*verify) return anisoflow::app::cmd_verify(vopts, std::cout);
  if (*plot) return anisoflow::app::cmd_emit_plot(series, out_dir, std::cout, std::cerr);
  return anisoflow::app::kFailure;
}

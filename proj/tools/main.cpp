#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
  using namespace dynhomog::cli;

  CLI::App app{"Dynamic homogenization of 1-D layered elastic composites"};
  app.require_subcommand(1);

  std::string config_path;
  GlobalOptions opts;
  app.add_option("--config", config_path, "Path to the JSON run configuration")
      ->required();
  app.add_option("--jobs", opts.jobs, "Worker threads for parameter sweeps");
  app.add_option("--out", opts.out_override, "Output directory override");

  CLI::App* dispersion =
      app.add_subcommand("dispersion", "Dispersion branches vs the exact solution");
  CLI::App* homogenize =
      app.add_subcommand("homogenize", "Effective parameters along branches");
  CLI::App* fields =
      app.add_subcommand("fields", "Pointwise field profiles at one branch point");
  CLI::App* verify =
      app.add_subcommand("verify", "Structure-invariant verification suite");
  for (CLI::App* sub : {dispersion, homogenize, fields, verify}) {
    sub->fallthrough();  // global --config/--jobs/--out may follow the subcommand
  }

  double qa = 0.0;
  int branch = 1;
  fields->add_option("--qa", qa, "Wavenumber times period, in (0, pi]")->required();
  fields->add_option("--branch", branch, "Branch index (1-based)")->required();

  CLI11_PARSE(app, argc, argv);

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const dynhomog::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (dispersion->parsed()) return cmd_dispersion(cfg, opts);
    if (homogenize->parsed()) return cmd_homogenize(cfg, opts);
    if (fields->parsed()) return cmd_fields(cfg, opts, qa, branch);
    if (verify->parsed()) return cmd_verify(cfg, opts);
  } catch (const dynhomog::Error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

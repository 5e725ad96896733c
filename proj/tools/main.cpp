// CLI front end. Subcommands: run, converge, diagnose, oracle.
// Exit codes: 0 success, 2 configuration error, 3 solver non-convergence,
// 4 gate failure in converge/diagnose.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "crvi/commands.hpp"
#include "crvi/config.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int levels = -1;
  long long seed = -1;
};

void add_common(CLI::App *cmd, CommonArgs &args) {
  cmd->add_option("--config", args.config_path, "configuration file")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory override");
  cmd->add_option("--levels", args.levels, "refinement level count override");
  cmd->add_option("--seed", args.seed, "RNG seed override");
}

int load_and_dispatch(const CommonArgs &args,
                      int (*cmd)(const crvi::RunConfig &, std::ostream &,
                                 std::ostream &)) {
  crvi::RunConfig cfg;
  try {
    cfg = crvi::parse_config_file(args.config_path);
  } catch (const crvi::ConfigError &e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  if (!args.out_dir.empty()) {
    cfg.out_dir = args.out_dir;
  }
  if (args.levels >= 0) {
    cfg.levels = args.levels;
  }
  if (args.seed >= 0) {
    cfg.seed = static_cast<unsigned>(args.seed);
  }
  return cmd(cfg, std::cout, std::cerr);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Coupled obstacle/reaction-diffusion solver on "
               "nonconforming P1 elements"};
  app.require_subcommand(1);

  CommonArgs run_args, conv_args, diag_args, oracle_args;
  CLI::App *run = app.add_subcommand("run", "one evolution on level 0");
  add_common(run, run_args);
  CLI::App *conv = app.add_subcommand(
      "converge", "refinement study against a finer reference level");
  add_common(conv, conv_args);
  CLI::App *diag = app.add_subcommand(
      "diagnose", "discretisation property estimators across levels");
  add_common(diag, diag_args);
  CLI::App *oracle = app.add_subcommand(
      "oracle", "constrained-solver cross-check on a tiny mesh");
  add_common(oracle, oracle_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return load_and_dispatch(run_args, crvi::cmd_run);
    }
    if (conv->parsed()) {
      return load_and_dispatch(conv_args, crvi::cmd_converge);
    }
    if (diag->parsed()) {
      return load_and_dispatch(diag_args, crvi::cmd_diagnose);
    }
    if (oracle->parsed()) {
      return load_and_dispatch(oracle_args, crvi::cmd_oracle);
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

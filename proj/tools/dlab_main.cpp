#include <iostream>

#include <CLI11.hpp>

#include "dlab/cli.hpp"
#include "dlab/manifest.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dissipative solution lab for the isentropic Euler system"};
  app.set_version_flag("--version", dlab::kVersion);
  app.require_subcommand(1, 1);

  dlab::CliOptions opt;
  std::uint64_t seed = 0;
  const std::pair<const char*, const char*> commands[] = {
      {"solve", "viscous run with energy ledger"},
      {"sweep", "vanishing-viscosity sweep with consistency table"},
      {"defects", "coarse-grained defects and bookkeeping"},
      {"verify", "weak residuals and energy inequality of a record"},
      {"oscillate", "checkerboard and patchwork oscillation diagnostics"},
      {"select", "admissible selection over an ensemble"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "INI configuration file")->required();
    sub->add_option("--out", opt.out, "output directory (default $DEL_OUT_DIR/<command>)");
    sub->add_option("--threads", opt.threads, "worker threads for independent runs")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for random initial data (overrides [run] seed)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dlab::kExitError;
  }
  for (auto* sub : app.get_subcommands()) {
    opt.command = sub->get_name();
    if (sub->count("--seed") > 0) opt.seed = seed;
  }
  return dlab::cli_run(opt, std::cerr);
}

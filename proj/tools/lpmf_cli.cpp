#include "lpmf/cli/runner.hpp"

#include "CLI11.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Landau-Pekar / Froehlich mean-field laboratory"};
  app.require_subcommand(1);
  std::string config, out;
  uint64_t seed = 0;
  bool quiet = false;
  for (const char* name : {"lp", "fock", "bounds", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "INI config file")->required();
    sub->add_option("--out", out, "output directory (overrides run.out)");
    sub->add_option("--seed", seed, "RNG seed (overrides run.seed)");
    sub->add_flag("--quiet", quiet, "suppress console summary");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : lpmf::cli::kConfigError;
  }
  const std::string mode = app.get_subcommands().front()->get_name();
  lpmf::cli::RunOptions opt;
  opt.out = out;
  opt.quiet = quiet;
  if (app.get_subcommands().front()->count("--seed")) opt.seed = seed;
  return lpmf::cli::run(mode, config, opt);
}

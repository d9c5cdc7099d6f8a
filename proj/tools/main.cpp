#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Ergodic averages, witness projections and symmetric norms on finite tracial algebras"};
  app.require_subcommand(1);

  ncerg::cli::Options opts;
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  for (const auto& name : ncerg::cli::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
    sub->add_option("--jobs", opts.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "replace the config seeds by one seed");
    sub->add_option("--horizon", horizon, "override every horizon N")->check(CLI::PositiveNumber);
    sub->callback([&, sub, name] {
      opts.subcommand = name;
      if (sub->count("--seed")) opts.seed = seed;
      if (sub->count("--horizon")) opts.horizon = horizon;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ncerg::cli::kExitInvalidConfig;
  }

  if (const char* tol = std::getenv("NCERG_TOL")) {
    try {
      opts.tolerance = std::stod(tol);
    } catch (const std::exception&) {
      std::cerr << "NCERG_TOL is not a number: " << tol << '\n';
      return ncerg::cli::kExitInvalidConfig;
    }
  }
  return ncerg::cli::run(opts);
}

// pdelab: Poisson solves, least-squares and backpropagation fits, surrogate
// pipeline and cost accounting from JSON experiment configs.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pdelab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pdelab - PDE surrogate benchmarking lab"};
  app.set_version_flag("--version", PDELAB_VERSION);
  app.require_subcommand(1);

  pdelab::CommandOptions opts;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string format;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--seed", seed, "replace every seed in the config");
    sub->add_option("--format", format, "plot data format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* solve = app.add_subcommand("solve", "analytic and finite-difference Poisson solutions");
  auto* fit = app.add_subcommand("fit", "least-squares line fit via the pseudoinverse");
  auto* train = app.add_subcommand("train-ann", "steepest-descent training on regression data");
  auto* surrogate = app.add_subcommand("surrogate", "generate, split, train, evaluate and cost a surrogate");
  auto* breakeven = app.add_subcommand("breakeven", "total time and break-even count for a cost ledger");
  for (auto* sub : {solve, fit, train, surrogate, breakeven}) add_common(sub);

  auto* report = app.add_subcommand("report", "question-by-question summary of a finished run");
  std::string run_dir;
  report->add_option("run_dir", run_dir, "directory holding manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pdelab::kExitConfigError;
  }

  for (auto* sub : {solve, fit, train, surrogate, breakeven}) {
    if (!sub->parsed()) continue;
    if (sub->count("--out")) opts.out = out_dir;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--format")) opts.format = format;
  }

  if (solve->parsed()) return pdelab::cmd_solve(opts, std::cout, std::cerr);
  if (fit->parsed()) return pdelab::cmd_fit(opts, std::cout, std::cerr);
  if (train->parsed()) return pdelab::cmd_train_ann(opts, std::cout, std::cerr);
  if (surrogate->parsed()) return pdelab::cmd_surrogate(opts, std::cout, std::cerr);
  if (breakeven->parsed()) return pdelab::cmd_breakeven(opts, std::cout, std::cerr);
  return pdelab::cmd_report(run_dir, std::cout, std::cerr);
}

#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "monsoon/app.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Spatio-temporal rainfall pattern discovery with a Markov random field"};
  cli.require_subcommand(1);

  std::string config;
  std::string out;
  long long seed = -1;
  int workers = 0;

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const monsoon::app::RunConfig&);
  };
  const Command commands[] = {
      {"synth", "generate a synthetic field with known latent labels", monsoon::app::cmd_synth},
      {"fit", "run the Gibbs sampler and write the MAP state and patterns", monsoon::app::cmd_fit},
      {"analyze", "transitions, spells, coherence and similarity from a fit", monsoon::app::cmd_analyze},
      {"simulate", "sample rainfall seasons from a fitted transition model",
       monsoon::app::cmd_simulate},
      {"evaluate", "score the fit against k-means and spectral baselines",
       monsoon::app::cmd_evaluate},
  };
  for (const auto& c : commands) {
    auto* sub = cli.add_subcommand(c.name, c.help);
    sub->add_option("-c,--config", config, "key = value configuration file");
    sub->add_option("--seed", seed, "override the RNG seed");
    sub->add_option("-o,--out", out, "output directory");
    sub->add_option("-w,--workers", workers, "OpenMP worker count")->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(cli, argc, argv);

  try {
    monsoon::csv::KeyValues overrides;
    if (seed >= 0) overrides["seed"] = std::to_string(seed);
    if (!out.empty()) overrides["out"] = out;
    if (workers > 0) overrides["workers"] = std::to_string(workers);
    const auto cfg = monsoon::app::load_run_config(config, overrides);
    for (const auto& c : commands) {
      if (cli.got_subcommand(c.name)) return c.run(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

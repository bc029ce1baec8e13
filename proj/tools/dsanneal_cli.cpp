// dsanneal: run, compare, check and referee distributed annealing experiments.

#include "dsanneal/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Distributed simulated annealing for aggregative games"};
  app.require_subcommand(1);

  dsanneal::CommandOptions opts;
  std::uint64_t seed = 0;
  std::string out_dir;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "run seed (overrides the config)");
    sub->add_flag("--svg", opts.svg, "also render SVG charts");
    sub->add_option("--threads", opts.threads, "worker threads for replicates (0 = all cores)");
  };

  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const dsanneal::CommandOptions&, std::ostream&, std::ostream&);
  };
  const Entry entries[] = {
      {"run", "run one experiment and write its trace and plot data", dsanneal::cmd_run},
      {"compare", "run two methods on the same game, network and seed", dsanneal::cmd_compare},
      {"check", "check connectivity, gradients and schedules", dsanneal::cmd_check},
      {"oracle", "compute the reference social optimum", dsanneal::cmd_oracle},
      {"ensemble", "run seeded replicates and summarize them", dsanneal::cmd_ensemble},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub);
    subs.emplace_back(sub, &e);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dsanneal::kExitConfig;
  }

  for (auto& [sub, entry] : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--out")) opts.out_dir = out_dir;
    if (sub->count("--seed")) opts.seed = seed;
    return entry->fn(opts, std::cout, std::cerr);
  }
  return dsanneal::kExitConfig;
}

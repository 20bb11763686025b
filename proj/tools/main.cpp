#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "stitforest/errors.hpp"
#include "stitforest/runconfig.hpp"

namespace {

struct FlagValues {
  std::string config;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
};

void add_common(CLI::App* sub, FlagValues& vals) {
  sub->add_option("--config", vals.config, "JSON run config (version 1)");
  sub->add_option("--seed", vals.seed, "root RNG seed");
  sub->add_option("--threads", vals.threads, "worker threads for replicate-level parallelism");
  sub->add_option("--out", vals.out, "output directory");
  sub->add_flag("--assert", "exit 3 unless every acceptance check passes");
  sub->add_flag("--plot", "also write SVG plots where supported");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random tessellation forests: samplers, estimators, experiments"};
  app.require_subcommand(1);

  FlagValues vals;
  CLI::App* sample =
      app.add_subcommand("sample-tessellation", "draw one tessellation and write it as JSON");
  CLI::App* fit = app.add_subcommand("fit", "fit a forest on a dataset CSV");
  CLI::App* predict = app.add_subcommand("predict", "predict with a stored model");
  CLI::App* experiment = app.add_subcommand("experiment", "run an experiment and emit CSV");
  std::string kind;
  experiment->add_option("kind", kind, "rates | suboptimality | geometry | equivalence | bias")
      ->required();
  for (CLI::App* sub : {sample, fit, predict, experiment}) add_common(sub, vals);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n";
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  stitforest::CliOverrides overrides;
  if (sub->count("--config") > 0) overrides.config_path = vals.config;
  if (sub->count("--seed") > 0) overrides.seed = vals.seed;
  if (sub->count("--threads") > 0) overrides.threads = vals.threads;
  if (sub->count("--out") > 0) overrides.out = vals.out;
  overrides.assert_checks = sub->count("--assert") > 0;
  overrides.plot = sub->count("--plot") > 0;

  try {
    const stitforest::RunConfig cfg =
        stitforest::make_run_config(sub->get_name(), kind, overrides);
    return stitforest::run_command(cfg, std::cout, std::cerr);
  } catch (const stitforest::ConfigError& e) {
    std::cerr << "error[config]: " << e.what() << "\n";
    return 2;
  }
}

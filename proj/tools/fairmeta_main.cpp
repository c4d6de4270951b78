#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fairmeta/errors.hpp"
#include "fairmeta/experiments.hpp"

namespace {

using fairmeta::cli::RunConfig;

// Flag values land here first; only flags the user actually passed are
// overlaid on the config, so config-file values survive unless overridden.
struct Overrides {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<double> gamma;
  std::string regularizer;
  std::optional<int> meta_iters;
  std::string data;
  std::string out;
  std::string phi;
  std::optional<uint64_t> holdout_seed;
};

RunConfig build_config(const std::string& experiment, const Overrides& ov) {
  RunConfig cfg = ov.config.empty() ? fairmeta::cli::default_config(experiment)
                                    : fairmeta::cli::load_config_file(ov.config, experiment);
  if (ov.seed) cfg.seeds = {*ov.seed};
  if (ov.gamma) cfg.gamma = *ov.gamma;
  if (!ov.regularizer.empty()) cfg.regularizer = ov.regularizer;
  if (ov.meta_iters) cfg.meta_iters = *ov.meta_iters;
  if (!ov.data.empty()) cfg.data = ov.data;
  if (!ov.out.empty()) cfg.out = ov.out;
  if (!ov.phi.empty()) cfg.phi_interpretation = ov.phi;
  if (ov.holdout_seed) cfg.holdout_seed = *ov.holdout_seed;
  return cfg;
}

void add_common_flags(CLI::App& cmd, Overrides& ov) {
  cmd.add_option("--config", ov.config, "JSON config file; flags override its values");
  cmd.add_option("--seed", ov.seed, "single run seed (replaces the config's seed list)");
  cmd.add_option("--gamma", ov.gamma, "single fairness weight (replaces the sweep grid)");
  cmd.add_option("--meta-iters", ov.meta_iters, "meta-iteration count");
  cmd.add_option("--out", ov.out, "output directory (default runs/<experiment>_s<seed>_<time>)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair-MAML experiments: fair meta-learning training, sweeps, and exports"};
  app.require_subcommand(1);

  Overrides ov;

  CLI::App* synth = app.add_subcommand("synth", "Synthetic two-Gaussian experiment");
  add_common_flags(*synth, ov);
  synth->add_option("--regularizer", ov.regularizer, "fairness regularizer")
      ->check(CLI::IsMember({"dp", "eop"}));
  synth->add_option("--phi-interpretation", ov.phi, "rotation angle reading of the phi parameter")
      ->check(CLI::IsMember({"literal", "pi-over-phi"}));

  CLI::App* cc = app.add_subcommand("cc", "Communities & Crime experiment");
  add_common_flags(*cc, ov);
  cc->add_option("--regularizer", ov.regularizer, "fairness regularizer, or both sweeps")
      ->check(CLI::IsMember({"dp", "eop", "both"}));
  cc->add_option("--data", ov.data, "communities data file (UCI format)");
  cc->add_option("--holdout-seed", ov.holdout_seed, "seed of the holdout-state draw");

  std::string report_path, boundary_out = "boundary.csv";
  double lo = -10.0, hi = 10.0;
  int resolution = 200;
  CLI::App* boundary =
      app.add_subcommand("boundary", "Export a P(f=1) grid from a saved train report");
  boundary->add_option("--report", report_path, "train report JSON")->required();
  boundary->add_option("--out", boundary_out, "output CSV path");
  boundary->add_option("--lo", lo, "grid lower bound, both axes");
  boundary->add_option("--hi", hi, "grid upper bound, both axes");
  boundary->add_option("--resolution", resolution, "grid points per axis");

  std::string cache_out;
  CLI::App* cache = app.add_subcommand("cache-tasks", "Generate and save a synthetic task cache");
  cache->add_option("--config", ov.config, "JSON config file; flags override its values");
  cache->add_option("--seed", ov.seed, "cache generation seed");
  cache->add_option("--out", cache_out, "cache file path (default tasks.cache)");
  cache->add_option("--phi-interpretation", ov.phi, "rotation angle reading of the phi parameter")
      ->check(CLI::IsMember({"literal", "pi-over-phi"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return fairmeta::cli::cmd_synth(build_config("synth", ov));
    if (cc->parsed()) return fairmeta::cli::cmd_cc(build_config("cc", ov));
    if (boundary->parsed())
      return fairmeta::cli::cmd_boundary(report_path, boundary_out, lo, hi, resolution);
    if (cache->parsed()) {
      RunConfig cfg = build_config("synth", ov);
      if (ov.seed) cfg.cache_seed = *ov.seed;
      return fairmeta::cli::cmd_cache_tasks(cfg, cache_out);
    }
  } catch (const fairmeta::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const fairmeta::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairmeta/mlp.hpp"
#include "fairmeta/train.hpp"

namespace fairmeta::cli {

// Full resolved configuration of one experiment run. Serialized verbatim to
// the run's manifest.json, and a manifest loads back as a config, so a run
// can be replayed bit-for-bit on the same build.
struct RunConfig {
  std::string experiment;  // "synth" or "cc"
  std::vector<uint64_t> seeds;
  std::optional<double> gamma;  // set: sweep collapses to this single value
  std::string regularizer;      // "dp" or "eop"; cc also accepts "both"
  double alpha = 0.3;
  double beta = 1e-3;
  Index k = 5;
  int meta_batch = 32;
  int meta_iters = 5000;
  int inner_steps = 1;
  uint64_t cache_seed = 7;
  double baseline_lr = 1e-3;  // per-task step size of the pretrained baseline
  std::string out;            // empty: runs/<experiment>_s<seed>_<timestamp>

  // synth
  int task_count = 100;
  Index task_size = 200;
  Index n_eval = 1000;
  Index finetune_k = 5;
  std::vector<double> gamma_grid;
  std::vector<double> baseline_steps;  // baseline fine-tune step sizes
  std::string phi_interpretation = "literal";

  // cc
  std::string data;
  uint64_t holdout_seed = 0;
  int holdout_count = 5;
  Index finetune_n = 10;
  int batch_count = 100;
  std::vector<double> gamma_grid_dp;
  std::vector<double> gamma_grid_eop;
  std::vector<double> baseline_finetune_lrs;
};

RunConfig default_config(const std::string& experiment);

// Overlays JSON onto cfg; any key outside the documented schema is rejected.
void apply_json(RunConfig& cfg, const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

// default_config(experiment) + the file's JSON.
RunConfig load_config_file(const std::string& path, const std::string& experiment);

void validate(const RunConfig& cfg);

// Train-run artifact: config echo, objective trace, final parameters.
nlohmann::json report_to_json(const train::TrainReport& rep, const Arch& arch);
MlpParams params_from_report(const nlohmann::json& j);

// P(f = 1) over a resolution x resolution grid on [lo, hi]^2, written as
// x,y,p1 rows with x varying slowest.
void export_boundary(const MlpParams& params, double lo, double hi, int resolution,
                     const std::string& path);

// Subcommand bodies; each returns a process exit code.
int cmd_synth(RunConfig cfg);
int cmd_cc(RunConfig cfg);
int cmd_cache_tasks(const RunConfig& cfg, const std::string& out_file);
int cmd_boundary(const std::string& report_path, const std::string& out_csv, double lo, double hi,
                 int resolution);

}  // namespace fairmeta::cli

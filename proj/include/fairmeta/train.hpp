#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fairmeta/dataset.hpp"
#include "fairmeta/fairness.hpp"
#include "fairmeta/mlp.hpp"

namespace fairmeta::train {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct MetaConfig {
  double alpha = 0.3;  // inner step size
  double beta = 1e-3;  // meta learning rate
  Index k = 5;         // rows per support/query sample
  int meta_batch = 32;
  int meta_iters = 5000;
  int inner_steps = 1;
  double gamma = 0.0;
  Regularizer reg = Regularizer::Dp;
  uint64_t seed = 0;
  AdamConfig adam;
};

void validate(const MetaConfig& cfg);

struct AdamState {
  Vector m, v;
  long t = 0;
  explicit AdamState(Index n) : m(Vector::Zero(n)), v(Vector::Zero(n)) {}
};

// Standard bias-corrected Adam. Returns the update; the caller subtracts it.
Vector adam_step(AdamState& state, const Vector& grad, double lr, const AdamConfig& cfg = {});

// Where meta-iterations get their (support, query) pairs. Implementations
// draw from the provided rng only, so the training run owns one stream.
class TaskSource {
 public:
  virtual ~TaskSource() = default;
  virtual std::vector<std::pair<Dataset, Dataset>> next_batch(int meta_batch, Index k,
                                                              std::mt19937_64& rng) = 0;
  virtual Index feature_dim() const = 0;
};

// Uniform-with-replacement choice over a fixed task pool; per choice, k
// support and k query rows drawn disjointly from the task's rows (which must
// number at least 2k).
class CachedTaskSource final : public TaskSource {
 public:
  explicit CachedTaskSource(std::vector<Dataset> tasks);
  std::vector<std::pair<Dataset, Dataset>> next_batch(int meta_batch, Index k,
                                                      std::mt19937_64& rng) override;
  Index feature_dim() const override;
  const std::vector<Dataset>& tasks() const { return tasks_; }

 private:
  std::vector<Dataset> tasks_;
};

// Cycles through pre-built meta-batches in order, one per meta-iteration.
// Batches are shared, not copied, so many training runs can walk one cache.
class PrebuiltBatchSource final : public TaskSource {
 public:
  using Batches = std::vector<std::vector<std::pair<Dataset, Dataset>>>;
  explicit PrebuiltBatchSource(std::shared_ptr<const Batches> batches);
  explicit PrebuiltBatchSource(Batches batches);
  std::vector<std::pair<Dataset, Dataset>> next_batch(int meta_batch, Index k,
                                                      std::mt19937_64& rng) override;
  Index feature_dim() const override;

 private:
  std::shared_ptr<const Batches> batches_;
  size_t cursor_ = 0;
};

struct TrainReport {
  std::vector<double> trace;  // summed meta-objective, one entry per iteration
  MlpParams params;
  double wall_seconds = 0.0;
  MetaConfig config;
  long task_exposures = 0;
};

// Alg.: per iteration, sample meta_batch tasks, adapt each on its support
// rows, sum the exact meta-gradients over the query rows in task order, and
// take one Adam step on the sum. Deterministic given (config, source, build).
// A non-finite meta-objective raises NumericError with the iteration index.
TrainReport fair_maml_train(TaskSource& source, const MetaConfig& cfg, const Arch& arch);

// Conventional baseline with the same task exposure: one gradient step on
// the combined objective per sampled task, at task_lr, walking the same kind
// of task stream. The query halves go unused.
TrainReport pretrain_baseline(TaskSource& source, const MetaConfig& cfg, const Arch& arch,
                              double task_lr);

// `steps` full-batch gradient steps at rate lr; the input is not modified.
MlpParams fine_tune(const MlpParams& params, const Dataset& data, int steps, double lr,
                    Regularizer reg, double gamma);

// One fine-tune/eval unit of a sweep.
struct SweepCase {
  std::string task_id;
  Dataset finetune;
  Dataset eval;
};

struct SweepRow {
  double gamma = 0.0;
  uint64_t seed = 0;
  std::string task_id;
  EvalMetrics metrics;
};

struct SweepSpec {
  std::vector<double> gammas;
  std::vector<uint64_t> seeds;
  int finetune_steps = 1;
  double finetune_lr = 0.3;
  Regularizer reg = Regularizer::Dp;
};

using TrainFn = std::function<MlpParams(double gamma, uint64_t seed)>;
using CaseFn = std::function<std::vector<SweepCase>(uint64_t seed)>;

// For each (gamma, seed): train once, then fine-tune and evaluate on every
// case. Row order is gammas x seeds x cases, all outer-to-inner.
std::vector<SweepRow> gamma_sweep(const SweepSpec& spec, const TrainFn& train_fn,
                                  const CaseFn& case_fn);

struct SweepAggregate {
  double gamma = 0.0;
  double finetune_lr = 0.0;
  long n_rows = 0;
  double mean_accuracy = 0.0;
  std::optional<double> mean_dp, mean_dp_sym;
  std::optional<double> mean_eo, mean_eo_sym;
  long undefined_dp = 0;
  long undefined_eo = 0;
};

// Group rows by gamma (in first-seen order); means skip undefined ratios and
// the skip counts are reported alongside.
std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows, double finetune_lr);

}  // namespace fairmeta::train

#include "fairmeta/train.hpp"

#include <chrono>
#include <cmath>

#include "fairmeta/errors.hpp"
#include "fairmeta/objective.hpp"
#include "fairmeta/sampling.hpp"

namespace fairmeta::train {

void validate(const MetaConfig& cfg) {
  if (!(cfg.alpha > 0.0)) throw std::invalid_argument("config: alpha must be positive");
  if (!(cfg.beta > 0.0)) throw std::invalid_argument("config: beta must be positive");
  if (cfg.k < 1) throw std::invalid_argument("config: k must be at least 1");
  if (cfg.meta_batch < 1) throw std::invalid_argument("config: meta_batch must be at least 1");
  if (cfg.meta_iters < 0) throw std::invalid_argument("config: meta_iters must be nonnegative");
  if (cfg.inner_steps < 1) throw std::invalid_argument("config: inner_steps must be at least 1");
  if (cfg.gamma < 0.0) throw std::invalid_argument("config: gamma must be nonnegative");
  if (!(cfg.adam.beta1 >= 0.0 && cfg.adam.beta1 < 1.0) ||
      !(cfg.adam.beta2 >= 0.0 && cfg.adam.beta2 < 1.0) || !(cfg.adam.eps > 0.0))
    throw std::invalid_argument("config: bad Adam constants");
}

Vector adam_step(AdamState& state, const Vector& grad, double lr, const AdamConfig& cfg) {
  if (state.m.size() != grad.size()) throw std::invalid_argument("adam_step: size mismatch");
  state.t += 1;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double mc = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double vc = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  const Vector mhat = state.m / mc;
  const Vector vhat = state.v / vc;
  return lr * mhat.cwiseQuotient(vhat.cwiseSqrt() + Vector::Constant(grad.size(), cfg.eps));
}

CachedTaskSource::CachedTaskSource(std::vector<Dataset> tasks) : tasks_(std::move(tasks)) {
  if (tasks_.empty()) throw std::invalid_argument("CachedTaskSource: empty task pool");
  for (const Dataset& d : tasks_) {
    validate(d);
    if (d.dim() != tasks_.front().dim())
      throw std::invalid_argument("CachedTaskSource: inconsistent feature dimensions");
  }
}

Index CachedTaskSource::feature_dim() const { return tasks_.front().dim(); }

std::vector<std::pair<Dataset, Dataset>> CachedTaskSource::next_batch(int meta_batch, Index k,
                                                                      std::mt19937_64& rng) {
  std::vector<std::pair<Dataset, Dataset>> batch;
  batch.reserve(meta_batch);
  for (int b = 0; b < meta_batch; ++b) {
    const size_t t = std::uniform_int_distribution<size_t>(0, tasks_.size() - 1)(rng);
    const Dataset& task = tasks_[t];
    if (task.size() < 2 * k)
      throw std::invalid_argument("CachedTaskSource: task " + task.tag + " smaller than 2k");
    const std::vector<size_t> rows =
        draw_without_replacement(static_cast<size_t>(task.size()), 2 * static_cast<size_t>(k), rng);
    std::vector<Index> support, query;
    for (Index i = 0; i < k; ++i) support.push_back(static_cast<Index>(rows[i]));
    for (Index i = k; i < 2 * k; ++i) query.push_back(static_cast<Index>(rows[i]));
    batch.emplace_back(subset(task, support), subset(task, query));
  }
  return batch;
}

PrebuiltBatchSource::PrebuiltBatchSource(std::shared_ptr<const Batches> batches)
    : batches_(std::move(batches)) {
  if (!batches_ || batches_->empty())
    throw std::invalid_argument("PrebuiltBatchSource: no batches");
  for (const auto& b : *batches_)
    if (b.empty()) throw std::invalid_argument("PrebuiltBatchSource: empty batch");
}

PrebuiltBatchSource::PrebuiltBatchSource(Batches batches)
    : PrebuiltBatchSource(std::make_shared<const Batches>(std::move(batches))) {}

Index PrebuiltBatchSource::feature_dim() const {
  return batches_->front().front().first.dim();
}

std::vector<std::pair<Dataset, Dataset>> PrebuiltBatchSource::next_batch(int meta_batch, Index,
                                                                         std::mt19937_64&) {
  const auto& batch = (*batches_)[cursor_];
  cursor_ = (cursor_ + 1) % batches_->size();
  if (batch.size() != static_cast<size_t>(meta_batch))
    throw std::invalid_argument("PrebuiltBatchSource: batch size does not match meta_batch");
  return batch;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TrainReport fair_maml_train(TaskSource& source, const MetaConfig& cfg, const Arch& arch) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(cfg.seed);
  MlpParams params = make_mlp(arch, rng);
  AdamState adam(param_count(arch));

  TrainReport rep;
  rep.config = cfg;
  rep.trace.reserve(cfg.meta_iters);
  for (int it = 0; it < cfg.meta_iters; ++it) {
    const auto batch = source.next_batch(cfg.meta_batch, cfg.k, rng);
    Vector sum = Vector::Zero(param_count(arch));
    double meta_objective = 0.0;
    // Plain sum in task order: reproducibility depends on this never being
    // reassociated.
    for (const auto& [support, query] : batch) {
      TaskGradient tg =
          meta_gradient(params, support, query, cfg.alpha, cfg.reg, cfg.gamma, cfg.inner_steps);
      sum += tg.grad;
      meta_objective += tg.outer_value;
      rep.task_exposures += 1;
    }
    if (!std::isfinite(meta_objective))
      throw NumericError("meta-objective non-finite at iteration " + std::to_string(it));
    rep.trace.push_back(meta_objective);
    params = unflatten(arch, Vector(flatten(params) - adam_step(adam, sum, cfg.beta, cfg.adam)));
  }
  rep.params = std::move(params);
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

TrainReport pretrain_baseline(TaskSource& source, const MetaConfig& cfg, const Arch& arch,
                              double task_lr) {
  validate(cfg);
  if (!(task_lr > 0.0)) throw std::invalid_argument("pretrain_baseline: task_lr must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(cfg.seed);
  MlpParams params = make_mlp(arch, rng);

  TrainReport rep;
  rep.config = cfg;
  rep.trace.reserve(cfg.meta_iters);
  for (int it = 0; it < cfg.meta_iters; ++it) {
    const auto batch = source.next_batch(cfg.meta_batch, cfg.k, rng);
    double batch_objective = 0.0;
    for (const auto& [support, query] : batch) {
      batch_objective += objective<double>(params, support, cfg.reg, cfg.gamma);
      params = inner_update(params, support, task_lr, cfg.reg, cfg.gamma);
      rep.task_exposures += 1;
    }
    if (!std::isfinite(batch_objective))
      throw NumericError("training objective non-finite at iteration " + std::to_string(it));
    rep.trace.push_back(batch_objective);
  }
  rep.params = std::move(params);
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

MlpParams fine_tune(const MlpParams& params, const Dataset& data, int steps, double lr,
                    Regularizer reg, double gamma) {
  if (steps < 0) throw std::invalid_argument("fine_tune: negative steps");
  validate(data);
  MlpParams p = params;
  for (int s = 0; s < steps; ++s) p = inner_update(p, data, lr, reg, gamma);
  return p;
}

std::vector<SweepRow> gamma_sweep(const SweepSpec& spec, const TrainFn& train_fn,
                                  const CaseFn& case_fn) {
  if (spec.gammas.empty() || spec.seeds.empty())
    throw std::invalid_argument("gamma_sweep: empty grid");
  std::vector<SweepRow> rows;
  for (double gamma : spec.gammas) {
    for (uint64_t seed : spec.seeds) {
      const MlpParams trained = train_fn(gamma, seed);
      for (const SweepCase& c : case_fn(seed)) {
        const MlpParams adapted =
            fine_tune(trained, c.finetune, spec.finetune_steps, spec.finetune_lr, spec.reg, gamma);
        SweepRow row;
        row.gamma = gamma;
        row.seed = seed;
        row.task_id = c.task_id;
        row.metrics = evaluate(adapted, c.eval);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows, double finetune_lr) {
  std::vector<SweepAggregate> out;
  for (const SweepRow& r : rows) {
    SweepAggregate* agg = nullptr;
    for (SweepAggregate& a : out)
      if (a.gamma == r.gamma) agg = &a;
    if (!agg) {
      out.push_back({});
      agg = &out.back();
      agg->gamma = r.gamma;
      agg->finetune_lr = finetune_lr;
    }
    agg->n_rows += 1;
    agg->mean_accuracy += r.metrics.accuracy;
    if (r.metrics.dp) {
      agg->mean_dp = agg->mean_dp.value_or(0.0) + *r.metrics.dp;
      agg->mean_dp_sym = agg->mean_dp_sym.value_or(0.0) + *symmetrized(r.metrics.dp);
    } else {
      agg->undefined_dp += 1;
    }
    if (r.metrics.eo) {
      agg->mean_eo = agg->mean_eo.value_or(0.0) + *r.metrics.eo;
      agg->mean_eo_sym = agg->mean_eo_sym.value_or(0.0) + *symmetrized(r.metrics.eo);
    } else {
      agg->undefined_eo += 1;
    }
  }
  for (SweepAggregate& a : out) {
    a.mean_accuracy /= static_cast<double>(a.n_rows);
    const long dp_n = a.n_rows - a.undefined_dp;
    const long eo_n = a.n_rows - a.undefined_eo;
    if (a.mean_dp) {
      *a.mean_dp /= static_cast<double>(dp_n);
      *a.mean_dp_sym /= static_cast<double>(dp_n);
    }
    if (a.mean_eo) {
      *a.mean_eo /= static_cast<double>(eo_n);
      *a.mean_eo_sym /= static_cast<double>(eo_n);
    }
  }
  return out;
}

}  // namespace fairmeta::train

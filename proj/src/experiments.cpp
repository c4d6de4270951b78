#include "fairmeta/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "fairmeta/cc_data.hpp"
#include "fairmeta/csv.hpp"
#include "fairmeta/errors.hpp"
#include "fairmeta/objective.hpp"
#include "fairmeta/sampling.hpp"
#include "fairmeta/synth.hpp"
#include "fairmeta/task_cache.hpp"

namespace fairmeta::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Sub-seed slots, so the run seed never feeds two generators directly.
constexpr uint64_t kSlotFinetuneTask = 1;
constexpr uint64_t kSlotStateSplit = 100;  // + holdout state index

Arch arch_for(Index input_dim) { return {input_dim, 20, 20, 2}; }

Regularizer parse_regularizer(const std::string& s) {
  if (s == "dp") return Regularizer::Dp;
  if (s == "eop") return Regularizer::Eop;
  throw std::invalid_argument("unknown regularizer: " + s);
}

template <typename T>
T as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("config key '" + key + "' has the wrong type");
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << text;
  if (!out) throw DataError("write failed: " + path);
}

std::string timestamp_utc() {
  const std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return buf;
}

std::string resolve_out_dir(RunConfig& cfg) {
  if (cfg.out.empty())
    cfg.out = "runs/" + cfg.experiment + "_s" + std::to_string(cfg.seeds.at(0)) + "_" +
              timestamp_utc();
  fs::create_directories(fs::path(cfg.out) / "reports");
  return cfg.out;
}

std::vector<double> effective_grid(const RunConfig& cfg, const std::vector<double>& grid) {
  if (cfg.gamma) return {*cfg.gamma};
  return grid;
}

void print_aggregates(const std::string& label, const std::vector<train::SweepAggregate>& aggs) {
  for (const auto& a : aggs)
    std::cout << label << " gamma=" << csv::num(a.gamma) << " lr=" << csv::num(a.finetune_lr)
              << " n=" << a.n_rows << " acc=" << csv::num(a.mean_accuracy)
              << " dp_sym=" << (a.mean_dp_sym ? csv::num(*a.mean_dp_sym) : "undefined")
              << " eo_sym=" << (a.mean_eo_sym ? csv::num(*a.mean_eo_sym) : "undefined") << '\n';
}

json config_echo(const train::MetaConfig& mc) {
  return json{{"alpha", mc.alpha},
              {"beta", mc.beta},
              {"k", mc.k},
              {"meta_batch", mc.meta_batch},
              {"meta_iters", mc.meta_iters},
              {"inner_steps", mc.inner_steps},
              {"gamma", mc.gamma},
              {"regularizer", to_string(mc.reg)},
              {"seed", mc.seed}};
}

}  // namespace

RunConfig default_config(const std::string& experiment) {
  RunConfig cfg;
  cfg.experiment = experiment;
  if (experiment == "synth") {
    cfg.seeds = {0};
    cfg.regularizer = "dp";
    cfg.alpha = 0.3;
    cfg.beta = 1e-3;
    cfg.k = 5;
    cfg.meta_batch = 32;
    cfg.meta_iters = 5000;
    cfg.gamma_grid = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    cfg.baseline_steps = {0.01, 0.1, 0.2, 0.3};
  } else if (experiment == "cc") {
    cfg.seeds = {0, 1, 2};
    cfg.regularizer = "both";
    cfg.alpha = 1e-2;
    cfg.beta = 1e-4;
    cfg.k = 10;
    cfg.meta_batch = 8;
    cfg.meta_iters = 2000;
    cfg.gamma_grid_dp = {0, 1, 2, 3, 4};
    cfg.gamma_grid_eop = {0, 10, 20, 30, 40};
    cfg.baseline_finetune_lrs = {0.1};
  } else {
    throw std::invalid_argument("unknown experiment: " + experiment);
  }
  return cfg;
}

void apply_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "experiment") cfg.experiment = as<std::string>(value, key);
    else if (key == "seeds") cfg.seeds = as<std::vector<uint64_t>>(value, key);
    else if (key == "gamma") cfg.gamma = as<double>(value, key);
    else if (key == "regularizer") cfg.regularizer = as<std::string>(value, key);
    else if (key == "alpha") cfg.alpha = as<double>(value, key);
    else if (key == "beta") cfg.beta = as<double>(value, key);
    else if (key == "k") cfg.k = as<Index>(value, key);
    else if (key == "meta_batch") cfg.meta_batch = as<int>(value, key);
    else if (key == "meta_iters") cfg.meta_iters = as<int>(value, key);
    else if (key == "inner_steps") cfg.inner_steps = as<int>(value, key);
    else if (key == "cache_seed") cfg.cache_seed = as<uint64_t>(value, key);
    else if (key == "baseline_lr") cfg.baseline_lr = as<double>(value, key);
    else if (key == "out") cfg.out = as<std::string>(value, key);
    else if (key == "task_count") cfg.task_count = as<int>(value, key);
    else if (key == "task_size") cfg.task_size = as<Index>(value, key);
    else if (key == "n_eval") cfg.n_eval = as<Index>(value, key);
    else if (key == "finetune_k") cfg.finetune_k = as<Index>(value, key);
    else if (key == "gamma_grid") cfg.gamma_grid = as<std::vector<double>>(value, key);
    else if (key == "baseline_steps") cfg.baseline_steps = as<std::vector<double>>(value, key);
    else if (key == "phi_interpretation") cfg.phi_interpretation = as<std::string>(value, key);
    else if (key == "data") cfg.data = as<std::string>(value, key);
    else if (key == "holdout_seed") cfg.holdout_seed = as<uint64_t>(value, key);
    else if (key == "holdout_count") cfg.holdout_count = as<int>(value, key);
    else if (key == "finetune_n") cfg.finetune_n = as<Index>(value, key);
    else if (key == "batch_count") cfg.batch_count = as<int>(value, key);
    else if (key == "gamma_grid_dp") cfg.gamma_grid_dp = as<std::vector<double>>(value, key);
    else if (key == "gamma_grid_eop") cfg.gamma_grid_eop = as<std::vector<double>>(value, key);
    else if (key == "baseline_finetune_lrs")
      cfg.baseline_finetune_lrs = as<std::vector<double>>(value, key);
    else throw std::invalid_argument("unknown config key: " + key);
  }
}

json to_json(const RunConfig& cfg) {
  json j{{"experiment", cfg.experiment},
         {"seeds", cfg.seeds},
         {"regularizer", cfg.regularizer},
         {"alpha", cfg.alpha},
         {"beta", cfg.beta},
         {"k", cfg.k},
         {"meta_batch", cfg.meta_batch},
         {"meta_iters", cfg.meta_iters},
         {"inner_steps", cfg.inner_steps},
         {"cache_seed", cfg.cache_seed},
         {"baseline_lr", cfg.baseline_lr},
         {"out", cfg.out}};
  if (cfg.gamma) j["gamma"] = *cfg.gamma;
  if (cfg.experiment == "synth") {
    j["task_count"] = cfg.task_count;
    j["task_size"] = cfg.task_size;
    j["n_eval"] = cfg.n_eval;
    j["finetune_k"] = cfg.finetune_k;
    j["gamma_grid"] = cfg.gamma_grid;
    j["baseline_steps"] = cfg.baseline_steps;
    j["phi_interpretation"] = cfg.phi_interpretation;
  } else {
    j["data"] = cfg.data;
    j["holdout_seed"] = cfg.holdout_seed;
    j["holdout_count"] = cfg.holdout_count;
    j["finetune_n"] = cfg.finetune_n;
    j["batch_count"] = cfg.batch_count;
    j["gamma_grid_dp"] = cfg.gamma_grid_dp;
    j["gamma_grid_eop"] = cfg.gamma_grid_eop;
    j["baseline_finetune_lrs"] = cfg.baseline_finetune_lrs;
  }
  return j;
}

RunConfig load_config_file(const std::string& path, const std::string& experiment) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config file " + path + " is not valid JSON: " + e.what());
  }
  std::string exp = experiment;
  if (j.contains("experiment")) exp = as<std::string>(j.at("experiment"), "experiment");
  if (!experiment.empty() && exp != experiment)
    throw std::invalid_argument("config file is for experiment '" + exp +
                                "', not '" + experiment + "'");
  RunConfig cfg = default_config(exp);
  apply_json(cfg, j);
  return cfg;
}

void validate(const RunConfig& cfg) {
  if (cfg.experiment != "synth" && cfg.experiment != "cc")
    throw std::invalid_argument("experiment must be 'synth' or 'cc'");
  if (cfg.seeds.empty()) throw std::invalid_argument("config: seeds must be nonempty");
  if (!(cfg.alpha > 0.0) || !(cfg.beta > 0.0))
    throw std::invalid_argument("config: alpha and beta must be positive");
  if (cfg.k < 1 || cfg.meta_batch < 1 || cfg.meta_iters < 0 || cfg.inner_steps < 1)
    throw std::invalid_argument("config: bad training shape");
  if (!(cfg.baseline_lr > 0.0)) throw std::invalid_argument("config: baseline_lr must be positive");
  if (cfg.gamma && *cfg.gamma < 0.0) throw std::invalid_argument("config: gamma must be nonnegative");
  if (cfg.experiment == "synth") {
    parse_regularizer(cfg.regularizer);
    synth::parse_phi_interpretation(cfg.phi_interpretation);
    if (cfg.task_count < 1) throw std::invalid_argument("config: task_count must be positive");
    if (cfg.task_size < 2 * cfg.k)
      throw std::invalid_argument("config: task_size must be at least 2k");
    if (cfg.n_eval < 1 || cfg.finetune_k < 1)
      throw std::invalid_argument("config: n_eval and finetune_k must be positive");
    if (!cfg.gamma && cfg.gamma_grid.empty())
      throw std::invalid_argument("config: gamma_grid must be nonempty");
    if (cfg.baseline_steps.empty())
      throw std::invalid_argument("config: baseline_steps must be nonempty");
    for (double s : cfg.baseline_steps)
      if (!(s > 0.0)) throw std::invalid_argument("config: baseline_steps must be positive");
  } else {
    if (cfg.regularizer != "both") parse_regularizer(cfg.regularizer);
    if (cfg.holdout_count < 1 || cfg.finetune_n < 1 || cfg.batch_count < 1)
      throw std::invalid_argument("config: bad cc shape");
    if (!cfg.gamma && (cfg.gamma_grid_dp.empty() || cfg.gamma_grid_eop.empty()))
      throw std::invalid_argument("config: cc gamma grids must be nonempty");
    if (cfg.baseline_finetune_lrs.empty())
      throw std::invalid_argument("config: baseline_finetune_lrs must be nonempty");
    for (double s : cfg.baseline_finetune_lrs)
      if (!(s > 0.0)) throw std::invalid_argument("config: baseline_finetune_lrs must be positive");
  }
}

json report_to_json(const train::TrainReport& rep, const Arch& arch) {
  const Vector flat = flatten(rep.params);
  return json{{"kind", "train-report"},
              {"arch", arch},
              {"config", config_echo(rep.config)},
              {"trace", rep.trace},
              {"task_exposures", rep.task_exposures},
              {"params", std::vector<double>(flat.data(), flat.data() + flat.size())}};
}

MlpParams params_from_report(const json& j) {
  try {
    const Arch arch = j.at("arch").get<Arch>();
    const std::vector<double> flat = j.at("params").get<std::vector<double>>();
    Vector v(static_cast<Index>(flat.size()));
    for (size_t i = 0; i < flat.size(); ++i) v[static_cast<Index>(i)] = flat[i];
    return unflatten(arch, v);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed train report: ") + e.what());
  }
}

void export_boundary(const MlpParams& params, double lo, double hi, int resolution,
                     const std::string& path) {
  if (params.input_dim() != 2) throw DataError("boundary export requires a 2-input model");
  if (resolution < 2) throw std::invalid_argument("boundary resolution must be at least 2");
  if (!(hi > lo)) throw std::invalid_argument("boundary bounds must satisfy lo < hi");
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "x,y,p1\n";
  Vector x(2);
  for (int i = 0; i < resolution; ++i) {
    x[0] = lo + (hi - lo) * i / (resolution - 1);
    for (int j = 0; j < resolution; ++j) {
      x[1] = lo + (hi - lo) * j / (resolution - 1);
      out << csv::num(x[0]) << ',' << csv::num(x[1]) << ',' << csv::num(forward(params, x)[1])
          << '\n';
    }
  }
  if (!out) throw DataError("write failed: " + path);
}

int cmd_synth(RunConfig cfg) {
  validate(cfg);
  const std::string out = resolve_out_dir(cfg);
  const auto interp = synth::parse_phi_interpretation(cfg.phi_interpretation);
  const Regularizer reg = parse_regularizer(cfg.regularizer);
  const std::vector<double> gammas = effective_grid(cfg, cfg.gamma_grid);
  const Arch arch = arch_for(2);

  const std::vector<Dataset> tasks =
      synth::cache_tasks(cfg.cache_seed, cfg.task_count, cfg.task_size, interp);
  save_task_cache(out + "/tasks.cache", tasks);

  const train::CaseFn case_fn = [&](uint64_t seed) {
    auto [fine, eval] = synth::sample_finetune_task(mix_seed(seed, kSlotFinetuneTask),
                                                    cfg.finetune_k, cfg.n_eval, interp);
    return std::vector<train::SweepCase>{{"synthetic-finetune", std::move(fine), std::move(eval)}};
  };

  const auto meta_config = [&](double gamma, uint64_t seed) {
    train::MetaConfig mc;
    mc.alpha = cfg.alpha;
    mc.beta = cfg.beta;
    mc.k = cfg.k;
    mc.meta_batch = cfg.meta_batch;
    mc.meta_iters = cfg.meta_iters;
    mc.inner_steps = cfg.inner_steps;
    mc.gamma = gamma;
    mc.reg = reg;
    mc.seed = seed;
    return mc;
  };

  // Boundary export needs the trained parameters back; stash the first
  // seed's per-gamma results while the sweeps run.
  std::map<double, MlpParams> fm_params0, base_params0;

  train::SweepSpec fm_spec;
  fm_spec.gammas = gammas;
  fm_spec.seeds = cfg.seeds;
  fm_spec.finetune_steps = cfg.inner_steps;
  fm_spec.finetune_lr = cfg.alpha;
  fm_spec.reg = reg;
  const train::TrainFn fm_train = [&](double gamma, uint64_t seed) {
    train::CachedTaskSource source(tasks);
    train::TrainReport rep = fair_maml_train(source, meta_config(gamma, seed), arch);
    if (seed == cfg.seeds.front()) {
      write_text(out + "/reports/fairmaml_" + to_string(reg) + "_g" + csv::num(gamma) + "_s" +
                     std::to_string(seed) + ".json",
                 report_to_json(rep, arch).dump(2) + "\n");
      fm_params0.emplace(gamma, rep.params);
    }
    return std::move(rep.params);
  };
  const std::vector<train::SweepRow> fm_rows = gamma_sweep(fm_spec, fm_train, case_fn);
  csv::write_metrics(out + "/metrics_fairmaml_" + to_string(reg) + ".csv", fm_rows);
  const auto fm_aggs = train::aggregate_rows(fm_rows, cfg.alpha);
  csv::write_aggregate(out + "/aggregate_fairmaml_" + to_string(reg) + ".csv", fm_aggs);
  print_aggregates("fairmaml " + std::string(to_string(reg)), fm_aggs);

  // The baseline trains once per (gamma, seed) and is fine-tuned at every
  // candidate step size.
  std::map<std::pair<double, uint64_t>, MlpParams> base_cache;
  const train::TrainFn base_train = [&](double gamma, uint64_t seed) {
    const auto key = std::make_pair(gamma, seed);
    auto it = base_cache.find(key);
    if (it == base_cache.end()) {
      train::CachedTaskSource source(tasks);
      train::TrainReport rep =
          pretrain_baseline(source, meta_config(gamma, seed), arch, cfg.baseline_lr);
      if (seed == cfg.seeds.front()) {
        write_text(out + "/reports/baseline_" + to_string(reg) + "_g" + csv::num(gamma) + "_s" +
                       std::to_string(seed) + ".json",
                   report_to_json(rep, arch).dump(2) + "\n");
        base_params0.emplace(gamma, rep.params);
      }
      it = base_cache.emplace(key, std::move(rep.params)).first;
    }
    return it->second;
  };
  std::vector<train::SweepRow> base_rows;
  std::vector<train::SweepAggregate> base_aggs;
  for (double step : cfg.baseline_steps) {
    train::SweepSpec spec = fm_spec;
    spec.finetune_lr = step;
    const train::CaseFn tagged_cases = [&, step](uint64_t seed) {
      auto cases = case_fn(seed);
      for (auto& c : cases) c.task_id += "|lr=" + csv::num(step);
      return cases;
    };
    const auto rows = gamma_sweep(spec, base_train, tagged_cases);
    const auto aggs = train::aggregate_rows(rows, step);
    base_rows.insert(base_rows.end(), rows.begin(), rows.end());
    base_aggs.insert(base_aggs.end(), aggs.begin(), aggs.end());
  }
  csv::write_metrics(out + "/metrics_baseline_" + to_string(reg) + ".csv", base_rows);
  csv::write_aggregate(out + "/aggregate_baseline_" + to_string(reg) + ".csv", base_aggs);
  print_aggregates("baseline " + std::string(to_string(reg)), base_aggs);

  // Decision boundaries after fine-tuning, first seed only: the plain-MAML
  // model (gamma 0), the best fair model (accuracy, gamma > 0), and the best
  // baseline (accuracy over gamma x step).
  {
    const uint64_t seed0 = cfg.seeds.front();
    const auto cases = case_fn(seed0);
    const Dataset& fine = cases.front().finetune;

    if (fm_params0.count(0.0)) {
      const MlpParams adapted = train::fine_tune(fm_params0.at(0.0), fine, cfg.inner_steps,
                                                 cfg.alpha, reg, 0.0);
      export_boundary(adapted, -10.0, 10.0, 200, out + "/boundary_maml.csv");
    }
    const train::SweepRow* best_fm = nullptr;
    for (const auto& r : fm_rows)
      if (r.seed == seed0 && r.gamma > 0.0 &&
          (!best_fm || r.metrics.accuracy > best_fm->metrics.accuracy))
        best_fm = &r;
    if (best_fm) {
      const MlpParams adapted = train::fine_tune(fm_params0.at(best_fm->gamma), fine,
                                                 cfg.inner_steps, cfg.alpha, reg, best_fm->gamma);
      export_boundary(adapted, -10.0, 10.0, 200, out + "/boundary_fairmaml.csv");
    }
    const train::SweepRow* best_base = nullptr;
    double best_step = cfg.baseline_steps.front();
    for (const auto& r : base_rows) {
      if (r.seed != seed0) continue;
      if (!best_base || r.metrics.accuracy > best_base->metrics.accuracy) {
        best_base = &r;
        const auto at = r.task_id.rfind("|lr=");
        best_step = std::stod(r.task_id.substr(at + 4));
      }
    }
    if (best_base) {
      const MlpParams adapted = train::fine_tune(base_params0.at(best_base->gamma), fine,
                                                 cfg.inner_steps, best_step, reg, best_base->gamma);
      export_boundary(adapted, -10.0, 10.0, 200, out + "/boundary_pretrained.csv");
    }
  }

  write_text(out + "/manifest.json", to_json(cfg).dump(2) + "\n");
  std::cout << "run directory: " << out << '\n';
  return 0;
}

int cmd_cc(RunConfig cfg) {
  validate(cfg);
  if (cfg.data.empty()) throw DataError("cc experiment requires a data file (--data)");
  const std::string out = resolve_out_dir(cfg);
  const cc::CcTable table = cc::load_cc(cfg.data);
  const cc::CcTaskSet taskset = cc::build_tasks(table, cfg.holdout_count, cfg.holdout_seed);
  const Arch arch = arch_for(static_cast<Index>(taskset.feature_names.size()));

  {
    json cols{{"kept", taskset.feature_names}, {"dropped", table.dropped_columns}};
    write_text(out + "/columns.json", cols.dump(2) + "\n");
  }

  // One batch cache shared by every run of the sweep, like a fixed dataset.
  auto batches = std::make_shared<train::PrebuiltBatchSource::Batches>();
  {
    std::mt19937_64 cache_rng(cfg.cache_seed);
    batches->reserve(cfg.batch_count);
    for (int b = 0; b < cfg.batch_count; ++b)
      batches->push_back(cc::sample_task_batch(taskset.train, cfg.meta_batch, cfg.k, cache_rng));
  }

  const train::CaseFn case_fn = [&](uint64_t seed) {
    std::vector<train::SweepCase> cases;
    for (size_t s = 0; s < taskset.holdout.size(); ++s) {
      auto [fine, eval] = cc::finetune_eval_split(taskset.holdout[s], cfg.finetune_n,
                                                  mix_seed(seed, kSlotStateSplit + s));
      cases.push_back({taskset.holdout[s].tag, std::move(fine), std::move(eval)});
    }
    return cases;
  };

  std::vector<Regularizer> regs;
  if (cfg.regularizer == "both")
    regs = {Regularizer::Dp, Regularizer::Eop};
  else
    regs = {parse_regularizer(cfg.regularizer)};

  for (Regularizer reg : regs) {
    const std::vector<double> grid =
        effective_grid(cfg, reg == Regularizer::Dp ? cfg.gamma_grid_dp : cfg.gamma_grid_eop);

    const auto meta_config = [&](double gamma, uint64_t seed) {
      train::MetaConfig mc;
      mc.alpha = cfg.alpha;
      mc.beta = cfg.beta;
      mc.k = cfg.k;
      mc.meta_batch = cfg.meta_batch;
      mc.meta_iters = cfg.meta_iters;
      mc.inner_steps = cfg.inner_steps;
      mc.gamma = gamma;
      mc.reg = reg;
      mc.seed = seed;
      return mc;
    };

    train::SweepSpec fm_spec;
    fm_spec.gammas = grid;
    fm_spec.seeds = cfg.seeds;
    fm_spec.finetune_steps = cfg.inner_steps;
    fm_spec.finetune_lr = cfg.alpha;
    fm_spec.reg = reg;
    const train::TrainFn fm_train = [&](double gamma, uint64_t seed) {
      train::PrebuiltBatchSource source(batches);
      train::TrainReport rep = fair_maml_train(source, meta_config(gamma, seed), arch);
      if (seed == cfg.seeds.front())
        write_text(out + "/reports/fairmaml_" + to_string(reg) + "_g" + csv::num(gamma) + "_s" +
                       std::to_string(seed) + ".json",
                   report_to_json(rep, arch).dump(2) + "\n");
      return std::move(rep.params);
    };
    const auto fm_rows = gamma_sweep(fm_spec, fm_train, case_fn);
    csv::write_metrics(out + "/metrics_fairmaml_" + to_string(reg) + ".csv", fm_rows);
    const auto fm_aggs = train::aggregate_rows(fm_rows, cfg.alpha);
    csv::write_aggregate(out + "/aggregate_fairmaml_" + to_string(reg) + ".csv", fm_aggs);
    print_aggregates("fairmaml " + std::string(to_string(reg)), fm_aggs);

    std::map<std::pair<double, uint64_t>, MlpParams> base_cache;
    const train::TrainFn base_train = [&](double gamma, uint64_t seed) {
      const auto key = std::make_pair(gamma, seed);
      auto it = base_cache.find(key);
      if (it == base_cache.end()) {
        train::PrebuiltBatchSource source(batches);
        train::TrainReport rep =
            pretrain_baseline(source, meta_config(gamma, seed), arch, cfg.baseline_lr);
        if (seed == cfg.seeds.front())
          write_text(out + "/reports/baseline_" + to_string(reg) + "_g" + csv::num(gamma) + "_s" +
                         std::to_string(seed) + ".json",
                     report_to_json(rep, arch).dump(2) + "\n");
        it = base_cache.emplace(key, std::move(rep.params)).first;
      }
      return it->second;
    };
    std::vector<train::SweepRow> base_rows;
    std::vector<train::SweepAggregate> base_aggs;
    for (double lr : cfg.baseline_finetune_lrs) {
      train::SweepSpec spec = fm_spec;
      spec.finetune_lr = lr;
      const train::CaseFn tagged_cases = [&, lr](uint64_t seed) {
        auto cases = case_fn(seed);
        for (auto& c : cases) c.task_id += "|lr=" + csv::num(lr);
        return cases;
      };
      const auto rows = gamma_sweep(spec, base_train, tagged_cases);
      const auto aggs = train::aggregate_rows(rows, lr);
      base_rows.insert(base_rows.end(), rows.begin(), rows.end());
      base_aggs.insert(base_aggs.end(), aggs.begin(), aggs.end());
    }
    csv::write_metrics(out + "/metrics_baseline_" + to_string(reg) + ".csv", base_rows);
    csv::write_aggregate(out + "/aggregate_baseline_" + to_string(reg) + ".csv", base_aggs);
    print_aggregates("baseline " + std::string(to_string(reg)), base_aggs);
  }

  write_text(out + "/manifest.json", to_json(cfg).dump(2) + "\n");
  std::cout << "run directory: " << out << '\n';
  return 0;
}

int cmd_cache_tasks(const RunConfig& cfg, const std::string& out_file) {
  const auto interp = synth::parse_phi_interpretation(cfg.phi_interpretation);
  if (cfg.task_count < 1 || cfg.task_size < 1)
    throw std::invalid_argument("cache-tasks: task_count and task_size must be positive");
  const std::vector<Dataset> tasks =
      synth::cache_tasks(cfg.cache_seed, cfg.task_count, cfg.task_size, interp);
  const std::string path = out_file.empty() ? "tasks.cache" : out_file;
  save_task_cache(path, tasks);
  std::cout << "cached " << tasks.size() << " tasks (" << cfg.task_size << " rows each) to "
            << path << '\n';
  return 0;
}

int cmd_boundary(const std::string& report_path, const std::string& out_csv, double lo, double hi,
                 int resolution) {
  std::ifstream in(report_path);
  if (!in) throw DataError("cannot open report: " + report_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("report " + report_path + " is not valid JSON: " + e.what());
  }
  const MlpParams params = params_from_report(j);
  export_boundary(params, lo, hi, resolution, out_csv);
  std::cout << "wrote " << out_csv << '\n';
  return 0;
}

}  // namespace fairmeta::cli

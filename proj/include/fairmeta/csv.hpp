#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "fairmeta/errors.hpp"
#include "fairmeta/train.hpp"

namespace fairmeta::csv {

// One fixed numeric format everywhere so identical doubles always serialize
// to identical bytes.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Undefined ratios become empty fields, never fake numbers.
inline std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

inline constexpr const char* kMetricsHeader =
    "gamma,seed,task_id,accuracy,dp_ratio,eo_ratio,n_eval,undefined_dp,undefined_eo";
inline constexpr const char* kAggregateHeader =
    "gamma,finetune_lr,n_rows,mean_accuracy,mean_dp_ratio,mean_dp_ratio_sym,mean_eo_ratio,"
    "mean_eo_ratio_sym,undefined_dp,undefined_eo";

inline void write_metrics(const std::string& path, const std::vector<train::SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << kMetricsHeader << '\n';
  for (const train::SweepRow& r : rows) {
    for (char c : r.task_id)
      if (c == ',' || c == '\n') throw std::invalid_argument("task_id not CSV-safe: " + r.task_id);
    out << num(r.gamma) << ',' << r.seed << ',' << r.task_id << ',' << num(r.metrics.accuracy)
        << ',' << opt(r.metrics.dp) << ',' << opt(r.metrics.eo) << ',' << r.metrics.n << ','
        << (r.metrics.dp ? 0 : 1) << ',' << (r.metrics.eo ? 0 : 1) << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

inline void write_aggregate(const std::string& path,
                            const std::vector<train::SweepAggregate>& aggs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << kAggregateHeader << '\n';
  for (const train::SweepAggregate& a : aggs) {
    out << num(a.gamma) << ',' << num(a.finetune_lr) << ',' << a.n_rows << ','
        << num(a.mean_accuracy) << ',' << opt(a.mean_dp) << ',' << opt(a.mean_dp_sym) << ','
        << opt(a.mean_eo) << ',' << opt(a.mean_eo_sym) << ',' << a.undefined_dp << ','
        << a.undefined_eo << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace fairmeta::csv

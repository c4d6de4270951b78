#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fairmeta/dataset.hpp"

namespace fairmeta::cc {

// The UCI file has 128 comma-separated columns: five identifiers (state,
// county, community, communityname, fold), 122 predictive attributes, and
// the ViolentCrimesPerPop target, all normalized into [0, 1]. '?' marks a
// missing value.
inline constexpr int kColumnCount = 128;
const std::vector<std::string>& column_names();

struct CcTable {
  std::vector<int> state;                    // one id per record
  Matrix features;                           // records x kept predictive columns
  Vector target;                             // ViolentCrimesPerPop
  Matrix race_pct;                           // records x 4: black, white, asian, hisp
  std::vector<std::string> feature_names;    // kept predictive columns, file order
  std::vector<std::string> dropped_columns;  // predictive columns with any '?'

  Index size() const { return static_cast<Index>(state.size()); }
};

// Parses the file, drops every predictive column containing a missing value
// (rows are always retained), and keeps identifiers out of the feature set.
// Structural problems (wrong field count, bad numbers, missing target or
// race percentage) raise DataError with the row number.
CcTable load_cc(const std::string& path);

// Sensitive attribute from the four race percentages: a = 1 when the
// African-American percentage ranks first or second (at most one other
// strictly exceeds it; ties count in its favor), a = 0 otherwise. Group 0 is
// the one the regularizers protect.
int sensitive_attribute(double black, double white, double asian, double hisp);

// Median with the even-count average-of-middles convention.
double median(std::vector<double> values);

struct CcTaskSet {
  std::vector<Dataset> train;    // one Dataset per state, tag "state-<id>"
  std::vector<Dataset> holdout;  // exactly holdout_count states
  std::vector<std::string> feature_names;
};

// States with fewer than 20 communities are dropped; within a state y = 1
// iff the community's crime rate strictly exceeds the state median; the
// holdout states are a seeded draw from the survivors.
CcTaskSet build_tasks(const CcTable& table, int holdout_count, uint64_t seed);

// meta_batch distinct states; per state K support rows (D) and K query rows
// (D'), disjoint whenever the state has at least 2K communities. States with
// fewer rows fall back to drawing D' with replacement from the rows left
// over after D.
std::vector<std::pair<Dataset, Dataset>> sample_task_batch(const std::vector<Dataset>& tasks,
                                                           int meta_batch, Index k,
                                                           std::mt19937_64& rng);
std::vector<std::pair<Dataset, Dataset>> sample_task_batch(const std::vector<Dataset>& tasks,
                                                           int meta_batch, Index k, uint64_t seed);

// Disjoint split: exactly finetune_n rows to adapt on, the rest for
// evaluation.
std::pair<Dataset, Dataset> finetune_eval_split(const Dataset& state_data, Index finetune_n,
                                                uint64_t seed);

}  // namespace fairmeta::cc

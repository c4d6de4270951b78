#include "fairmeta/cc_data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

#include "fairmeta/errors.hpp"
#include "fairmeta/sampling.hpp"

namespace fairmeta::cc {

namespace {

// communities.names order; indices 0-4 are identifiers, 127 the target.
constexpr int kStateCol = 0;
constexpr int kFirstPredictive = 5;
constexpr int kTargetCol = 127;
constexpr int kRaceCols[4] = {7, 8, 9, 10};  // black, white, asian, hisp

const char* kNames[kColumnCount] = {
    "state", "county", "community", "communityname", "fold", "population", "householdsize",
    "racepctblack", "racePctWhite", "racePctAsian", "racePctHisp", "agePct12t21", "agePct12t29",
    "agePct16t24", "agePct65up", "numbUrban", "pctUrban", "medIncome", "pctWWage", "pctWFarmSelf",
    "pctWInvInc", "pctWSocSec", "pctWPubAsst", "pctWRetire", "medFamInc", "perCapInc",
    "whitePerCap", "blackPerCap", "indianPerCap", "AsianPerCap", "OtherPerCap", "HispPerCap",
    "NumUnderPov", "PctPopUnderPov", "PctLess9thGrade", "PctNotHSGrad", "PctBSorMore",
    "PctUnemployed", "PctEmploy", "PctEmplManu", "PctEmplProfServ", "PctOccupManu",
    "PctOccupMgmtProf", "MalePctDivorce", "MalePctNevMarr", "FemalePctDiv", "TotalPctDiv",
    "PersPerFam", "PctFam2Par", "PctKids2Par", "PctYoungKids2Par", "PctTeen2Par",
    "PctWorkMomYoungKids", "PctWorkMom", "NumIlleg", "PctIlleg", "NumImmig", "PctImmigRecent",
    "PctImmigRec5", "PctImmigRec8", "PctImmigRec10", "PctRecentImmig", "PctRecImmig5",
    "PctRecImmig8", "PctRecImmig10", "PctSpeakEnglOnly", "PctNotSpeakEnglWell", "PctLargHouseFam",
    "PctLargHouseOccup", "PersPerOccupHous", "PersPerOwnOccHous", "PersPerRentOccHous",
    "PctPersOwnOccup", "PctPersDenseHous", "PctHousLess3BR", "MedNumBR", "HousVacant",
    "PctHousOccup", "PctHousOwnOcc", "PctVacantBoarded", "PctVacMore6Mos", "MedYrHousBuilt",
    "PctHousNoPhone", "PctWOFullPlumb", "OwnOccLowQuart", "OwnOccMedVal", "OwnOccHiQuart",
    "RentLowQ", "RentMedian", "RentHighQ", "MedRent", "MedRentPctHousInc", "MedOwnCostPctInc",
    "MedOwnCostPctIncNoMtg", "NumInShelters", "NumStreet", "PctForeignBorn", "PctBornSameState",
    "PctSameHouse85", "PctSameCity85", "PctSameState85", "LemasSwornFT", "LemasSwFTPerPop",
    "LemasSwFTFieldOps", "LemasSwFTFieldPerPop", "LemasTotalReq", "LemasTotReqPerPop",
    "PolicReqPerOffic", "PolicPerPop", "RacialMatchCommPol", "PctPolicWhite", "PctPolicBlack",
    "PctPolicHisp", "PctPolicAsian", "PctPolicMinor", "OfficAssgnDrugUnits", "NumKindsDrugsSeiz",
    "PolicAveOTWorked", "LandArea", "PopDens", "PctUsePubTrans", "PolicCars", "PolicOperBudg",
    "LemasPctPolicOnPatr", "LemasGangUnitDeploy", "LemasPctOfficDrugUn", "PolicBudgPerPop",
    "ViolentCrimesPerPop"};

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

[[noreturn]] void row_error(const std::string& path, int row, const std::string& msg) {
  throw DataError(path + ": row " + std::to_string(row) + ": " + msg);
}

double parse_unit(const std::string& field, const std::string& path, int row, const char* col) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    row_error(path, row, std::string("bad numeric value '") + field + "' in column " + col);
  if (v < 0.0 || v > 1.0)
    row_error(path, row, std::string("value out of [0,1] in column ") + col);
  return v;
}

}  // namespace

const std::vector<std::string>& column_names() {
  static const std::vector<std::string> names(kNames, kNames + kColumnCount);
  return names;
}

CcTable load_cc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path);

  std::vector<std::vector<std::string>> rows;
  std::string line;
  int row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != kColumnCount)
      row_error(path, row_no, "expected " + std::to_string(kColumnCount) + " fields, got " +
                                  std::to_string(fields.size()));
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw DataError(path + ": no records");

  // A predictive column with any missing value is dropped outright; rows
  // always survive.
  std::vector<bool> has_missing(kColumnCount, false);
  for (const auto& fields : rows)
    for (int j = kFirstPredictive; j < kTargetCol; ++j)
      if (fields[j] == "?") has_missing[j] = true;
  for (int rc : kRaceCols)
    if (has_missing[rc])
      throw DataError(path + ": race percentage column " + kNames[rc] +
                      " has missing values; sensitive attribute underivable");

  CcTable t;
  std::vector<int> kept;
  for (int j = kFirstPredictive; j < kTargetCol; ++j) {
    if (has_missing[j])
      t.dropped_columns.push_back(kNames[j]);
    else {
      kept.push_back(j);
      t.feature_names.push_back(kNames[j]);
    }
  }

  const Index n = static_cast<Index>(rows.size());
  t.state.resize(n);
  t.features.resize(n, static_cast<Index>(kept.size()));
  t.target.resize(n);
  t.race_pct.resize(n, 4);
  for (Index i = 0; i < n; ++i) {
    const auto& fields = rows[i];
    const int row = static_cast<int>(i) + 1;
    const std::string& sf = fields[kStateCol];
    int state = 0;
    const auto [ptr, ec] = std::from_chars(sf.data(), sf.data() + sf.size(), state);
    if (ec != std::errc() || ptr != sf.data() + sf.size() || state < 0)
      row_error(path, row, "bad state id '" + sf + "'");
    t.state[i] = state;
    if (fields[kTargetCol] == "?") row_error(path, row, "missing target value");
    t.target[i] = parse_unit(fields[kTargetCol], path, row, kNames[kTargetCol]);
    for (int r = 0; r < 4; ++r)
      t.race_pct(i, r) = parse_unit(fields[kRaceCols[r]], path, row, kNames[kRaceCols[r]]);
    for (size_t c = 0; c < kept.size(); ++c)
      t.features(i, static_cast<Index>(c)) = parse_unit(fields[kept[c]], path, row, kNames[kept[c]]);
  }
  return t;
}

int sensitive_attribute(double black, double white, double asian, double hisp) {
  int above = 0;
  for (double other : {white, asian, hisp})
    if (other > black) ++above;
  return above <= 1 ? 1 : 0;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

Dataset state_dataset(const CcTable& t, int state_id, const std::vector<Index>& rows) {
  Dataset d;
  d.tag = "state-" + std::to_string(state_id);
  d.X.resize(static_cast<Index>(rows.size()), t.features.cols());
  d.Y.resize(static_cast<Index>(rows.size()));
  d.A.resize(static_cast<Index>(rows.size()));
  std::vector<double> crime;
  crime.reserve(rows.size());
  for (Index i : rows) crime.push_back(t.target[i]);
  const double med = median(crime);
  for (size_t k = 0; k < rows.size(); ++k) {
    const Index i = rows[k];
    d.X.row(static_cast<Index>(k)) = t.features.row(i);
    d.Y[static_cast<Index>(k)] = t.target[i] > med ? 1 : 0;
    d.A[static_cast<Index>(k)] =
        sensitive_attribute(t.race_pct(i, 0), t.race_pct(i, 1), t.race_pct(i, 2), t.race_pct(i, 3));
  }
  validate(d);
  return d;
}

}  // namespace

CcTaskSet build_tasks(const CcTable& table, int holdout_count, uint64_t seed) {
  if (holdout_count < 1) throw std::invalid_argument("build_tasks: holdout_count must be positive");
  std::map<int, std::vector<Index>> by_state;
  for (Index i = 0; i < table.size(); ++i) by_state[table.state[i]].push_back(i);

  std::vector<int> surviving;
  for (const auto& [id, rows] : by_state)
    if (rows.size() >= 20) surviving.push_back(id);
  if (surviving.size() < static_cast<size_t>(holdout_count) + 1)
    throw DataError("build_tasks: only " + std::to_string(surviving.size()) +
                    " states with 20+ communities, need more than " +
                    std::to_string(holdout_count));

  std::mt19937_64 rng(seed);
  const std::vector<size_t> pick =
      draw_without_replacement(surviving.size(), holdout_count, rng);
  std::vector<bool> is_holdout(surviving.size(), false);
  for (size_t p : pick) is_holdout[p] = true;

  CcTaskSet ts;
  ts.feature_names = table.feature_names;
  for (size_t s = 0; s < surviving.size(); ++s) {
    Dataset d = state_dataset(table, surviving[s], by_state[surviving[s]]);
    (is_holdout[s] ? ts.holdout : ts.train).push_back(std::move(d));
  }
  return ts;
}

std::vector<std::pair<Dataset, Dataset>> sample_task_batch(const std::vector<Dataset>& tasks,
                                                           int meta_batch, Index k,
                                                           std::mt19937_64& rng) {
  if (meta_batch < 1 || k < 1) throw std::invalid_argument("sample_task_batch: bad shape");
  if (tasks.size() < static_cast<size_t>(meta_batch))
    throw std::invalid_argument("sample_task_batch: fewer tasks than meta_batch");
  const std::vector<size_t> chosen =
      draw_without_replacement(tasks.size(), meta_batch, rng);

  std::vector<std::pair<Dataset, Dataset>> batch;
  batch.reserve(meta_batch);
  for (size_t c : chosen) {
    const Dataset& full = tasks[c];
    const size_t n = static_cast<size_t>(full.size());
    std::vector<Index> support, query;
    if (n >= 2 * static_cast<size_t>(k)) {
      const std::vector<size_t> rows = draw_without_replacement(n, 2 * k, rng);
      for (Index i = 0; i < k; ++i) support.push_back(static_cast<Index>(rows[i]));
      for (Index i = k; i < 2 * k; ++i) query.push_back(static_cast<Index>(rows[i]));
    } else if (n >= static_cast<size_t>(k)) {
      // Too small for disjoint halves: query rows come with replacement from
      // whatever the support draw left over.
      const std::vector<size_t> rows = draw_without_replacement(n, n, rng);
      for (Index i = 0; i < k; ++i) support.push_back(static_cast<Index>(rows[i]));
      const size_t pool = n - static_cast<size_t>(k);
      for (Index i = 0; i < k; ++i) {
        const size_t at = pool > 0
                              ? k + std::uniform_int_distribution<size_t>(0, pool - 1)(rng)
                              : std::uniform_int_distribution<size_t>(0, n - 1)(rng);
        query.push_back(static_cast<Index>(rows[at]));
      }
    } else {
      for (Index i = 0; i < 2 * k; ++i) {
        const size_t at = std::uniform_int_distribution<size_t>(0, n - 1)(rng);
        (i < k ? support : query).push_back(static_cast<Index>(at));
      }
    }
    std::sort(support.begin(), support.end());
    std::sort(query.begin(), query.end());
    batch.emplace_back(subset(full, support), subset(full, query));
  }
  return batch;
}

std::vector<std::pair<Dataset, Dataset>> sample_task_batch(const std::vector<Dataset>& tasks,
                                                           int meta_batch, Index k,
                                                           uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_task_batch(tasks, meta_batch, k, rng);
}

std::pair<Dataset, Dataset> finetune_eval_split(const Dataset& state_data, Index finetune_n,
                                                uint64_t seed) {
  if (finetune_n < 1) throw std::invalid_argument("finetune_eval_split: finetune_n must be positive");
  if (state_data.size() <= finetune_n)
    throw DataError("finetune_eval_split: " + state_data.tag + " has " +
                    std::to_string(state_data.size()) + " rows, need more than " +
                    std::to_string(finetune_n));
  std::mt19937_64 rng(seed);
  const std::vector<size_t> pick =
      draw_without_replacement(static_cast<size_t>(state_data.size()),
                               static_cast<size_t>(finetune_n), rng);
  std::vector<bool> in_fine(static_cast<size_t>(state_data.size()), false);
  for (size_t p : pick) in_fine[p] = true;
  std::vector<Index> fine, eval;
  for (Index i = 0; i < state_data.size(); ++i)
    (in_fine[static_cast<size_t>(i)] ? fine : eval).push_back(i);
  Dataset f = subset(state_data, fine);
  Dataset e = subset(state_data, eval);
  f.tag = state_data.tag + "-finetune";
  e.tag = state_data.tag + "-eval";
  return {std::move(f), std::move(e)};
}

}  // namespace fairmeta::cc

#pragma once

// Deterministic stand-in for the communities file, shaped like the real
// thing: 1994 records, 128 columns, 46 states of which exactly 30 have at
// least 20 communities, the police/LEMAS block plus OtherPerCap carrying '?'
// so 99 predictive columns survive the drop rule, and race composition that
// correlates with the crime target so the fairness sweep has signal.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairmeta/cc_data.hpp"

namespace fixture {

inline const std::vector<std::string>& missing_columns() {
  static const std::vector<std::string> cols = {
      "LemasSwornFT",       "LemasSwFTPerPop",  "LemasSwFTFieldOps", "LemasSwFTFieldPerPop",
      "LemasTotalReq",      "LemasTotReqPerPop", "PolicReqPerOffic", "PolicPerPop",
      "RacialMatchCommPol", "PctPolicWhite",    "PctPolicBlack",     "PctPolicHisp",
      "PctPolicAsian",      "PctPolicMinor",    "OfficAssgnDrugUnits", "NumKindsDrugsSeiz",
      "PolicAveOTWorked",   "PolicCars",        "PolicOperBudg",     "LemasPctPolicOnPatr",
      "LemasGangUnitDeploy", "PolicBudgPerPop",  "OtherPerCap"};
  return cols;
}

// 30 sizes >= 20 plus 16 sizes < 20, totalling 1994 records.
inline std::vector<int> state_sizes() {
  std::vector<int> sizes;
  for (int i = 0; i < 28; ++i) sizes.push_back(20 + 2 * i);
  sizes.push_back(248);
  sizes.push_back(278);
  const int small[] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 16, 18, 19, 18};
  sizes.insert(sizes.end(), std::begin(small), std::end(small));
  return sizes;
}

inline std::string unit(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", std::clamp(v, 0.0, 1.0));
  return buf;
}

inline void write_cc_fixture(const std::string& path) {
  const auto& names = fairmeta::cc::column_names();
  std::vector<bool> always_missing(names.size(), false);
  int other_per_cap = -1;
  for (const auto& col : missing_columns()) {
    const auto it = std::find(names.begin(), names.end(), col);
    if (it == names.end()) throw std::logic_error("fixture column not in schema: " + col);
    const auto idx = static_cast<int>(it - names.begin());
    if (col == "OtherPerCap")
      other_per_cap = idx;  // missing in one row only
    else
      always_missing[static_cast<size_t>(idx)] = true;
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write fixture: " + path);

  std::mt19937_64 rng(20240916);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.12);

  const std::vector<int> sizes = state_sizes();
  int record = 0;
  for (size_t s = 0; s < sizes.size(); ++s) {
    const int state_id = static_cast<int>(s) + 1;
    for (int c = 0; c < sizes[s]; ++c, ++record) {
      const double crime_propensity = u01(rng);
      // Race mix: high-propensity communities skew toward a large black
      // percentage, which is what makes the sensitive attribute informative.
      const bool black_heavy = u01(rng) < 0.25 + 0.5 * crime_propensity;
      const double black = black_heavy ? 0.60 + 0.30 * u01(rng) : 0.05 + 0.10 * u01(rng);
      const double white = std::clamp(0.95 - black + 0.05 * u01(rng), 0.0, 1.0);
      const double asian = 0.30 * u01(rng);
      const double hisp = 0.30 * u01(rng);
      const double target =
          std::clamp(0.55 * crime_propensity + 0.25 * black + noise(rng), 0.0, 1.0);

      std::vector<std::string> fields(static_cast<size_t>(fairmeta::cc::kColumnCount));
      fields[0] = std::to_string(state_id);
      fields[1] = u01(rng) < 0.6 ? "?" : std::to_string(1 + record % 97);
      fields[2] = u01(rng) < 0.6 ? "?" : std::to_string(10000 + record);
      fields[3] = "Fixturetown" + std::to_string(record);
      fields[4] = std::to_string(1 + record % 10);
      for (int col = 5; col < fairmeta::cc::kColumnCount - 1; ++col) {
        const auto idx = static_cast<size_t>(col);
        if (always_missing[idx]) {
          fields[idx] = "?";
        } else if (col == 7) {
          fields[idx] = unit(black);
        } else if (col == 8) {
          fields[idx] = unit(white);
        } else if (col == 9) {
          fields[idx] = unit(asian);
        } else if (col == 10) {
          fields[idx] = unit(hisp);
        } else if (col % 6 == 5) {
          // every sixth column tracks the crime propensity, so the features
          // carry real signal about the label
          fields[idx] = unit(crime_propensity + noise(rng));
        } else {
          fields[idx] = unit(u01(rng));
        }
      }
      if (record == 130) fields[static_cast<size_t>(other_per_cap)] = "?";
      fields[static_cast<size_t>(fairmeta::cc::kColumnCount) - 1] = unit(target);

      for (size_t f = 0; f < fields.size(); ++f) {
        if (f) out << ',';
        out << fields[f];
      }
      out << '\n';
    }
  }
  if (record != 1994) throw std::logic_error("fixture row count drifted");
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Acceptance and tests prefer the real file when one is available.
inline std::string resolve_cc_data(std::string* source_note = nullptr) {
  if (const char* env = std::getenv("FAIRMETA_CC_DATA"); env && *env) {
    if (source_note) *source_note = std::string("env FAIRMETA_CC_DATA: ") + env;
    return env;
  }
  if (std::ifstream probe("data/communities.data"); probe.good()) {
    if (source_note) *source_note = "data/communities.data";
    return "data/communities.data";
  }
  const std::string path = "cc_fixture.data";
  write_cc_fixture(path);
  if (source_note) *source_note = "generated fixture " + path;
  return path;
}

}  // namespace fixture

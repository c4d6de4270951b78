#pragma once

#include <optional>
#include <vector>

#include "fairmeta/dataset.hpp"
#include "fairmeta/mlp.hpp"

namespace fairmeta {

// Rows the regularizer penalizes: the protected group for demographic
// parity, its positively-labeled part for equal opportunity.
inline std::vector<Index> penalized_rows(const Dataset& d, Regularizer reg) {
  std::vector<Index> rows;
  for (Index i = 0; i < d.size(); ++i) {
    if (d.A[i] != 0) continue;
    if (reg == Regularizer::Eop && d.Y[i] != 1) continue;
    rows.push_back(i);
  }
  return rows;
}

// R_dp = 1 - mean_{a=0} P(f(x) = 1), R_eop the same over a=0, y=1 rows.
// Both live in [0, 1]. An empty penalized set contributes no penalty.
template <typename S>
S regularizer_value(const MlpParamsT<S>& p, const Dataset& d, Regularizer reg) {
  const std::vector<Index> rows = penalized_rows(d, reg);
  if (rows.empty()) return S(0.0);
  const MatX<S> probs = forward_batch<S>(p, d.X);
  S acc(0.0);
  for (Index i : rows) acc += probs(i, 1);
  return S(1.0) - acc / S(static_cast<double>(rows.size()));
}

template <typename S>
S reg_dp(const MlpParamsT<S>& p, const Dataset& d) {
  return regularizer_value<S>(p, d, Regularizer::Dp);
}

template <typename S>
S reg_eop(const MlpParamsT<S>& p, const Dataset& d) {
  return regularizer_value<S>(p, d, Regularizer::Eop);
}

// Threshold at 0.5; a tie predicts 1.
inline IntVector predict_labels(const MlpParams& p, const Matrix& X) {
  const Matrix probs = forward_batch<double>(p, X);
  IntVector yhat(probs.rows());
  for (Index i = 0; i < probs.rows(); ++i) yhat[i] = probs(i, 1) >= 0.5 ? 1 : 0;
  return yhat;
}

// P(yhat = 1 | A = 0) / P(yhat = 1 | A = 1), unclipped. Undefined (nullopt)
// when either group is absent or the denominator rate is zero.
inline std::optional<double> dp_ratio(const IntVector& yhat, const IntVector& A) {
  Index n0 = 0, n1 = 0, pos0 = 0, pos1 = 0;
  for (Index i = 0; i < A.size(); ++i) {
    if (A[i] == 0) {
      ++n0;
      pos0 += yhat[i];
    } else {
      ++n1;
      pos1 += yhat[i];
    }
  }
  if (n0 == 0 || n1 == 0 || pos1 == 0) return std::nullopt;
  const double r0 = static_cast<double>(pos0) / static_cast<double>(n0);
  const double r1 = static_cast<double>(pos1) / static_cast<double>(n1);
  return r0 / r1;
}

// TPR(A = 0) / TPR(A = 1): the dp ratio restricted to y = 1 rows. Undefined
// when either group has no positives or the denominator TPR is zero.
inline std::optional<double> eo_ratio(const IntVector& yhat, const IntVector& Y,
                                      const IntVector& A) {
  std::vector<Index> pos;
  for (Index i = 0; i < Y.size(); ++i)
    if (Y[i] == 1) pos.push_back(i);
  IntVector yh(static_cast<Index>(pos.size())), a(static_cast<Index>(pos.size()));
  for (size_t k = 0; k < pos.size(); ++k) {
    yh[static_cast<Index>(k)] = yhat[pos[k]];
    a[static_cast<Index>(k)] = A[pos[k]];
  }
  return dp_ratio(yh, a);
}

// Ratio folded into (0, 1]: min(r, 1/r). 1 is parity.
inline std::optional<double> symmetrized(std::optional<double> r) {
  if (!r) return std::nullopt;
  return *r <= 1.0 ? *r : 1.0 / *r;
}

struct EvalMetrics {
  double accuracy = 0.0;
  std::optional<double> dp;
  std::optional<double> eo;
  Index n = 0;
  Index n_protected = 0;
  Index n_protected_positive = 0;
};

inline EvalMetrics evaluate(const MlpParams& p, const Dataset& d) {
  EvalMetrics m;
  m.n = d.size();
  const IntVector yhat = predict_labels(p, d.X);
  Index correct = 0;
  for (Index i = 0; i < d.size(); ++i) {
    if (yhat[i] == d.Y[i]) ++correct;
    if (d.A[i] == 0) {
      ++m.n_protected;
      if (d.Y[i] == 1) ++m.n_protected_positive;
    }
  }
  m.accuracy = d.size() > 0 ? static_cast<double>(correct) / static_cast<double>(d.size()) : 0.0;
  m.dp = dp_ratio(yhat, d.A);
  m.eo = eo_ratio(yhat, d.Y, d.A);
  return m;
}

}  // namespace fairmeta

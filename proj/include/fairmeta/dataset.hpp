#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "fairmeta/errors.hpp"

namespace fairmeta {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;
using Index = Eigen::Index;

enum class Regularizer { Dp, Eop };
enum class Loss { CrossEntropy };

inline const char* to_string(Regularizer r) { return r == Regularizer::Dp ? "dp" : "eop"; }

// D = (X, Y, A). Rows of X are examples. Y in {0,1}, 1 the positive outcome;
// A in {0,1}, 0 the protected group.
struct Dataset {
  Matrix X;         // n x d
  IntVector Y;      // n
  IntVector A;      // n
  std::string tag;  // optional task/state tag

  Index size() const { return X.rows(); }
  Index dim() const { return X.cols(); }
};

// A task bundles the data with its loss, regularizer, and fairness weight.
struct Task {
  Dataset data;
  Loss loss = Loss::CrossEntropy;
  Regularizer reg = Regularizer::Dp;
  double gamma = 0.0;
};

inline void validate(const Dataset& d) {
  const Index n = d.X.rows();
  if (n < 1) throw std::invalid_argument("dataset: needs at least one row");
  if (d.Y.size() != n || d.A.size() != n)
    throw std::invalid_argument("dataset: X, Y, A must share length");
  for (Index i = 0; i < n; ++i) {
    if (d.Y[i] != 0 && d.Y[i] != 1)
      throw std::invalid_argument("dataset: Y entries must be 0 or 1");
    if (d.A[i] != 0 && d.A[i] != 1)
      throw std::invalid_argument("dataset: A entries must be 0 or 1");
  }
  if (!d.X.allFinite()) throw std::invalid_argument("dataset: features must be finite");
}

inline Dataset subset(const Dataset& d, const std::vector<Index>& rows) {
  Dataset out;
  out.X.resize(static_cast<Index>(rows.size()), d.X.cols());
  out.Y.resize(static_cast<Index>(rows.size()));
  out.A.resize(static_cast<Index>(rows.size()));
  for (Index i = 0; i < static_cast<Index>(rows.size()); ++i) {
    out.X.row(i) = d.X.row(rows[static_cast<size_t>(i)]);
    out.Y[i] = d.Y[rows[static_cast<size_t>(i)]];
    out.A[i] = d.A[rows[static_cast<size_t>(i)]];
  }
  out.tag = d.tag;
  return out;
}

}  // namespace fairmeta

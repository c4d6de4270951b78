#pragma once

// Reference implementations the tests trust instead of the library: plain
// scalar loops, no Eigen expressions, no code shared with the paths under
// test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fairmeta/dataset.hpp"
#include "fairmeta/mlp.hpp"

namespace oracle {

using fairmeta::Dataset;
using fairmeta::Index;
using fairmeta::MlpParams;
using fairmeta::Vector;

// Forward pass, one input column: affine, ReLU between layers, softmax with
// max shift at the end.
inline std::vector<double> naive_forward(const MlpParams& p, std::vector<double> x) {
  for (size_t l = 0; l < p.layers.size(); ++l) {
    const auto& W = p.layers[l].W;
    const auto& b = p.layers[l].b;
    std::vector<double> z(static_cast<size_t>(W.rows()), 0.0);
    for (Index r = 0; r < W.rows(); ++r) {
      double acc = b[r];
      for (Index c = 0; c < W.cols(); ++c) acc += W(r, c) * x[static_cast<size_t>(c)];
      z[static_cast<size_t>(r)] = acc;
    }
    if (l + 1 < p.layers.size()) {
      for (double& v : z) v = v > 0.0 ? v : 0.0;
    } else {
      double mx = z[0];
      for (double v : z) mx = std::max(mx, v);
      double sum = 0.0;
      for (double& v : z) {
        v = std::exp(v - mx);
        sum += v;
      }
      for (double& v : z) v /= sum;
    }
    x.assign(z.begin(), z.end());
  }
  return x;
}

using ScalarFn = std::function<double(const Vector&)>;

inline double central_diff(const ScalarFn& f, Vector x, Index i, double h) {
  const double orig = x[i];
  x[i] = orig + h;
  const double fp = f(x);
  x[i] = orig - h;
  const double fm = f(x);
  return (fp - fm) / (2.0 * h);
}

struct GradCheck {
  bool pass = true;
  double worst_rel = 0.0;
  Index worst = -1;
};

// Per coordinate: accept when |fd - g| <= abs_floor, else require relative
// error < rel_tol against max(|fd|, |g|).
inline GradCheck check_gradient(const ScalarFn& f, const Vector& x, const Vector& grad,
                                double rel_tol, double abs_floor = 1e-8, double h = 1e-5) {
  GradCheck out;
  for (Index i = 0; i < x.size(); ++i) {
    const double fd = central_diff(f, x, i, h);
    const double diff = std::abs(fd - grad[i]);
    if (diff <= abs_floor) continue;
    const double rel = diff / std::max(std::abs(fd), std::abs(grad[i]));
    if (rel > out.worst_rel) {
      out.worst_rel = rel;
      out.worst = i;
    }
    if (!(rel < rel_tol)) out.pass = false;
  }
  return out;
}

// Bias-corrected Adam on scalar loops; returns every iterate including the
// start point.
inline std::vector<Vector> reference_adam(const std::function<Vector(const Vector&)>& grad,
                                          Vector x, int steps, double lr, double beta1 = 0.9,
                                          double beta2 = 0.999, double eps = 1e-8) {
  std::vector<double> m(static_cast<size_t>(x.size()), 0.0);
  std::vector<double> v(static_cast<size_t>(x.size()), 0.0);
  std::vector<Vector> iterates{x};
  for (int t = 1; t <= steps; ++t) {
    const Vector g = grad(x);
    for (Index i = 0; i < x.size(); ++i) {
      const auto s = static_cast<size_t>(i);
      m[s] = beta1 * m[s] + (1.0 - beta1) * g[i];
      v[s] = beta2 * v[s] + (1.0 - beta2) * g[i] * g[i];
      const double mhat = m[s] / (1.0 - std::pow(beta1, t));
      const double vhat = v[s] / (1.0 - std::pow(beta2, t));
      x[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
    iterates.push_back(x);
  }
  return iterates;
}

// Random problem instances for property tests.
inline MlpParams random_params(const fairmeta::Arch& arch, std::mt19937_64& rng,
                               double scale = 0.5) {
  std::normal_distribution<double> gauss(0.0, scale);
  MlpParams p;
  for (size_t l = 0; l + 1 < arch.size(); ++l) {
    fairmeta::MlpParamsT<double>::Layer layer;
    layer.W = fairmeta::Matrix(arch[l + 1], arch[l]);
    layer.b = Vector(arch[l + 1]);
    for (Index r = 0; r < layer.W.rows(); ++r)
      for (Index c = 0; c < layer.W.cols(); ++c) layer.W(r, c) = gauss(rng);
    for (Index r = 0; r < layer.b.size(); ++r) layer.b[r] = gauss(rng);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

inline Dataset random_dataset(Index n, Index d, std::mt19937_64& rng, const char* tag = "random") {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  Dataset data;
  data.X = fairmeta::Matrix(n, d);
  data.Y = fairmeta::IntVector(n);
  data.A = fairmeta::IntVector(n);
  data.tag = tag;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) data.X(i, j) = gauss(rng);
    data.Y[i] = coin(rng);
    data.A[i] = coin(rng);
  }
  return data;
}

// Guarantees every (y, a) cell is populated, for tests that need defined
// ratios.
inline Dataset random_dataset_all_cells(Index n, Index d, std::mt19937_64& rng,
                                        const char* tag = "random") {
  Dataset data = random_dataset(n, d, rng, tag);
  if (n < 4) return data;
  data.Y[0] = 0; data.A[0] = 0;
  data.Y[1] = 0; data.A[1] = 1;
  data.Y[2] = 1; data.A[2] = 0;
  data.Y[3] = 1; data.A[3] = 1;
  return data;
}

}  // namespace oracle

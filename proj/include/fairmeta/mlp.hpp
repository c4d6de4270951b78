#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "fairmeta/dataset.hpp"
#include "fairmeta/dual.hpp"

namespace fairmeta {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// Dense feed-forward classifier: ReLU on hidden layers, softmax over the
// two output units. Templated on scalar so the same forward/backward code
// runs on double (values, gradients) and Dual (Hessian-vector products).
//
// Flat parameter layout, used by every gradient in the codebase: layers in
// order, and within a layer the weight matrix in row-major order followed by
// the bias vector. This order is stable.
template <typename S>
struct MlpParamsT {
  struct Layer {
    MatX<S> W;  // out x in
    VecX<S> b;  // out
  };
  std::vector<Layer> layers;

  Index input_dim() const { return layers.front().W.cols(); }
  Index output_dim() const { return layers.back().W.rows(); }
};

using MlpParams = MlpParamsT<double>;

// Architecture as a dimension chain, e.g. {2, 20, 20, 2}.
using Arch = std::vector<Index>;

template <typename S>
Arch arch_of(const MlpParamsT<S>& p) {
  Arch a;
  a.push_back(p.layers.front().W.cols());
  for (const auto& l : p.layers) a.push_back(l.W.rows());
  return a;
}

inline Index param_count(const Arch& arch) {
  Index n = 0;
  for (size_t l = 1; l < arch.size(); ++l) n += arch[l] * arch[l - 1] + arch[l];
  return n;
}

template <typename S>
Index param_count(const MlpParamsT<S>& p) {
  return param_count(arch_of(p));
}

template <typename S>
void validate(const MlpParamsT<S>& p) {
  using std::isfinite;
  if (p.layers.empty()) throw std::invalid_argument("mlp: no layers");
  for (size_t l = 0; l < p.layers.size(); ++l) {
    const auto& layer = p.layers[l];
    if (layer.b.size() != layer.W.rows())
      throw std::invalid_argument("mlp: bias length must match weight rows");
    if (l > 0 && layer.W.cols() != p.layers[l - 1].W.rows())
      throw std::invalid_argument("mlp: adjacent layer dimensions must chain");
    for (Index r = 0; r < layer.W.rows(); ++r)
      for (Index c = 0; c < layer.W.cols(); ++c)
        if (!isfinite(layer.W(r, c))) throw std::invalid_argument("mlp: non-finite weight");
    for (Index r = 0; r < layer.b.size(); ++r)
      if (!isfinite(layer.b[r])) throw std::invalid_argument("mlp: non-finite bias");
  }
  if (p.layers.back().W.rows() != 2)
    throw std::invalid_argument("mlp: output layer must have exactly 2 units");
}

// Weights uniform in [-l, l] with l = sqrt(6 / (fan_in + fan_out)); biases zero.
// Fill order: layers in order, weights row-major, so a given rng state maps to
// one parameter set.
inline MlpParams make_mlp(const Arch& arch, std::mt19937_64& rng) {
  MlpParams p;
  for (size_t l = 1; l < arch.size(); ++l) {
    const Index in = arch[l - 1], out = arch[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> u(-limit, limit);
    typename MlpParams::Layer layer;
    layer.W.resize(out, in);
    for (Index r = 0; r < out; ++r)
      for (Index c = 0; c < in; ++c) layer.W(r, c) = u(rng);
    layer.b = Vector::Zero(out);
    p.layers.push_back(std::move(layer));
  }
  validate(p);
  return p;
}

inline MlpParams make_mlp(const Arch& arch, uint64_t seed) {
  std::mt19937_64 rng(seed);
  return make_mlp(arch, rng);
}

template <typename S>
VecX<S> flatten(const MlpParamsT<S>& p) {
  VecX<S> flat(param_count(p));
  Index k = 0;
  for (const auto& layer : p.layers) {
    for (Index r = 0; r < layer.W.rows(); ++r)
      for (Index c = 0; c < layer.W.cols(); ++c) flat[k++] = layer.W(r, c);
    for (Index r = 0; r < layer.b.size(); ++r) flat[k++] = layer.b[r];
  }
  return flat;
}

template <typename S>
MlpParamsT<S> unflatten(const Arch& arch, const VecX<S>& flat) {
  if (flat.size() != param_count(arch))
    throw std::invalid_argument("unflatten: flat length does not match architecture");
  MlpParamsT<S> p;
  Index k = 0;
  for (size_t l = 1; l < arch.size(); ++l) {
    typename MlpParamsT<S>::Layer layer;
    layer.W.resize(arch[l], arch[l - 1]);
    layer.b.resize(arch[l]);
    for (Index r = 0; r < layer.W.rows(); ++r)
      for (Index c = 0; c < layer.W.cols(); ++c) layer.W(r, c) = flat[k++];
    for (Index r = 0; r < layer.b.size(); ++r) layer.b[r] = flat[k++];
    p.layers.push_back(std::move(layer));
  }
  return p;
}

// Dual parameters with value part `p` and tangent part `direction` (flat layout).
inline MlpParamsT<Dual> seed_tangent(const MlpParams& p, const Vector& direction) {
  if (direction.size() != param_count(p))
    throw std::invalid_argument("seed_tangent: direction length mismatch");
  MlpParamsT<Dual> out;
  Index k = 0;
  for (const auto& layer : p.layers) {
    typename MlpParamsT<Dual>::Layer dl;
    dl.W.resize(layer.W.rows(), layer.W.cols());
    dl.b.resize(layer.b.size());
    for (Index r = 0; r < layer.W.rows(); ++r)
      for (Index c = 0; c < layer.W.cols(); ++c) dl.W(r, c) = Dual(layer.W(r, c), direction[k++]);
    for (Index r = 0; r < layer.b.size(); ++r) dl.b[r] = Dual(layer.b[r], direction[k++]);
    out.layers.push_back(std::move(dl));
  }
  return out;
}

template <typename S>
MatX<S> relu(const MatX<S>& z) {
  MatX<S> a(z.rows(), z.cols());
  for (Index c = 0; c < z.cols(); ++c)
    for (Index r = 0; r < z.rows(); ++r) a(r, c) = value(z(r, c)) > 0.0 ? z(r, c) : S(0.0);
  return a;
}

// Columnwise softmax, shifted by the column max.
template <typename S>
MatX<S> softmax_columns(const MatX<S>& z) {
  using std::exp;
  MatX<S> p(z.rows(), z.cols());
  for (Index c = 0; c < z.cols(); ++c) {
    S m = z(0, c);
    for (Index r = 1; r < z.rows(); ++r)
      if (z(r, c) > m) m = z(r, c);
    S sum(0.0);
    for (Index r = 0; r < z.rows(); ++r) {
      p(r, c) = exp(z(r, c) - m);
      sum += p(r, c);
    }
    for (Index r = 0; r < z.rows(); ++r) p(r, c) /= sum;
  }
  return p;
}

// Activations and pre-activations kept for the backward pass.
// act[0] is the input (one column per example); z[l] and act[l+1] belong to
// layer l; probs is the softmax of the last z.
template <typename S>
struct ForwardTrace {
  std::vector<MatX<S>> act;
  std::vector<MatX<S>> z;
  MatX<S> probs;  // 2 x n
};

template <typename S>
ForwardTrace<S> forward_trace(const MlpParamsT<S>& p, const MatX<S>& x_cols) {
  if (x_cols.rows() != p.input_dim())
    throw std::invalid_argument("forward: input dimension mismatch");
  ForwardTrace<S> tr;
  tr.act.push_back(x_cols);
  const size_t L = p.layers.size();
  for (size_t l = 0; l < L; ++l) {
    MatX<S> z = p.layers[l].W * tr.act.back();
    z.colwise() += p.layers[l].b;
    tr.z.push_back(z);
    if (l + 1 < L) tr.act.push_back(relu(z));
  }
  tr.probs = softmax_columns(tr.z.back());
  return tr;
}

template <typename S>
MatX<S> promote_columns(const Matrix& x_rows) {
  MatX<S> out(x_rows.cols(), x_rows.rows());
  for (Index i = 0; i < x_rows.rows(); ++i)
    for (Index j = 0; j < x_rows.cols(); ++j) out(j, i) = S(x_rows(i, j));
  return out;
}

// Class probabilities for one example; probs[1] is P(f(x) = 1).
template <typename S>
VecX<S> forward(const MlpParamsT<S>& p, const VecX<S>& x) {
  return forward_trace<S>(p, x).probs.col(0);
}

inline Vector forward(const MlpParams& p, const Vector& x) {
  return forward_trace<double>(p, x).probs.col(0);
}

// Probabilities for every row of X; result is n x 2.
template <typename S>
MatX<S> forward_batch(const MlpParamsT<S>& p, const Matrix& X) {
  return forward_trace<S>(p, promote_columns<S>(X)).probs.transpose();
}

}  // namespace fairmeta

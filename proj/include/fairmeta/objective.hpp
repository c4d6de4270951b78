#pragma once

#include <functional>
#include <vector>

#include "fairmeta/dataset.hpp"
#include "fairmeta/fairness.hpp"
#include "fairmeta/mlp.hpp"

namespace fairmeta {

// Probabilities are clamped into [kCeClamp, 1 - kCeClamp] before the log.
// A clamped example contributes a constant, so its gradient is zero; the
// gradient gate below must agree with this clamp exactly.
inline constexpr double kCeClamp = 1e-12;

template <typename S>
S cross_entropy(const MlpParamsT<S>& p, const Dataset& d) {
  using std::log;
  if (d.size() == 0) return S(0.0);
  const MatX<S> probs = forward_batch<S>(p, d.X);
  S acc(0.0);
  for (Index i = 0; i < d.size(); ++i) {
    S py = probs(i, d.Y[i]);
    if (value(py) < kCeClamp) py = S(kCeClamp);
    if (value(py) > 1.0 - kCeClamp) py = S(1.0 - kCeClamp);
    acc -= log(py);
  }
  return acc / S(static_cast<double>(d.size()));
}

// L(f; D) + gamma * R(f; D), the inner and outer objective of the trainer.
template <typename S>
S objective(const MlpParamsT<S>& p, const Dataset& d, Regularizer reg, double gamma) {
  S j = cross_entropy<S>(p, d);
  if (gamma != 0.0) j += S(gamma) * regularizer_value<S>(p, d, reg);
  return j;
}

// Gradient of objective() in the flat parameter layout. One forward pass,
// then backprop; templated so the same path yields Hessian-vector products
// when run on Dual.
template <typename S>
VecX<S> grad_objective(const MlpParamsT<S>& p, const Dataset& d, Regularizer reg, double gamma) {
  const ForwardTrace<S> tr = forward_trace<S>(p, promote_columns<S>(d.X));
  const Index n = d.size();
  const size_t L = p.layers.size();

  // d objective / d output-logits, one column per example. Softmax + CE gives
  // (p - e_y) / n, gated by the clamp; the regularizer moves probability mass
  // toward class 1 on the penalized rows: d(gamma R)/dz = gamma p1 p0 / |S|
  // on z0 and its negative on z1.
  MatX<S> delta = MatX<S>::Zero(2, n);
  for (Index i = 0; i < n; ++i) {
    const int y = d.Y[i];
    const double py = value(tr.probs(y, i));
    if (py > kCeClamp && py < 1.0 - kCeClamp) {
      delta(0, i) += (tr.probs(0, i) - S(y == 0 ? 1.0 : 0.0)) / S(static_cast<double>(n));
      delta(1, i) += (tr.probs(1, i) - S(y == 1 ? 1.0 : 0.0)) / S(static_cast<double>(n));
    }
  }
  if (gamma != 0.0) {
    const std::vector<Index> rows = penalized_rows(d, reg);
    if (!rows.empty()) {
      const S scale = S(gamma / static_cast<double>(rows.size()));
      for (Index i : rows) {
        const S p0p1 = tr.probs(0, i) * tr.probs(1, i);
        delta(0, i) += scale * p0p1;
        delta(1, i) -= scale * p0p1;
      }
    }
  }

  std::vector<MatX<S>> dW(L);
  std::vector<VecX<S>> db(L);
  for (size_t l = L; l-- > 0;) {
    dW[l] = delta * tr.act[l].transpose();
    db[l] = delta.rowwise().sum();
    if (l > 0) {
      const MatX<S> da = p.layers[l].W.transpose() * delta;
      const MatX<S>& zprev = tr.z[l - 1];
      delta.resize(da.rows(), da.cols());
      for (Index c = 0; c < da.cols(); ++c)
        for (Index r = 0; r < da.rows(); ++r)
          delta(r, c) = value(zprev(r, c)) > 0.0 ? da(r, c) : S(0.0);
    }
  }

  VecX<S> g(param_count(p));
  Index k = 0;
  for (size_t l = 0; l < L; ++l) {
    for (Index r = 0; r < dW[l].rows(); ++r)
      for (Index c = 0; c < dW[l].cols(); ++c) g[k++] = dW[l](r, c);
    for (Index r = 0; r < db[l].size(); ++r) g[k++] = db[l][r];
  }
  return g;
}

// H(p; d) * v by forwarding a tangent through the gradient: parameters are
// seeded with direction v, and the tangent slot of the resulting gradient is
// the product. Exact up to the relu/clamp kinks, where the generalized
// Hessian applies.
inline Vector hvp_objective(const MlpParams& p, const Vector& v, const Dataset& d,
                            Regularizer reg, double gamma) {
  const VecX<Dual> g = grad_objective<Dual>(seed_tangent(p, v), d, reg, gamma);
  Vector hv(g.size());
  for (Index i = 0; i < g.size(); ++i) hv[i] = g[i].t;
  return hv;
}

// theta' = theta - lr * grad(L + gamma R); the adaptation step and also the
// plain pretraining / fine-tuning step.
inline MlpParams inner_update(const MlpParams& p, const Dataset& d, double lr, Regularizer reg,
                              double gamma) {
  const Vector g = grad_objective<double>(p, d, reg, gamma);
  return unflatten(arch_of(p), Vector(flatten(p) - lr * g));
}

// Inner objective seen only through its gradient and Hessian-vector product;
// lets the meta-gradient composition run on anything differentiable twice.
struct InnerOps {
  std::function<Vector(const Vector&)> grad;
  std::function<Vector(const Vector&, const Vector&)> hvp;
};

struct MetaResult {
  Vector grad;                 // d outer(theta_m) / d theta_0
  std::vector<Vector> thetas;  // theta_0 .. theta_m along the inner trajectory
};

// Exact gradient of outer(theta_m(theta_0)) where theta_{k+1} = theta_k -
// alpha * grad_inner(theta_k). Each step's transposed Jacobian is
// I - alpha H(theta_k) (symmetric), applied right-to-left to the outer
// gradient.
inline MetaResult meta_gradient_through_steps(const Vector& theta0, const InnerOps& inner,
                                              const std::function<Vector(const Vector&)>& outer_grad,
                                              double alpha, int steps) {
  if (steps < 0) throw std::invalid_argument("meta_gradient_through_steps: negative steps");
  MetaResult r;
  r.thetas.push_back(theta0);
  for (int k = 0; k < steps; ++k) {
    const Vector& th = r.thetas.back();
    r.thetas.push_back(th - alpha * inner.grad(th));
  }
  Vector v = outer_grad(r.thetas.back());
  for (int k = steps - 1; k >= 0; --k) v -= alpha * inner.hvp(r.thetas[k], v);
  r.grad = std::move(v);
  return r;
}

struct TaskGradient {
  Vector grad;               // meta gradient at the shared parameters
  double outer_value = 0.0;  // L + gamma R of the adapted net on the query set
  Vector adapted;            // flat adapted parameters
};

// Per-task meta gradient: adapt on the support set, differentiate the query
// objective back through the adaptation. Inner and outer objectives share
// gamma and the regularizer.
inline TaskGradient meta_gradient(const MlpParams& p, const Dataset& support,
                                  const Dataset& query, double alpha, Regularizer reg,
                                  double gamma, int steps = 1) {
  const Arch arch = arch_of(p);
  const InnerOps inner{
      [&](const Vector& th) {
        return Vector(grad_objective<double>(unflatten(arch, th), support, reg, gamma));
      },
      [&](const Vector& th, const Vector& v) {
        return hvp_objective(unflatten(arch, th), v, support, reg, gamma);
      },
  };
  const auto outer_grad = [&](const Vector& th) {
    return Vector(grad_objective<double>(unflatten(arch, th), query, reg, gamma));
  };
  MetaResult mr = meta_gradient_through_steps(flatten(p), inner, outer_grad, alpha, steps);
  TaskGradient tg;
  tg.grad = std::move(mr.grad);
  tg.adapted = std::move(mr.thetas.back());
  tg.outer_value = objective<double>(unflatten(arch, tg.adapted), query, reg, gamma);
  return tg;
}

}  // namespace fairmeta

// include/ahsd/nnet.hpp

// Copyright 2026  ahsd authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef AHSD_NNET_HPP_
#define AHSD_NNET_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ahsd/error.hpp"
#include "ahsd/rng.hpp"
#include "ahsd/tensor.hpp"

namespace ahsd {

// ── softmax and cross entropy ────────────────────────────────────────────

// In-place stable softmax of one row.
inline void softmax_row(double* x, std::int64_t n) {
  double mx = x[0];
  for (std::int64_t i = 1; i < n; ++i) mx = std::max(mx, x[i]);
  double sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    x[i] = std::exp(x[i] - mx);
    sum += x[i];
  }
  for (std::int64_t i = 0; i < n; ++i) x[i] /= sum;
}

inline std::vector<double> softmax(const std::vector<double>& logits) {
  std::vector<double> out = logits;
  softmax_row(out.data(), static_cast<std::int64_t>(out.size()));
  return out;
}

struct SoftmaxCrossEntropy {
  double loss = 0.0;  // mean over rows
  Tensor dlogits;     // same shape as logits, gradient of the mean loss
};

// Mean cross entropy over rows of [n, C] logits, computed through
// log-sum-exp so large logits stay finite. dlogits = (softmax - onehot)/n.
inline SoftmaxCrossEntropy softmax_cross_entropy(const Tensor& logits,
                                                 const std::vector<int>& targets) {
  const std::int64_t n = logits.rows();
  const std::int64_t c = logits.cols();
  if (logits.shape.size() != 2 || n <= 0 || c < 2) {
    throw Error(ErrorKind::kContract, "softmax_cross_entropy expects [n, C] logits with C >= 2");
  }
  if (static_cast<std::int64_t>(targets.size()) != n) {
    throw Error(ErrorKind::kContract, "softmax_cross_entropy: one target per row required");
  }
  SoftmaxCrossEntropy out;
  out.dlogits = Tensor::zeros({n, c});
  double total = 0.0;
  for (std::int64_t r = 0; r < n; ++r) {
    const int y = targets[static_cast<std::size_t>(r)];
    if (y < 0 || y >= c) {
      throw Error(ErrorKind::kContract, "softmax_cross_entropy: target out of range");
    }
    double mx = logits.at(r, 0);
    for (std::int64_t j = 0; j < c; ++j) {
      if (!std::isfinite(logits.at(r, j))) {
        throw Error(ErrorKind::kNumeric, "softmax_cross_entropy: non-finite logit");
      }
      mx = std::max(mx, logits.at(r, j));
    }
    double sum = 0.0;
    for (std::int64_t j = 0; j < c; ++j) sum += std::exp(logits.at(r, j) - mx);
    const double lse = mx + std::log(sum);
    total += lse - logits.at(r, y);
    for (std::int64_t j = 0; j < c; ++j) {
      const double p = std::exp(logits.at(r, j) - lse);
      out.dlogits.at(r, j) = (p - (j == y ? 1.0 : 0.0)) / static_cast<double>(n);
    }
  }
  out.loss = total / static_cast<double>(n);
  return out;
}

// ── layer primitives ─────────────────────────────────────────────────────

// y = W x + b with W stored [out, in].
inline void affine_forward(const Tensor& w, const Tensor& b, const double* x, double* y) {
  const std::int64_t out = w.rows();
  const std::int64_t in = w.cols();
  for (std::int64_t r = 0; r < out; ++r) {
    double acc = b.at(r);
    const double* wr = w.values.data() + r * in;
    for (std::int64_t c = 0; c < in; ++c) acc += wr[c] * x[c];
    y[r] = acc;
  }
}

// Accumulates dW and db; writes dx when non-null.
inline void affine_backward(const Tensor& w, const double* x, const double* dy,
                            Tensor& dw, Tensor& db, double* dx) {
  const std::int64_t out = w.rows();
  const std::int64_t in = w.cols();
  if (dx) {
    for (std::int64_t c = 0; c < in; ++c) dx[c] = 0.0;
  }
  for (std::int64_t r = 0; r < out; ++r) {
    const double g = dy[r];
    db.at(r) += g;
    double* dwr = dw.values.data() + r * in;
    const double* wr = w.values.data() + r * in;
    for (std::int64_t c = 0; c < in; ++c) {
      dwr[c] += g * x[c];
      if (dx) dx[c] += wr[c] * g;
    }
  }
}

inline void tanh_forward(double* x, std::int64_t n) {
  for (std::int64_t i = 0; i < n; ++i) x[i] = std::tanh(x[i]);
}

// dx = dy * (1 - y^2) where y is the tanh output.
inline void tanh_backward(const double* y, double* dy, std::int64_t n) {
  for (std::int64_t i = 0; i < n; ++i) dy[i] *= 1.0 - y[i] * y[i];
}

// Additive attention over a sequence of embeddings e_i:
//   u_i = tanh(P e_i),  score_i = q . u_i,  a = softmax(score).
struct AttentionForward {
  std::vector<double> u;       // [n, d] tanh projections
  std::vector<double> scores;  // pre-softmax
  std::vector<double> weights; // softmax(scores), sums to 1
};

inline AttentionForward attention_forward(const Tensor& p, const Tensor& q,
                                          const std::vector<double>& embs,
                                          std::int64_t n, std::int64_t d) {
  AttentionForward f;
  f.u.resize(static_cast<std::size_t>(n * d));
  f.scores.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const double* e = embs.data() + i * d;
    double* u = f.u.data() + i * d;
    for (std::int64_t r = 0; r < d; ++r) {
      double acc = 0.0;
      const double* pr = p.values.data() + r * d;
      for (std::int64_t c = 0; c < d; ++c) acc += pr[c] * e[c];
      u[r] = std::tanh(acc);
    }
    double s = 0.0;
    for (std::int64_t r = 0; r < d; ++r) s += q.at(r) * u[r];
    f.scores[static_cast<std::size_t>(i)] = s;
  }
  f.weights = f.scores;
  softmax_row(f.weights.data(), n);
  return f;
}

// Backward through attention given d(weights). Accumulates dP, dq and adds
// the contribution to dembs (which must be sized [n, d]).
inline void attention_backward(const Tensor& p, const Tensor& q,
                               const std::vector<double>& embs,
                               const AttentionForward& f,
                               const std::vector<double>& dweights,
                               std::int64_t n, std::int64_t d,
                               Tensor& dp, Tensor& dq, std::vector<double>& dembs) {
  // softmax backward: ds_i = a_i * (da_i - sum_j a_j da_j)
  double dot = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    dot += f.weights[static_cast<std::size_t>(i)] * dweights[static_cast<std::size_t>(i)];
  }
  for (std::int64_t i = 0; i < n; ++i) {
    const double ds = f.weights[static_cast<std::size_t>(i)] *
                      (dweights[static_cast<std::size_t>(i)] - dot);
    const double* u = f.u.data() + i * d;
    const double* e = embs.data() + i * d;
    double* de = dembs.data() + i * d;
    for (std::int64_t r = 0; r < d; ++r) {
      dq.at(r) += ds * u[r];
      const double dv = ds * q.at(r) * (1.0 - u[r] * u[r]);
      double* dpr = dp.values.data() + r * d;
      const double* pr = p.values.data() + r * d;
      for (std::int64_t c = 0; c < d; ++c) {
        dpr[c] += dv * e[c];
        de[c] += pr[c] * dv;
      }
    }
  }
}

// ── initialization ───────────────────────────────────────────────────────

// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
inline Tensor glorot_uniform(std::vector<std::int64_t> shape, std::int64_t fan_in,
                             std::int64_t fan_out, Rng& rng) {
  Tensor t = Tensor::zeros(std::move(shape));
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : t.values) v = rng.uniform(-a, a);
  return t;
}

// ── Adam ─────────────────────────────────────────────────────────────────

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t t = 0;
  ParameterSet m;
  ParameterSet v;
};

// One bias-corrected Adam update. Only parameters present in `grads` are
// touched; moment tensors are created lazily. Iteration over std::map is
// name-ordered, so the update sequence is deterministic.
inline void adam_step(ParameterSet& params, const ParameterSet& grads, AdamState& state) {
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (const auto& [name, g] : grads) {
    auto it = params.find(name);
    if (it == params.end()) {
      throw Error(ErrorKind::kContract, "adam_step: gradient for unknown parameter '" + name + "'");
    }
    Tensor& p = it->second;
    if (p.shape != g.shape) {
      throw Error(ErrorKind::kContract, "adam_step: shape mismatch for parameter '" + name + "'");
    }
    Tensor& m = state.m.try_emplace(name, Tensor::zeros(p.shape)).first->second;
    Tensor& v = state.v.try_emplace(name, Tensor::zeros(p.shape)).first->second;
    for (std::int64_t i = 0; i < p.numel(); ++i) {
      const double gi = g.at(i);
      if (!std::isfinite(gi)) {
        throw Error(ErrorKind::kNumeric, "adam_step: non-finite gradient for '" + name + "'");
      }
      m.at(i) = state.beta1 * m.at(i) + (1.0 - state.beta1) * gi;
      v.at(i) = state.beta2 * v.at(i) + (1.0 - state.beta2) * gi * gi;
      const double mhat = m.at(i) / bc1;
      const double vhat = v.at(i) / bc2;
      p.at(i) -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

// ── finite-difference gradient check ─────────────────────────────────────

// Central differences against a precomputed analytic gradient. Entries the
// analytic gradient omits are skipped. Relative error uses
// |a - n| / max(1e-8, |a| + |n|).
inline double grad_check(const std::function<double(const ParameterSet&)>& loss_fn,
                         const ParameterSet& analytic, ParameterSet params, double eps) {
  double worst = 0.0;
  for (const auto& [name, g] : analytic) {
    auto it = params.find(name);
    if (it == params.end()) {
      throw Error(ErrorKind::kContract, "grad_check: unknown parameter '" + name + "'");
    }
    Tensor& p = it->second;
    for (std::int64_t i = 0; i < p.numel(); ++i) {
      const double keep = p.at(i);
      p.at(i) = keep + eps;
      const double up = loss_fn(params);
      p.at(i) = keep - eps;
      const double dn = loss_fn(params);
      p.at(i) = keep;
      const double numeric = (up - dn) / (2.0 * eps);
      const double a = g.at(i);
      const double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace ahsd

#endif  // AHSD_NNET_HPP_

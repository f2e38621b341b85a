// tests/test_nnet.cpp

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

#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "ahsd/checkpoint.hpp"
#include "ahsd/nnet.hpp"
#include "test_support.hpp"

using ahsd::AdamState;
using ahsd::ParameterSet;
using ahsd::Tensor;

TEST_CASE("softmax cross entropy hand values") {
  Tensor logits = Tensor::zeros({1, 2});
  auto r = ahsd::softmax_cross_entropy(logits, {0});
  CHECK(r.loss == Catch::Approx(std::log(2.0)).epsilon(1e-12));

  // Extreme logits stay finite through log-sum-exp.
  Tensor big = Tensor::zeros({1, 2});
  big.at(0, 0) = 1000.0;
  auto rb = ahsd::softmax_cross_entropy(big, {0});
  CHECK(std::isfinite(rb.loss));
  CHECK(rb.loss == Catch::Approx(0.0).margin(1e-12));
  auto rw = ahsd::softmax_cross_entropy(big, {1});
  CHECK(std::isfinite(rw.loss));
  CHECK(rw.loss == Catch::Approx(1000.0).epsilon(1e-9));
}

TEST_CASE("softmax rows sum to one") {
  ahsd::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> row(static_cast<std::size_t>(rng.uniform_int(2, 9)));
    for (auto& v : row) v = rng.uniform(-30.0, 30.0);
    auto p = ahsd::softmax(row);
    double sum = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("cross entropy is invariant to shifting a logit row") {
  ahsd::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor logits = Tensor::zeros({3, 4});
    for (auto& v : logits.values) v = rng.uniform(-5.0, 5.0);
    std::vector<int> targets = {static_cast<int>(rng.uniform_int(0, 3)),
                                static_cast<int>(rng.uniform_int(0, 3)),
                                static_cast<int>(rng.uniform_int(0, 3))};
    auto base = ahsd::softmax_cross_entropy(logits, targets);
    Tensor shifted = logits;
    const double c = rng.uniform(-40.0, 40.0);
    for (std::int64_t j = 0; j < 4; ++j) shifted.at(1, j) += c;
    auto moved = ahsd::softmax_cross_entropy(shifted, targets);
    CHECK(std::abs(base.loss - moved.loss) < 1e-9);
  }
}

TEST_CASE("cross entropy rejects non-finite logits") {
  Tensor logits = Tensor::zeros({1, 2});
  logits.at(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ahsd::softmax_cross_entropy(logits, {0}), ahsd::Error);
}

TEST_CASE("cross entropy gradient matches central differences") {
  ahsd::Rng rng(13);
  Tensor logits = Tensor::zeros({5, 3});
  for (auto& v : logits.values) v = rng.uniform(-2.0, 2.0);
  std::vector<int> targets = {0, 2, 1, 1, 0};
  auto r = ahsd::softmax_cross_entropy(logits, targets);
  const double eps = 1e-6;
  for (std::int64_t i = 0; i < logits.numel(); ++i) {
    Tensor up = logits, dn = logits;
    up.at(i) += eps;
    dn.at(i) -= eps;
    const double numeric = (ahsd::softmax_cross_entropy(up, targets).loss -
                            ahsd::softmax_cross_entropy(dn, targets).loss) /
                           (2 * eps);
    CHECK(std::abs(numeric - r.dlogits.at(i)) < 1e-8);
  }
}

TEST_CASE("adam with zero gradients leaves parameters unchanged") {
  ParameterSet params;
  params["w"] = Tensor::zeros({3});
  params["w"].values = {1.0, -2.0, 0.5};
  ParameterSet grads;
  grads["w"] = Tensor::zeros({3});
  AdamState state;
  state.lr = 0.1;
  ParameterSet before = params;
  for (int i = 0; i < 5; ++i) ahsd::adam_step(params, grads, state);
  CHECK(state.t == 5);
  CHECK(params["w"].values == before["w"].values);
}

TEST_CASE("adam first step moves by about lr in the gradient direction") {
  ParameterSet params;
  params["w"] = Tensor::zeros({2});
  ParameterSet grads;
  grads["w"] = Tensor::zeros({2});
  grads["w"].values = {0.5, -0.25};
  AdamState state;
  state.lr = 1e-3;
  ahsd::adam_step(params, grads, state);
  // Bias correction makes mhat = g and vhat = g^2, so the step is
  // lr * g / (|g| + eps) which is lr * sign(g) up to the eps dent.
  CHECK(params["w"].at(0) == Catch::Approx(-1e-3).epsilon(1e-6));
  CHECK(params["w"].at(1) == Catch::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("adam drives a quadratic toward its minimum") {
  ParameterSet params;
  params["x"] = Tensor::zeros({1});
  params["x"].at(0) = 1.0;
  AdamState state;
  state.lr = 0.1;
  for (int i = 0; i < 100; ++i) {
    ParameterSet grads;
    grads["x"] = Tensor::zeros({1});
    grads["x"].at(0) = 2.0 * params["x"].at(0);
    ahsd::adam_step(params, grads, state);
  }
  CHECK(std::abs(params["x"].at(0)) < 0.05);
}

TEST_CASE("adam rejects mismatched shapes and unknown names") {
  ParameterSet params;
  params["w"] = Tensor::zeros({2});
  AdamState state;
  ParameterSet bad;
  bad["w"] = Tensor::zeros({3});
  CHECK_THROWS_AS(ahsd::adam_step(params, bad, state), ahsd::Error);
  ParameterSet unknown;
  unknown["zz"] = Tensor::zeros({2});
  CHECK_THROWS_AS(ahsd::adam_step(params, unknown, state), ahsd::Error);
}

TEST_CASE("grad_check is near zero for an analytic quadratic") {
  ParameterSet params;
  params["x"] = Tensor::zeros({4});
  params["x"].values = {0.3, -1.2, 2.0, 0.01};
  ParameterSet analytic;
  analytic["x"] = Tensor::zeros({4});
  for (std::int64_t i = 0; i < 4; ++i) analytic["x"].at(i) = 2.0 * params["x"].at(i);
  auto loss = [](const ParameterSet& p) {
    double s = 0.0;
    for (double v : p.at("x").values) s += v * v;
    return s;
  };
  CHECK(ahsd::grad_check(loss, analytic, params, 1e-5) < 1e-8);
}

TEST_CASE("grad_check flags a wrong analytic gradient") {
  ParameterSet params;
  params["x"] = Tensor::zeros({1});
  params["x"].at(0) = 1.0;
  ParameterSet wrong;
  wrong["x"] = Tensor::zeros({1});
  wrong["x"].at(0) = 3.5;  // truth is 2.0
  auto loss = [](const ParameterSet& p) { return p.at("x").at(0) * p.at("x").at(0); };
  CHECK(ahsd::grad_check(loss, wrong, params, 1e-5) > 1e-2);
}

TEST_CASE("affine and tanh backward agree with finite differences") {
  ahsd::Rng rng(17);
  const std::int64_t in = 5, out = 4;
  ParameterSet params;
  params["W"] = ahsd::glorot_uniform({out, in}, in, out, rng);
  params["b"] = Tensor::zeros({out});
  for (auto& v : params["b"].values) v = rng.uniform(-0.3, 0.3);
  std::vector<double> x(static_cast<std::size_t>(in));
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  // Loss: sum of tanh(Wx + b) weighted by fixed coefficients.
  std::vector<double> coef(static_cast<std::size_t>(out));
  for (auto& v : coef) v = rng.uniform(-1.0, 1.0);

  auto loss_fn = [&](const ParameterSet& p) {
    std::vector<double> y(static_cast<std::size_t>(out));
    ahsd::affine_forward(p.at("W"), p.at("b"), x.data(), y.data());
    ahsd::tanh_forward(y.data(), out);
    double s = 0.0;
    for (std::int64_t i = 0; i < out; ++i) s += coef[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    return s;
  };

  std::vector<double> y(static_cast<std::size_t>(out));
  ahsd::affine_forward(params["W"], params["b"], x.data(), y.data());
  ahsd::tanh_forward(y.data(), out);
  std::vector<double> dy = coef;
  ahsd::tanh_backward(y.data(), dy.data(), out);
  ParameterSet analytic;
  analytic["W"] = Tensor::zeros({out, in});
  analytic["b"] = Tensor::zeros({out});
  ahsd::affine_backward(params["W"], x.data(), dy.data(), analytic["W"], analytic["b"], nullptr);

  CHECK(ahsd::grad_check(loss_fn, analytic, params, 1e-5) < 1e-7);
}

TEST_CASE("attention weights sum to one and backward passes a finite difference check") {
  ahsd::Rng rng(23);
  const std::int64_t n = 4, d = 6;
  ParameterSet params;
  params["P"] = ahsd::glorot_uniform({d, d}, d, d, rng);
  params["q"] = ahsd::glorot_uniform({d}, d, 1, rng);
  std::vector<double> embs(static_cast<std::size_t>(n * d));
  for (auto& v : embs) v = rng.uniform(-1.0, 1.0);

  auto fwd = ahsd::attention_forward(params["P"], params["q"], embs, n, d);
  double sum = 0.0;
  for (double w : fwd.weights) sum += w;
  CHECK(std::abs(sum - 1.0) < 1e-12);

  // Loss: fixed linear functional of the attention weights.
  std::vector<double> coef(static_cast<std::size_t>(n));
  for (auto& v : coef) v = rng.uniform(-1.0, 1.0);
  auto loss_fn = [&](const ParameterSet& p) {
    auto f = ahsd::attention_forward(p.at("P"), p.at("q"), embs, n, d);
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i) s += coef[static_cast<std::size_t>(i)] * f.weights[static_cast<std::size_t>(i)];
    return s;
  };

  ParameterSet analytic;
  analytic["P"] = Tensor::zeros({d, d});
  analytic["q"] = Tensor::zeros({d});
  std::vector<double> dembs(static_cast<std::size_t>(n * d), 0.0);
  ahsd::attention_backward(params["P"], params["q"], embs, fwd, coef, n, d,
                           analytic["P"], analytic["q"], dembs);
  CHECK(ahsd::grad_check(loss_fn, analytic, params, 1e-5) < 1e-6);
}

TEST_CASE("glorot init is deterministic and bounded") {
  ahsd::Rng a(5), b(5);
  Tensor ta = ahsd::glorot_uniform({8, 4}, 4, 8, a);
  Tensor tb = ahsd::glorot_uniform({8, 4}, 4, 8, b);
  CHECK(ta.values == tb.values);
  const double bound = std::sqrt(6.0 / 12.0);
  for (double v : ta.values) {
    CHECK(std::abs(v) <= bound);
  }
}

TEST_CASE("checkpoint saves and loads byte-identically") {
  ahsd_test::TempDir dir("ckpt");
  ahsd::Rng rng(31);
  ahsd::Checkpoint ckpt;
  ckpt.arch = "toy";
  ckpt.dims = {{"in", 4}, {"out", 3}};
  ckpt.seed = 77;
  ckpt.params["layer.W"] = ahsd::glorot_uniform({3, 4}, 4, 3, rng);
  ckpt.params["layer.b"] = Tensor::zeros({3});
  ckpt.params["layer.b"].values = {0.25, -1.0 / 3.0, 1e-17};

  const auto path = dir.path() / "model.json";
  ahsd::save_checkpoint(ckpt, path);
  ahsd::Checkpoint loaded = ahsd::load_checkpoint(path);
  CHECK(loaded.arch == ckpt.arch);
  CHECK(loaded.seed == ckpt.seed);
  REQUIRE(loaded.params.size() == 2);
  CHECK(loaded.params["layer.W"].values == ckpt.params["layer.W"].values);
  CHECK(loaded.params["layer.b"].values == ckpt.params["layer.b"].values);

  const auto path2 = dir.path() / "model2.json";
  ahsd::save_checkpoint(loaded, path2);
  CHECK(ahsd_test::slurp(path) == ahsd_test::slurp(path2));
}

TEST_CASE("checkpoint loader rejects malformed files") {
  ahsd_test::TempDir dir("ckpt_bad");
  const auto path = dir.path() / "bad.json";
  {
    std::ofstream out(path);
    out << "{\"format_version\": 1, \"arch\": \"x\"}";
  }
  CHECK_THROWS_AS(ahsd::load_checkpoint(path), ahsd::Error);
  CHECK_THROWS_AS(ahsd::load_checkpoint(dir.path() / "missing.json"), ahsd::Error);
}

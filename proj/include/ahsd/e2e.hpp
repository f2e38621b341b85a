// include/ahsd/e2e.hpp

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

#ifndef AHSD_E2E_HPP_
#define AHSD_E2E_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ahsd/checkpoint.hpp"
#include "ahsd/corpus.hpp"
#include "ahsd/error.hpp"
#include "ahsd/features.hpp"
#include "ahsd/frames.hpp"
#include "ahsd/metrics.hpp"
#include "ahsd/nnet.hpp"
#include "ahsd/rng.hpp"
#include "ahsd/types.hpp"
#include "ahsd/wav.hpp"

namespace ahsd {

// ---- grid bridging -----------------------------------------------------------

// Gold mask on the 10 ms grid -> one target per analysis frame: the gold bit
// under the frame's center (center 12.5+20t ms lies in 10 ms frame 2t+1).
inline std::vector<int> gold_downsample(const FrameRationale& gold, int t_total) {
  if (gold.size() < 1) {
    throw Error(ErrorKind::kContract, "gold_downsample: empty gold mask");
  }
  std::vector<int> out(static_cast<std::size_t>(t_total), 0);
  for (int t = 0; t < t_total; ++t) {
    const int idx = std::min(2 * t + 1, gold.size() - 1);
    out[static_cast<std::size_t>(t)] = gold.bits[static_cast<std::size_t>(idx)];
  }
  return out;
}

// Per-analysis-frame bits -> 10 ms mask: each fine frame takes the decision
// of the analysis frame whose center is nearest to its own.
inline FrameRationale grid_resample(const std::vector<std::uint8_t>& enc_bits, int m_frames) {
  if (enc_bits.empty()) {
    throw Error(ErrorKind::kContract, "grid_resample: no analysis frames");
  }
  const int t_total = static_cast<int>(enc_bits.size());
  FrameRationale out;
  out.bits.resize(static_cast<std::size_t>(m_frames), 0);
  for (int i = 0; i < m_frames; ++i) {
    int t = static_cast<int>(std::llround((10.0 * i - 7.5) / 20.0));
    t = std::max(0, std::min(t, t_total - 1));
    out.bits[static_cast<std::size_t>(i)] = enc_bits[static_cast<std::size_t>(t)];
  }
  return out;
}

// ---- model -------------------------------------------------------------------

struct E2EModel {
  int d_in = kNumBands;
  int d_h = 64;
  int d_proj = 32;
  // enc_w1 [d_h,d_in], enc_b1, enc_w2 [d_h,d_h], enc_b2,
  // cls_proj_w [d_proj,d_h], cls_proj_b, cls_w [2,d_proj], cls_b,
  // fd_w [2,d_h], fd_b
  ParameterSet params;
};

inline E2EModel init_e2e_model(std::uint64_t seed, int d_in, int d_h, int d_proj) {
  if (d_in < 1 || d_h < 1 || d_proj < 1) {
    throw Error(ErrorKind::kConfig, "init_e2e_model: dimensions must be positive");
  }
  E2EModel m;
  m.d_in = d_in;
  m.d_h = d_h;
  m.d_proj = d_proj;
  Rng rng = Rng::derived(seed, fnv1a64("e2e-model-init"));
  m.params["cls_b"] = Tensor::zeros({2});
  m.params["cls_proj_b"] = Tensor::zeros({d_proj});
  m.params["cls_proj_w"] = glorot_uniform({d_proj, d_h}, d_h, d_proj, rng);
  m.params["cls_w"] = glorot_uniform({2, d_proj}, d_proj, 2, rng);
  m.params["enc_b1"] = Tensor::zeros({d_h});
  m.params["enc_b2"] = Tensor::zeros({d_h});
  m.params["enc_w1"] = glorot_uniform({d_h, d_in}, d_in, d_h, rng);
  m.params["enc_w2"] = glorot_uniform({d_h, d_h}, d_h, d_h, rng);
  m.params["fd_b"] = Tensor::zeros({2});
  m.params["fd_w"] = glorot_uniform({2, d_h}, d_h, 2, rng);
  return m;
}

// Folds a per-band affine standardization (x - mean) / std into the first
// layer so raw log energies can be fed directly at inference time.
inline void fold_input_standardization(E2EModel& m, const std::vector<double>& mean,
                                       const std::vector<double>& std_dev) {
  Tensor& w1 = m.params.at("enc_w1");
  Tensor& b1 = m.params.at("enc_b1");
  if (static_cast<int>(mean.size()) != m.d_in || static_cast<int>(std_dev.size()) != m.d_in) {
    throw Error(ErrorKind::kContract, "fold_input_standardization: stats size mismatch");
  }
  for (std::int64_t r = 0; r < m.d_h; ++r) {
    double shift = 0.0;
    for (std::int64_t c = 0; c < m.d_in; ++c) {
      const double s = std::max(std_dev[static_cast<std::size_t>(c)], 1e-8);
      w1.at(r, c) /= s;
      shift += w1.at(r, c) * mean[static_cast<std::size_t>(c)];
    }
    b1.at(r) = -shift;
  }
}

struct E2EForward {
  int t_total = 0;
  std::vector<double> h1, h2;  // [T, d_h] tanh activations
  std::vector<double> proj;    // [T, d_proj]
  std::vector<double> context; // [d_proj] mean-pooled projection
  Tensor cls_logits;           // [1, 2]
  Tensor fd_logits;            // [T, 2]
};

inline E2EForward e2e_forward(const E2EModel& m, const Tensor& feats) {
  if (feats.shape.size() != 2 || feats.cols() != m.d_in || feats.rows() < 1) {
    throw Error(ErrorKind::kContract, "e2e_forward: features must be [T, d_in]");
  }
  const std::int64_t t_total = feats.rows();
  const std::int64_t dh = m.d_h, dp = m.d_proj;
  const Tensor& w1 = m.params.at("enc_w1");
  const Tensor& b1 = m.params.at("enc_b1");
  const Tensor& w2 = m.params.at("enc_w2");
  const Tensor& b2 = m.params.at("enc_b2");
  const Tensor& pw = m.params.at("cls_proj_w");
  const Tensor& pb = m.params.at("cls_proj_b");
  const Tensor& fw = m.params.at("fd_w");
  const Tensor& fb = m.params.at("fd_b");

  E2EForward f;
  f.t_total = static_cast<int>(t_total);
  f.h1.resize(static_cast<std::size_t>(t_total * dh));
  f.h2.resize(static_cast<std::size_t>(t_total * dh));
  f.proj.resize(static_cast<std::size_t>(t_total * dp));
  f.fd_logits = Tensor::zeros({t_total, 2});
  f.context.assign(static_cast<std::size_t>(dp), 0.0);

  for (std::int64_t t = 0; t < t_total; ++t) {
    const double* x = feats.values.data() + t * m.d_in;
    double* h1 = f.h1.data() + t * dh;
    double* h2 = f.h2.data() + t * dh;
    double* pr = f.proj.data() + t * dp;
    affine_forward(w1, b1, x, h1);
    tanh_forward(h1, dh);
    affine_forward(w2, b2, h1, h2);
    tanh_forward(h2, dh);
    affine_forward(pw, pb, h2, pr);
    affine_forward(fw, fb, h2, f.fd_logits.values.data() + t * 2);
    for (std::int64_t r = 0; r < dp; ++r) f.context[static_cast<std::size_t>(r)] += pr[r];
  }
  const double inv_t = 1.0 / static_cast<double>(t_total);
  for (double& v : f.context) v *= inv_t;
  f.cls_logits = Tensor::zeros({1, 2});
  affine_forward(m.params.at("cls_w"), m.params.at("cls_b"), f.context.data(),
                 f.cls_logits.values.data());
  return f;
}

struct E2ELoss {
  double loss = 0.0;
  double l_cls = 0.0;
  double l_fd = 0.0;
};

// Composite objective alpha * clip term + (1 - alpha) * frame term. The
// endpoint values 0 and 1 scale the unused branch by exactly zero, which
// keeps shared-parameter updates bit-identical to a run that only ever had
// the active head.
inline E2ELoss e2e_loss_and_grad(const E2EModel& m, const Tensor& feats, int label,
                                 const std::vector<int>& frame_targets, double alpha_eff,
                                 ParameterSet& grads) {
  const E2EForward f = e2e_forward(m, feats);
  const std::int64_t t_total = f.t_total;
  const std::int64_t dh = m.d_h, dp = m.d_proj;
  if (static_cast<std::int64_t>(frame_targets.size()) != t_total) {
    throw Error(ErrorKind::kContract, "e2e_loss_and_grad: frame target length mismatch");
  }

  E2ELoss out;
  const SoftmaxCrossEntropy ce_cls = softmax_cross_entropy(f.cls_logits, {label});
  const SoftmaxCrossEntropy ce_fd = softmax_cross_entropy(f.fd_logits, frame_targets);
  out.l_cls = ce_cls.loss;
  out.l_fd = ce_fd.loss;
  out.loss = alpha_eff * out.l_cls + (1.0 - alpha_eff) * out.l_fd;

  // Clip head: scaled CE gradient -> classifier -> mean pool -> projection.
  double dcls_logits[2] = {alpha_eff * ce_cls.dlogits.at(0), alpha_eff * ce_cls.dlogits.at(1)};
  std::vector<double> dcontext(static_cast<std::size_t>(dp), 0.0);
  affine_backward(m.params.at("cls_w"), f.context.data(), dcls_logits, grads.at("cls_w"),
                  grads.at("cls_b"), dcontext.data());
  const double inv_t = 1.0 / static_cast<double>(t_total);
  std::vector<double> dproj(static_cast<std::size_t>(dp));
  for (std::int64_t r = 0; r < dp; ++r) {
    dproj[static_cast<std::size_t>(r)] = dcontext[static_cast<std::size_t>(r)] * inv_t;
  }

  const Tensor& w2 = m.params.at("enc_w2");
  const Tensor& pw = m.params.at("cls_proj_w");
  const Tensor& fw = m.params.at("fd_w");
  std::vector<double> dh2(static_cast<std::size_t>(dh)), dtmp(static_cast<std::size_t>(dh));
  std::vector<double> dh1(static_cast<std::size_t>(dh));
  const double fd_scale = 1.0 - alpha_eff;
  for (std::int64_t t = 0; t < t_total; ++t) {
    const double* x = feats.values.data() + t * m.d_in;
    const double* h1 = f.h1.data() + t * dh;
    const double* h2 = f.h2.data() + t * dh;

    // Projection branch re-uses the same dproj for every frame (mean pool).
    affine_backward(pw, h2, dproj.data(), grads.at("cls_proj_w"), grads.at("cls_proj_b"),
                    dh2.data());
    double dfd[2] = {fd_scale * ce_fd.dlogits.at(t, 0), fd_scale * ce_fd.dlogits.at(t, 1)};
    affine_backward(fw, h2, dfd, grads.at("fd_w"), grads.at("fd_b"), dtmp.data());
    for (std::int64_t r = 0; r < dh; ++r) dh2[static_cast<std::size_t>(r)] += dtmp[static_cast<std::size_t>(r)];

    tanh_backward(h2, dh2.data(), dh);
    affine_backward(w2, h1, dh2.data(), grads.at("enc_w2"), grads.at("enc_b2"), dh1.data());
    tanh_backward(h1, dh1.data(), dh);
    affine_backward(m.params.at("enc_w1"), x, dh1.data(), grads.at("enc_w1"), grads.at("enc_b1"),
                    nullptr);
  }
  return out;
}

// ---- dataset -----------------------------------------------------------------

struct E2EExample {
  std::string id;
  Tensor feats;  // [T, kNumBands]
  int label = 0;
  FrameRationale gold;  // 10 ms grid
  int duration_ms = 0;
};

inline E2EExample make_e2e_example(const ManifestRecord& rec, const std::vector<double>& samples) {
  E2EExample ex;
  ex.id = rec.id;
  ex.label = rec.label;
  ex.duration_ms = rec.duration_ms();
  ex.gold = spans_to_frames(rec.words, ex.duration_ms);
  ex.feats = extract_features(samples);
  return ex;
}

// Reads a split's audio relative to the manifest's own directory.
inline std::vector<E2EExample> load_e2e_examples(const std::string& manifest_path) {
  namespace fs = std::filesystem;
  const auto records = read_manifest(manifest_path);
  const fs::path root = fs::path(manifest_path).parent_path();
  std::vector<E2EExample> out;
  out.reserve(records.size());
  for (const auto& rec : records) {
    const WavData wav = read_wav(root / rec.wav);
    if (wav.sample_rate != kSampleRate) {
      throw Error(ErrorKind::kData, "clip " + rec.id + " has sample rate " +
                                        std::to_string(wav.sample_rate));
    }
    out.push_back(make_e2e_example(rec, wav.samples));
  }
  return out;
}

// ---- inference ----------------------------------------------------------------

inline PredictionRecord e2e_predict(const E2EModel& m, const Tensor& feats,
                                    const std::string& clip_id, int duration_ms) {
  if (duration_ms <= 0) {
    throw Error(ErrorKind::kContract, "e2e_predict: clip duration must be positive");
  }
  const E2EForward f = e2e_forward(m, feats);
  PredictionRecord rec;
  rec.id = clip_id;
  const std::vector<double> probs = softmax({f.cls_logits.at(0, 0), f.cls_logits.at(0, 1)});
  rec.score = probs[1];
  rec.label_pred = f.cls_logits.at(0, 1) > f.cls_logits.at(0, 0) ? 1 : 0;
  if (rec.label_pred == 0) return rec;

  std::vector<std::uint8_t> enc_bits(static_cast<std::size_t>(f.t_total), 0);
  for (int t = 0; t < f.t_total; ++t) {
    enc_bits[static_cast<std::size_t>(t)] = f.fd_logits.at(t, 1) > f.fd_logits.at(t, 0) ? 1 : 0;
  }
  const FrameRationale mask = grid_resample(enc_bits, frame_count_for_duration(duration_ms));
  rec.frames = frames_to_intervals(mask);
  return rec;
}

// Ungated per-frame mask, used for rationale-only evaluation and training
// diagnostics.
inline FrameRationale e2e_frame_mask(const E2EModel& m, const Tensor& feats, int duration_ms) {
  const E2EForward f = e2e_forward(m, feats);
  std::vector<std::uint8_t> enc_bits(static_cast<std::size_t>(f.t_total), 0);
  for (int t = 0; t < f.t_total; ++t) {
    enc_bits[static_cast<std::size_t>(t)] = f.fd_logits.at(t, 1) > f.fd_logits.at(t, 0) ? 1 : 0;
  }
  return grid_resample(enc_bits, frame_count_for_duration(duration_ms));
}

// ---- training -----------------------------------------------------------------

struct E2ETrainConfig {
  std::uint64_t seed = 0;
  double lr = 4e-3;
  int epochs = 50;
  int batch_size = 64;
  double alpha = 0.5;
  std::string mode = "joint";  // joint | cls-only | fd-only
  int d_h = 64;
  int d_proj = 32;
};

inline double e2e_alpha_eff(const E2ETrainConfig& cfg) {
  if (cfg.mode == "joint") return cfg.alpha;
  if (cfg.mode == "cls-only") return 1.0;
  if (cfg.mode == "fd-only") return 0.0;
  throw Error(ErrorKind::kConfig, "e2e train config: unknown mode '" + cfg.mode + "'");
}

inline void validate_e2e_train_config(const E2ETrainConfig& cfg) {
  if (cfg.epochs < 1 || cfg.batch_size < 1 || cfg.d_h < 1 || cfg.d_proj < 1) {
    throw Error(ErrorKind::kConfig, "e2e train config: sizes must be positive");
  }
  if (!(cfg.lr > 0.0) || !std::isfinite(cfg.lr)) {
    throw Error(ErrorKind::kConfig, "e2e train config: lr must be positive");
  }
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) {
    throw Error(ErrorKind::kConfig, "e2e train config: alpha must be in [0, 1]");
  }
  e2e_alpha_eff(cfg);  // validates mode
}

struct E2EEpochLog {
  int epoch = 0;
  double loss = 0.0;
  double l_cls = 0.0;
  double l_fd = 0.0;
  double dev_metric = 0.0;
};

struct E2ETrainResult {
  E2EModel model;  // parameters of the best epoch
  std::vector<E2EEpochLog> epochs;
  std::vector<double> batch_losses;  // chronological, all epochs
  int best_epoch = -1;
  double best_dev_metric = -1.0;
  std::string dev_metric_name;  // "macro_f1" or "pooled_iou"
};

inline double e2e_dev_metric(const E2EModel& m, const std::vector<E2EExample>& dev,
                             bool rationale_only) {
  if (rationale_only) {
    // Pooled frame IoU of the ungated masks.
    long long inter = 0, uni = 0;
    for (const auto& ex : dev) {
      const FrameRationale pred = e2e_frame_mask(m, ex.feats, ex.duration_ms);
      for (int i = 0; i < ex.gold.size(); ++i) {
        const bool p = pred.bits[static_cast<std::size_t>(i)] != 0;
        const bool g = ex.gold.bits[static_cast<std::size_t>(i)] != 0;
        inter += p && g;
        uni += p || g;
      }
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
  }
  std::vector<int> y_true, y_pred;
  for (const auto& ex : dev) {
    const E2EForward f = e2e_forward(m, ex.feats);
    y_true.push_back(ex.label);
    y_pred.push_back(f.cls_logits.at(0, 1) > f.cls_logits.at(0, 0) ? 1 : 0);
  }
  return cls_metrics(y_true, y_pred).macro_f1;
}

inline E2ETrainResult train_e2e(const std::vector<E2EExample>& train,
                                const std::vector<E2EExample>& dev, const E2ETrainConfig& cfg) {
  validate_e2e_train_config(cfg);
  if (train.empty() || dev.empty()) {
    throw Error(ErrorKind::kData, "train_e2e: empty split");
  }
  const double alpha_eff = e2e_alpha_eff(cfg);
  const bool rationale_only = cfg.mode == "fd-only";

  E2EModel m = init_e2e_model(cfg.seed, kNumBands, cfg.d_h, cfg.d_proj);
  {
    // Fold train-split band statistics into the first layer so the tanh
    // stack starts in its linear regime on log-energy inputs.
    std::vector<double> mean(kNumBands, 0.0), var(kNumBands, 0.0);
    long long n = 0;
    for (const auto& ex : train) {
      for (std::int64_t t = 0; t < ex.feats.rows(); ++t) {
        for (int c = 0; c < kNumBands; ++c) {
          mean[static_cast<std::size_t>(c)] += ex.feats.at(t, c);
        }
        ++n;
      }
    }
    for (auto& v : mean) v /= static_cast<double>(n);
    for (const auto& ex : train) {
      for (std::int64_t t = 0; t < ex.feats.rows(); ++t) {
        for (int c = 0; c < kNumBands; ++c) {
          const double d = ex.feats.at(t, c) - mean[static_cast<std::size_t>(c)];
          var[static_cast<std::size_t>(c)] += d * d;
        }
      }
    }
    std::vector<double> std_dev(kNumBands);
    for (int c = 0; c < kNumBands; ++c) {
      std_dev[static_cast<std::size_t>(c)] = std::sqrt(var[static_cast<std::size_t>(c)] /
                                                       static_cast<double>(n));
    }
    fold_input_standardization(m, mean, std_dev);
  }

  AdamState adam;
  adam.lr = cfg.lr;

  E2ETrainResult result;
  result.model = m;
  result.dev_metric_name = rationale_only ? "pooled_iou" : "macro_f1";

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::vector<int>> targets(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    targets[i] = gold_downsample(train[i].gold, static_cast<int>(train[i].feats.rows()));
  }

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng =
        Rng::derived(cfg.seed, fnv1a64("e2e-epoch") + static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order);

    E2EEpochLog log;
    log.epoch = epoch;
    std::size_t n_examples = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      ParameterSet grads;
      for (const auto& [name, t] : m.params) grads[name] = Tensor::zeros(t.shape);
      double batch_loss = 0.0;
      for (std::size_t i = start; i < stop; ++i) {
        const E2EExample& ex = train[order[i]];
        const E2ELoss l =
            e2e_loss_and_grad(m, ex.feats, ex.label, targets[order[i]], alpha_eff, grads);
        log.loss += l.loss;
        log.l_cls += l.l_cls;
        log.l_fd += l.l_fd;
        batch_loss += l.loss;
        ++n_examples;
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (auto& [name, g] : grads) {
        for (double& v : g.values) v *= inv;
      }
      result.batch_losses.push_back(batch_loss * inv);
      adam_step(m.params, grads, adam);
    }
    log.loss /= static_cast<double>(n_examples);
    log.l_cls /= static_cast<double>(n_examples);
    log.l_fd /= static_cast<double>(n_examples);
    log.dev_metric = e2e_dev_metric(m, dev, rationale_only);
    result.epochs.push_back(log);

    if (log.dev_metric > result.best_dev_metric) {
      result.best_dev_metric = log.dev_metric;
      result.best_epoch = epoch;
      result.model = m;
    }
  }
  return result;
}

// ---- checkpoint adapters -------------------------------------------------------

inline Checkpoint e2e_model_to_checkpoint(const E2EModel& m, std::uint64_t seed) {
  Checkpoint ckpt;
  ckpt.arch = "e2e-audio";
  ckpt.dims = {{"d_in", m.d_in}, {"d_h", m.d_h}, {"d_proj", m.d_proj}};
  ckpt.seed = seed;
  ckpt.params = m.params;
  return ckpt;
}

inline E2EModel e2e_model_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.arch != "e2e-audio") {
    throw Error(ErrorKind::kData, "checkpoint arch '" + ckpt.arch + "' is not e2e-audio");
  }
  for (const char* key : {"d_in", "d_h", "d_proj"}) {
    if (!ckpt.dims.contains(key)) {
      throw Error(ErrorKind::kData, std::string("e2e-audio checkpoint lacks ") + key);
    }
  }
  E2EModel m;
  m.d_in = ckpt.dims["d_in"].get<int>();
  m.d_h = ckpt.dims["d_h"].get<int>();
  m.d_proj = ckpt.dims["d_proj"].get<int>();
  m.params = ckpt.params;
  const std::int64_t din = m.d_in, dh = m.d_h, dp = m.d_proj;
  auto expect = [&](const char* name, std::vector<std::int64_t> shape) {
    if (!m.params.count(name)) {
      throw Error(ErrorKind::kData, std::string("e2e-audio checkpoint lacks ") + name);
    }
    if (m.params.at(name).shape != shape) {
      throw Error(ErrorKind::kData, std::string("e2e-audio checkpoint: bad shape for ") + name);
    }
  };
  expect("enc_w1", {dh, din});
  expect("enc_b1", {dh});
  expect("enc_w2", {dh, dh});
  expect("enc_b2", {dh});
  expect("cls_proj_w", {dp, dh});
  expect("cls_proj_b", {dp});
  expect("cls_w", {2, dp});
  expect("cls_b", {2});
  expect("fd_w", {2, dh});
  expect("fd_b", {2});
  return m;
}

}  // namespace ahsd

#endif  // AHSD_E2E_HPP_

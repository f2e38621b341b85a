// include/ahsd/text_model.hpp

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

#ifndef AHSD_TEXT_MODEL_HPP_
#define AHSD_TEXT_MODEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ahsd/checkpoint.hpp"
#include "ahsd/error.hpp"
#include "ahsd/metrics.hpp"
#include "ahsd/nnet.hpp"
#include "ahsd/rng.hpp"
#include "ahsd/tokenizer.hpp"
#include "ahsd/types.hpp"

namespace ahsd {

// Token-level view of one transcript: ids, the word each token came from,
// per-word rationale supervision, and the clip label.
struct TextExample {
  std::string id;
  std::vector<int> token_ids;
  std::vector<int> word_of_token;
  std::vector<std::uint8_t> word_rationale;
  int n_words = 0;
  int label = 0;
};

inline TextExample make_text_example(const std::string& id,
                                     const std::vector<WordSpan>& words, int label,
                                     const Vocab& vocab) {
  if (words.empty()) {
    throw Error(ErrorKind::kData, "make_text_example: no words in " + id);
  }
  TextExample ex;
  ex.id = id;
  ex.label = label;
  ex.n_words = static_cast<int>(words.size());
  for (int wi = 0; wi < ex.n_words; ++wi) {
    const auto& w = words[static_cast<std::size_t>(wi)];
    ex.word_rationale.push_back(static_cast<std::uint8_t>(w.rationale));
    for (const auto& tok : tokenize(w.text)) {
      ex.token_ids.push_back(vocab.id_of(tok));
      ex.word_of_token.push_back(wi);
    }
  }
  return ex;
}

struct TextModel {
  Vocab vocab;
  int d_model = 32;
  ParameterSet params;  // emb [V,d], att_p [d,d], att_q [d], cls_w [2,d], cls_b [2]
};

inline TextModel init_text_model(const Vocab& vocab, int d_model, std::uint64_t seed) {
  if (d_model < 1) throw Error(ErrorKind::kConfig, "init_text_model: d_model must be positive");
  TextModel m;
  m.vocab = vocab;
  m.d_model = d_model;
  const std::int64_t v = vocab.size();
  const std::int64_t d = d_model;
  Rng rng = Rng::derived(seed, fnv1a64("text-model-init"));
  m.params["att_p"] = glorot_uniform({d, d}, d, d, rng);
  m.params["att_q"] = glorot_uniform({d}, d, 1, rng);
  m.params["cls_b"] = Tensor::zeros({2});
  m.params["cls_w"] = glorot_uniform({2, d}, d, 2, rng);
  m.params["emb"] = glorot_uniform({v, d}, v, d, rng);
  return m;
}

struct TextForward {
  std::vector<double> embs;  // [n, d]
  AttentionForward att;
  std::vector<double> context;  // [d]
  Tensor logits;                // [1, 2]
};

inline TextForward text_forward(const TextModel& m, const std::vector<int>& token_ids) {
  if (token_ids.empty()) {
    throw Error(ErrorKind::kContract, "text_forward: no tokens");
  }
  const std::int64_t n = static_cast<std::int64_t>(token_ids.size());
  const std::int64_t d = m.d_model;
  const Tensor& emb = m.params.at("emb");
  TextForward f;
  f.embs.resize(static_cast<std::size_t>(n * d));
  for (std::int64_t i = 0; i < n; ++i) {
    const int id = token_ids[static_cast<std::size_t>(i)];
    if (id < 0 || id >= emb.rows()) {
      throw Error(ErrorKind::kContract, "text_forward: token id out of range");
    }
    std::copy_n(emb.values.data() + id * d, d, f.embs.data() + i * d);
  }
  f.att = attention_forward(m.params.at("att_p"), m.params.at("att_q"), f.embs, n, d);
  f.context.assign(static_cast<std::size_t>(d), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    const double a = f.att.weights[static_cast<std::size_t>(i)];
    const double* e = f.embs.data() + i * d;
    for (std::int64_t r = 0; r < d; ++r) f.context[static_cast<std::size_t>(r)] += a * e[r];
  }
  f.logits = Tensor::zeros({1, 2});
  affine_forward(m.params.at("cls_w"), m.params.at("cls_b"), f.context.data(),
                 f.logits.values.data());
  return f;
}

struct TextLoss {
  double loss = 0.0;
  double l_pred = 0.0;
  double l_att = 0.0;    // 0 when the example carries no rationale
  bool has_att = false;  // whether l_att contributed
};

// Composite objective: label cross-entropy plus lambda times the attention
// alignment term -sum_i r_i log a_i with r normalized over rationale tokens.
// Gradients accumulate into `grads` (same keys/shapes as m.params) so the
// caller can average over a batch.
inline TextLoss text_loss_and_grad(const TextModel& m, const TextExample& ex, double lambda,
                                   ParameterSet& grads) {
  const std::int64_t n = static_cast<std::int64_t>(ex.token_ids.size());
  const std::int64_t d = m.d_model;
  const TextForward f = text_forward(m, ex.token_ids);

  TextLoss out;
  const SoftmaxCrossEntropy ce = softmax_cross_entropy(f.logits, {ex.label});
  out.l_pred = ce.loss;

  // Normalized token rationale: tokens of flagged words share unit mass.
  std::vector<double> r(static_cast<std::size_t>(n), 0.0);
  double r_sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const int wi = ex.word_of_token[static_cast<std::size_t>(i)];
    if (ex.word_rationale[static_cast<std::size_t>(wi)]) {
      r[static_cast<std::size_t>(i)] = 1.0;
      r_sum += 1.0;
    }
  }
  std::vector<double> dweights(static_cast<std::size_t>(n), 0.0);
  if (r_sum > 0.0) {
    out.has_att = true;
    for (std::int64_t i = 0; i < n; ++i) {
      if (r[static_cast<std::size_t>(i)] == 0.0) continue;
      const double ri = r[static_cast<std::size_t>(i)] / r_sum;
      const double ai = std::max(f.att.weights[static_cast<std::size_t>(i)], 1e-300);
      out.l_att += -ri * std::log(ai);
      dweights[static_cast<std::size_t>(i)] += lambda * (-ri / ai);
    }
  }
  out.loss = out.l_pred + lambda * out.l_att;

  // Classifier head.
  std::vector<double> dcontext(static_cast<std::size_t>(d), 0.0);
  affine_backward(m.params.at("cls_w"), f.context.data(), ce.dlogits.values.data(),
                  grads.at("cls_w"), grads.at("cls_b"), dcontext.data());

  // Context = sum_i a_i e_i contributes to both d(weights) and d(embs).
  std::vector<double> dembs(static_cast<std::size_t>(n * d), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    const double a = f.att.weights[static_cast<std::size_t>(i)];
    const double* e = f.embs.data() + i * d;
    double* de = dembs.data() + i * d;
    double dot = 0.0;
    for (std::int64_t r2 = 0; r2 < d; ++r2) {
      dot += e[r2] * dcontext[static_cast<std::size_t>(r2)];
      de[r2] += a * dcontext[static_cast<std::size_t>(r2)];
    }
    dweights[static_cast<std::size_t>(i)] += dot;
  }

  attention_backward(m.params.at("att_p"), m.params.at("att_q"), f.embs, f.att, dweights, n, d,
                     grads.at("att_p"), grads.at("att_q"), dembs);

  Tensor& demb = grads.at("emb");
  for (std::int64_t i = 0; i < n; ++i) {
    const int id = ex.token_ids[static_cast<std::size_t>(i)];
    const double* src = dembs.data() + i * d;
    double* dst = demb.values.data() + id * d;
    for (std::int64_t r2 = 0; r2 < d; ++r2) dst[r2] += src[r2];
  }
  return out;
}

// Attention weight -> token mask at a strictly-above-uniform threshold.
inline std::vector<std::uint8_t> binarize_attention(const std::vector<double>& weights) {
  if (weights.empty()) return {};
  const double thr = 1.0 / static_cast<double>(weights.size());
  std::vector<std::uint8_t> bits(weights.size(), 0);
  for (std::size_t i = 0; i < weights.size(); ++i) bits[i] = weights[i] > thr ? 1 : 0;
  return bits;
}

// Token bits -> word bits by strict majority; an exact tie keeps the word off.
inline std::vector<std::uint8_t> vote_words(const std::vector<std::uint8_t>& token_bits,
                                            const std::vector<int>& word_of_token, int n_words) {
  if (token_bits.size() != word_of_token.size()) {
    throw Error(ErrorKind::kContract, "vote_words: bit/word maps differ in length");
  }
  std::vector<int> ones(static_cast<std::size_t>(n_words), 0);
  std::vector<int> total(static_cast<std::size_t>(n_words), 0);
  for (std::size_t i = 0; i < token_bits.size(); ++i) {
    const int wi = word_of_token[i];
    if (wi < 0 || wi >= n_words) {
      throw Error(ErrorKind::kContract, "vote_words: word index out of range");
    }
    ++total[static_cast<std::size_t>(wi)];
    ones[static_cast<std::size_t>(wi)] += token_bits[i];
  }
  std::vector<std::uint8_t> out(static_cast<std::size_t>(n_words), 0);
  for (int wi = 0; wi < n_words; ++wi) {
    out[static_cast<std::size_t>(wi)] =
        2 * ones[static_cast<std::size_t>(wi)] > total[static_cast<std::size_t>(wi)] ? 1 : 0;
  }
  return out;
}

// ---- training ----------------------------------------------------------------

struct TextTrainConfig {
  std::uint64_t seed = 0;
  int d_model = 32;
  double lr = 3e-3;
  int epochs = 10;
  int batch_size = 64;
  double lambda_att = 0.1;
};

inline void validate_text_train_config(const TextTrainConfig& cfg) {
  if (cfg.d_model < 1 || cfg.epochs < 1 || cfg.batch_size < 1) {
    throw Error(ErrorKind::kConfig, "text train config: sizes must be positive");
  }
  if (!(cfg.lr > 0.0) || !std::isfinite(cfg.lr)) {
    throw Error(ErrorKind::kConfig, "text train config: lr must be positive");
  }
  if (cfg.lambda_att < 0.0 || !std::isfinite(cfg.lambda_att)) {
    throw Error(ErrorKind::kConfig, "text train config: lambda_att must be non-negative");
  }
}

struct TextEpochLog {
  int epoch = 0;
  double loss = 0.0;
  double l_pred = 0.0;
  double l_att = 0.0;
  double dev_macro_f1 = 0.0;
};

struct TextTrainResult {
  TextModel model;  // parameters of the best epoch
  std::vector<TextEpochLog> epochs;
  int best_epoch = -1;
  double best_dev_macro_f1 = -1.0;
};

inline double dev_macro_f1(const TextModel& m, const std::vector<TextExample>& dev) {
  std::vector<int> y_true, y_pred;
  for (const auto& ex : dev) {
    const TextForward f = text_forward(m, ex.token_ids);
    y_true.push_back(ex.label);
    y_pred.push_back(f.logits.at(0, 1) > f.logits.at(0, 0) ? 1 : 0);
  }
  return cls_metrics(y_true, y_pred).macro_f1;
}

inline TextTrainResult train_text_model(const std::vector<TextExample>& train,
                                        const std::vector<TextExample>& dev, const Vocab& vocab,
                                        const TextTrainConfig& cfg) {
  validate_text_train_config(cfg);
  if (train.empty() || dev.empty()) {
    throw Error(ErrorKind::kData, "train_text_model: empty split");
  }
  TextModel m = init_text_model(vocab, cfg.d_model, cfg.seed);
  AdamState adam;
  adam.lr = cfg.lr;

  TextTrainResult result;
  result.model = m;

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng = Rng::derived(cfg.seed, fnv1a64("text-epoch") + static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order);

    TextEpochLog log;
    log.epoch = epoch;
    std::size_t n_examples = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      ParameterSet grads;
      for (const auto& [name, t] : m.params) grads[name] = Tensor::zeros(t.shape);
      for (std::size_t i = start; i < stop; ++i) {
        const TextLoss l = text_loss_and_grad(m, train[order[i]], cfg.lambda_att, grads);
        log.loss += l.loss;
        log.l_pred += l.l_pred;
        log.l_att += l.l_att;
        ++n_examples;
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (auto& [name, g] : grads) {
        for (double& v : g.values) v *= inv;
      }
      adam_step(m.params, grads, adam);
    }
    log.loss /= static_cast<double>(n_examples);
    log.l_pred /= static_cast<double>(n_examples);
    log.l_att /= static_cast<double>(n_examples);
    log.dev_macro_f1 = dev_macro_f1(m, dev);
    result.epochs.push_back(log);

    if (log.dev_macro_f1 > result.best_dev_macro_f1) {
      result.best_dev_macro_f1 = log.dev_macro_f1;
      result.best_epoch = epoch;
      result.model = m;
    }
  }
  return result;
}

// ---- checkpoint adapters ------------------------------------------------------

inline Checkpoint text_model_to_checkpoint(const TextModel& m, std::uint64_t seed) {
  Checkpoint ckpt;
  ckpt.arch = "cascade-text";
  ckpt.dims = {{"d_model", m.d_model},
               {"vocab_size", m.vocab.size()},
               {"vocab", vocab_to_json(m.vocab)}};
  ckpt.seed = seed;
  ckpt.params = m.params;
  return ckpt;
}

inline TextModel text_model_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.arch != "cascade-text") {
    throw Error(ErrorKind::kData, "checkpoint arch '" + ckpt.arch + "' is not cascade-text");
  }
  if (!ckpt.dims.contains("d_model") || !ckpt.dims.contains("vocab")) {
    throw Error(ErrorKind::kData, "cascade-text checkpoint lacks d_model/vocab");
  }
  TextModel m;
  m.d_model = ckpt.dims["d_model"].get<int>();
  m.vocab = vocab_from_json(ckpt.dims["vocab"]);
  m.params = ckpt.params;
  const char* needed[] = {"emb", "att_p", "att_q", "cls_w", "cls_b"};
  for (const char* name : needed) {
    if (!m.params.count(name)) {
      throw Error(ErrorKind::kData, std::string("cascade-text checkpoint lacks ") + name);
    }
  }
  const std::int64_t d = m.d_model;
  const std::int64_t v = m.vocab.size();
  auto expect = [&](const char* name, std::vector<std::int64_t> shape) {
    if (m.params.at(name).shape != shape) {
      throw Error(ErrorKind::kData, std::string("cascade-text checkpoint: bad shape for ") + name);
    }
  };
  expect("emb", {v, d});
  expect("att_p", {d, d});
  expect("att_q", {d});
  expect("cls_w", {2, d});
  expect("cls_b", {2});
  return m;
}

}  // namespace ahsd

#endif  // AHSD_TEXT_MODEL_HPP_

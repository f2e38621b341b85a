// tests/test_e2e.cpp

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
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ahsd/corpus.hpp"
#include "ahsd/e2e.hpp"
#include "ahsd/features.hpp"
#include "test_support.hpp"

using namespace ahsd;

namespace {

// Quadratic-time DFT as the oracle for the fast transform.
void naive_dft(const std::vector<double>& x, std::vector<double>& re, std::vector<double>& im) {
  const std::size_t n = x.size();
  re.assign(n, 0.0);
  im.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = -2.0 * M_PI * static_cast<double>(k * j) / static_cast<double>(n);
      re[k] += x[j] * std::cos(ang);
      im[k] += x[j] * std::sin(ang);
    }
  }
}

E2EExample fabricate_example(Rng& rng, const std::string& id, int t_total) {
  E2EExample ex;
  ex.id = id;
  ex.duration_ms = 20 * t_total;  // 10 ms grid gets exactly 2 frames per row
  ex.feats = Tensor::zeros({t_total, kNumBands});
  for (auto& v : ex.feats.values) v = rng.gaussian();
  ex.gold.bits.assign(static_cast<std::size_t>(2 * t_total), 0);
  for (int t = 0; t < t_total; ++t) {
    const std::uint8_t bit = rng.uniform() < 0.3 ? 1 : 0;
    ex.gold.bits[static_cast<std::size_t>(2 * t)] = bit;
    ex.gold.bits[static_cast<std::size_t>(2 * t + 1)] = bit;
  }
  ex.label = rng.uniform() < 0.5 ? 1 : 0;
  return ex;
}

}  // namespace

TEST_CASE("fft matches a naive dft") {
  Rng rng(17);
  for (int n : {8, 64, 256}) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    std::vector<double> re(x), im(x.size(), 0.0);
    feat_detail::fft_radix2(re, im);
    std::vector<double> ore, oim;
    naive_dft(x, ore, oim);
    for (std::size_t k = 0; k < x.size(); ++k) {
      CHECK(re[k] == Catch::Approx(ore[k]).margin(1e-8));
      CHECK(im[k] == Catch::Approx(oim[k]).margin(1e-8));
    }
  }
  std::vector<double> re(12, 0.0), im(12, 0.0);
  CHECK_THROWS_AS(feat_detail::fft_radix2(re, im), Error);
}

TEST_CASE("feature framing: full windows plus one padded tail") {
  CHECK(feature_frame_count(22050) == 50);  // one second
  CHECK(feature_frame_count(kFeatWindow) == 2);
  CHECK(feature_frame_count(kFeatWindow - 1) == 1);
  CHECK(feature_frame_count(kFeatHop) == 1);
  CHECK(feature_frame_count(kFeatWindow + kFeatHop) == 3);
  CHECK_THROWS_AS(feature_frame_count(kFeatHop - 1), Error);

  std::vector<double> second(22050, 0.0);
  const Tensor feats = extract_features(second);
  REQUIRE(feats.rows() == 50);
  REQUIRE(feats.cols() == kNumBands);
}

TEST_CASE("features: silence hits the log floor, tones hit their band") {
  std::vector<double> silence(22050, 0.0);
  const Tensor quiet = extract_features(silence);
  for (const double v : quiet.values) {
    CHECK(v == Catch::Approx(std::log(1e-6)).epsilon(1e-12));
  }

  // 5 kHz sits in bin 5000/22050*1024 ~ 232, i.e. band 7.
  std::vector<double> tone(22050);
  for (std::size_t i = 0; i < tone.size(); ++i) {
    tone[i] = 0.5 * std::sin(2.0 * M_PI * 5000.0 * static_cast<double>(i) / 22050.0);
  }
  const Tensor feats = extract_features(tone);
  for (std::int64_t t = 0; t + 1 < feats.rows(); ++t) {  // skip the padded tail
    int best = 0;
    for (int b = 1; b < kNumBands; ++b) {
      if (feats.at(t, b) > feats.at(t, best)) best = b;
    }
    CHECK(best == 7);
  }
}

TEST_CASE("grid bridging: downsample picks the center bit") {
  // Mask for span [100, 230) on a 300 ms clip: bits 10..22.
  const FrameRationale gold = spans_to_frames({{"w", 100, 230, 1}}, 300);
  REQUIRE(gold.size() == 30);
  const std::vector<int> t = gold_downsample(gold, 15);
  const std::vector<int> expect = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0};
  CHECK(t == expect);
}

TEST_CASE("grid bridging: resample doubles each analysis frame") {
  const FrameRationale mask = grid_resample({0, 1, 1, 0}, 8);
  CHECK(mask.bits == std::vector<std::uint8_t>({0, 0, 1, 1, 1, 1, 0, 0}));
  // Clamping covers masks one frame longer than twice the analysis count.
  const FrameRationale odd = grid_resample({0, 1}, 5);
  CHECK(odd.bits == std::vector<std::uint8_t>({0, 0, 1, 1, 1}));
}

TEST_CASE("grid bridging: block-constant masks round trip exactly") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = static_cast<int>(rng.uniform_int(2, 120));
    FrameRationale gold;
    gold.bits.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; i += 2) {
      const std::uint8_t bit = rng.uniform() < 0.4 ? 1 : 0;
      gold.bits[static_cast<std::size_t>(i)] = bit;
      if (i + 1 < m) gold.bits[static_cast<std::size_t>(i + 1)] = bit;
    }
    const int t_total = (m + 1) / 2;
    const std::vector<int> down = gold_downsample(gold, t_total);
    std::vector<std::uint8_t> enc(down.size());
    for (std::size_t i = 0; i < down.size(); ++i) enc[i] = static_cast<std::uint8_t>(down[i]);
    const FrameRationale back = grid_resample(enc, m);
    CHECK(back.bits == gold.bits);
  }
}

TEST_CASE("e2e gradient matches finite differences on a real clip") {
  // A genuine one-second synthesized clip, standardized features, small
  // dimensions to keep the parameter sweep quick.
  CorpusConfig ccfg;
  ccfg.seed = 9;
  const Lexicon lex = build_lexicon(ccfg.seed, ccfg.lexicon_size, ccfg.hate_fraction);
  const SynthClip clip = synth_clip("gradcheck", {2, 9, 17}, lex, ccfg);
  Tensor feats = extract_features(clip.audio.samples);
  for (std::int64_t c = 0; c < feats.cols(); ++c) {
    double mu = 0.0, var = 0.0;
    for (std::int64_t t = 0; t < feats.rows(); ++t) mu += feats.at(t, c);
    mu /= static_cast<double>(feats.rows());
    for (std::int64_t t = 0; t < feats.rows(); ++t) {
      const double d = feats.at(t, c) - mu;
      var += d * d;
    }
    const double sd = std::max(std::sqrt(var / static_cast<double>(feats.rows())), 1e-8);
    for (std::int64_t t = 0; t < feats.rows(); ++t) {
      feats.at(t, c) = (feats.at(t, c) - mu) / sd;
    }
  }

  E2EModel m = init_e2e_model(3, kNumBands, 16, 8);
  const std::vector<int> targets =
      gold_downsample(clip.annotation.frames, static_cast<int>(feats.rows()));
  const int label = clip.annotation.label;

  for (const double alpha : {0.5, 1.0, 0.0}) {
    ParameterSet analytic;
    for (const auto& [name, t] : m.params) analytic[name] = Tensor::zeros(t.shape);
    e2e_loss_and_grad(m, feats, label, targets, alpha, analytic);
    auto loss_fn = [&](const ParameterSet& params) {
      E2EModel probe = m;
      probe.params = params;
      ParameterSet scratch;
      for (const auto& [name, t] : params) scratch[name] = Tensor::zeros(t.shape);
      return e2e_loss_and_grad(probe, feats, label, targets, alpha, scratch).loss;
    };
    const double max_rel = grad_check(loss_fn, analytic, m.params, 1e-5);
    INFO("alpha = " << alpha);
    CHECK(max_rel < 1e-4);
  }
}

TEST_CASE("standardization folding is an exact reparameterization") {
  Rng rng(41);
  E2EModel folded = init_e2e_model(8, kNumBands, 12, 6);
  const E2EModel plain = folded;
  std::vector<double> mean(kNumBands), sd(kNumBands);
  for (int c = 0; c < kNumBands; ++c) {
    mean[static_cast<std::size_t>(c)] = rng.uniform(-5.0, 5.0);
    sd[static_cast<std::size_t>(c)] = rng.uniform(0.5, 3.0);
  }
  fold_input_standardization(folded, mean, sd);

  Tensor raw = Tensor::zeros({7, kNumBands});
  for (auto& v : raw.values) v = rng.uniform(-8.0, 8.0);
  Tensor standardized = raw;
  for (std::int64_t t = 0; t < raw.rows(); ++t) {
    for (int c = 0; c < kNumBands; ++c) {
      standardized.at(t, c) =
          (raw.at(t, c) - mean[static_cast<std::size_t>(c)]) / sd[static_cast<std::size_t>(c)];
    }
  }
  const E2EForward a = e2e_forward(folded, raw);
  const E2EForward b = e2e_forward(plain, standardized);
  for (int k = 0; k < 2; ++k) {
    CHECK(a.cls_logits.at(0, k) == Catch::Approx(b.cls_logits.at(0, k)).margin(1e-9));
  }
  for (std::size_t i = 0; i < a.h2.size(); ++i) {
    REQUIRE(std::abs(a.h2[i] - b.h2[i]) < 1e-9);
  }
}

TEST_CASE("alpha endpoints collapse to the single-head modes bitwise") {
  Rng rng(55);
  std::vector<E2EExample> train, dev;
  for (int i = 0; i < 24; ++i) {
    train.push_back(fabricate_example(rng, "tr_" + std::to_string(i),
                                      static_cast<int>(rng.uniform_int(8, 20))));
  }
  for (int i = 0; i < 6; ++i) {
    dev.push_back(fabricate_example(rng, "dv_" + std::to_string(i),
                                    static_cast<int>(rng.uniform_int(8, 20))));
  }

  auto run = [&](const std::string& mode, double alpha, int epochs) {
    E2ETrainConfig cfg;
    cfg.seed = 12;
    cfg.epochs = epochs;
    cfg.batch_size = 8;
    cfg.d_h = 12;
    cfg.d_proj = 6;
    cfg.mode = mode;
    cfg.alpha = alpha;
    return train_e2e(train, dev, cfg);
  };

  SECTION("alpha one equals cls-only") {
    const E2ETrainResult a = run("joint", 1.0, 2);
    const E2ETrainResult b = run("cls-only", 0.5, 2);
    REQUIRE(a.batch_losses.size() == b.batch_losses.size());
    for (std::size_t i = 0; i < a.batch_losses.size(); ++i) {
      CHECK(a.batch_losses[i] == b.batch_losses[i]);
    }
    for (const auto& [name, t] : a.model.params) {
      CHECK(b.model.params.at(name).values == t.values);
    }
  }

  SECTION("alpha zero equals fd-only") {
    const E2ETrainResult a = run("joint", 0.0, 1);
    const E2ETrainResult b = run("fd-only", 0.5, 1);
    REQUIRE(a.batch_losses.size() == b.batch_losses.size());
    for (std::size_t i = 0; i < a.batch_losses.size(); ++i) {
      CHECK(a.batch_losses[i] == b.batch_losses[i]);
    }
    for (const auto& [name, t] : a.model.params) {
      CHECK(b.model.params.at(name).values == t.values);
    }
  }

  SECTION("unknown mode is rejected") {
    E2ETrainConfig cfg;
    cfg.mode = "both";
    CHECK_THROWS_AS(validate_e2e_train_config(cfg), Error);
  }
}

TEST_CASE("e2e training separates a small synthetic corpus") {
  ahsd_test::TempDir tmp("e2e_train");
  CorpusConfig cfg;
  cfg.seed = 13;
  cfg.n_train = 120;
  cfg.n_dev = 24;
  cfg.n_test = 2;
  cfg.lexicon_size = 12;
  cfg.hate_fraction = 0.25;
  generate_corpus(cfg, tmp.path().string());
  const auto train = load_e2e_examples((tmp.path() / "train.jsonl").string());
  const auto dev = load_e2e_examples((tmp.path() / "dev.jsonl").string());

  E2ETrainConfig tcfg;
  tcfg.seed = 1;
  tcfg.epochs = 50;
  tcfg.batch_size = 16;
  const E2ETrainResult result = train_e2e(train, dev, tcfg);
  REQUIRE(result.epochs.size() == 50);
  CHECK(result.best_dev_metric >= 0.85);
  CHECK(result.dev_metric_name == "macro_f1");
  CHECK(result.epochs.back().loss < result.epochs.front().loss);

  // Ungated rationale quality: pooled IoU over dev should clear a loose bar.
  long long inter = 0, uni = 0;
  for (const auto& ex : dev) {
    const FrameRationale pred = e2e_frame_mask(result.model, ex.feats, ex.duration_ms);
    REQUIRE(pred.size() == ex.gold.size());
    for (int i = 0; i < pred.size(); ++i) {
      const bool p = pred.bits[static_cast<std::size_t>(i)] != 0;
      const bool g = ex.gold.bits[static_cast<std::size_t>(i)] != 0;
      inter += p && g;
      uni += p || g;
    }
  }
  REQUIRE(uni > 0);
  CHECK(static_cast<double>(inter) / static_cast<double>(uni) >= 0.5);

  // Gated prediction behaves: scores are probabilities, frames only on
  // positive verdicts, intervals grid-aligned within the clip.
  for (const auto& ex : dev) {
    const PredictionRecord rec = e2e_predict(result.model, ex.feats, ex.id, ex.duration_ms);
    CHECK(rec.score >= 0.0);
    CHECK(rec.score <= 1.0);
    if (rec.label_pred == 0) {
      CHECK(rec.frames.empty());
    } else {
      CHECK_NOTHROW(intervals_to_frames(rec.frames, ex.duration_ms));
    }
  }
}

TEST_CASE("e2e checkpoint round trip") {
  ahsd_test::TempDir tmp("e2e_ckpt");
  const E2EModel m = init_e2e_model(77, kNumBands, 24, 12);
  const auto path = tmp.path() / "e2e.ckpt.json";
  save_checkpoint(e2e_model_to_checkpoint(m, 77), path);
  const E2EModel back = e2e_model_from_checkpoint(load_checkpoint(path));
  CHECK(back.d_h == 24);
  CHECK(back.d_proj == 12);
  for (const auto& [name, t] : m.params) {
    CHECK(back.params.at(name).values == t.values);
  }

  Checkpoint wrong = e2e_model_to_checkpoint(m, 77);
  wrong.arch = "cascade-text";
  CHECK_THROWS_AS(e2e_model_from_checkpoint(wrong), Error);

  Checkpoint misshapen = e2e_model_to_checkpoint(m, 77);
  misshapen.params["fd_w"] = Tensor::zeros({3, 24});
  CHECK_THROWS_AS(e2e_model_from_checkpoint(misshapen), Error);
}

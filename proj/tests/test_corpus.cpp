// tests/test_corpus.cpp

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
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ahsd/asr_sim.hpp"
#include "ahsd/corpus.hpp"
#include "ahsd/lexicon.hpp"
#include "ahsd/wav.hpp"
#include "test_support.hpp"

using namespace ahsd;

namespace {

// Goertzel power of a real signal at frequency f — an oracle for "the word's
// tone stack actually lands where the lexicon says it does".
double goertzel_power(const std::vector<double>& x, std::size_t begin, std::size_t end,
                      double f, int sample_rate) {
  const double w = 2.0 * M_PI * f / sample_rate;
  const double c = 2.0 * std::cos(w);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    s0 = x[i] + c * s1 - s2;
    s2 = s1;
    s1 = s0;
  }
  return s1 * s1 + s2 * s2 - c * s1 * s2;
}

double rms(const std::vector<double>& x, std::size_t begin, std::size_t end) {
  double p = 0.0;
  for (std::size_t i = begin; i < end; ++i) p += x[i] * x[i];
  return std::sqrt(p / static_cast<double>(end - begin));
}

CorpusConfig tiny_config() {
  CorpusConfig cfg;
  cfg.seed = 11;
  cfg.n_train = 6;
  cfg.n_dev = 2;
  cfg.n_test = 2;
  cfg.lexicon_size = 12;
  cfg.hate_fraction = 0.25;
  return cfg;
}

}  // namespace

TEST_CASE("lexicon: default shape") {
  const Lexicon lex = build_lexicon(7, 40, 0.2);
  REQUIRE(lex.words.size() == 40);
  int n_hate = 0;
  std::set<std::string> texts;
  for (int k = 0; k < 40; ++k) {
    const auto& w = lex.words[static_cast<std::size_t>(k)];
    CHECK(w.base_freq == Catch::Approx(200.0 + 40.0 * k));
    n_hate += w.is_hate ? 1 : 0;
    texts.insert(w.text);
  }
  CHECK(n_hate == 8);
  CHECK(texts.size() == 40);  // unique names
  CHECK(lex.words.front().base_freq == 200.0);
  CHECK(lex.words.back().base_freq == 1760.0);

  // Names are kind-prefixed counters in lexicon order.
  int h = 0, w = 0;
  for (const auto& e : lex.words) {
    char buf[16];
    if (e.is_hate) {
      std::snprintf(buf, sizeof(buf), "h%02d", h++);
    } else {
      std::snprintf(buf, sizeof(buf), "w%02d", w++);
    }
    CHECK(e.text == buf);
  }
}

TEST_CASE("lexicon: hate words never share a band signature with normal words") {
  for (std::uint64_t seed : {0ULL, 1ULL, 7ULL, 123ULL}) {
    const Lexicon lex = build_lexicon(seed, 40, 0.2);
    std::set<std::tuple<int, int, int>> hate_sigs, normal_sigs;
    for (const auto& e : lex.words) {
      const auto s = lexicon_detail::signature_of(e.base_freq);
      (e.is_hate ? hate_sigs : normal_sigs).insert({s.b1, s.b2, s.b3});
    }
    for (const auto& s : hate_sigs) {
      CHECK(normal_sigs.count(s) == 0);
    }
  }
}

TEST_CASE("lexicon: determinism and seed sensitivity") {
  const Lexicon a = build_lexicon(3, 40, 0.2);
  const Lexicon b = build_lexicon(3, 40, 0.2);
  REQUIRE(a.words.size() == b.words.size());
  for (std::size_t i = 0; i < a.words.size(); ++i) {
    CHECK(a.words[i].text == b.words[i].text);
    CHECK(a.words[i].is_hate == b.words[i].is_hate);
  }
  // Some seed pair must pick different hate sets, else the seed is dead.
  bool any_diff = false;
  for (std::uint64_t s = 0; s < 20 && !any_diff; ++s) {
    const Lexicon c = build_lexicon(s, 40, 0.2);
    for (std::size_t i = 0; i < a.words.size(); ++i) {
      any_diff = any_diff || c.words[i].is_hate != a.words[i].is_hate;
    }
  }
  CHECK(any_diff);
}

TEST_CASE("lexicon: degenerate fractions are rejected") {
  CHECK_THROWS_AS(build_lexicon(0, 1, 0.5), Error);
  CHECK_THROWS_AS(build_lexicon(0, 40, 0.0), Error);
  CHECK_THROWS_AS(build_lexicon(0, 40, 1.0), Error);
  CHECK_THROWS_AS(build_lexicon(0, 4, 0.05), Error);   // rounds to zero hate words
  CHECK_THROWS_AS(build_lexicon(0, 4, 0.99), Error);   // rounds to the whole lexicon
  CHECK_NOTHROW(build_lexicon(0, 2, 0.4));             // rounds to exactly one
}

TEST_CASE("wav: round trip preserves shape and quantizes within half a step") {
  ahsd_test::TempDir tmp("wav_rt");
  Rng rng(99);
  std::vector<double> samples(4410);
  for (auto& s : samples) s = rng.uniform(-1.2, 1.2);  // exercise clamping too

  const auto path = tmp.path() / "rt.wav";
  write_wav(path, samples, kSampleRate);
  const WavData back = read_wav(path);
  REQUIRE(back.sample_rate == kSampleRate);
  REQUIRE(back.samples.size() == samples.size());
  const double step = 0.5 / 32767.0 + 1e-12;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double expect = std::min(1.0, std::max(-1.0, samples[i]));
    CHECK(std::abs(back.samples[i] - expect) <= step);
  }
}

TEST_CASE("wav: malformed and missing files") {
  ahsd_test::TempDir tmp("wav_bad");
  const std::string junk = (tmp.path() / "junk.wav").string();
  {
    std::ofstream out(junk, std::ios::binary);
    out << "this is not a wav file at all, nowhere near one";
  }
  CHECK_THROWS_AS(read_wav(junk), Error);
  try {
    read_wav(junk);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kData);
  }
  try {
    read_wav((tmp.path() / "absent.wav").string());
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
  }
}

TEST_CASE("synth: timing layout and annotation consistency") {
  CorpusConfig cfg;
  cfg.seed = 21;
  const Lexicon lex = build_lexicon(cfg.seed, cfg.lexicon_size, cfg.hate_fraction);
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(1000 + static_cast<std::uint64_t>(trial));
    const int n = static_cast<int>(rng.uniform_int(1, 7));
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (auto& i : idx) i = static_cast<int>(rng.uniform_int(0, cfg.lexicon_size - 1));
    const SynthClip clip = synth_clip("t_" + std::to_string(trial), idx, lex, cfg);

    const auto& words = clip.annotation.transcript.words;
    REQUIRE(static_cast<int>(words.size()) == n);
    CHECK(words.front().start_ms == 0);
    int any_rat = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      const int dur = words[i].end_ms - words[i].start_ms;
      CHECK(dur >= cfg.min_word_ms);
      CHECK(dur <= cfg.max_word_ms);
      if (i > 0) {
        const int gap = words[i].start_ms - words[i - 1].end_ms;
        CHECK(gap >= cfg.min_gap_ms);
        CHECK(gap <= cfg.max_gap_ms);
      }
      CHECK(words[i].rationale ==
            (lex.words[static_cast<std::size_t>(idx[i])].is_hate ? 1 : 0));
      any_rat |= words[i].rationale;
    }
    CHECK(clip.annotation.label == any_rat);

    const int duration = words.back().end_ms;
    const FrameRationale expect = spans_to_frames(words, duration);
    CHECK(clip.annotation.frames.bits == expect.bits);
    CHECK(static_cast<int>(clip.audio.samples.size()) ==
          ms_to_sample(duration, cfg.sample_rate));
    for (double s : clip.audio.samples) {
      REQUIRE(s <= 1.0);
      REQUIRE(s >= -1.0);
    }
  }
}

TEST_CASE("synth: deterministic per id, distinct across ids") {
  CorpusConfig cfg;
  cfg.seed = 5;
  const Lexicon lex = build_lexicon(cfg.seed, cfg.lexicon_size, cfg.hate_fraction);
  const std::vector<int> idx = {0, 5, 9, 14};
  const SynthClip a = synth_clip("same", idx, lex, cfg);
  const SynthClip b = synth_clip("same", idx, lex, cfg);
  REQUIRE(a.audio.samples == b.audio.samples);
  REQUIRE(a.annotation.transcript.words.size() == b.annotation.transcript.words.size());
  const SynthClip c = synth_clip("other", idx, lex, cfg);
  CHECK(a.audio.samples != c.audio.samples);
}

TEST_CASE("synth: tone energy sits at the word's harmonics") {
  CorpusConfig cfg;
  cfg.seed = 2;
  cfg.snr_db = 120.0;  // effectively clean
  const Lexicon lex = build_lexicon(cfg.seed, cfg.lexicon_size, cfg.hate_fraction);
  const int k = 6;  // 440 Hz fundamental
  const SynthClip clip = synth_clip("tone", {k, k}, lex, cfg);
  const auto& w = clip.annotation.transcript.words[0];
  const auto s0 = static_cast<std::size_t>(ms_to_sample(w.start_ms, cfg.sample_rate));
  const auto s1 = static_cast<std::size_t>(ms_to_sample(w.end_ms, cfg.sample_rate));
  const double f = lex.words[k].base_freq;
  const double p1 = goertzel_power(clip.audio.samples, s0, s1, f, cfg.sample_rate);
  const double p2 = goertzel_power(clip.audio.samples, s0, s1, 2.0 * f, cfg.sample_rate);
  const double p3 = goertzel_power(clip.audio.samples, s0, s1, 3.0 * f, cfg.sample_rate);
  const double off1 = goertzel_power(clip.audio.samples, s0, s1, f * 1.37, cfg.sample_rate);
  const double off2 = goertzel_power(clip.audio.samples, s0, s1, 5137.0, cfg.sample_rate);
  CHECK(p1 > 100.0 * off1);
  CHECK(p1 > 100.0 * off2);
  CHECK(p2 > 10.0 * off1);
  CHECK(p3 > 10.0 * off1);
  // Harmonic rolloff 1 : 0.5 : 0.25 in amplitude, i.e. 4x per step in power.
  CHECK(p1 / p2 == Catch::Approx(4.0).margin(1.0));
  CHECK(p2 / p3 == Catch::Approx(4.0).margin(1.0));
}

TEST_CASE("synth: words are loud, gaps are noise-quiet at 30 dB") {
  CorpusConfig cfg;
  cfg.seed = 3;
  const Lexicon lex = build_lexicon(cfg.seed, cfg.lexicon_size, cfg.hate_fraction);
  const SynthClip clip = synth_clip("snr", {1, 2, 3}, lex, cfg);
  const auto& words = clip.annotation.transcript.words;
  const auto w0 = static_cast<std::size_t>(ms_to_sample(words[0].start_ms, cfg.sample_rate));
  const auto w1 = static_cast<std::size_t>(ms_to_sample(words[0].end_ms, cfg.sample_rate));
  const auto g0 = w1;
  const auto g1 = static_cast<std::size_t>(ms_to_sample(words[1].start_ms, cfg.sample_rate));
  REQUIRE(g1 > g0);
  const double word_rms = rms(clip.audio.samples, w0, w1);
  const double gap_rms = rms(clip.audio.samples, g0, g1);
  CHECK(word_rms > 5.0 * gap_rms);
  CHECK(gap_rms > 0.0);  // noise reaches the silences
}

TEST_CASE("generate_corpus: layout, manifest consistency, byte-stable reruns") {
  ahsd_test::TempDir tmp("gen");
  const CorpusConfig cfg = tiny_config();
  const auto dir_a = (tmp.path() / "a").string();
  const auto dir_b = (tmp.path() / "b").string();
  generate_corpus(cfg, dir_a);
  generate_corpus(cfg, dir_b);

  namespace fs = std::filesystem;
  for (const char* split : {"train", "dev", "test"}) {
    REQUIRE(fs::exists(fs::path(dir_a) / (std::string(split) + ".jsonl")));
  }
  REQUIRE(fs::exists(fs::path(dir_a) / "summary.json"));

  const auto train = read_manifest((fs::path(dir_a) / "train.jsonl").string());
  const auto dev = read_manifest((fs::path(dir_a) / "dev.jsonl").string());
  const auto test = read_manifest((fs::path(dir_a) / "test.jsonl").string());
  REQUIRE(static_cast<int>(train.size()) == cfg.n_train);
  REQUIRE(static_cast<int>(dev.size()) == cfg.n_dev);
  REQUIRE(static_cast<int>(test.size()) == cfg.n_test);
  CHECK(train[0].id == "train_000000");
  CHECK(dev[1].id == "dev_000001");
  for (const auto& rec : train) {
    CHECK(rec.split == "train");
    const WavData audio = read_wav(fs::path(dir_a) / rec.wav);
    CHECK(audio.sample_rate == cfg.sample_rate);
    CHECK(static_cast<int>(audio.samples.size()) ==
          ms_to_sample(rec.duration_ms(), cfg.sample_rate));
  }

  for (const char* name : {"train.jsonl", "dev.jsonl", "test.jsonl", "summary.json"}) {
    CHECK(ahsd_test::slurp(fs::path(dir_a) / name) == ahsd_test::slurp(fs::path(dir_b) / name));
  }
  for (const auto& rec : train) {
    CHECK(ahsd_test::slurp(fs::path(dir_a) / rec.wav) ==
          ahsd_test::slurp(fs::path(dir_b) / rec.wav));
  }
}

TEST_CASE("manifest: malformed records are rejected") {
  ahsd_test::TempDir tmp("manifest_bad");
  auto write_lines = [&](const std::string& name, const std::string& body) {
    const auto p = (tmp.path() / name).string();
    std::ofstream out(p, std::ios::binary);
    out << body;
    return p;
  };
  CHECK_THROWS_AS(read_manifest(write_lines("a.jsonl", "not json\n")), Error);
  CHECK_THROWS_AS(read_manifest(write_lines("b.jsonl", "{\"id\":\"x\"}\n")), Error);
  // Label says hate but no word carries a rationale.
  CHECK_THROWS_AS(
      read_manifest(write_lines(
          "c.jsonl",
          R"({"id":"x","wav":"wav/x.wav","label":1,"split":"train","words":[{"text":"w00","start_ms":0,"end_ms":100,"rationale":0}]})"
          "\n")),
      Error);
  // Overlapping spans.
  CHECK_THROWS_AS(
      read_manifest(write_lines(
          "d.jsonl",
          R"({"id":"x","wav":"wav/x.wav","label":0,"split":"train","words":[{"text":"a","start_ms":0,"end_ms":100,"rationale":0},{"text":"b","start_ms":50,"end_ms":150,"rationale":0}]})"
          "\n")),
      Error);
  CHECK_THROWS_AS(read_manifest((tmp.path() / "missing.jsonl").string()), Error);
}

TEST_CASE("corruption: identity config reproduces the gold transcript") {
  Transcript gold;
  gold.words = {{"w00", 0, 200, 0}, {"h01", 260, 500, 1}, {"w02", 550, 800, 0}};
  AsrNoiseConfig cfg;
  cfg.sub_rate = cfg.del_rate = cfg.ins_rate = 0.0;
  cfg.jitter_sigma_ms = 0.0;
  const CorruptionResult r = corrupt_transcript("c0", gold, {"w00", "h01", "w02", "w03"}, cfg);
  REQUIRE(r.hyp.words.size() == gold.words.size());
  for (std::size_t i = 0; i < gold.words.size(); ++i) {
    CHECK(r.hyp.words[i].text == gold.words[i].text);
    CHECK(r.hyp.words[i].start_ms == gold.words[i].start_ms);
    CHECK(r.hyp.words[i].end_ms == gold.words[i].end_ms);
  }
  CHECK(r.achieved_wer == 0.0);
}

TEST_CASE("corruption: saturated rates") {
  Transcript gold;
  gold.words = {{"w00", 0, 200, 0}, {"w01", 260, 500, 0}, {"h00", 560, 800, 1}};
  const std::vector<std::string> vocab = {"w00", "w01", "w02", "h00", "h01"};

  SECTION("sub_rate one replaces every word with a different one") {
    AsrNoiseConfig cfg;
    cfg.sub_rate = 1.0;
    cfg.del_rate = cfg.ins_rate = 0.0;
    cfg.jitter_sigma_ms = 0.0;
    cfg.hate_multiplier = 1.0;
    const CorruptionResult r = corrupt_transcript("c1", gold, vocab, cfg);
    REQUIRE(r.hyp.words.size() == gold.words.size());
    for (std::size_t i = 0; i < gold.words.size(); ++i) {
      CHECK(r.hyp.words[i].text != gold.words[i].text);
      CHECK(r.hyp.words[i].start_ms == gold.words[i].start_ms);
      CHECK(r.hyp.words[i].end_ms == gold.words[i].end_ms);
    }
    CHECK(r.achieved_wer == 1.0);
  }

  SECTION("del_rate one empties the hypothesis") {
    AsrNoiseConfig cfg;
    cfg.del_rate = 1.0;
    cfg.sub_rate = cfg.ins_rate = 0.0;
    cfg.jitter_sigma_ms = 0.0;
    const CorruptionResult r = corrupt_transcript("c2", gold, vocab, cfg);
    CHECK(r.hyp.words.empty());
    CHECK(r.achieved_wer == 1.0);
  }

  SECTION("ins_rate one drops a word into every interior gap") {
    AsrNoiseConfig cfg;
    cfg.ins_rate = 1.0;
    cfg.sub_rate = cfg.del_rate = 0.0;
    cfg.jitter_sigma_ms = 0.0;
    const CorruptionResult r = corrupt_transcript("c3", gold, vocab, cfg);
    REQUIRE(r.hyp.words.size() == gold.words.size() + 2);
    validate_spans(r.hyp.words, "inserted");
    // The inserted words are the ones whose spans fall inside gold gaps.
    const auto& ins1 = r.hyp.words[1];
    const auto& ins2 = r.hyp.words[3];
    CHECK(ins1.start_ms >= gold.words[0].end_ms);
    CHECK(ins1.end_ms <= gold.words[1].start_ms);
    CHECK(ins1.end_ms - ins1.start_ms <= 80);
    CHECK(ins2.start_ms >= gold.words[1].end_ms);
    CHECK(ins2.end_ms <= gold.words[2].start_ms);
  }
}

TEST_CASE("corruption: hate words are substituted at the boosted rate") {
  // Three-word transcripts, middle word carries the rationale.
  AsrNoiseConfig cfg;
  cfg.sub_rate = 0.10;
  cfg.hate_multiplier = 2.0;
  cfg.del_rate = cfg.ins_rate = 0.0;
  cfg.jitter_sigma_ms = 0.0;
  cfg.seed = 31;
  const std::vector<std::string> vocab = {"w00", "w01", "w02", "w03", "h00", "h01"};
  long long hate_n = 0, hate_sub = 0, norm_n = 0, norm_sub = 0;
  for (int t = 0; t < 4000; ++t) {
    Transcript gold;
    gold.words = {{"w00", 0, 200, 0}, {"h00", 250, 450, 1}, {"w02", 500, 700, 0}};
    const CorruptionResult r =
        corrupt_transcript("mc_" + std::to_string(t), gold, vocab, cfg);
    REQUIRE(r.hyp.words.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      const bool sub = r.hyp.words[i].text != gold.words[i].text;
      if (gold.words[i].rationale == 1) {
        ++hate_n;
        hate_sub += sub;
      } else {
        ++norm_n;
        norm_sub += sub;
      }
    }
  }
  const double hate_rate = static_cast<double>(hate_sub) / static_cast<double>(hate_n);
  const double norm_rate = static_cast<double>(norm_sub) / static_cast<double>(norm_n);
  CHECK(hate_rate == Catch::Approx(0.20).margin(0.02));
  CHECK(norm_rate == Catch::Approx(0.10).margin(0.015));
}

TEST_CASE("corruption: jittered spans stay valid") {
  AsrNoiseConfig cfg;
  cfg.jitter_sigma_ms = 60.0;
  cfg.sub_rate = 0.1;
  cfg.del_rate = 0.05;
  cfg.ins_rate = 0.2;
  const std::vector<std::string> vocab = {"w00", "w01", "w02", "w03", "h00"};
  for (int t = 0; t < 300; ++t) {
    Transcript gold;
    int cursor = 0;
    Rng rng(static_cast<std::uint64_t>(t) + 77);
    const int n = static_cast<int>(rng.uniform_int(2, 8));
    for (int i = 0; i < n; ++i) {
      if (i > 0) cursor += static_cast<int>(rng.uniform_int(30, 120));
      const int dur = static_cast<int>(rng.uniform_int(120, 400));
      gold.words.push_back({vocab[static_cast<std::size_t>(rng.uniform_int(0, 4))], cursor,
                            cursor + dur, rng.uniform() < 0.3 ? 1 : 0});
      cursor += dur;
    }
    const CorruptionResult r =
        corrupt_transcript("j_" + std::to_string(t), gold, vocab, cfg);
    CHECK_NOTHROW(validate_spans(r.hyp.words, "jittered"));
  }
}

TEST_CASE("corruption: deterministic per id") {
  Transcript gold;
  gold.words = {{"w00", 0, 200, 0}, {"h00", 250, 450, 1}};
  AsrNoiseConfig cfg;
  cfg.seed = 4;
  cfg.jitter_sigma_ms = 25.0;
  cfg.sub_rate = 0.5;
  const std::vector<std::string> vocab = {"w00", "w01", "h00", "h01"};
  const CorruptionResult a = corrupt_transcript("d0", gold, vocab, cfg);
  const CorruptionResult b = corrupt_transcript("d0", gold, vocab, cfg);
  REQUIRE(a.hyp.words.size() == b.hyp.words.size());
  for (std::size_t i = 0; i < a.hyp.words.size(); ++i) {
    CHECK(a.hyp.words[i].text == b.hyp.words[i].text);
    CHECK(a.hyp.words[i].start_ms == b.hyp.words[i].start_ms);
    CHECK(a.hyp.words[i].end_ms == b.hyp.words[i].end_ms);
  }
}

TEST_CASE("hypothesis jsonl: round trip and validation") {
  ahsd_test::TempDir tmp("hyp");
  std::vector<Hypothesis> hyps(2);
  hyps[0].clip_id = "a";
  hyps[0].words = {{"w00", 0, 150, 0}, {"w01", 200, 340, 0}};
  hyps[1].clip_id = "b";  // empty word list is legal for a hypothesis
  const std::string path = (tmp.path() / "hyp.jsonl").string();
  write_hypotheses(path, hyps);
  const auto back = read_hypotheses(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].clip_id == "a");
  REQUIRE(back[0].words.size() == 2);
  CHECK(back[0].words[1].text == "w01");
  CHECK(back[0].words[1].end_ms == 340);
  CHECK(back[1].words.empty());

  std::ofstream bad((tmp.path() / "bad.jsonl").string(), std::ios::binary);
  bad << R"({"id":"x","words":[{"text":"a","start_ms":100,"end_ms":50}]})" << "\n";
  bad.close();
  CHECK_THROWS_AS(read_hypotheses((tmp.path() / "bad.jsonl").string()), Error);
}

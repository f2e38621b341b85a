// include/ahsd/corpus.hpp

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

#ifndef AHSD_CORPUS_HPP_
#define AHSD_CORPUS_HPP_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ahsd/error.hpp"
#include "ahsd/frames.hpp"
#include "ahsd/lexicon.hpp"
#include "ahsd/rng.hpp"
#include "ahsd/types.hpp"
#include "ahsd/wav.hpp"

namespace ahsd {

struct CorpusConfig {
  std::uint64_t seed = 0;
  int n_train = 2000;
  int n_dev = 250;
  int n_test = 250;
  int lexicon_size = 40;
  double hate_fraction = 0.2;
  double snr_db = 30.0;
  int min_words = 4;
  int max_words = 9;
  int min_hate_words = 1;
  int max_hate_words = 3;
  int min_word_ms = 120;
  int max_word_ms = 400;
  int min_gap_ms = 30;
  int max_gap_ms = 120;
  int sample_rate = kSampleRate;
};

inline void validate_corpus_config(const CorpusConfig& cfg) {
  if (cfg.n_train < 1 || cfg.n_dev < 1 || cfg.n_test < 1) {
    throw Error(ErrorKind::kConfig, "corpus config: split sizes must be positive");
  }
  if (cfg.sample_rate != kSampleRate) {
    throw Error(ErrorKind::kConfig, "corpus config: sample_rate must be " +
                                        std::to_string(kSampleRate));
  }
  if (cfg.min_words < 1 || cfg.max_words < cfg.min_words) {
    throw Error(ErrorKind::kConfig, "corpus config: bad words_per_clip range");
  }
  if (cfg.min_hate_words < 1 || cfg.max_hate_words < cfg.min_hate_words) {
    throw Error(ErrorKind::kConfig, "corpus config: bad hate_words range");
  }
  if (cfg.min_word_ms < 1 || cfg.max_word_ms < cfg.min_word_ms) {
    throw Error(ErrorKind::kConfig, "corpus config: bad word duration range");
  }
  if (cfg.min_gap_ms < 0 || cfg.max_gap_ms < cfg.min_gap_ms) {
    throw Error(ErrorKind::kConfig, "corpus config: bad gap range");
  }
  if (cfg.lexicon_size < 2) {
    throw Error(ErrorKind::kConfig, "corpus config: lexicon_size must be at least 2");
  }
  if (!(cfg.hate_fraction > 0.0) || !(cfg.hate_fraction < 1.0)) {
    throw Error(ErrorKind::kConfig, "corpus config: hate_fraction must be in (0, 1)");
  }
  if (!std::isfinite(cfg.snr_db)) {
    throw Error(ErrorKind::kConfig, "corpus config: snr_db must be finite");
  }
}

inline CorpusConfig corpus_config_from_json(const nlohmann::json& j) {
  CorpusConfig cfg;
  if (!j.is_object()) throw Error(ErrorKind::kConfig, "corpus config: expected a JSON object");
  auto get_int = [&](const char* key, int& slot) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer()) {
      throw Error(ErrorKind::kConfig, std::string("corpus config: ") + key + " must be an integer");
    }
    slot = j[key].get<int>();
  };
  auto get_num = [&](const char* key, double& slot) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) {
      throw Error(ErrorKind::kConfig, std::string("corpus config: ") + key + " must be a number");
    }
    slot = j[key].get<double>();
  };
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      throw Error(ErrorKind::kConfig, "corpus config: seed must be an integer");
    }
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  get_int("n_train", cfg.n_train);
  get_int("n_dev", cfg.n_dev);
  get_int("n_test", cfg.n_test);
  get_int("lexicon_size", cfg.lexicon_size);
  get_num("hate_fraction", cfg.hate_fraction);
  get_num("snr_db", cfg.snr_db);
  get_int("min_words", cfg.min_words);
  get_int("max_words", cfg.max_words);
  get_int("min_hate_words", cfg.min_hate_words);
  get_int("max_hate_words", cfg.max_hate_words);
  get_int("min_word_ms", cfg.min_word_ms);
  get_int("max_word_ms", cfg.max_word_ms);
  get_int("min_gap_ms", cfg.min_gap_ms);
  get_int("max_gap_ms", cfg.max_gap_ms);
  get_int("sample_rate", cfg.sample_rate);
  const char* known[] = {"seed",        "n_train",        "n_dev",          "n_test",
                         "lexicon_size", "hate_fraction", "snr_db",         "min_words",
                         "max_words",    "min_hate_words", "max_hate_words", "min_word_ms",
                         "max_word_ms",  "min_gap_ms",     "max_gap_ms",     "sample_rate"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw Error(ErrorKind::kConfig, "corpus config: unknown key '" + it.key() + "'");
  }
  validate_corpus_config(cfg);
  return cfg;
}

struct SynthClip {
  AudioClip audio;
  ClipAnnotation annotation;  // words, label, frame rationale
};

inline int ms_to_sample(int t_ms, int sample_rate = kSampleRate) {
  return static_cast<int>(
      std::llround(static_cast<double>(t_ms) * static_cast<double>(sample_rate) / 1000.0));
}

// Renders one clip: a tone stack per word (fundamental + two harmonics at
// relative amplitudes 1, 0.5, 0.25, overall amplitude 0.5) under a Hann
// envelope spanning exactly the word's samples, plus white noise scaled to
// the requested SNR against the clean signal's mean power over the clip.
inline SynthClip synth_clip(const std::string& clip_id,
                            const std::vector<int>& word_indices, const Lexicon& lex,
                            const CorpusConfig& cfg) {
  validate_corpus_config(cfg);
  if (word_indices.empty()) {
    throw Error(ErrorKind::kContract, "synth_clip: need at least one word");
  }
  Rng rng = Rng::derived(cfg.seed, fnv1a64("clip:" + clip_id));

  SynthClip out;
  out.annotation.clip_id = clip_id;
  out.audio.id = clip_id;
  out.annotation.label = 0;
  int cursor = 0;
  for (std::size_t i = 0; i < word_indices.size(); ++i) {
    const int wi = word_indices[i];
    if (wi < 0 || wi >= static_cast<int>(lex.words.size())) {
      throw Error(ErrorKind::kContract, "synth_clip: word index out of range");
    }
    if (i > 0) cursor += rng.uniform_int(cfg.min_gap_ms, cfg.max_gap_ms);
    const int dur = rng.uniform_int(cfg.min_word_ms, cfg.max_word_ms);
    WordSpan span;
    span.text = lex.words[static_cast<std::size_t>(wi)].text;
    span.start_ms = cursor;
    span.end_ms = cursor + dur;
    span.rationale = lex.words[static_cast<std::size_t>(wi)].is_hate ? 1 : 0;
    if (span.rationale) out.annotation.label = 1;
    out.annotation.transcript.words.push_back(span);
    cursor = span.end_ms;
  }
  const int duration_ms = cursor;
  out.annotation.frames = spans_to_frames(out.annotation.transcript.words, duration_ms);

  const int n_samples = ms_to_sample(duration_ms, cfg.sample_rate);
  std::vector<double> clean(static_cast<std::size_t>(n_samples), 0.0);
  for (std::size_t i = 0; i < word_indices.size(); ++i) {
    const auto& span = out.annotation.transcript.words[i];
    const double f = lex.words[static_cast<std::size_t>(word_indices[i])].base_freq;
    const int s0 = ms_to_sample(span.start_ms, cfg.sample_rate);
    const int s1 = ms_to_sample(span.end_ms, cfg.sample_rate);
    const int n = s1 - s0;
    for (int j = 0; j < n; ++j) {
      const double env =
          n > 1 ? 0.5 - 0.5 * std::cos(2.0 * M_PI * j / static_cast<double>(n - 1)) : 1.0;
      const double t = static_cast<double>(j) / static_cast<double>(cfg.sample_rate);
      const double tone = std::sin(2.0 * M_PI * f * t) +
                          0.5 * std::sin(2.0 * M_PI * 2.0 * f * t) +
                          0.25 * std::sin(2.0 * M_PI * 3.0 * f * t);
      clean[static_cast<std::size_t>(s0 + j)] += 0.5 * env * tone;
    }
  }

  double power = 0.0;
  for (double v : clean) power += v * v;
  power /= std::max<std::size_t>(1, clean.size());
  const double noise_std = std::sqrt(power / std::pow(10.0, cfg.snr_db / 10.0));

  out.audio.sample_rate = cfg.sample_rate;
  out.audio.samples.resize(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    double v = clean[i] + noise_std * rng.gaussian();
    if (v > 1.0) v = 1.0;
    if (v < -1.0) v = -1.0;
    out.audio.samples[i] = v;
  }
  return out;
}

// ---- Manifest records ------------------------------------------------------

struct ManifestRecord {
  std::string id;
  std::string wav;  // path relative to the manifest's directory
  int label = 0;
  std::string split;
  std::vector<WordSpan> words;

  int duration_ms() const { return transcript_end_ms(words); }
};

inline nlohmann::json manifest_record_to_json(const ManifestRecord& rec) {
  nlohmann::json jw = nlohmann::json::array();
  for (const auto& w : rec.words) {
    jw.push_back({{"text", w.text},
                  {"start_ms", w.start_ms},
                  {"end_ms", w.end_ms},
                  {"rationale", w.rationale}});
  }
  return {{"id", rec.id}, {"wav", rec.wav}, {"label", rec.label},
          {"split", rec.split}, {"words", jw}};
}

inline ManifestRecord manifest_record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kData, "manifest: record must be an object");
  for (const char* key : {"id", "wav", "label", "split", "words"}) {
    if (!j.contains(key)) {
      throw Error(ErrorKind::kData, std::string("manifest: record missing '") + key + "'");
    }
  }
  ManifestRecord rec;
  if (!j["id"].is_string() || !j["wav"].is_string() || !j["split"].is_string()) {
    throw Error(ErrorKind::kData, "manifest: id/wav/split must be strings");
  }
  rec.id = j["id"].get<std::string>();
  rec.wav = j["wav"].get<std::string>();
  rec.split = j["split"].get<std::string>();
  if (!j["label"].is_number_integer()) {
    throw Error(ErrorKind::kData, "manifest: label must be an integer");
  }
  rec.label = j["label"].get<int>();
  if (rec.label != 0 && rec.label != 1) {
    throw Error(ErrorKind::kData, "manifest: label must be 0 or 1");
  }
  if (!j["words"].is_array() || j["words"].empty()) {
    throw Error(ErrorKind::kData, "manifest: words must be a non-empty array");
  }
  for (const auto& jw : j["words"]) {
    if (!jw.is_object() || !jw.contains("text") || !jw.contains("start_ms") ||
        !jw.contains("end_ms") || !jw.contains("rationale")) {
      throw Error(ErrorKind::kData, "manifest: malformed word entry");
    }
    if (!jw["text"].is_string() || !jw["start_ms"].is_number_integer() ||
        !jw["end_ms"].is_number_integer() || !jw["rationale"].is_number_integer()) {
      throw Error(ErrorKind::kData, "manifest: malformed word entry");
    }
    WordSpan w;
    w.text = jw["text"].get<std::string>();
    w.start_ms = jw["start_ms"].get<int>();
    w.end_ms = jw["end_ms"].get<int>();
    w.rationale = jw["rationale"].get<int>();
    rec.words.push_back(std::move(w));
  }
  validate_spans(rec.words, "manifest record " + rec.id);
  bool any = false;
  for (const auto& w : rec.words) any = any || w.rationale == 1;
  if ((rec.label == 1) != any) {
    throw Error(ErrorKind::kData,
                "manifest: label of " + rec.id + " disagrees with its rationale spans");
  }
  return rec;
}

inline void write_manifest(const std::string& path, const std::vector<ManifestRecord>& recs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write manifest " + path);
  for (const auto& rec : recs) out << manifest_record_to_json(rec).dump() << "\n";
  if (!out) throw Error(ErrorKind::kIo, "short write to manifest " + path);
}

inline std::vector<ManifestRecord> read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open manifest " + path);
  std::vector<ManifestRecord> recs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kData,
                  path + ":" + std::to_string(lineno) + ": bad JSON: " + e.what());
    }
    recs.push_back(manifest_record_from_json(j));
  }
  if (recs.empty()) throw Error(ErrorKind::kData, "manifest " + path + " has no records");
  return recs;
}

// ---- Whole-corpus generation -----------------------------------------------

struct CorpusSummary {
  nlohmann::json json;
};

// Writes wav/<id>.wav plus train/dev/test.jsonl and summary.json under
// out_dir. Fully determined by cfg (including cfg.seed).
inline CorpusSummary generate_corpus(const CorpusConfig& cfg, const std::string& out_dir) {
  validate_corpus_config(cfg);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "wav", ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + out_dir + "/wav: " + ec.message());

  const Lexicon lex = build_lexicon(cfg.seed, cfg.lexicon_size, cfg.hate_fraction);
  std::vector<int> hate_idx, normal_idx;
  for (std::size_t i = 0; i < lex.words.size(); ++i) {
    (lex.words[i].is_hate ? hate_idx : normal_idx).push_back(static_cast<int>(i));
  }
  if (hate_idx.empty() || normal_idx.empty()) {
    throw Error(ErrorKind::kConfig, "generate_corpus: lexicon lacks one of the classes");
  }

  nlohmann::json jsplits = nlohmann::json::object();
  const struct {
    const char* name;
    int count;
  } splits[] = {{"train", cfg.n_train}, {"dev", cfg.n_dev}, {"test", cfg.n_test}};

  for (const auto& sp : splits) {
    std::vector<ManifestRecord> recs;
    long long total_ms = 0, n_words = 0, n_hate_words = 0;
    int n_pos = 0;
    for (int c = 0; c < sp.count; ++c) {
      char idbuf[32];
      std::snprintf(idbuf, sizeof(idbuf), "%s_%06d", sp.name, c);
      const std::string clip_id = idbuf;

      // Word selection has its own stream so synth timing draws stay
      // aligned with synth_clip's internal stream.
      Rng pick = Rng::derived(cfg.seed, fnv1a64("pick:" + clip_id));
      const int n = pick.uniform_int(cfg.min_words, cfg.max_words);
      const bool positive = pick.uniform() < 0.5;
      std::vector<int> indices(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        indices[static_cast<std::size_t>(i)] =
            normal_idx[static_cast<std::size_t>(pick.uniform_int(
                0, static_cast<int>(normal_idx.size()) - 1))];
      }
      if (positive) {
        const int want = pick.uniform_int(cfg.min_hate_words, cfg.max_hate_words);
        const int k = std::min(want, n);
        std::vector<std::size_t> pos(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
        pick.shuffle(pos);
        for (int i = 0; i < k; ++i) {
          indices[pos[static_cast<std::size_t>(i)]] =
              hate_idx[static_cast<std::size_t>(pick.uniform_int(
                  0, static_cast<int>(hate_idx.size()) - 1))];
        }
      }

      SynthClip clip = synth_clip(clip_id, indices, lex, cfg);
      const std::string wav_rel = std::string("wav/") + clip_id + ".wav";
      write_wav(fs::path(out_dir) / wav_rel, clip.audio.samples, clip.audio.sample_rate);

      ManifestRecord rec;
      rec.id = clip_id;
      rec.wav = wav_rel;
      rec.label = clip.annotation.label;
      rec.split = sp.name;
      rec.words = clip.annotation.transcript.words;
      n_pos += rec.label;
      total_ms += rec.duration_ms();
      for (const auto& w : rec.words) {
        ++n_words;
        n_hate_words += w.rationale;
      }
      recs.push_back(std::move(rec));
    }
    write_manifest((fs::path(out_dir) / (std::string(sp.name) + ".jsonl")).string(), recs);
    jsplits[sp.name] = {{"clips", sp.count},
                        {"positive_clips", n_pos},
                        {"words", n_words},
                        {"hate_words", n_hate_words},
                        {"total_ms", total_ms}};
  }

  nlohmann::json jlex = nlohmann::json::array();
  for (const auto& w : lex.words) {
    jlex.push_back({{"text", w.text}, {"base_freq", w.base_freq}, {"is_hate", w.is_hate}});
  }
  CorpusSummary summary;
  summary.json = {{"seed", cfg.seed},
                  {"sample_rate", cfg.sample_rate},
                  {"snr_db", cfg.snr_db},
                  {"lexicon", jlex},
                  {"splits", jsplits}};
  std::ofstream out((fs::path(out_dir) / "summary.json").string(), std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write summary.json under " + out_dir);
  out << summary.json.dump(1) << "\n";
  return summary;
}

}  // namespace ahsd

#endif  // AHSD_CORPUS_HPP_

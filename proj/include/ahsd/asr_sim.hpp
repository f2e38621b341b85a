// include/ahsd/asr_sim.hpp

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

#ifndef AHSD_ASR_SIM_HPP_
#define AHSD_ASR_SIM_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ahsd/error.hpp"
#include "ahsd/metrics.hpp"
#include "ahsd/rng.hpp"
#include "ahsd/types.hpp"

namespace ahsd {

struct AsrNoiseConfig {
  std::uint64_t seed = 0;
  double sub_rate = 0.08;
  double del_rate = 0.01;
  double ins_rate = 0.01;
  double hate_multiplier = 2.0;  // scales sub_rate on rationale words
  double jitter_sigma_ms = 20.0;
};

inline void validate_asr_noise_config(const AsrNoiseConfig& cfg) {
  auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate_ok(cfg.sub_rate) || !rate_ok(cfg.del_rate) || !rate_ok(cfg.ins_rate)) {
    throw Error(ErrorKind::kConfig, "asr noise config: rates must be in [0, 1]");
  }
  if (!(cfg.hate_multiplier >= 0.0) || !std::isfinite(cfg.hate_multiplier)) {
    throw Error(ErrorKind::kConfig, "asr noise config: hate_multiplier must be non-negative");
  }
  if (!(cfg.jitter_sigma_ms >= 0.0) || !std::isfinite(cfg.jitter_sigma_ms)) {
    throw Error(ErrorKind::kConfig, "asr noise config: jitter_sigma_ms must be non-negative");
  }
}

inline AsrNoiseConfig asr_noise_config_from_json(const nlohmann::json& j) {
  AsrNoiseConfig cfg;
  if (!j.is_object()) throw Error(ErrorKind::kConfig, "asr noise config: expected a JSON object");
  auto get_num = [&](const char* key, double& slot) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) {
      throw Error(ErrorKind::kConfig,
                  std::string("asr noise config: ") + key + " must be a number");
    }
    slot = j[key].get<double>();
  };
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      throw Error(ErrorKind::kConfig, "asr noise config: seed must be an integer");
    }
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  get_num("sub_rate", cfg.sub_rate);
  get_num("del_rate", cfg.del_rate);
  get_num("ins_rate", cfg.ins_rate);
  get_num("hate_multiplier", cfg.hate_multiplier);
  get_num("jitter_sigma_ms", cfg.jitter_sigma_ms);
  const char* known[] = {"seed",           "sub_rate",        "del_rate",
                         "ins_rate",       "hate_multiplier", "jitter_sigma_ms"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw Error(ErrorKind::kConfig, "asr noise config: unknown key '" + it.key() + "'");
  }
  validate_asr_noise_config(cfg);
  return cfg;
}

struct CorruptionResult {
  Hypothesis hyp;
  double achieved_wer = 0.0;
};

namespace asr_detail {

inline int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

}  // namespace asr_detail

// Simulated recognizer: per-word deletions, substitutions with a higher rate
// on rationale words, insertions dropped into interior silences, and Gaussian
// timestamp jitter. The hypothesis keeps ms-integer, sorted, non-overlapping
// spans; text errors draw uniformly from vocab excluding the original word.
inline CorruptionResult corrupt_transcript(const std::string& clip_id, const Transcript& gold,
                                           const std::vector<std::string>& vocab,
                                           const AsrNoiseConfig& cfg) {
  validate_asr_noise_config(cfg);
  if (gold.words.empty()) {
    throw Error(ErrorKind::kData, "corrupt_transcript: empty gold transcript for " + clip_id);
  }
  if (vocab.size() < 2) {
    throw Error(ErrorKind::kConfig, "corrupt_transcript: vocab needs at least 2 words");
  }
  validate_spans(gold.words, "gold transcript " + clip_id);
  Rng rng = Rng::derived(cfg.seed, fnv1a64("asr:" + clip_id));

  auto other_word = [&](const std::string& text) {
    int self = -1;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      if (vocab[i] == text) {
        self = static_cast<int>(i);
        break;
      }
    }
    if (self < 0) return vocab[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(vocab.size()) - 1))];
    int j = rng.uniform_int(0, static_cast<int>(vocab.size()) - 2);
    if (j >= self) ++j;
    return vocab[static_cast<std::size_t>(j)];
  };

  std::vector<WordSpan> words;
  for (const auto& g : gold.words) {
    if (rng.uniform() < cfg.del_rate) continue;
    WordSpan w;
    w.start_ms = g.start_ms;
    w.end_ms = g.end_ms;
    w.rationale = 0;
    const double p_sub =
        std::min(1.0, cfg.sub_rate * (g.rationale == 1 ? cfg.hate_multiplier : 1.0));
    w.text = rng.uniform() < p_sub ? other_word(g.text) : g.text;
    words.push_back(std::move(w));
  }

  // Insertions live in the gold interior gaps, centered, at most 80 ms.
  for (std::size_t i = 0; i + 1 < gold.words.size(); ++i) {
    if (rng.uniform() >= cfg.ins_rate) continue;
    const int gap_start = gold.words[i].end_ms;
    const int gap_end = gold.words[i + 1].start_ms;
    const int gap = gap_end - gap_start;
    if (gap < 1) continue;
    const int dur = std::min(80, gap);
    WordSpan w;
    w.text = vocab[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(vocab.size()) - 1))];
    w.start_ms = gap_start + (gap - dur) / 2;
    w.end_ms = w.start_ms + dur;
    w.rationale = 0;
    words.push_back(std::move(w));
  }

  if (cfg.jitter_sigma_ms > 0.0) {
    for (auto& w : words) {
      int s = asr_detail::round_half_up(w.start_ms + cfg.jitter_sigma_ms * rng.gaussian());
      int e = asr_detail::round_half_up(w.end_ms + cfg.jitter_sigma_ms * rng.gaussian());
      if (s < 0) s = 0;
      if (e < s + 1) e = s + 1;
      w.start_ms = s;
      w.end_ms = e;
    }
  }

  std::stable_sort(words.begin(), words.end(),
                   [](const WordSpan& a, const WordSpan& b) { return a.start_ms < b.start_ms; });
  int cursor = 0;
  for (auto& w : words) {
    if (w.start_ms < cursor) w.start_ms = cursor;
    if (w.end_ms <= w.start_ms) w.end_ms = w.start_ms + 1;
    cursor = w.end_ms;
  }

  CorruptionResult out;
  out.hyp.clip_id = clip_id;
  out.hyp.words = std::move(words);

  std::vector<std::string> ref_texts, hyp_texts;
  for (const auto& w : gold.words) ref_texts.push_back(w.text);
  for (const auto& w : out.hyp.words) hyp_texts.push_back(w.text);
  out.achieved_wer = wer(ref_texts, hyp_texts).wer;
  return out;
}

// ---- Hypothesis JSONL -------------------------------------------------------

inline nlohmann::json hypothesis_to_json(const Hypothesis& hyp) {
  nlohmann::json jw = nlohmann::json::array();
  for (const auto& w : hyp.words) {
    jw.push_back({{"text", w.text}, {"start_ms", w.start_ms}, {"end_ms", w.end_ms}});
  }
  return {{"id", hyp.clip_id}, {"words", jw}};
}

inline Hypothesis hypothesis_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("id") || !j.contains("words")) {
    throw Error(ErrorKind::kData, "hypothesis: record must have id and words");
  }
  if (!j["id"].is_string() || !j["words"].is_array()) {
    throw Error(ErrorKind::kData, "hypothesis: malformed record");
  }
  Hypothesis hyp;
  hyp.clip_id = j["id"].get<std::string>();
  for (const auto& jw : j["words"]) {
    if (!jw.is_object() || !jw.contains("text") || !jw.contains("start_ms") ||
        !jw.contains("end_ms") || !jw["text"].is_string() ||
        !jw["start_ms"].is_number_integer() || !jw["end_ms"].is_number_integer()) {
      throw Error(ErrorKind::kData, "hypothesis: malformed word entry in " + hyp.clip_id);
    }
    WordSpan w;
    w.text = jw["text"].get<std::string>();
    w.start_ms = jw["start_ms"].get<int>();
    w.end_ms = jw["end_ms"].get<int>();
    w.rationale = 0;
    hyp.words.push_back(std::move(w));
  }
  validate_spans(hyp.words, "hypothesis " + hyp.clip_id);
  return hyp;
}

inline void write_hypotheses(const std::string& path, const std::vector<Hypothesis>& hyps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write hypotheses " + path);
  for (const auto& h : hyps) out << hypothesis_to_json(h).dump() << "\n";
  if (!out) throw Error(ErrorKind::kIo, "short write to hypotheses " + path);
}

inline std::vector<Hypothesis> read_hypotheses(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open hypotheses " + path);
  std::vector<Hypothesis> hyps;
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
    hyps.push_back(hypothesis_from_json(j));
  }
  return hyps;
}

}  // namespace ahsd

#endif  // AHSD_ASR_SIM_HPP_

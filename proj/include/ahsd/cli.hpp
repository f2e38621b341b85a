// include/ahsd/cli.hpp

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

#ifndef AHSD_CLI_HPP_
#define AHSD_CLI_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ahsd/asr_sim.hpp"
#include "ahsd/cascade.hpp"
#include "ahsd/checkpoint.hpp"
#include "ahsd/corpus.hpp"
#include "ahsd/e2e.hpp"
#include "ahsd/error.hpp"
#include "ahsd/features.hpp"
#include "ahsd/frames.hpp"
#include "ahsd/metrics.hpp"
#include "ahsd/nnet.hpp"
#include "ahsd/predictions.hpp"
#include "ahsd/text_model.hpp"
#include "ahsd/tokenizer.hpp"
#include "ahsd/types.hpp"

namespace ahsd::cli {

namespace detail {

namespace fs = std::filesystem;

// Full shortest-round-trip precision so identical doubles always print an
// identical string; the sweep CSVs rely on that for column comparisons.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// Compact form for values that came in as user text (sweep levels, edges).
inline std::string fmtg(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return std::string(buf);
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kData, path + ": " + e.what());
  }
  return j;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << body;
  if (!out) throw Error(ErrorKind::kIo, "short write to " + path);
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(1) + "\n");
}

// Every producing command leaves a record of what it did next to its output:
// run_manifest.json inside directory outputs, <file>.run.json beside file
// outputs. No timestamps or host details, so identical invocations produce
// identical records.
inline void write_run_manifest_dir(const std::string& dir, const nlohmann::json& body) {
  write_json_file((fs::path(dir) / "run_manifest.json").string(), body);
}

inline void write_run_manifest_file(const std::string& file, const nlohmann::json& body) {
  write_json_file(file + ".run.json", body);
}

inline std::string manifest_path(const std::string& data_dir, const std::string& split) {
  return (fs::path(data_dir) / (split + ".jsonl")).string();
}

// Word list backing the tokenizer vocabulary and ASR substitution draws:
// the corpus lexicon when summary.json is present, otherwise the sorted set
// of distinct words seen in the records.
inline std::vector<std::string> word_list(const std::string& data_dir,
                                          const std::vector<ManifestRecord>& recs) {
  const fs::path sum = fs::path(data_dir) / "summary.json";
  if (fs::exists(sum)) {
    const nlohmann::json j = load_json_file(sum.string());
    if (j.is_object() && j.contains("lexicon") && j["lexicon"].is_array()) {
      std::vector<std::string> words;
      for (const auto& e : j["lexicon"]) {
        if (!e.is_object() || !e.contains("text") || !e["text"].is_string()) {
          throw Error(ErrorKind::kData, "summary.json: malformed lexicon entry");
        }
        words.push_back(e["text"].get<std::string>());
      }
      if (words.size() >= 2) return words;
    }
  }
  std::set<std::string> uniq;
  for (const auto& r : recs) {
    for (const auto& w : r.words) uniq.insert(w.text);
  }
  return std::vector<std::string>(uniq.begin(), uniq.end());
}

inline std::vector<double> parse_double_list(const std::string& csv, const char* what) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::size_t b = item.find_first_not_of(" \t");
    const std::size_t e = item.find_last_not_of(" \t");
    if (b == std::string::npos) {
      throw Error(ErrorKind::kConfig, std::string(what) + ": empty entry in '" + csv + "'");
    }
    item = item.substr(b, e - b + 1);
    try {
      std::size_t pos = 0;
      const double v = std::stod(item, &pos);
      if (pos != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kConfig, std::string(what) + ": bad number '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::kConfig, std::string(what) + ": empty list");
  return out;
}

inline nlohmann::json corpus_config_json(const CorpusConfig& c) {
  return {{"seed", c.seed},
          {"n_train", c.n_train},
          {"n_dev", c.n_dev},
          {"n_test", c.n_test},
          {"lexicon_size", c.lexicon_size},
          {"hate_fraction", c.hate_fraction},
          {"snr_db", c.snr_db},
          {"min_words", c.min_words},
          {"max_words", c.max_words},
          {"min_hate_words", c.min_hate_words},
          {"max_hate_words", c.max_hate_words},
          {"min_word_ms", c.min_word_ms},
          {"max_word_ms", c.max_word_ms},
          {"min_gap_ms", c.min_gap_ms},
          {"max_gap_ms", c.max_gap_ms},
          {"sample_rate", c.sample_rate}};
}

inline nlohmann::json noise_config_json(const AsrNoiseConfig& c) {
  return {{"seed", c.seed},
          {"sub_rate", c.sub_rate},
          {"del_rate", c.del_rate},
          {"ins_rate", c.ins_rate},
          {"hate_multiplier", c.hate_multiplier},
          {"jitter_sigma_ms", c.jitter_sigma_ms}};
}

inline nlohmann::json text_train_config_json(const TextTrainConfig& c) {
  return {{"seed", c.seed},         {"d_model", c.d_model},
          {"lr", c.lr},             {"epochs", c.epochs},
          {"batch_size", c.batch_size}, {"lambda_att", c.lambda_att}};
}

inline nlohmann::json e2e_train_config_json(const E2ETrainConfig& c) {
  return {{"seed", c.seed},   {"lr", c.lr},       {"epochs", c.epochs},
          {"batch_size", c.batch_size}, {"alpha", c.alpha}, {"mode", c.mode},
          {"d_h", c.d_h},     {"d_proj", c.d_proj}};
}

inline std::vector<std::string> texts_of(const std::vector<WordSpan>& words) {
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(w.text);
  return out;
}

inline FrameRationale gold_mask(const ManifestRecord& rec) {
  return spans_to_frames(rec.words, rec.duration_ms());
}

inline nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

// Joins manifest records with predictions by id (both directions must cover
// each other exactly) and produces the evaluation report plus per-clip CSV.
struct EvalOutcome {
  nlohmann::json report;
  std::string per_clip_csv;
};

inline EvalOutcome evaluate(const std::vector<ManifestRecord>& recs,
                            const std::vector<PredictionRecord>& preds,
                            const std::string& split) {
  std::map<std::string, const PredictionRecord*> by_id;
  for (const auto& p : preds) {
    if (!by_id.emplace(p.id, &p).second) {
      throw Error(ErrorKind::kData, "duplicate prediction id " + p.id);
    }
  }
  std::set<std::string> rec_ids;
  for (const auto& r : recs) rec_ids.insert(r.id);
  for (const auto& p : preds) {
    if (!rec_ids.count(p.id)) {
      throw Error(ErrorKind::kData, "prediction for unknown clip " + p.id);
    }
  }

  std::vector<int> y_true, y_pred;
  std::vector<ClipFrames> clips;
  std::vector<const PredictionRecord*> joined;
  for (const auto& rec : recs) {
    auto it = by_id.find(rec.id);
    if (it == by_id.end()) {
      throw Error(ErrorKind::kData, "no prediction for clip " + rec.id);
    }
    const PredictionRecord* p = it->second;
    y_true.push_back(rec.label);
    y_pred.push_back(p->label_pred);
    clips.push_back({rec.id, p->frames, gold_mask(rec)});
    joined.push_back(p);
  }

  const ClsReport cls = cls_metrics(y_pred, y_true);
  const FdReport fd = frame_metrics(clips);

  EvalOutcome out;
  out.report = {
      {"split", split},
      {"n_clips", static_cast<std::int64_t>(recs.size())},
      {"cls",
       {{"n", cls.n},
        {"tp", cls.tp},
        {"fp", cls.fp},
        {"fn", cls.fn},
        {"tn", cls.tn},
        {"accuracy", cls.accuracy},
        {"hate", {{"precision", cls.precision_hate}, {"recall", cls.recall_hate}, {"f1", cls.f1_hate}}},
        {"normal",
         {{"precision", cls.precision_normal}, {"recall", cls.recall_normal}, {"f1", cls.f1_normal}}},
        {"macro",
         {{"precision", cls.macro_precision}, {"recall", cls.macro_recall}, {"f1", cls.macro_f1}}}}},
      {"frames",
       {{"aggregation", fd.aggregation},
        {"pooled_iou", fd.pooled_iou},
        {"mean_clip_iou", opt_json(fd.mean_clip_iou)},
        {"clips_with_union", fd.clips_with_union},
        {"tp", fd.tp},
        {"fp", fd.fp},
        {"fn", fd.fn},
        {"precision", fd.frame_precision},
        {"recall", fd.frame_recall},
        {"f1", fd.frame_f1}}}};

  std::string csv = "id,label,label_pred,score,pred_frames,gold_frames,intersection,union,iou\n";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const ClipIouRow& row = fd.per_clip[i];
    csv += recs[i].id + ',' + std::to_string(recs[i].label) + ',' +
           std::to_string(joined[i]->label_pred) + ',' + fmt17(joined[i]->score) + ',' +
           std::to_string(row.pred_frames) + ',' + std::to_string(row.gold_frames) + ',' +
           std::to_string(row.intersection_frames) + ',' + std::to_string(row.union_frames) + ',' +
           (row.iou ? fmt17(*row.iou) : std::string()) + '\n';
  }
  out.per_clip_csv = std::move(csv);
  return out;
}

// Standardize feature columns in place; the gradient-check fixture feeds the
// model well-scaled inputs the same way training does via folded init.
inline void standardize_columns(Tensor& feats) {
  const std::int64_t t = feats.rows();
  const std::int64_t d = feats.cols();
  for (std::int64_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::int64_t r = 0; r < t; ++r) mean += feats.at(r, c);
    mean /= static_cast<double>(t);
    double var = 0.0;
    for (std::int64_t r = 0; r < t; ++r) {
      const double dlt = feats.at(r, c) - mean;
      var += dlt * dlt;
    }
    const double sd = std::max(std::sqrt(var / static_cast<double>(t)), 1e-8);
    for (std::int64_t r = 0; r < t; ++r) feats.at(r, c) = (feats.at(r, c) - mean) / sd;
  }
}

}  // namespace detail

// ---- gen --------------------------------------------------------------------

struct GenArgs {
  CLI::App* cmd = nullptr;
  std::string out_dir;
  std::string config_file;
  std::uint64_t seed = 0;
  int n_train = 0, n_dev = 0, n_test = 0, lexicon_size = 0;
  double hate_fraction = 0.0, snr_db = 0.0;
};

inline int run_gen(const GenArgs& a) {
  CorpusConfig cfg;
  if (!a.config_file.empty()) {
    cfg = corpus_config_from_json(detail::load_json_file(a.config_file));
  }
  const CLI::App& c = *a.cmd;
  if (c.count("--seed")) cfg.seed = a.seed;
  if (c.count("--n-train")) cfg.n_train = a.n_train;
  if (c.count("--n-dev")) cfg.n_dev = a.n_dev;
  if (c.count("--n-test")) cfg.n_test = a.n_test;
  if (c.count("--lexicon-size")) cfg.lexicon_size = a.lexicon_size;
  if (c.count("--hate-fraction")) cfg.hate_fraction = a.hate_fraction;
  if (c.count("--snr-db")) cfg.snr_db = a.snr_db;
  validate_corpus_config(cfg);

  generate_corpus(cfg, a.out_dir);

  nlohmann::json inputs = nlohmann::json::object();
  if (!a.config_file.empty()) inputs["config"] = a.config_file;
  detail::write_run_manifest_dir(
      a.out_dir, {{"command", "gen"},
                  {"config", detail::corpus_config_json(cfg)},
                  {"inputs", inputs},
                  {"outputs", {"train.jsonl", "dev.jsonl", "test.jsonl", "summary.json", "wav/"}}});
  std::cout << "wrote corpus to " << a.out_dir << " (" << cfg.n_train << "/" << cfg.n_dev << "/"
            << cfg.n_test << " clips)\n";
  return 0;
}

// ---- train-text -------------------------------------------------------------

struct TrainTextArgs {
  CLI::App* cmd = nullptr;
  std::string data_dir, out_file;
  std::string source = "gold";  // gold | asr
  std::string noise_config_file;
  TextTrainConfig cfg;
};

inline int run_train_text(const TrainTextArgs& a) {
  if (a.source != "gold" && a.source != "asr") {
    throw Error(ErrorKind::kConfig, "train-text: --source must be gold or asr");
  }
  const std::vector<ManifestRecord> train_recs =
      read_manifest(detail::manifest_path(a.data_dir, "train"));
  const std::vector<ManifestRecord> dev_recs =
      read_manifest(detail::manifest_path(a.data_dir, "dev"));
  const std::vector<std::string> words = detail::word_list(a.data_dir, train_recs);
  const Vocab vocab = build_vocab(words);

  AsrNoiseConfig noise;
  if (!a.noise_config_file.empty()) {
    noise = asr_noise_config_from_json(detail::load_json_file(a.noise_config_file));
  }

  // Training on recognizer output: corrupt the transcript, then carry each
  // gold word's rationale flag onto its aligned hypothesis slot.
  int dropped = 0;
  auto to_examples = [&](const std::vector<ManifestRecord>& recs) {
    std::vector<TextExample> out;
    out.reserve(recs.size());
    for (const auto& rec : recs) {
      if (a.source == "gold") {
        out.push_back(make_text_example(rec.id, rec.words, rec.label, vocab));
        continue;
      }
      const CorruptionResult cr = corrupt_transcript(rec.id, Transcript{rec.words}, words, noise);
      if (cr.hyp.words.empty()) {
        ++dropped;  // recognizer deleted everything; nothing to train on
        continue;
      }
      const std::vector<WordSpan> proj = project_rationale(rec.words, cr.hyp.words);
      out.push_back(make_text_example(rec.id, proj, rec.label, vocab));
    }
    return out;
  };
  const std::vector<TextExample> train_ex = to_examples(train_recs);
  const std::vector<TextExample> dev_ex = to_examples(dev_recs);

  const TextTrainResult result = train_text_model(train_ex, dev_ex, vocab, a.cfg);
  save_checkpoint(text_model_to_checkpoint(result.model, a.cfg.seed), a.out_file);

  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : result.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"loss", e.loss},
                      {"l_pred", e.l_pred},
                      {"l_att", e.l_att},
                      {"dev_macro_f1", e.dev_macro_f1}});
  }
  nlohmann::json config = {{"train", detail::text_train_config_json(a.cfg)},
                           {"source", a.source}};
  if (a.source == "asr") {
    config["noise"] = detail::noise_config_json(noise);
    config["dropped_empty"] = dropped;
  }
  nlohmann::json inputs = {{"data", a.data_dir}};
  if (!a.noise_config_file.empty()) inputs["noise_config"] = a.noise_config_file;
  detail::write_run_manifest_file(a.out_file,
                                  {{"command", "train-text"},
                                   {"config", config},
                                   {"inputs", inputs},
                                   {"outputs", {detail::fs::path(a.out_file).filename().string()}},
                                   {"training",
                                    {{"best_epoch", result.best_epoch},
                                     {"best_dev_macro_f1", result.best_dev_macro_f1},
                                     {"epochs", epochs}}}});
  std::cout << "trained text model: best epoch " << result.best_epoch << ", dev macro-F1 "
            << detail::fmt17(result.best_dev_macro_f1) << "\n";
  return 0;
}

// ---- train-e2e --------------------------------------------------------------

struct TrainE2eArgs {
  CLI::App* cmd = nullptr;
  std::string data_dir, out_file;
  E2ETrainConfig cfg;
};

inline int run_train_e2e(const TrainE2eArgs& a) {
  const std::vector<E2EExample> train =
      load_e2e_examples(detail::manifest_path(a.data_dir, "train"));
  const std::vector<E2EExample> dev = load_e2e_examples(detail::manifest_path(a.data_dir, "dev"));

  const E2ETrainResult result = train_e2e(train, dev, a.cfg);
  save_checkpoint(e2e_model_to_checkpoint(result.model, a.cfg.seed), a.out_file);

  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : result.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"loss", e.loss},
                      {"l_cls", e.l_cls},
                      {"l_fd", e.l_fd},
                      {"dev_metric", e.dev_metric}});
  }
  detail::write_run_manifest_file(
      a.out_file, {{"command", "train-e2e"},
                   {"config", detail::e2e_train_config_json(a.cfg)},
                   {"inputs", {{"data", a.data_dir}}},
                   {"outputs", {detail::fs::path(a.out_file).filename().string()}},
                   {"training",
                    {{"best_epoch", result.best_epoch},
                     {"best_dev_metric", result.best_dev_metric},
                     {"dev_metric_name", result.dev_metric_name},
                     {"epochs", epochs}}}});
  std::cout << "trained e2e model: best epoch " << result.best_epoch << ", dev "
            << result.dev_metric_name << " " << detail::fmt17(result.best_dev_metric) << "\n";
  return 0;
}

// ---- run-cascade ------------------------------------------------------------

struct RunCascadeArgs {
  CLI::App* cmd = nullptr;
  std::string data_dir, split = "test", model_file, out_file;
  std::string hyp_file, noise_config_file, dump_hyp_file;
  std::uint64_t noise_seed = 0;
  double sub_rate = 0.0, del_rate = 0.0, ins_rate = 0.0;
  double hate_multiplier = 0.0, jitter_sigma = 0.0;
};

inline int run_run_cascade(const RunCascadeArgs& a) {
  const std::vector<ManifestRecord> recs =
      read_manifest(detail::manifest_path(a.data_dir, a.split));
  const TextModel model = text_model_from_checkpoint(load_checkpoint(a.model_file));
  const CLI::App& c = *a.cmd;

  const bool noise_flags = c.count("--noise-seed") || c.count("--sub-rate") ||
                           c.count("--del-rate") || c.count("--ins-rate") ||
                           c.count("--hate-multiplier") || c.count("--jitter-sigma");
  const bool use_noise = !a.noise_config_file.empty() || noise_flags;
  const bool use_hyp_file = !a.hyp_file.empty();
  if (use_noise && use_hyp_file) {
    throw Error(ErrorKind::kConfig, "run-cascade: --hyp conflicts with noise options");
  }

  AsrNoiseConfig noise;
  if (use_noise) {
    if (!a.noise_config_file.empty()) {
      noise = asr_noise_config_from_json(detail::load_json_file(a.noise_config_file));
    }
    if (c.count("--noise-seed")) noise.seed = a.noise_seed;
    if (c.count("--sub-rate")) noise.sub_rate = a.sub_rate;
    if (c.count("--del-rate")) noise.del_rate = a.del_rate;
    if (c.count("--ins-rate")) noise.ins_rate = a.ins_rate;
    if (c.count("--hate-multiplier")) noise.hate_multiplier = a.hate_multiplier;
    if (c.count("--jitter-sigma")) noise.jitter_sigma_ms = a.jitter_sigma;
    validate_asr_noise_config(noise);
  }

  std::map<std::string, const Hypothesis*> hyp_by_id;
  std::vector<Hypothesis> file_hyps;
  if (use_hyp_file) {
    file_hyps = read_hypotheses(a.hyp_file);
    for (const auto& h : file_hyps) {
      if (!hyp_by_id.emplace(h.clip_id, &h).second) {
        throw Error(ErrorKind::kData, "duplicate hypothesis id " + h.clip_id);
      }
    }
  }
  const std::vector<std::string> words =
      use_noise ? detail::word_list(a.data_dir, recs) : std::vector<std::string>();

  std::vector<Hypothesis> hyps;
  std::vector<PredictionRecord> preds;
  std::int64_t wer_errs = 0, wer_ref = 0;
  hyps.reserve(recs.size());
  preds.reserve(recs.size());
  for (const auto& rec : recs) {
    Hypothesis hyp;
    if (use_hyp_file) {
      auto it = hyp_by_id.find(rec.id);
      if (it == hyp_by_id.end()) {
        throw Error(ErrorKind::kData, "no hypothesis for clip " + rec.id);
      }
      hyp = *it->second;
    } else if (use_noise) {
      hyp = corrupt_transcript(rec.id, Transcript{rec.words}, words, noise).hyp;
    } else {
      hyp.clip_id = rec.id;
      hyp.words = rec.words;
      for (auto& w : hyp.words) w.rationale = 0;  // inference input carries no labels
    }
    const WerResult w = wer(detail::texts_of(rec.words), detail::texts_of(hyp.words));
    wer_errs += w.n_sub + w.n_del + w.n_ins;
    wer_ref += w.n_ref;
    preds.push_back(cascade_predict(model, hyp, rec.duration_ms()));
    hyps.push_back(std::move(hyp));
  }

  write_predictions(a.out_file, preds);
  if (!a.dump_hyp_file.empty()) write_hypotheses(a.dump_hyp_file, hyps);

  const double pooled_wer =
      wer_ref > 0 ? static_cast<double>(wer_errs) / static_cast<double>(wer_ref) : 0.0;
  nlohmann::json inputs = {{"data", a.data_dir}, {"model", a.model_file}};
  if (use_hyp_file) inputs["hyp"] = a.hyp_file;
  if (!a.noise_config_file.empty()) inputs["noise_config"] = a.noise_config_file;
  nlohmann::json config = {
      {"split", a.split},
      {"source", use_hyp_file ? "hyp-file" : (use_noise ? "simulated-asr" : "gold")}};
  if (use_noise) config["noise"] = detail::noise_config_json(noise);
  nlohmann::json outputs = {detail::fs::path(a.out_file).filename().string()};
  if (!a.dump_hyp_file.empty()) outputs.push_back(detail::fs::path(a.dump_hyp_file).filename().string());
  detail::write_run_manifest_file(a.out_file, {{"command", "run-cascade"},
                                               {"config", config},
                                               {"inputs", inputs},
                                               {"outputs", outputs},
                                               {"pooled_wer", pooled_wer}});
  std::cout << "cascade predictions for " << recs.size() << " clips -> " << a.out_file
            << " (input WER " << detail::fmt17(pooled_wer) << ")\n";
  return 0;
}

// ---- run-e2e ------------------------------------------------------------

struct RunE2eArgs {
  CLI::App* cmd = nullptr;
  std::string data_dir, split = "test", model_file, out_file;
};

inline int run_run_e2e(const RunE2eArgs& a) {
  const std::vector<E2EExample> exs = load_e2e_examples(detail::manifest_path(a.data_dir, a.split));
  const E2EModel model = e2e_model_from_checkpoint(load_checkpoint(a.model_file));

  std::vector<PredictionRecord> preds;
  preds.reserve(exs.size());
  for (const auto& ex : exs) {
    preds.push_back(e2e_predict(model, ex.feats, ex.id, ex.duration_ms));
  }
  write_predictions(a.out_file, preds);
  detail::write_run_manifest_file(
      a.out_file, {{"command", "run-e2e"},
                   {"config", {{"split", a.split}}},
                   {"inputs", {{"data", a.data_dir}, {"model", a.model_file}}},
                   {"outputs", {detail::fs::path(a.out_file).filename().string()}}});
  std::cout << "e2e predictions for " << exs.size() << " clips -> " << a.out_file << "\n";
  return 0;
}

// ---- eval ---------------------------------------------------------------

struct EvalArgs {
  CLI::App* cmd = nullptr;
  std::string data_dir, split = "test", pred_file, out_file, per_clip_file;
};

inline int run_eval(const EvalArgs& a) {
  const std::vector<ManifestRecord> recs =
      read_manifest(detail::manifest_path(a.data_dir, a.split));
  const std::vector<PredictionRecord> preds = read_predictions(a.pred_file);
  detail::EvalOutcome eo = detail::evaluate(recs, preds, a.split);

  if (!a.per_clip_file.empty()) detail::write_text_file(a.per_clip_file, eo.per_clip_csv);
  if (a.out_file.empty()) {
    std::cout << eo.report.dump(1) << "\n";
  } else {
    detail::write_json_file(a.out_file, eo.report);
    nlohmann::json outputs = {detail::fs::path(a.out_file).filename().string()};
    if (!a.per_clip_file.empty()) {
      outputs.push_back(detail::fs::path(a.per_clip_file).filename().string());
    }
    detail::write_run_manifest_file(a.out_file,
                                    {{"command", "eval"},
                                     {"config", {{"split", a.split}}},
                                     {"inputs", {{"data", a.data_dir}, {"pred", a.pred_file}}},
                                     {"outputs", outputs}});
    std::cout << "eval report -> " << a.out_file << "\n";
  }
  return 0;
}

// ---- sweep-wer ------------------------------------------------------------

struct SweepWerArgs {
  CLI::App* cmd = nullptr;
  std::string data_dir, split = "test", text_model_file, e2e_model_file, out_file, buckets_file;
  std::string levels = "0,0.1,0.2,0.3,0.4";
  std::string bucket_edges = "0,0.05,0.1,0.2,0.4";
  std::uint64_t seed = 0;
};

// Sensitivity of localization to recognizer quality. Each row corrupts the
// split at one substitution level and re-runs the cascade; the audio model
// never sees the transcript, so its columns are computed once and repeated
// verbatim in every row.
inline int run_sweep_wer(const SweepWerArgs& a) {
  const std::vector<double> levels = detail::parse_double_list(a.levels, "sweep-wer levels");
  for (double l : levels) {
    if (l < 0.0 || l > 1.0) {
      throw Error(ErrorKind::kConfig, "sweep-wer: levels must be in [0, 1]");
    }
  }
  const std::vector<ManifestRecord> recs =
      read_manifest(detail::manifest_path(a.data_dir, a.split));
  const TextModel text_model = text_model_from_checkpoint(load_checkpoint(a.text_model_file));
  const E2EModel e2e_model = e2e_model_from_checkpoint(load_checkpoint(a.e2e_model_file));
  const std::vector<std::string> words = detail::word_list(a.data_dir, recs);

  std::vector<FrameRationale> gold;
  std::vector<int> y_true;
  gold.reserve(recs.size());
  for (const auto& rec : recs) {
    gold.push_back(detail::gold_mask(rec));
    y_true.push_back(rec.label);
  }

  // Audio side, once.
  const std::vector<E2EExample> exs = load_e2e_examples(detail::manifest_path(a.data_dir, a.split));
  std::vector<int> y_e2e;
  std::vector<ClipFrames> e2e_clips;
  for (std::size_t i = 0; i < exs.size(); ++i) {
    const PredictionRecord p = e2e_predict(e2e_model, exs[i].feats, exs[i].id, exs[i].duration_ms);
    y_e2e.push_back(p.label_pred);
    e2e_clips.push_back({exs[i].id, p.frames, gold[i]});
  }
  const ClsReport e2e_cls = cls_metrics(y_e2e, y_true);
  const FdReport e2e_fd = frame_metrics(e2e_clips);
  const std::string e2e_cols = detail::fmt17(e2e_cls.accuracy) + ',' +
                               detail::fmt17(e2e_cls.macro_f1) + ',' +
                               detail::fmt17(e2e_fd.pooled_iou);

  std::string csv =
      "level,achieved_wer,cascade_accuracy,cascade_macro_f1,cascade_pooled_iou,"
      "e2e_accuracy,e2e_macro_f1,e2e_pooled_iou\n";
  std::vector<WerIouRow> bucket_rows;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    AsrNoiseConfig noise;
    noise.seed = a.seed + li;  // independent draws per level
    noise.sub_rate = levels[li];
    noise.del_rate = 0.0;
    noise.ins_rate = 0.0;
    noise.hate_multiplier = 1.0;
    noise.jitter_sigma_ms = 0.0;

    std::vector<int> y_pred;
    std::vector<ClipFrames> clips;
    std::vector<double> clip_wer(recs.size(), 0.0);
    std::int64_t errs = 0, nref = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const ManifestRecord& rec = recs[i];
      const Hypothesis hyp =
          corrupt_transcript(rec.id, Transcript{rec.words}, words, noise).hyp;
      const WerResult w = wer(detail::texts_of(rec.words), detail::texts_of(hyp.words));
      errs += w.n_sub + w.n_del + w.n_ins;
      nref += w.n_ref;
      clip_wer[i] = w.wer;
      const PredictionRecord p = cascade_predict(text_model, hyp, rec.duration_ms());
      y_pred.push_back(p.label_pred);
      clips.push_back({rec.id, p.frames, gold[i]});
    }
    const ClsReport cls = cls_metrics(y_pred, y_true);
    const FdReport fd = frame_metrics(clips);
    const double achieved = nref > 0 ? static_cast<double>(errs) / static_cast<double>(nref) : 0.0;
    csv += detail::fmtg(levels[li]) + ',' + detail::fmt17(achieved) + ',' +
           detail::fmt17(cls.accuracy) + ',' + detail::fmt17(cls.macro_f1) + ',' +
           detail::fmt17(fd.pooled_iou) + ',' + e2e_cols + '\n';
    for (std::size_t i = 0; i < recs.size(); ++i) {
      bucket_rows.push_back({clip_wer[i], fd.per_clip[i].iou, "cascade"});
      bucket_rows.push_back({clip_wer[i], e2e_fd.per_clip[i].iou, "e2e"});
    }
  }
  detail::write_text_file(a.out_file, csv);

  nlohmann::json outputs = {detail::fs::path(a.out_file).filename().string()};
  if (!a.buckets_file.empty()) {
    const std::vector<double> edges =
        detail::parse_double_list(a.bucket_edges, "sweep-wer bucket edges");
    const std::vector<BucketRow> rows = wer_bucket_analysis(bucket_rows, edges);
    std::string bcsv = "model,lo,hi,count,with_iou,mean_iou\n";
    for (const auto& r : rows) {
      bcsv += r.model_tag + ',' + detail::fmtg(r.lo) + ',' +
              (r.hi ? detail::fmtg(*r.hi) : std::string()) + ',' + std::to_string(r.count) + ',' +
              std::to_string(r.with_iou) + ',' +
              (r.mean_iou ? detail::fmt17(*r.mean_iou) : std::string()) + '\n';
    }
    detail::write_text_file(a.buckets_file, bcsv);
    outputs.push_back(detail::fs::path(a.buckets_file).filename().string());
  }
  detail::write_run_manifest_file(
      a.out_file,
      {{"command", "sweep-wer"},
       {"config",
        {{"split", a.split}, {"levels", levels}, {"seed", a.seed}}},
       {"inputs",
        {{"data", a.data_dir}, {"text_model", a.text_model_file}, {"e2e_model", a.e2e_model_file}}},
       {"outputs", outputs}});
  std::cout << "wer sweep over " << levels.size() << " levels -> " << a.out_file << "\n";
  return 0;
}

// ---- sweep-alpha ------------------------------------------------------------

struct SweepAlphaArgs {
  CLI::App* cmd = nullptr;
  std::string data_dir, split = "test", out_file;
  std::string alphas = "0,0.25,0.5,0.75,1";
  E2ETrainConfig cfg;
};

// Loss-mixing ablation: trains one audio model per weight and scores it on
// the held-out split. The endpoints run as the dedicated single-head modes
// so each row keeps its natural selection metric.
inline int run_sweep_alpha(const SweepAlphaArgs& a) {
  const std::vector<double> alphas = detail::parse_double_list(a.alphas, "sweep-alpha alphas");
  for (double v : alphas) {
    if (v < 0.0 || v > 1.0) {
      throw Error(ErrorKind::kConfig, "sweep-alpha: alphas must be in [0, 1]");
    }
  }
  const std::vector<E2EExample> train =
      load_e2e_examples(detail::manifest_path(a.data_dir, "train"));
  const std::vector<E2EExample> dev = load_e2e_examples(detail::manifest_path(a.data_dir, "dev"));
  const std::vector<E2EExample> eval_exs =
      load_e2e_examples(detail::manifest_path(a.data_dir, a.split));

  std::string csv =
      "alpha,mode,accuracy,macro_f1,pooled_iou_gated,pooled_iou_ungated,dev_metric,best_epoch\n";
  for (double alpha : alphas) {
    E2ETrainConfig cfg = a.cfg;
    cfg.alpha = alpha;
    cfg.mode = alpha == 0.0 ? "fd-only" : (alpha == 1.0 ? "cls-only" : "joint");
    const E2ETrainResult r = train_e2e(train, dev, cfg);

    std::vector<int> y_true, y_pred;
    std::vector<ClipFrames> gated, ungated;
    for (const auto& ex : eval_exs) {
      const FrameRationale& g = ex.gold;
      const PredictionRecord p = e2e_predict(r.model, ex.feats, ex.id, ex.duration_ms);
      y_true.push_back(ex.label);
      y_pred.push_back(p.label_pred);
      gated.push_back({ex.id, p.frames, g});
      const FrameRationale mask = e2e_frame_mask(r.model, ex.feats, ex.duration_ms);
      ungated.push_back({ex.id, frames_to_intervals(mask), g});
    }
    const ClsReport cls = cls_metrics(y_pred, y_true);
    const FdReport fd_gated = frame_metrics(gated);
    const FdReport fd_ungated = frame_metrics(ungated);
    csv += detail::fmtg(alpha) + ',' + cfg.mode + ',' + detail::fmt17(cls.accuracy) + ',' +
           detail::fmt17(cls.macro_f1) + ',' + detail::fmt17(fd_gated.pooled_iou) + ',' +
           detail::fmt17(fd_ungated.pooled_iou) + ',' + detail::fmt17(r.best_dev_metric) + ',' +
           std::to_string(r.best_epoch) + '\n';
  }
  detail::write_text_file(a.out_file, csv);
  detail::write_run_manifest_file(
      a.out_file, {{"command", "sweep-alpha"},
                   {"config",
                    {{"split", a.split},
                     {"alphas", alphas},
                     {"train", detail::e2e_train_config_json(a.cfg)}}},
                   {"inputs", {{"data", a.data_dir}}},
                   {"outputs", {detail::fs::path(a.out_file).filename().string()}}});
  std::cout << "alpha sweep over " << alphas.size() << " settings -> " << a.out_file << "\n";
  return 0;
}

// ---- gradcheck ------------------------------------------------------------

struct GradcheckArgs {
  CLI::App* cmd = nullptr;
  double eps = 1e-5;
  double tol = 1e-4;
};

// Central-difference check of both analytic gradients on small deterministic
// fixtures. Exit 0 only if every check lands under the tolerance.
inline int run_gradcheck(const GradcheckArgs& a) {
  bool ok = true;
  auto report = [&](const std::string& name, double err) {
    const bool pass = err < a.tol;
    ok = ok && pass;
    std::cout << name << "  max_rel_err=" << detail::fmt17(err) << (pass ? "  ok" : "  FAIL")
              << "\n";
  };
  auto zeros_like = [](const ParameterSet& params) {
    ParameterSet g;
    for (const auto& [name, t] : params) g[name] = Tensor::zeros(t.shape);
    return g;
  };

  {
    const Vocab vocab = build_vocab({"w00", "w01", "h00", "longword"});
    const TextModel m = init_text_model(vocab, 8, 42);
    const std::vector<WordSpan> spans = {
        {"w00", 0, 250, 0}, {"h00", 300, 550, 1}, {"longword", 600, 850, 0}};
    const TextExample ex = make_text_example("gradcheck-text", spans, 1, vocab);
    ParameterSet grads = zeros_like(m.params);
    text_loss_and_grad(m, ex, 0.1, grads);
    auto loss_fn = [&](const ParameterSet& p) {
      TextModel probe = m;
      probe.params = p;
      ParameterSet g = zeros_like(p);
      return text_loss_and_grad(probe, ex, 0.1, g).loss;
    };
    report("text-composite ", grad_check(loss_fn, grads, m.params, a.eps));
  }

  {
    CorpusConfig ccfg;
    ccfg.seed = 9;
    const Lexicon lex = build_lexicon(ccfg.seed, ccfg.lexicon_size, ccfg.hate_fraction);
    const SynthClip clip = synth_clip("gradcheck-e2e", {2, 9, 17}, lex, ccfg);
    Tensor feats = extract_features(clip.audio.samples);
    detail::standardize_columns(feats);
    const E2EModel m = init_e2e_model(3, 16, 16, 8);
    const std::vector<int> targets =
        gold_downsample(clip.annotation.frames, static_cast<int>(feats.rows()));
    const int label = clip.annotation.label;
    for (double alpha : {0.5, 1.0, 0.0}) {
      ParameterSet grads = zeros_like(m.params);
      e2e_loss_and_grad(m, feats, label, targets, alpha, grads);
      auto loss_fn = [&](const ParameterSet& p) {
        E2EModel probe = m;
        probe.params = p;
        ParameterSet g = zeros_like(p);
        return e2e_loss_and_grad(probe, feats, label, targets, alpha, g).loss;
      };
      report("e2e-alpha-" + detail::fmtg(alpha), grad_check(loss_fn, grads, m.params, a.eps));
    }
  }
  return ok ? 0 : 1;
}

// ---- visualize ------------------------------------------------------------

struct VisualizeArgs {
  CLI::App* cmd = nullptr;
  std::string data_dir, split = "train", id, pred_file, out_file;
};

inline int run_visualize(const VisualizeArgs& a) {
  const std::vector<ManifestRecord> recs =
      read_manifest(detail::manifest_path(a.data_dir, a.split));
  const ManifestRecord* rec = nullptr;
  if (a.id.empty()) {
    rec = &recs.front();
  } else {
    for (const auto& r : recs) {
      if (r.id == a.id) {
        rec = &r;
        break;
      }
    }
    if (!rec) throw Error(ErrorKind::kData, "no clip " + a.id + " in split " + a.split);
  }

  const PredictionRecord* pred = nullptr;
  std::vector<PredictionRecord> preds;
  if (!a.pred_file.empty()) {
    preds = read_predictions(a.pred_file);
    for (const auto& p : preds) {
      if (p.id == rec->id) {
        pred = &p;
        break;
      }
    }
    if (!pred) throw Error(ErrorKind::kData, "no prediction for clip " + rec->id);
  }

  const int duration = rec->duration_ms();
  const FrameRationale gold = detail::gold_mask(*rec);
  FrameRationale predicted;
  if (pred) predicted = intervals_to_frames(pred->frames, duration);

  auto track = [](const FrameRationale& m, int lo, int hi) {
    std::string s;
    for (int i = lo; i < hi; ++i) s += m.bits[static_cast<std::size_t>(i)] ? '#' : '.';
    return s;
  };

  std::ostringstream os;
  os << "clip " << rec->id << "  split=" << a.split << "  label=" << rec->label
     << "  duration_ms=" << duration << "\n";
  if (pred) {
    os << "prediction: label=" << pred->label_pred << "  score=" << detail::fmt17(pred->score)
       << "\n";
  }
  os << "words:\n";
  for (const auto& w : rec->words) {
    os << "  " << w.text << " [" << w.start_ms << "," << w.end_ms << ")"
       << (w.rationale ? " *" : "") << "\n";
  }
  const int m = gold.size();
  for (int off = 0; off < m; off += 100) {
    const int hi = std::min(off + 100, m);
    char head[16];
    std::snprintf(head, sizeof(head), "%6dms ", off * kFrameMs);
    os << head << "gold " << track(gold, off, hi) << "\n";
    if (pred) os << "         pred " << track(predicted, off, hi) << "\n";
  }

  if (a.out_file.empty()) {
    std::cout << os.str();
  } else {
    detail::write_text_file(a.out_file, os.str());
    std::cout << "timeline -> " << a.out_file << "\n";
  }
  return 0;
}

// ---- dispatch ---------------------------------------------------------------

// Parses and runs one invocation. Exit codes: 0 success, 2 file-system
// failures, 1 everything else (bad usage, bad config, bad data).
inline int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"synthetic spoken hate-speech detection workbench"};
  app.name("ahsd");
  app.require_subcommand(1);
  int rc = 0;

  GenArgs gen;
  gen.cmd = app.add_subcommand("gen", "generate a synthetic annotated corpus");
  gen.cmd->add_option("--out", gen.out_dir, "output directory")->required();
  gen.cmd->add_option("--config", gen.config_file, "corpus config JSON");
  gen.cmd->add_option("--seed", gen.seed, "corpus seed");
  gen.cmd->add_option("--n-train", gen.n_train, "training clips");
  gen.cmd->add_option("--n-dev", gen.n_dev, "dev clips");
  gen.cmd->add_option("--n-test", gen.n_test, "test clips");
  gen.cmd->add_option("--lexicon-size", gen.lexicon_size, "lexicon size");
  gen.cmd->add_option("--hate-fraction", gen.hate_fraction, "hate fraction of the lexicon");
  gen.cmd->add_option("--snr-db", gen.snr_db, "signal-to-noise ratio in dB");
  gen.cmd->callback([&]() { rc = run_gen(gen); });

  TrainTextArgs tt;
  tt.cmd = app.add_subcommand("train-text", "train the cascade text classifier");
  tt.cmd->add_option("--data", tt.data_dir, "corpus directory")->required();
  tt.cmd->add_option("--out", tt.out_file, "checkpoint path")->required();
  tt.cmd->add_option("--source", tt.source, "transcript source: gold | asr");
  tt.cmd->add_option("--noise-config", tt.noise_config_file, "noise config JSON for --source asr");
  tt.cmd->add_option("--seed", tt.cfg.seed, "init/shuffle seed");
  tt.cmd->add_option("--d-model", tt.cfg.d_model, "embedding width");
  tt.cmd->add_option("--lr", tt.cfg.lr, "learning rate");
  tt.cmd->add_option("--epochs", tt.cfg.epochs, "training epochs");
  tt.cmd->add_option("--batch-size", tt.cfg.batch_size, "minibatch size");
  tt.cmd->add_option("--lambda-att", tt.cfg.lambda_att, "attention supervision weight");
  tt.cmd->callback([&]() { rc = run_train_text(tt); });

  TrainE2eArgs te;
  te.cmd = app.add_subcommand("train-e2e", "train the end-to-end audio model");
  te.cmd->add_option("--data", te.data_dir, "corpus directory")->required();
  te.cmd->add_option("--out", te.out_file, "checkpoint path")->required();
  te.cmd->add_option("--seed", te.cfg.seed, "init/shuffle seed");
  te.cmd->add_option("--lr", te.cfg.lr, "learning rate");
  te.cmd->add_option("--epochs", te.cfg.epochs, "training epochs");
  te.cmd->add_option("--batch-size", te.cfg.batch_size, "minibatch size");
  te.cmd->add_option("--alpha", te.cfg.alpha, "classification loss weight");
  te.cmd->add_option("--mode", te.cfg.mode, "joint | cls-only | fd-only");
  te.cmd->add_option("--d-h", te.cfg.d_h, "encoder width");
  te.cmd->add_option("--d-proj", te.cfg.d_proj, "clip-head projection width");
  te.cmd->callback([&]() { rc = run_train_e2e(te); });

  RunCascadeArgs rcas;
  rcas.cmd = app.add_subcommand("run-cascade", "predict with the cascade detector");
  rcas.cmd->add_option("--data", rcas.data_dir, "corpus directory")->required();
  rcas.cmd->add_option("--split", rcas.split, "split to predict on");
  rcas.cmd->add_option("--model", rcas.model_file, "text checkpoint")->required();
  rcas.cmd->add_option("--out", rcas.out_file, "predictions JSONL path")->required();
  rcas.cmd->add_option("--hyp", rcas.hyp_file, "hypothesis JSONL to classify");
  rcas.cmd->add_option("--noise-config", rcas.noise_config_file, "simulate a recognizer");
  rcas.cmd->add_option("--noise-seed", rcas.noise_seed, "recognizer noise seed");
  rcas.cmd->add_option("--sub-rate", rcas.sub_rate, "substitution rate");
  rcas.cmd->add_option("--del-rate", rcas.del_rate, "deletion rate");
  rcas.cmd->add_option("--ins-rate", rcas.ins_rate, "insertion rate");
  rcas.cmd->add_option("--hate-multiplier", rcas.hate_multiplier, "sub-rate scale on hate words");
  rcas.cmd->add_option("--jitter-sigma", rcas.jitter_sigma, "timestamp jitter sigma in ms");
  rcas.cmd->add_option("--dump-hyp", rcas.dump_hyp_file, "also write the hypotheses used");
  rcas.cmd->callback([&]() { rc = run_run_cascade(rcas); });

  RunE2eArgs re2e;
  re2e.cmd = app.add_subcommand("run-e2e", "predict with the end-to-end audio detector");
  re2e.cmd->add_option("--data", re2e.data_dir, "corpus directory")->required();
  re2e.cmd->add_option("--split", re2e.split, "split to predict on");
  re2e.cmd->add_option("--model", re2e.model_file, "audio checkpoint")->required();
  re2e.cmd->add_option("--out", re2e.out_file, "predictions JSONL path")->required();
  re2e.cmd->callback([&]() { rc = run_run_e2e(re2e); });

  EvalArgs ev;
  ev.cmd = app.add_subcommand("eval", "score predictions against a manifest");
  ev.cmd->add_option("--data", ev.data_dir, "corpus directory")->required();
  ev.cmd->add_option("--split", ev.split, "split the predictions cover");
  ev.cmd->add_option("--pred", ev.pred_file, "predictions JSONL")->required();
  ev.cmd->add_option("--out", ev.out_file, "report JSON path (stdout when omitted)");
  ev.cmd->add_option("--per-clip", ev.per_clip_file, "per-clip CSV path");
  ev.cmd->callback([&]() { rc = run_eval(ev); });

  SweepWerArgs sw;
  sw.cmd = app.add_subcommand("sweep-wer", "localization vs recognizer quality");
  sw.cmd->add_option("--data", sw.data_dir, "corpus directory")->required();
  sw.cmd->add_option("--split", sw.split, "split to sweep on");
  sw.cmd->add_option("--text-model", sw.text_model_file, "cascade text checkpoint")->required();
  sw.cmd->add_option("--e2e-model", sw.e2e_model_file, "audio checkpoint")->required();
  sw.cmd->add_option("--levels", sw.levels, "comma-separated substitution rates");
  sw.cmd->add_option("--seed", sw.seed, "noise seed base");
  sw.cmd->add_option("--out", sw.out_file, "sweep CSV path")->required();
  sw.cmd->add_option("--buckets", sw.buckets_file, "per-clip WER-bucket CSV path");
  sw.cmd->add_option("--bucket-edges", sw.bucket_edges, "bucket lower bounds, starting at 0");
  sw.cmd->callback([&]() { rc = run_sweep_wer(sw); });

  SweepAlphaArgs sa;
  sa.cmd = app.add_subcommand("sweep-alpha", "loss-mixing ablation for the audio model");
  sa.cmd->add_option("--data", sa.data_dir, "corpus directory")->required();
  sa.cmd->add_option("--split", sa.split, "evaluation split");
  sa.cmd->add_option("--alphas", sa.alphas, "comma-separated loss weights");
  sa.cmd->add_option("--seed", sa.cfg.seed, "init/shuffle seed");
  sa.cmd->add_option("--lr", sa.cfg.lr, "learning rate");
  sa.cmd->add_option("--epochs", sa.cfg.epochs, "training epochs");
  sa.cmd->add_option("--batch-size", sa.cfg.batch_size, "minibatch size");
  sa.cmd->add_option("--d-h", sa.cfg.d_h, "encoder width");
  sa.cmd->add_option("--d-proj", sa.cfg.d_proj, "clip-head projection width");
  sa.cmd->add_option("--out", sa.out_file, "sweep CSV path")->required();
  sa.cmd->callback([&]() { rc = run_sweep_alpha(sa); });

  GradcheckArgs gc;
  gc.cmd = app.add_subcommand("gradcheck", "finite-difference check of both models");
  gc.cmd->add_option("--eps", gc.eps, "finite-difference step");
  gc.cmd->add_option("--tol", gc.tol, "max relative error to accept");
  gc.cmd->callback([&]() { rc = run_gradcheck(gc); });

  VisualizeArgs vz;
  vz.cmd = app.add_subcommand("visualize", "ASCII timeline of one clip");
  vz.cmd->add_option("--data", vz.data_dir, "corpus directory")->required();
  vz.cmd->add_option("--split", vz.split, "split to read");
  vz.cmd->add_option("--id", vz.id, "clip id (defaults to the first record)");
  vz.cmd->add_option("--pred", vz.pred_file, "predictions JSONL to overlay");
  vz.cmd->add_option("--out", vz.out_file, "write the timeline here instead of stdout");
  vz.cmd->callback([&]() { rc = run_visualize(vz); });

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::kIo ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}

}  // namespace ahsd::cli

#endif  // AHSD_CLI_HPP_

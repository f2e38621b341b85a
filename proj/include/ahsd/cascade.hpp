// include/ahsd/cascade.hpp

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

#ifndef AHSD_CASCADE_HPP_
#define AHSD_CASCADE_HPP_

#include <algorithm>
#include <string>
#include <vector>

#include "ahsd/corpus.hpp"
#include "ahsd/frames.hpp"
#include "ahsd/metrics.hpp"
#include "ahsd/nnet.hpp"
#include "ahsd/text_model.hpp"
#include "ahsd/types.hpp"

namespace ahsd {

// Projects gold word rationale onto a hypothesis through the edit alignment:
// a hypothesis word aligned to a gold word (matched or substituted) inherits
// that word's flag; insertions get none. This is the supervision used when
// the text model trains on recognizer output.
inline std::vector<WordSpan> project_rationale(const std::vector<WordSpan>& gold,
                                               const std::vector<WordSpan>& hyp) {
  std::vector<std::string> ref_texts, hyp_texts;
  for (const auto& w : gold) ref_texts.push_back(w.text);
  for (const auto& w : hyp) hyp_texts.push_back(w.text);
  std::vector<WordSpan> out = hyp;
  for (auto& w : out) w.rationale = 0;
  if (gold.empty() || hyp.empty()) return out;
  const Alignment a = align_words(ref_texts, hyp_texts);
  for (const auto& op : a.ops) {
    if ((op.type == EditOpType::kMatch || op.type == EditOpType::kSub) && op.hyp_index >= 0 &&
        op.ref_index >= 0) {
      out[static_cast<std::size_t>(op.hyp_index)].rationale =
          gold[static_cast<std::size_t>(op.ref_index)].rationale;
    }
  }
  return out;
}

// Full cascade inference for one clip: classify the token stream, and when
// the verdict is positive, binarize attention, vote words, and rasterize the
// selected word spans onto the frame grid.
inline PredictionRecord cascade_predict(const TextModel& m, const Hypothesis& hyp,
                                        int clip_duration_ms) {
  if (clip_duration_ms <= 0) {
    throw Error(ErrorKind::kContract, "cascade_predict: clip duration must be positive");
  }
  PredictionRecord rec;
  rec.id = hyp.clip_id;
  if (hyp.words.empty()) {
    // Nothing recognized: report the benign class with zero confidence.
    rec.label_pred = 0;
    rec.score = 0.0;
    return rec;
  }

  const TextExample ex = make_text_example(hyp.clip_id, hyp.words, 0, m.vocab);
  const TextForward f = text_forward(m, ex.token_ids);
  const std::vector<double> probs = softmax({f.logits.at(0, 0), f.logits.at(0, 1)});
  rec.score = probs[1];
  rec.label_pred = f.logits.at(0, 1) > f.logits.at(0, 0) ? 1 : 0;
  if (rec.label_pred == 0) return rec;

  const std::vector<std::uint8_t> token_bits = binarize_attention(f.att.weights);
  const std::vector<std::uint8_t> word_bits =
      vote_words(token_bits, ex.word_of_token, ex.n_words);

  // Clamp picked spans to the clip, then rasterize with the frame-overlap
  // rule the gold masks use.
  std::vector<WordSpan> picked;
  for (std::size_t wi = 0; wi < hyp.words.size(); ++wi) {
    if (!word_bits[wi]) continue;
    WordSpan w = hyp.words[wi];
    w.start_ms = std::max(0, std::min(w.start_ms, clip_duration_ms));
    w.end_ms = std::max(0, std::min(w.end_ms, clip_duration_ms));
    if (w.end_ms <= w.start_ms) continue;
    w.rationale = 1;
    picked.push_back(w);
  }
  if (!picked.empty()) {
    const FrameRationale mask = spans_to_frames(picked, clip_duration_ms);
    rec.frames = frames_to_intervals(mask);
  }
  return rec;
}

}  // namespace ahsd

#endif  // AHSD_CASCADE_HPP_

// include/ahsd/metrics.hpp

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

#ifndef AHSD_METRICS_HPP_
#define AHSD_METRICS_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ahsd/error.hpp"
#include "ahsd/frames.hpp"
#include "ahsd/types.hpp"

namespace ahsd {

// ── clip classification ──────────────────────────────────────────────────

struct ClsReport {
  std::int64_t n = 0;
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;  // hate (label 1) is positive
  double accuracy = 0.0;
  double precision_hate = 0.0, recall_hate = 0.0, f1_hate = 0.0;
  double precision_normal = 0.0, recall_normal = 0.0, f1_normal = 0.0;
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
};

namespace detail {
inline double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }
inline double f1_of(double p, double r) { return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }
}  // namespace detail

// Accuracy plus per-class and macro precision/recall/F1. Empty classes and
// empty prediction sets score 0 by convention rather than NaN.
inline ClsReport cls_metrics(const std::vector<int>& pred, const std::vector<int>& gold) {
  if (pred.size() != gold.size()) {
    throw Error(ErrorKind::kContract, "cls_metrics: prediction/label count mismatch");
  }
  if (pred.empty()) {
    throw Error(ErrorKind::kContract, "cls_metrics: empty input");
  }
  ClsReport r;
  r.n = static_cast<std::int64_t>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int p = pred[i], g = gold[i];
    if ((p != 0 && p != 1) || (g != 0 && g != 1)) {
      throw Error(ErrorKind::kData, "cls_metrics: labels must be 0 or 1");
    }
    if (p == 1 && g == 1) ++r.tp;
    if (p == 1 && g == 0) ++r.fp;
    if (p == 0 && g == 1) ++r.fn;
    if (p == 0 && g == 0) ++r.tn;
  }
  const auto tp = static_cast<double>(r.tp), fp = static_cast<double>(r.fp),
             fn = static_cast<double>(r.fn), tn = static_cast<double>(r.tn);
  r.accuracy = (tp + tn) / static_cast<double>(r.n);
  r.precision_hate = detail::safe_div(tp, tp + fp);
  r.recall_hate = detail::safe_div(tp, tp + fn);
  r.f1_hate = detail::f1_of(r.precision_hate, r.recall_hate);
  r.precision_normal = detail::safe_div(tn, tn + fn);
  r.recall_normal = detail::safe_div(tn, tn + fp);
  r.f1_normal = detail::f1_of(r.precision_normal, r.recall_normal);
  r.macro_precision = 0.5 * (r.precision_hate + r.precision_normal);
  r.macro_recall = 0.5 * (r.recall_hate + r.recall_normal);
  r.macro_f1 = 0.5 * (r.f1_hate + r.f1_normal);
  return r;
}

// ── frame-level rationale metrics ────────────────────────────────────────

struct ClipFrames {
  std::string id;
  std::vector<FrameInterval> pred;  // 10 ms aligned, sorted, non-overlapping
  FrameRationale gold;
};

struct ClipIouRow {
  std::string id;
  std::int64_t pred_frames = 0;
  std::int64_t gold_frames = 0;
  std::int64_t intersection_frames = 0;
  std::int64_t union_frames = 0;
  std::optional<double> iou;  // absent for 0/0 clips
};

struct FdReport {
  double pooled_iou = 0.0;                 // sum(I) / sum(U), the headline number
  std::optional<double> mean_clip_iou;     // mean over clips with a non-empty union
  std::int64_t clips_with_union = 0;
  std::int64_t tp = 0, fp = 0, fn = 0;     // micro-pooled frame counts
  double frame_precision = 0.0, frame_recall = 0.0, frame_f1 = 0.0;
  std::string aggregation = "micro-pooled";
  std::vector<ClipIouRow> per_clip;
};

namespace detail {

// Total overlap in ms of two sorted non-overlapping interval lists.
inline std::int64_t interval_overlap_ms(const std::vector<FrameInterval>& a,
                                        const std::vector<FrameInterval>& b) {
  std::int64_t total = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const int lo = std::max(a[i].start_ms, b[j].start_ms);
    const int hi = std::min(a[i].end_ms, b[j].end_ms);
    if (hi > lo) total += hi - lo;
    if (a[i].end_ms < b[j].end_ms) {
      ++i;
    } else {
      ++j;
    }
  }
  return total;
}

inline std::int64_t interval_total_ms(const std::vector<FrameInterval>& a) {
  std::int64_t total = 0;
  for (const auto& iv : a) total += iv.end_ms - iv.start_ms;
  return total;
}

}  // namespace detail

// Per-clip frame counts computed by interval arithmetic: intersection and
// union lengths are measured in milliseconds and divided by the frame size.
inline ClipIouRow clip_iou_counts(const ClipFrames& clip) {
  // Round-trip through the mask validates alignment/bounds of predictions.
  (void)intervals_to_frames(clip.pred, clip.gold.size() * kFrameMs);
  const auto gold_intervals = frames_to_intervals(clip.gold);
  ClipIouRow row;
  row.id = clip.id;
  const std::int64_t inter_ms = detail::interval_overlap_ms(clip.pred, gold_intervals);
  const std::int64_t pred_ms = detail::interval_total_ms(clip.pred);
  const std::int64_t gold_ms = detail::interval_total_ms(gold_intervals);
  row.pred_frames = pred_ms / kFrameMs;
  row.gold_frames = gold_ms / kFrameMs;
  row.intersection_frames = inter_ms / kFrameMs;
  row.union_frames = (pred_ms + gold_ms - inter_ms) / kFrameMs;
  if (row.union_frames > 0) {
    row.iou = static_cast<double>(row.intersection_frames) /
              static_cast<double>(row.union_frames);
  }
  return row;
}

inline FdReport frame_metrics(const std::vector<ClipFrames>& clips) {
  if (clips.empty()) {
    throw Error(ErrorKind::kContract, "frame_metrics: empty input");
  }
  FdReport rep;
  std::int64_t inter_total = 0, union_total = 0;
  double iou_sum = 0.0;
  for (const ClipFrames& clip : clips) {
    ClipIouRow row = clip_iou_counts(clip);
    inter_total += row.intersection_frames;
    union_total += row.union_frames;
    rep.tp += row.intersection_frames;
    rep.fp += row.pred_frames - row.intersection_frames;
    rep.fn += row.gold_frames - row.intersection_frames;
    if (row.iou.has_value()) {
      iou_sum += *row.iou;
      ++rep.clips_with_union;
    }
    rep.per_clip.push_back(std::move(row));
  }
  rep.pooled_iou = union_total == 0
                       ? 0.0
                       : static_cast<double>(inter_total) / static_cast<double>(union_total);
  if (rep.clips_with_union > 0) {
    rep.mean_clip_iou = iou_sum / static_cast<double>(rep.clips_with_union);
  }
  rep.frame_precision = detail::safe_div(static_cast<double>(rep.tp),
                                         static_cast<double>(rep.tp + rep.fp));
  rep.frame_recall = detail::safe_div(static_cast<double>(rep.tp),
                                      static_cast<double>(rep.tp + rep.fn));
  rep.frame_f1 = detail::f1_of(rep.frame_precision, rep.frame_recall);
  return rep;
}

// ── word alignment and WER ───────────────────────────────────────────────

enum class EditOpType { kMatch, kSub, kDel, kIns };

struct EditOp {
  EditOpType type;
  int ref_index;  // -1 for insertions
  int hyp_index;  // -1 for deletions
};

struct Alignment {
  std::vector<EditOp> ops;
  std::int64_t n_match = 0, n_sub = 0, n_del = 0, n_ins = 0;
};

// Levenshtein alignment with unit costs. When several alignments reach the
// same cost the backtrace prefers match, then substitution, then deletion,
// then insertion; hate-word attribution depends on this order being fixed.
inline Alignment align_words(const std::vector<std::string>& ref,
                             const std::vector<std::string>& hyp) {
  const std::size_t m = ref.size(), n = hyp.size();
  std::vector<std::vector<std::int32_t>> d(m + 1, std::vector<std::int32_t>(n + 1, 0));
  for (std::size_t i = 0; i <= m; ++i) d[i][0] = static_cast<std::int32_t>(i);
  for (std::size_t j = 0; j <= n; ++j) d[0][j] = static_cast<std::int32_t>(j);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const std::int32_t sub_or_match =
          d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      d[i][j] = std::min({sub_or_match, d[i - 1][j] + 1, d[i][j - 1] + 1});
    }
  }
  Alignment out;
  std::size_t i = m, j = n;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && d[i][j] == d[i - 1][j - 1]) {
      out.ops.push_back({EditOpType::kMatch, static_cast<int>(i) - 1, static_cast<int>(j) - 1});
      --i;
      --j;
    } else if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + 1) {
      out.ops.push_back({EditOpType::kSub, static_cast<int>(i) - 1, static_cast<int>(j) - 1});
      --i;
      --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      out.ops.push_back({EditOpType::kDel, static_cast<int>(i) - 1, -1});
      --i;
    } else {
      out.ops.push_back({EditOpType::kIns, -1, static_cast<int>(j) - 1});
      --j;
    }
  }
  std::reverse(out.ops.begin(), out.ops.end());
  for (const EditOp& op : out.ops) {
    switch (op.type) {
      case EditOpType::kMatch: ++out.n_match; break;
      case EditOpType::kSub: ++out.n_sub; break;
      case EditOpType::kDel: ++out.n_del; break;
      case EditOpType::kIns: ++out.n_ins; break;
    }
  }
  return out;
}

struct WerResult {
  std::int64_t n_ref = 0;
  std::int64_t n_sub = 0, n_del = 0, n_ins = 0;
  double wer = 0.0;
  Alignment alignment;
};

inline WerResult wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  if (ref.empty()) {
    throw Error(ErrorKind::kData, "wer: reference transcript is empty");
  }
  WerResult out;
  out.alignment = align_words(ref, hyp);
  out.n_ref = static_cast<std::int64_t>(ref.size());
  out.n_sub = out.alignment.n_sub;
  out.n_del = out.alignment.n_del;
  out.n_ins = out.alignment.n_ins;
  out.wer = static_cast<double>(out.n_sub + out.n_del + out.n_ins) /
            static_cast<double>(out.n_ref);
  return out;
}

// ── hate-word WER and timestamp IoU ──────────────────────────────────────

namespace detail {
inline std::vector<std::string> texts_of(const std::vector<WordSpan>& words) {
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(w.text);
  return out;
}
}  // namespace detail

struct HateWerResult {
  std::int64_t n_hate_ref = 0;
  std::int64_t n_hate_err = 0;  // hate reference words substituted or deleted
  std::optional<double> hate_wer;
};

// Error rate restricted to rationale-1 reference words. A hate word counts
// as an error when the alignment substitutes or deletes it; insertions are
// not attributable to any reference word. Undefined (absent) when the
// reference contains no hate words.
inline HateWerResult hate_wer(const std::vector<WordSpan>& ref,
                              const std::vector<WordSpan>& hyp) {
  const Alignment a = align_words(detail::texts_of(ref), detail::texts_of(hyp));
  HateWerResult out;
  for (const WordSpan& w : ref) {
    if (w.rationale == 1) ++out.n_hate_ref;
  }
  for (const EditOp& op : a.ops) {
    if (op.type == EditOpType::kSub || op.type == EditOpType::kDel) {
      if (ref[static_cast<std::size_t>(op.ref_index)].rationale == 1) ++out.n_hate_err;
    }
  }
  if (out.n_hate_ref > 0) {
    out.hate_wer = static_cast<double>(out.n_hate_err) / static_cast<double>(out.n_hate_ref);
  }
  return out;
}

struct TimestampIouResult {
  std::int64_t n_matched = 0;
  std::optional<double> mean_iou;  // absent when nothing matched
};

// Mean interval IoU over aligned word pairs with identical text. Measures
// how well hypothesis timestamps track the reference segmentation.
inline TimestampIouResult timestamp_iou(const std::vector<WordSpan>& ref,
                                        const std::vector<WordSpan>& hyp) {
  const Alignment a = align_words(detail::texts_of(ref), detail::texts_of(hyp));
  TimestampIouResult out;
  double sum = 0.0;
  for (const EditOp& op : a.ops) {
    if (op.type != EditOpType::kMatch) continue;
    const WordSpan& r = ref[static_cast<std::size_t>(op.ref_index)];
    const WordSpan& h = hyp[static_cast<std::size_t>(op.hyp_index)];
    const double inter = std::max(0.0, static_cast<double>(std::min(r.end_ms, h.end_ms) -
                                                           std::max(r.start_ms, h.start_ms)));
    const double uni = static_cast<double>(r.end_ms - r.start_ms) +
                       static_cast<double>(h.end_ms - h.start_ms) - inter;
    sum += uni > 0.0 ? inter / uni : 0.0;
    ++out.n_matched;
  }
  if (out.n_matched > 0) {
    out.mean_iou = sum / static_cast<double>(out.n_matched);
  }
  return out;
}

// ── WER-bucket sensitivity table ─────────────────────────────────────────

struct WerIouRow {
  double wer = 0.0;
  std::optional<double> iou;
  std::string model_tag;
};

struct BucketRow {
  std::string model_tag;
  double lo = 0.0;
  std::optional<double> hi;  // absent for the open-ended last bucket
  std::int64_t count = 0;
  std::int64_t with_iou = 0;
  std::optional<double> mean_iou;  // absent when no row carries an IoU
};

// Groups per-clip (WER, IoU) rows into WER buckets per model. `edges` are
// bucket lower bounds starting at 0; the last bucket is open-ended.
inline std::vector<BucketRow> wer_bucket_analysis(const std::vector<WerIouRow>& rows,
                                                  const std::vector<double>& edges) {
  if (edges.empty() || edges.front() != 0.0) {
    throw Error(ErrorKind::kConfig, "wer_bucket_analysis: edges must start at 0");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] <= edges[i - 1]) {
      throw Error(ErrorKind::kConfig, "wer_bucket_analysis: edges must be strictly increasing");
    }
  }
  std::vector<std::string> tags;
  for (const auto& row : rows) {
    if (std::find(tags.begin(), tags.end(), row.model_tag) == tags.end()) {
      tags.push_back(row.model_tag);
    }
  }
  std::sort(tags.begin(), tags.end());
  std::vector<BucketRow> out;
  for (const std::string& tag : tags) {
    for (std::size_t b = 0; b < edges.size(); ++b) {
      BucketRow br;
      br.model_tag = tag;
      br.lo = edges[b];
      if (b + 1 < edges.size()) br.hi = edges[b + 1];
      double sum = 0.0;
      for (const auto& row : rows) {
        if (row.model_tag != tag) continue;
        if (row.wer < br.lo) continue;
        if (br.hi.has_value() && row.wer >= *br.hi) continue;
        ++br.count;
        if (row.iou.has_value()) {
          ++br.with_iou;
          sum += *row.iou;
        }
      }
      if (br.with_iou > 0) br.mean_iou = sum / static_cast<double>(br.with_iou);
      out.push_back(std::move(br));
    }
  }
  return out;
}

}  // namespace ahsd

#endif  // AHSD_METRICS_HPP_

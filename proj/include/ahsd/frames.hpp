// include/ahsd/frames.hpp

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

#ifndef AHSD_FRAMES_HPP_
#define AHSD_FRAMES_HPP_

#include <algorithm>
#include <string>
#include <vector>

#include "ahsd/error.hpp"
#include "ahsd/types.hpp"

namespace ahsd {

inline int frame_count_for_duration(int clip_duration_ms) {
  if (clip_duration_ms <= 0) {
    throw Error(ErrorKind::kData, "clip duration must be positive, got " +
                                      std::to_string(clip_duration_ms) + " ms");
  }
  return (clip_duration_ms + kFrameMs - 1) / kFrameMs;
}

// Projects rationale word spans onto the 10 ms grid. A frame is set when
// at least half of it is covered by the union of rationale-1 spans;
// exactly 50% counts as covered. Overlap is accumulated across spans so
// that two abutting short spans can jointly claim a frame.
inline FrameRationale spans_to_frames(const std::vector<WordSpan>& words,
                                      int clip_duration_ms) {
  validate_spans(words, "spans_to_frames");
  const int last_end = transcript_end_ms(words);
  if (clip_duration_ms < last_end) {
    throw Error(ErrorKind::kData,
                "clip duration " + std::to_string(clip_duration_ms) +
                    " ms is shorter than the last span end " + std::to_string(last_end) + " ms");
  }
  const int n_frames = frame_count_for_duration(clip_duration_ms);
  std::vector<int> overlap_ms(static_cast<std::size_t>(n_frames), 0);
  for (const WordSpan& w : words) {
    if (w.rationale != 1) continue;
    const int first = w.start_ms / kFrameMs;
    const int last = (w.end_ms - 1) / kFrameMs;
    for (int i = first; i <= last; ++i) {
      const int lo = std::max(w.start_ms, i * kFrameMs);
      const int hi = std::min(w.end_ms, (i + 1) * kFrameMs);
      overlap_ms[static_cast<std::size_t>(i)] += hi - lo;
    }
  }
  FrameRationale out;
  out.bits.resize(static_cast<std::size_t>(n_frames), 0);
  for (int i = 0; i < n_frames; ++i) {
    out.bits[static_cast<std::size_t>(i)] =
        (2 * overlap_ms[static_cast<std::size_t>(i)] >= kFrameMs) ? 1 : 0;
  }
  return out;
}

// Maximal runs of set frames as half-open millisecond intervals.
inline std::vector<FrameInterval> frames_to_intervals(const FrameRationale& frames) {
  std::vector<FrameInterval> out;
  const int n = frames.size();
  int i = 0;
  while (i < n) {
    if (!frames.bits[static_cast<std::size_t>(i)]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && frames.bits[static_cast<std::size_t>(j)]) ++j;
    out.push_back({i * kFrameMs, j * kFrameMs});
    i = j;
  }
  return out;
}

// Inverse of frames_to_intervals. Intervals must be sorted,
// non-overlapping, 10 ms aligned, and contained in the clip.
inline FrameRationale intervals_to_frames(const std::vector<FrameInterval>& intervals,
                                          int clip_duration_ms) {
  const int n_frames = frame_count_for_duration(clip_duration_ms);
  FrameRationale out;
  out.bits.resize(static_cast<std::size_t>(n_frames), 0);
  int prev_end = 0;
  for (const FrameInterval& iv : intervals) {
    if (iv.start_ms % kFrameMs != 0 || iv.end_ms % kFrameMs != 0) {
      throw Error(ErrorKind::kData,
                  "interval [" + std::to_string(iv.start_ms) + ", " +
                      std::to_string(iv.end_ms) + ") is not aligned to the 10 ms grid");
    }
    if (iv.start_ms < prev_end || iv.end_ms <= iv.start_ms) {
      throw Error(ErrorKind::kData,
                  "intervals must be sorted, non-empty and non-overlapping");
    }
    if (iv.end_ms > n_frames * kFrameMs) {
      throw Error(ErrorKind::kData,
                  "interval end " + std::to_string(iv.end_ms) + " ms exceeds the clip grid (" +
                      std::to_string(n_frames * kFrameMs) + " ms)");
    }
    for (int i = iv.start_ms / kFrameMs; i < iv.end_ms / kFrameMs; ++i) {
      out.bits[static_cast<std::size_t>(i)] = 1;
    }
    prev_end = iv.end_ms;
  }
  return out;
}

}  // namespace ahsd

#endif  // AHSD_FRAMES_HPP_

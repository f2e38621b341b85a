// include/ahsd/types.hpp

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

#ifndef AHSD_TYPES_HPP_
#define AHSD_TYPES_HPP_

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "ahsd/error.hpp"

namespace ahsd {

// All timestamps in this project are integer milliseconds; intervals are
// half-open [start_ms, end_ms). The rationale grid is 10 ms per frame.
constexpr int kFrameMs = 10;
constexpr int kSampleRate = 22050;

struct AudioClip {
  std::string id;
  int sample_rate = kSampleRate;
  std::vector<double> samples;  // mono, amplitude in [-1, 1]
};

struct WordSpan {
  std::string text;
  int start_ms = 0;
  int end_ms = 0;     // exclusive
  int rationale = 0;  // 1 marks the word as hate evidence
};

struct Transcript {
  std::vector<WordSpan> words;  // sorted by start_ms, non-overlapping
};

// Per-clip binary mask, one bit per 10 ms frame; frame i covers
// [10*i, 10*i + 10).
struct FrameRationale {
  std::vector<std::uint8_t> bits;

  int size() const { return static_cast<int>(bits.size()); }
};

struct ClipAnnotation {
  std::string clip_id;
  int label = 0;  // 1 = hate; 1 iff any word rationale is 1
  Transcript transcript;
  FrameRationale frames;
};

// A recognizer output: word texts and timestamps, no rationale claims.
struct Hypothesis {
  std::string clip_id;
  std::vector<WordSpan> words;  // rationale field unused (0)
};

struct FrameInterval {
  int start_ms = 0;
  int end_ms = 0;  // exclusive, 10 ms aligned when produced by this library
};

struct PredictionRecord {
  std::string id;
  int label_pred = 0;
  double score = 0.0;  // predicted probability of the hate class
  std::vector<FrameInterval> frames;
};

// Validates ordering/overlap invariants shared by gold transcripts and
// hypotheses. `what` names the offending object in error messages.
inline void validate_spans(const std::vector<WordSpan>& words, const char* what) {
  int prev_end = -1;
  bool prev_valid = false;
  for (const WordSpan& w : words) {
    if (w.start_ms < 0 || w.end_ms <= w.start_ms) {
      throw Error(ErrorKind::kData,
                  std::string(what) + ": invalid span [" + std::to_string(w.start_ms) +
                      ", " + std::to_string(w.end_ms) + ") for word '" + w.text + "'");
    }
    if (w.rationale != 0 && w.rationale != 1) {
      throw Error(ErrorKind::kData,
                  std::string(what) + ": rationale must be 0 or 1 for word '" + w.text + "'");
    }
    if (prev_valid && w.start_ms < prev_end) {
      throw Error(ErrorKind::kData,
                  std::string(what) + ": spans overlap or are out of order at word '" +
                      w.text + "'");
    }
    prev_end = w.end_ms;
    prev_valid = true;
  }
}

inline void validate_spans(const std::vector<WordSpan>& words, const std::string& what) {
  validate_spans(words, what.c_str());
}

inline int transcript_end_ms(const std::vector<WordSpan>& words) {
  int end = 0;
  for (const WordSpan& w : words) end = std::max(end, w.end_ms);
  return end;
}

}  // namespace ahsd

#endif  // AHSD_TYPES_HPP_

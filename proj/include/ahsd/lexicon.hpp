// include/ahsd/lexicon.hpp

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

#ifndef AHSD_LEXICON_HPP_
#define AHSD_LEXICON_HPP_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "ahsd/error.hpp"
#include "ahsd/rng.hpp"
#include "ahsd/types.hpp"

namespace ahsd {

struct LexiconEntry {
  std::string text;
  double base_freq = 0.0;  // fundamental of the word's tone stack, Hz
  bool is_hate = false;
};

struct Lexicon {
  std::vector<LexiconEntry> words;

  int find(const std::string& text) const {
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (words[i].text == text) return static_cast<int>(i);
    }
    return -1;
  }

  std::vector<std::string> texts() const {
    std::vector<std::string> out;
    out.reserve(words.size());
    for (const auto& w : words) out.push_back(w.text);
    return out;
  }
};

namespace lexicon_detail {

// Spectral signature of word k under the default analysis frontend
// (16 uniform bands over [0, sample_rate/2]): which band each of the three
// harmonics lands in. Words sharing a signature produce near-identical
// band energies, so hate labels are assigned to whole signature classes.
// That keeps the hate/normal distinction recoverable from band features,
// which the rest of the pipeline (and its training budgets) relies on.
struct Signature {
  int b1, b2, b3;
  bool operator==(const Signature& o) const { return b1 == o.b1 && b2 == o.b2 && b3 == o.b3; }
};

inline Signature signature_of(double f) {
  const double band_hz = (static_cast<double>(kSampleRate) / 2.0) / 16.0;
  auto band = [&](double freq) { return static_cast<int>(freq / band_hz); };
  return {band(f), band(2.0 * f), band(3.0 * f)};
}

}  // namespace lexicon_detail

// Deterministic lexicon: word k carries fundamental 200 + 40k Hz. Exactly
// round(size * hate_fraction) words are hate; hate positions are drawn per
// seed among signature-class unions so the chosen set stays spectrally
// disjoint from the normal words whenever an exact cover exists.
inline Lexicon build_lexicon(std::uint64_t seed, int size, double hate_fraction) {
  if (size < 2) {
    throw Error(ErrorKind::kConfig, "build_lexicon: size must be at least 2");
  }
  if (!(hate_fraction > 0.0) || !(hate_fraction < 1.0)) {
    throw Error(ErrorKind::kConfig, "build_lexicon: hate_fraction must be in (0, 1)");
  }
  const auto n_hate =
      static_cast<int>(std::llround(static_cast<double>(size) * hate_fraction));
  if (n_hate < 1 || n_hate >= size) {
    throw Error(ErrorKind::kConfig,
                "build_lexicon: size " + std::to_string(size) + " and hate_fraction " +
                    std::to_string(hate_fraction) + " leave no words for one of the classes");
  }

  // Runs of identical spectral signature over k = 0..size-1.
  std::vector<std::pair<int, int>> classes;  // (first k, count)
  for (int k = 0; k < size; ++k) {
    const double f = 200.0 + 40.0 * k;
    if (k > 0 && lexicon_detail::signature_of(f) ==
                     lexicon_detail::signature_of(200.0 + 40.0 * (k - 1))) {
      ++classes.back().second;
    } else {
      classes.push_back({k, 1});
    }
  }

  Rng rng = Rng::derived(seed, 0x4c455849434f4eULL);  // stream tag for lexicon draws
  const auto n_classes = classes.size();
  std::vector<bool> hate(static_cast<std::size_t>(size), false);

  // Subset-sum over class sizes: reach[i][s] = some suffix selection of
  // classes i.. sums to s.
  std::vector<std::vector<char>> reach(n_classes + 1,
                                       std::vector<char>(static_cast<std::size_t>(n_hate) + 1, 0));
  reach[n_classes][0] = 1;
  for (std::size_t i = n_classes; i-- > 0;) {
    const int c = classes[i].second;
    for (int s = 0; s <= n_hate; ++s) {
      reach[i][static_cast<std::size_t>(s)] =
          reach[i + 1][static_cast<std::size_t>(s)] ||
          (s >= c && reach[i + 1][static_cast<std::size_t>(s - c)]);
    }
  }

  if (reach[0][static_cast<std::size_t>(n_hate)]) {
    int remaining = n_hate;
    for (std::size_t i = 0; i < n_classes; ++i) {
      const int c = classes[i].second;
      const bool can_take = remaining >= c && reach[i + 1][static_cast<std::size_t>(remaining - c)];
      const bool can_skip = reach[i + 1][static_cast<std::size_t>(remaining)];
      bool take = can_take;
      if (can_take && can_skip) take = rng.uniform() < 0.5;
      if (take) {
        for (int k = classes[i].first; k < classes[i].first + c; ++k) {
          hate[static_cast<std::size_t>(k)] = true;
        }
        remaining -= c;
      }
    }
  } else {
    // No exact class cover; take seed-shuffled whole classes and trim the
    // last one. A single split class is the best achievable here.
    std::vector<std::size_t> order(n_classes);
    for (std::size_t i = 0; i < n_classes; ++i) order[i] = i;
    rng.shuffle(order);
    int remaining = n_hate;
    for (std::size_t i : order) {
      if (remaining == 0) break;
      const int take = std::min(remaining, classes[i].second);
      for (int k = classes[i].first; k < classes[i].first + take; ++k) {
        hate[static_cast<std::size_t>(k)] = true;
      }
      remaining -= take;
    }
  }

  Lexicon lex;
  lex.words.reserve(static_cast<std::size_t>(size));
  int n_h = 0, n_w = 0;
  for (int k = 0; k < size; ++k) {
    LexiconEntry e;
    e.base_freq = 200.0 + 40.0 * k;
    e.is_hate = hate[static_cast<std::size_t>(k)];
    char buf[24];
    if (e.is_hate) {
      std::snprintf(buf, sizeof(buf), "h%02d", n_h++);
    } else {
      std::snprintf(buf, sizeof(buf), "w%02d", n_w++);
    }
    e.text = buf;
    lex.words.push_back(std::move(e));
  }
  return lex;
}

}  // namespace ahsd

#endif  // AHSD_LEXICON_HPP_

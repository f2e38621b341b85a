// include/ahsd/features.hpp

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

#ifndef AHSD_FEATURES_HPP_
#define AHSD_FEATURES_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "ahsd/error.hpp"
#include "ahsd/tensor.hpp"
#include "ahsd/types.hpp"

namespace ahsd {

// 25 ms windows every 20 ms at 22.05 kHz, energies pooled into 16 uniform
// bands of the 1024-point spectrum, log-compressed.
constexpr int kFeatWindow = 551;
constexpr int kFeatHop = 441;
constexpr int kNumBands = 16;
constexpr int kFftSize = 1024;

namespace feat_detail {

// Iterative radix-2 FFT, in place. Sizes must be powers of two.
inline void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
  const std::size_t n = re.size();
  if (n == 0 || (n & (n - 1)) != 0 || im.size() != n) {
    throw Error(ErrorKind::kContract, "fft_radix2: size must be a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const double wr = std::cos(ang), wi = std::sin(ang);
    for (std::size_t i = 0; i < n; i += len) {
      double cr = 1.0, ci = 0.0;
      for (std::size_t k = 0; k < len / 2; ++k) {
        const double ur = re[i + k], ui = im[i + k];
        const double vr = re[i + k + len / 2] * cr - im[i + k + len / 2] * ci;
        const double vi = re[i + k + len / 2] * ci + im[i + k + len / 2] * cr;
        re[i + k] = ur + vr;
        im[i + k] = ui + vi;
        re[i + k + len / 2] = ur - vr;
        im[i + k + len / 2] = ui - vi;
        const double ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

}  // namespace feat_detail

// Number of analysis frames for n samples: every full window plus exactly
// one zero-padded tail covering the remainder.
inline int feature_frame_count(std::int64_t n_samples) {
  if (n_samples < kFeatHop) {
    throw Error(ErrorKind::kData, "features: clip shorter than one hop (" +
                                      std::to_string(n_samples) + " samples)");
  }
  if (n_samples < kFeatWindow) return 1;
  const std::int64_t full = 1 + (n_samples - kFeatWindow) / kFeatHop;
  return static_cast<int>(full + 1);
}

// Center of analysis frame t on the millisecond axis.
inline double feature_frame_center_ms(int t) { return 12.5 + 20.0 * t; }

inline Tensor extract_features(const std::vector<double>& samples) {
  const auto n = static_cast<std::int64_t>(samples.size());
  const int t_total = feature_frame_count(n);

  std::vector<double> hann(kFeatWindow);
  for (int j = 0; j < kFeatWindow; ++j) {
    hann[static_cast<std::size_t>(j)] =
        0.5 - 0.5 * std::cos(2.0 * M_PI * j / static_cast<double>(kFeatWindow - 1));
  }

  Tensor feats = Tensor::zeros({t_total, kNumBands});
  std::vector<double> re(kFftSize), im(kFftSize);
  for (int t = 0; t < t_total; ++t) {
    const std::int64_t start = static_cast<std::int64_t>(t) * kFeatHop;
    std::fill(re.begin(), re.end(), 0.0);
    std::fill(im.begin(), im.end(), 0.0);
    for (int j = 0; j < kFeatWindow; ++j) {
      const std::int64_t idx = start + j;
      if (idx >= n) break;  // the tail window runs past the signal
      re[static_cast<std::size_t>(j)] = samples[static_cast<std::size_t>(idx)] *
                                        hann[static_cast<std::size_t>(j)];
    }
    feat_detail::fft_radix2(re, im);

    double bands[kNumBands] = {0.0};
    for (int k = 0; k <= kFftSize / 2; ++k) {
      const double mag = std::sqrt(re[static_cast<std::size_t>(k)] * re[static_cast<std::size_t>(k)] +
                                   im[static_cast<std::size_t>(k)] * im[static_cast<std::size_t>(k)]);
      int band = k / (kFftSize / 2 / kNumBands);
      if (band >= kNumBands) band = kNumBands - 1;  // the Nyquist bin joins the top band
      bands[band] += mag;
    }
    for (int b = 0; b < kNumBands; ++b) {
      feats.at(t, b) = std::log(bands[b] + 1e-6);
    }
  }
  return feats;
}

}  // namespace ahsd

#endif  // AHSD_FEATURES_HPP_

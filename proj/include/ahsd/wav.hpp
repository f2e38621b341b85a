// include/ahsd/wav.hpp

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

#ifndef AHSD_WAV_HPP_
#define AHSD_WAV_HPP_

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ahsd/error.hpp"

namespace ahsd {

// Minimal RIFF/WAVE support: PCM, 16-bit signed little-endian, mono. That
// is the only shape this project ever produces or consumes.

namespace wav_detail {

inline void put_u32(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace wav_detail

inline void write_wav(const std::filesystem::path& path, const std::vector<double>& samples,
                      int sample_rate) {
  using wav_detail::put_u16;
  using wav_detail::put_u32;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::string buf;
  buf.reserve(44 + data_bytes);
  buf += "RIFF";
  put_u32(buf, 36 + data_bytes);
  buf += "WAVE";
  buf += "fmt ";
  put_u32(buf, 16);
  put_u16(buf, 1);  // PCM
  put_u16(buf, 1);  // mono
  put_u32(buf, static_cast<std::uint32_t>(sample_rate));
  put_u32(buf, static_cast<std::uint32_t>(sample_rate * 2));
  put_u16(buf, 2);   // block align
  put_u16(buf, 16);  // bits per sample
  buf += "data";
  put_u32(buf, data_bytes);
  for (double x : samples) {
    double clamped = x;
    if (clamped > 1.0) clamped = 1.0;
    if (clamped < -1.0) clamped = -1.0;
    const auto q = static_cast<std::int16_t>(std::lround(clamped * 32767.0));
    put_u16(buf, static_cast<std::uint16_t>(q));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot open WAV for writing: " + path.string());
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) {
    throw Error(ErrorKind::kIo, "failed writing WAV: " + path.string());
  }
}

struct WavData {
  int sample_rate = 0;
  std::vector<double> samples;  // decoded to [-1, 1]
};

inline WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open WAV: " + path.string());
  }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto fail = [&](const std::string& why) -> WavData {
    throw Error(ErrorKind::kData, path.string() + ": " + why);
  };
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0) {
    return fail("not a RIFF/WAVE file");
  }
  auto rd_u32 = [&](std::size_t off) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off])) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + 1])) << 8) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + 2])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + 3])) << 24);
  };
  auto rd_u16 = [&](std::size_t off) {
    return static_cast<std::uint16_t>(
        static_cast<std::uint16_t>(static_cast<unsigned char>(bytes[off])) |
        (static_cast<std::uint16_t>(static_cast<unsigned char>(bytes[off + 1])) << 8));
  };
  WavData out;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const std::uint32_t size = rd_u32(pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      return fail("truncated chunk '" + id + "'");
    }
    if (id == "fmt ") {
      if (size < 16) return fail("fmt chunk too small");
      const std::uint16_t format = rd_u16(body);
      const std::uint16_t channels = rd_u16(body + 2);
      const std::uint16_t bits = rd_u16(body + 14);
      if (format != 1) return fail("only PCM is supported");
      if (channels != 1) return fail("only mono is supported");
      if (bits != 16) return fail("only 16-bit samples are supported");
      out.sample_rate = static_cast<int>(rd_u32(body + 4));
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) return fail("data chunk before fmt chunk");
      const std::size_t n = size / 2;
      out.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto u = rd_u16(body + 2 * i);
        const auto q = static_cast<std::int16_t>(u);
        out.samples[i] = static_cast<double>(q) / 32767.0;
      }
      return out;
    }
    pos = body + size + (size % 2);  // chunks are word aligned
  }
  return fail("no data chunk found");
}

}  // namespace ahsd

#endif  // AHSD_WAV_HPP_

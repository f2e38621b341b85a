// tests/test_support.hpp

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

#ifndef AHSD_TESTS_TEST_SUPPORT_HPP_
#define AHSD_TESTS_TEST_SUPPORT_HPP_

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ahsd/rng.hpp"
#include "ahsd/types.hpp"

namespace ahsd_test {

// Random mask with clustered runs so interval extraction sees realistic
// shapes rather than uniform noise.
inline ahsd::FrameRationale random_mask(ahsd::Rng& rng, int n_frames) {
  ahsd::FrameRationale fr;
  fr.bits.resize(static_cast<std::size_t>(n_frames), 0);
  int i = 0;
  bool on = rng.uniform() < 0.3;
  while (i < n_frames) {
    const int run = static_cast<int>(rng.uniform_int(1, 12));
    for (int j = i; j < std::min(n_frames, i + run); ++j) {
      fr.bits[static_cast<std::size_t>(j)] = on ? 1 : 0;
    }
    i += run;
    on = !on && rng.uniform() < 0.7 ? true : false;
  }
  return fr;
}

// Scratch directory unique to a test, removed when the guard dies.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    ahsd::Rng rng(ahsd::fnv1a64(tag) ^ static_cast<std::uint64_t>(
                                           std::chrono::steady_clock::now().time_since_epoch().count()));
    path_ = std::filesystem::temp_directory_path() /
            ("ahsd_test_" + tag + "_" + std::to_string(rng.next() & 0xffffff));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ahsd_test

#endif  // AHSD_TESTS_TEST_SUPPORT_HPP_

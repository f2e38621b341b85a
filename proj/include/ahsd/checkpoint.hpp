// include/ahsd/checkpoint.hpp

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

#ifndef AHSD_CHECKPOINT_HPP_
#define AHSD_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "ahsd/error.hpp"
#include "ahsd/tensor.hpp"

namespace ahsd {

// Model snapshot as JSON. nlohmann::json objects are key-sorted, so the
// serialized bytes are a pure function of the contents; that is what the
// byte-identical reproducibility guarantees lean on.
struct Checkpoint {
  int format_version = 1;
  std::string arch;
  nlohmann::json dims;  // free-form structural metadata (sizes, vocab, ...)
  std::uint64_t seed = 0;
  ParameterSet params;
};

inline nlohmann::json checkpoint_to_json(const Checkpoint& ckpt) {
  nlohmann::json j;
  j["format_version"] = ckpt.format_version;
  j["arch"] = ckpt.arch;
  j["dims"] = ckpt.dims;
  j["seed"] = ckpt.seed;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, t] : ckpt.params) {
    params[name] = {{"shape", t.shape}, {"values", t.values}};
  }
  j["params"] = params;
  return j;
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j, const std::string& context) {
  try {
    Checkpoint ckpt;
    ckpt.format_version = j.at("format_version").get<int>();
    if (ckpt.format_version != 1) {
      throw Error(ErrorKind::kData,
                  context + ": unsupported checkpoint format_version " +
                      std::to_string(ckpt.format_version));
    }
    ckpt.arch = j.at("arch").get<std::string>();
    ckpt.dims = j.at("dims");
    ckpt.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [name, pj] : j.at("params").items()) {
      Tensor t;
      t.shape = pj.at("shape").get<std::vector<std::int64_t>>();
      t.values = pj.at("values").get<std::vector<double>>();
      t.validate(name);
      ckpt.params[name] = std::move(t);
    }
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kData, context + ": malformed checkpoint: " + e.what());
  }
}

inline void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot open checkpoint for writing: " + path.string());
  }
  out << checkpoint_to_json(ckpt).dump(1) << "\n";
  if (!out) {
    throw Error(ErrorKind::kIo, "failed writing checkpoint: " + path.string());
  }
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open checkpoint: " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kData, path.string() + ": invalid JSON: " + e.what());
  }
  return checkpoint_from_json(j, path.string());
}

}  // namespace ahsd

#endif  // AHSD_CHECKPOINT_HPP_

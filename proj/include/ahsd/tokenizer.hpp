// include/ahsd/tokenizer.hpp

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

#ifndef AHSD_TOKENIZER_HPP_
#define AHSD_TOKENIZER_HPP_

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ahsd/error.hpp"

namespace ahsd {

// Greedy fixed-width chunking: a word becomes ceil(len/4) tokens of up to
// four characters each, in order. No normalization beyond that.
inline std::vector<std::string> tokenize(const std::string& word) {
  if (word.empty()) {
    throw Error(ErrorKind::kData, "tokenize: empty word");
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < word.size(); i += 4) {
    out.push_back(word.substr(i, 4));
  }
  return out;
}

// Token table with id 0 reserved for unknowns; known tokens start at 1 in
// first-appearance order over the build input.
struct Vocab {
  static constexpr int kUnkId = 0;
  std::map<std::string, int> token_to_id;

  int size() const { return static_cast<int>(token_to_id.size()) + 1; }

  int id_of(const std::string& token) const {
    const auto it = token_to_id.find(token);
    return it == token_to_id.end() ? kUnkId : it->second;
  }
};

inline Vocab build_vocab(const std::vector<std::string>& words) {
  Vocab v;
  int next = 1;
  for (const auto& w : words) {
    for (const auto& tok : tokenize(w)) {
      if (v.token_to_id.emplace(tok, next).second) ++next;
    }
  }
  if (v.token_to_id.empty()) {
    throw Error(ErrorKind::kConfig, "build_vocab: no tokens");
  }
  return v;
}

inline nlohmann::json vocab_to_json(const Vocab& v) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [tok, id] : v.token_to_id) j[tok] = id;
  return j;
}

inline Vocab vocab_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.empty()) {
    throw Error(ErrorKind::kData, "vocab: expected a non-empty JSON object");
  }
  Vocab v;
  std::map<int, std::string> by_id;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number_integer()) {
      throw Error(ErrorKind::kData, "vocab: id of '" + it.key() + "' must be an integer");
    }
    const int id = it.value().get<int>();
    if (id < 1) {
      throw Error(ErrorKind::kData, "vocab: id of '" + it.key() + "' collides with the unknown id");
    }
    if (!by_id.emplace(id, it.key()).second) {
      throw Error(ErrorKind::kData, "vocab: duplicate id " + std::to_string(id));
    }
    v.token_to_id[it.key()] = id;
  }
  // Dense 1..n ids keep the embedding table tight.
  int expect = 1;
  for (const auto& [id, tok] : by_id) {
    if (id != expect++) {
      throw Error(ErrorKind::kData, "vocab: ids must be dense starting at 1");
    }
  }
  return v;
}

}  // namespace ahsd

#endif  // AHSD_TOKENIZER_HPP_

// include/ahsd/predictions.hpp

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

#ifndef AHSD_PREDICTIONS_HPP_
#define AHSD_PREDICTIONS_HPP_

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ahsd/error.hpp"
#include "ahsd/types.hpp"

namespace ahsd {

inline nlohmann::json prediction_to_json(const PredictionRecord& rec) {
  nlohmann::json jf = nlohmann::json::array();
  for (const auto& f : rec.frames) {
    jf.push_back({{"start_ms", f.start_ms}, {"end_ms", f.end_ms}});
  }
  return {{"id", rec.id}, {"label_pred", rec.label_pred}, {"score", rec.score}, {"frames", jf}};
}

inline PredictionRecord prediction_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kData, "prediction: record must be an object");
  for (const char* key : {"id", "label_pred", "score", "frames"}) {
    if (!j.contains(key)) {
      throw Error(ErrorKind::kData, std::string("prediction: record missing '") + key + "'");
    }
  }
  if (!j["id"].is_string() || !j["label_pred"].is_number_integer() || !j["score"].is_number() ||
      !j["frames"].is_array()) {
    throw Error(ErrorKind::kData, "prediction: malformed record");
  }
  PredictionRecord rec;
  rec.id = j["id"].get<std::string>();
  rec.label_pred = j["label_pred"].get<int>();
  rec.score = j["score"].get<double>();
  if (rec.label_pred != 0 && rec.label_pred != 1) {
    throw Error(ErrorKind::kData, "prediction: label_pred must be 0 or 1 in " + rec.id);
  }
  if (!std::isfinite(rec.score) || rec.score < 0.0 || rec.score > 1.0) {
    throw Error(ErrorKind::kData, "prediction: score must be a probability in " + rec.id);
  }
  for (const auto& jf : j["frames"]) {
    if (!jf.is_object() || !jf.contains("start_ms") || !jf.contains("end_ms") ||
        !jf["start_ms"].is_number_integer() || !jf["end_ms"].is_number_integer()) {
      throw Error(ErrorKind::kData, "prediction: malformed frame interval in " + rec.id);
    }
    rec.frames.push_back({jf["start_ms"].get<int>(), jf["end_ms"].get<int>()});
  }
  return rec;
}

inline void write_predictions(const std::string& path, const std::vector<PredictionRecord>& recs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write predictions " + path);
  for (const auto& rec : recs) out << prediction_to_json(rec).dump() << "\n";
  if (!out) throw Error(ErrorKind::kIo, "short write to predictions " + path);
}

inline std::vector<PredictionRecord> read_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open predictions " + path);
  std::vector<PredictionRecord> recs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kData,
                  path + ":" + std::to_string(lineno) + ": bad JSON: " + e.what());
    }
    recs.push_back(prediction_from_json(j));
  }
  if (recs.empty()) throw Error(ErrorKind::kData, "predictions " + path + " has no records");
  return recs;
}

}  // namespace ahsd

#endif  // AHSD_PREDICTIONS_HPP_

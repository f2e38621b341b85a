// include/ahsd/error.hpp

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

#ifndef AHSD_ERROR_HPP_
#define AHSD_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ahsd {

// Coarse error taxonomy. The CLI maps Io to exit code 2 and everything
// else to exit code 1, so the kind must survive from the throw site.
enum class ErrorKind {
  kConfig,    // bad or contradictory configuration values
  kData,      // malformed annotations, manifests, hypotheses
  kIo,        // file system / serialization failures
  kNumeric,   // non-finite values where finite ones are required
  kContract,  // programmer error: shape or precondition violation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kData: return "data";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kContract: return "contract";
  }
  return "unknown";
}

}  // namespace ahsd

#endif  // AHSD_ERROR_HPP_

// include/ahsd/tensor.hpp

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

#ifndef AHSD_TENSOR_HPP_
#define AHSD_TENSOR_HPP_

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "ahsd/error.hpp"

namespace ahsd {

// Dense row-major tensor of doubles. Everything in this project is small
// enough that a flat vector plus explicit indexing is the whole story.
// Weight matrices are stored [out, in]: y_r = sum_c W(r, c) * x_c.
struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<double> values;

  Tensor() = default;

  static Tensor zeros(std::vector<std::int64_t> s) {
    Tensor t;
    t.shape = std::move(s);
    t.values.assign(static_cast<std::size_t>(t.numel_of(t.shape)), 0.0);
    return t;
  }

  static std::int64_t numel_of(const std::vector<std::int64_t>& s) {
    std::int64_t n = 1;
    for (auto d : s) n *= d;
    return n;
  }

  std::int64_t numel() const { return static_cast<std::int64_t>(values.size()); }

  std::int64_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::int64_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  double& at(std::int64_t i) { return values[static_cast<std::size_t>(i)]; }
  double at(std::int64_t i) const { return values[static_cast<std::size_t>(i)]; }
  double& at(std::int64_t r, std::int64_t c) {
    return values[static_cast<std::size_t>(r * cols() + c)];
  }
  double at(std::int64_t r, std::int64_t c) const {
    return values[static_cast<std::size_t>(r * cols() + c)];
  }

  void validate(const std::string& name) const {
    if (numel_of(shape) != numel()) {
      throw Error(ErrorKind::kContract,
                  "tensor '" + name + "': shape does not match value count");
    }
    for (double v : values) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::kNumeric, "tensor '" + name + "' contains a non-finite value");
      }
    }
  }
};

// Named parameters. std::map keeps iteration in lexicographic name order,
// which pins the update order and hence bit-level reproducibility.
using ParameterSet = std::map<std::string, Tensor>;

}  // namespace ahsd

#endif  // AHSD_TENSOR_HPP_

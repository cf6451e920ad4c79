// Copyright 2026 The Staircase-PIR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

#include "spir/field.hpp"

namespace spir {

/// Seeded generator; single owner, not thread-safe.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  FieldElement uniform(const PrimeField& field) {
    std::uniform_int_distribution<std::uint64_t> dist(0, field.modulus() - 1);
    return field.element(dist(engine_));
  }

  SymbolVector uniform_vector(const PrimeField& field, std::size_t length) {
    SymbolVector v;
    v.reserve(length);
    for (std::size_t i = 0; i < length; ++i) v.push_back(uniform(field));
    return v;
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, bound).
  std::size_t below(std::size_t bound) {
    std::uniform_int_distribution<std::size_t> dist(0, bound - 1);
    return dist(engine_);
  }

  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace spir

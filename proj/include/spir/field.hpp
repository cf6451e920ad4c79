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

/**
 * @file field.hpp
 * @brief Arithmetic over prime fields GF(q).
 *
 * A PrimeField is a small value type holding a verified-prime modulus.
 * FieldElement carries its modulus with it so that mixing elements of two
 * different fields is caught at the operation instead of silently producing
 * garbage.
 */

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "spir/error.hpp"

namespace spir {

/// Deterministic trial division (6k +/- 1 wheel).
constexpr bool is_prime(std::uint64_t q) {
  if (q < 2) return false;
  if (q < 4) return true;
  if (q % 2 == 0 || q % 3 == 0) return false;
  for (std::uint64_t d = 5; d <= q / d; d += 6) {
    if (q % d == 0 || q % (d + 2) == 0) return false;
  }
  return true;
}

class FieldElement;

class PrimeField {
 public:
  /// Throws NotPrime unless q is prime.
  explicit PrimeField(std::uint64_t q) : q_(q) {
    if (q >= (std::uint64_t{1} << 62)) {
      throw Error(ErrorCode::kInvalidArgument, "modulus must be below 2^62");
    }
    if (!is_prime(q)) {
      throw Error(ErrorCode::kNotPrime, std::to_string(q) + " is not prime");
    }
  }

  std::uint64_t modulus() const noexcept { return q_; }

  FieldElement element(std::uint64_t value) const;
  FieldElement zero() const;
  FieldElement one() const;

  bool operator==(const PrimeField&) const = default;

 private:
  std::uint64_t q_;
};

class FieldElement {
 public:
  std::uint64_t value() const noexcept { return value_; }
  std::uint64_t modulus() const noexcept { return q_; }
  bool is_zero() const noexcept { return value_ == 0; }

  friend FieldElement operator+(FieldElement a, FieldElement b) {
    check_same(a, b);
    std::uint64_t s = a.value_ + b.value_;
    // q < 2^62, so the sum cannot wrap
    if (s >= a.q_) s -= a.q_;
    return FieldElement(s, a.q_);
  }

  friend FieldElement operator-(FieldElement a, FieldElement b) {
    check_same(a, b);
    return FieldElement(a.value_ >= b.value_ ? a.value_ - b.value_
                                             : a.value_ + (a.q_ - b.value_),
                        a.q_);
  }

  friend FieldElement operator*(FieldElement a, FieldElement b) {
    check_same(a, b);
    auto p = static_cast<unsigned __int128>(a.value_) * b.value_;
    return FieldElement(static_cast<std::uint64_t>(p % a.q_), a.q_);
  }

  friend FieldElement operator/(FieldElement a, FieldElement b) {
    check_same(a, b);
    return a * b.inverse();
  }

  FieldElement operator-() const {
    return FieldElement(value_ == 0 ? 0 : q_ - value_, q_);
  }

  FieldElement& operator+=(FieldElement o) { return *this = *this + o; }
  FieldElement& operator-=(FieldElement o) { return *this = *this - o; }
  FieldElement& operator*=(FieldElement o) { return *this = *this * o; }
  FieldElement& operator/=(FieldElement o) { return *this = *this / o; }

  FieldElement pow(std::uint64_t e) const {
    FieldElement base = *this;
    FieldElement acc(1 % q_, q_);
    while (e > 0) {
      if (e & 1U) acc *= base;
      base *= base;
      e >>= 1U;
    }
    return acc;
  }

  /// Multiplicative inverse via Fermat: a^(q-2).
  FieldElement inverse() const {
    if (value_ == 0) {
      throw Error(ErrorCode::kDivisionByZero, "inverse of zero in GF(" + std::to_string(q_) + ")");
    }
    return pow(q_ - 2);
  }

  friend bool operator==(const FieldElement&, const FieldElement&) = default;

  friend std::ostream& operator<<(std::ostream& os, const FieldElement& a) {
    return os << a.value_;
  }

 private:
  friend class PrimeField;
  FieldElement(std::uint64_t value, std::uint64_t q) : value_(value), q_(q) {}

  static void check_same(const FieldElement& a, const FieldElement& b) {
    if (a.q_ != b.q_) {
      throw Error(ErrorCode::kFieldMismatch,
                  "GF(" + std::to_string(a.q_) + ") vs GF(" + std::to_string(b.q_) + ")");
    }
  }

  std::uint64_t value_;
  std::uint64_t q_;
};

inline FieldElement PrimeField::element(std::uint64_t value) const {
  return FieldElement(value % q_, q_);
}
inline FieldElement PrimeField::zero() const { return FieldElement(0, q_); }
inline FieldElement PrimeField::one() const { return FieldElement(1, q_); }

/// A vector of field symbols. Grid entries, queries, data and responses all
/// use this representation.
using SymbolVector = std::vector<FieldElement>;

inline SymbolVector zero_vector(const PrimeField& field, std::size_t length) {
  return SymbolVector(length, field.zero());
}

inline SymbolVector to_symbols(const PrimeField& field, const std::vector<std::uint64_t>& values) {
  SymbolVector out;
  out.reserve(values.size());
  for (auto v : values) out.push_back(field.element(v));
  return out;
}

inline std::vector<std::uint64_t> to_values(const SymbolVector& v) {
  std::vector<std::uint64_t> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(e.value());
  return out;
}

/// acc += scale * v, componentwise.
inline void axpy(SymbolVector& acc, FieldElement scale, const SymbolVector& v) {
  if (acc.size() != v.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "axpy length mismatch");
  }
  if (scale.is_zero()) return;
  for (std::size_t i = 0; i < v.size(); ++i) acc[i] += scale * v[i];
}

}  // namespace spir

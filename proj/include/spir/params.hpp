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

#include <cstddef>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "spir/error.hpp"
#include "spir/field.hpp"
#include "spir/matrix.hpp"

namespace spir {

/// How strictly derive_params checks the field size.
enum class FieldCheck {
  /// q > n, so an n x n Vandermonde on distinct nonzero points exists.
  kVandermonde,
  /// q may be as small as 2; the caller supplies an explicit encoding matrix
  /// and must pass it through validate_encoding_matrix.
  kExplicitMatrix,
};

/**
 * Scheme parameters and every quantity derived from them.
 *
 * Levels are 0-based here: level b corresponds to waiting for
 * mu[b] = n - b responders, with alpha_level[b] = mu[b] - t payload rows.
 * Level b is also the index of block b of the message grid.
 */
struct SchemeParams {
  std::size_t n = 0;  // servers
  std::size_t k = 0;  // worst-case responder count
  std::size_t t = 0;  // collusion threshold
  std::size_t m = 0;  // files
  std::size_t s = 1;  // batch width: field symbols per file part
  PrimeField field{2};

  std::size_t h = 0;  // block count, n - k + 1
  std::vector<std::size_t> mu;
  std::vector<std::size_t> alpha_level;
  std::size_t alpha = 0;        // sub-queries per server
  std::size_t alpha_prime = 0;  // parts per file
  std::vector<std::size_t> block_columns;
  std::vector<std::size_t> block_offsets;

  /// Length of every grid entry, query vector and the data vector.
  std::size_t vector_length() const { return alpha_prime * m * s; }
  std::size_t randomness_count() const { return t * alpha; }
  std::size_t file_symbols() const { return alpha_prime * s; }

  /// Level for a responder count in [k, n]; throws OutOfRange otherwise.
  std::size_t level_for(std::size_t responders) const {
    if (responders < k || responders > n) {
      throw Error(ErrorCode::kOutOfRange,
                  "responder count " + std::to_string(responders) + " outside [" + std::to_string(k) +
                      ", " + std::to_string(n) + "]");
    }
    return n - responders;
  }

  /// Number of leading sub-queries downloaded per responder: alpha'/alpha_j.
  std::size_t prefix_length(std::size_t responders) const {
    return alpha_prime / alpha_level[level_for(responders)];
  }

  friend bool operator==(const SchemeParams&, const SchemeParams&) = default;
};

inline SchemeParams derive_params(std::size_t n, std::size_t k, std::size_t t, std::size_t m,
                                  std::uint64_t q, std::size_t s = 1,
                                  FieldCheck check = FieldCheck::kVandermonde) {
  if (k > n) throw Error(ErrorCode::kInvalidK, "k > n");
  if (t < 1 || t >= k) throw Error(ErrorCode::kInvalidThreshold, "need 1 <= t < k");
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "need m >= 1");
  if (s < 1) throw Error(ErrorCode::kInvalidArgument, "need batch width s >= 1");
  if (check == FieldCheck::kVandermonde && q <= n) {
    throw Error(ErrorCode::kFieldTooSmall, "need q > n");
  }

  SchemeParams p;
  p.n = n;
  p.k = k;
  p.t = t;
  p.m = m;
  p.s = s;
  p.field = PrimeField(q);
  p.h = n - k + 1;
  for (std::size_t b = 0; b < p.h; ++b) {
    p.mu.push_back(n - b);
    p.alpha_level.push_back(n - b - t);
  }
  // LCM over every level except the last; the empty LCM (k = n) is 1.
  p.alpha = 1;
  for (std::size_t b = 0; b + 1 < p.h; ++b) p.alpha = std::lcm(p.alpha, p.alpha_level[b]);
  p.alpha_prime = (k - t) * p.alpha;

  std::size_t offset = 0;
  for (std::size_t b = 0; b < p.h; ++b) {
    const std::size_t cols = b == 0 ? p.alpha_prime / p.alpha_level[0]
                                    : p.alpha_prime / (p.alpha_level[b] * p.alpha_level[b - 1]);
    p.block_offsets.push_back(offset);
    p.block_columns.push_back(cols);
    offset += cols;
  }
  return p;
}

inline std::ostream& operator<<(std::ostream& os, const SchemeParams& p) {
  os << "(n,k,t)=(" << p.n << ',' << p.k << ',' << p.t << ") m=" << p.m << " q=" << p.field.modulus()
     << " s=" << p.s << " alpha=" << p.alpha << " alpha'=" << p.alpha_prime << " mu=(";
  for (std::size_t b = 0; b < p.h; ++b) os << (b ? "," : "") << p.mu[b];
  os << ") columns=(";
  for (std::size_t b = 0; b < p.h; ++b) os << (b ? "," : "") << p.block_columns[b];
  return os << ')';
}

/**
 * True iff, for every mu_j and every set of mu_j rows, the rows crossed with
 * the first mu_j columns form an invertible matrix. That is exactly the
 * property the peeling decoder relies on.
 */
inline bool validate_encoding_matrix(const FieldMatrix& v, const SchemeParams& params) {
  if (!v.is_square() || v.rows() != params.n) {
    throw Error(ErrorCode::kDimensionMismatch, "encoding matrix must be n x n");
  }
  if (v.field() != params.field) {
    throw Error(ErrorCode::kFieldMismatch, "encoding matrix over the wrong field");
  }
  for (std::size_t c : params.mu) {
    bool ok = true;
    for_each_subset(params.n, c, [&](const std::vector<std::size_t>& rows) {
      if (ok && !is_invertible(v.leading_columns(rows, c))) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

}  // namespace spir

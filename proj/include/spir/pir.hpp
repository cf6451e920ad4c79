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
 * @file pir.hpp
 * @brief User and server sides of Staircase-PIR over replicated data.
 *
 * The user turns a file index into n queries (the rows of V * M), each split
 * into alpha sub-queries. A server answers a sub-query with the projection of
 * its data on it. After hearing from mu servers the user downloads only the
 * first alpha'/alpha_j projections of each and peels the file out.
 *
 * Server ids are 0-based; file indices are 1-based.
 */

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spir/error.hpp"
#include "spir/field.hpp"
#include "spir/matrix.hpp"
#include "spir/params.hpp"
#include "spir/rational.hpp"
#include "spir/rng.hpp"
#include "spir/staircase.hpp"

namespace spir {

/**
 * m files of `parts` slabs of `s` symbols each, flattened into the data
 * vector x. Part c of file i occupies slab c * m + (i - 1).
 */
class Database {
 public:
  Database(PrimeField field, std::size_t m, std::size_t parts, std::size_t s,
           const std::vector<SymbolVector>& files)
      : field_(field), m_(m), parts_(parts), s_(s), x_(m * parts * s, field.zero()) {
    if (files.size() != m) throw Error(ErrorCode::kDimensionMismatch, "need exactly m files");
    for (std::size_t i = 0; i < m; ++i) {
      if (files[i].size() != parts * s) {
        throw Error(ErrorCode::kDimensionMismatch, "file " + std::to_string(i + 1) + " has wrong length");
      }
      for (std::size_t c = 0; c < parts; ++c) {
        for (std::size_t j = 0; j < s; ++j) x_[(c * m + i) * s + j] = files[i][c * s + j];
      }
    }
  }

  /// Staircase layout: every file holds alpha' * s symbols.
  static Database for_params(const SchemeParams& p, const std::vector<SymbolVector>& files) {
    return Database(p.field, p.m, p.alpha_prime, p.s, files);
  }

  static Database random(PrimeField field, std::size_t m, std::size_t parts, std::size_t s, SeededRng& rng) {
    std::vector<SymbolVector> files;
    for (std::size_t i = 0; i < m; ++i) files.push_back(rng.uniform_vector(field, parts * s));
    return Database(field, m, parts, s, files);
  }

  const PrimeField& field() const noexcept { return field_; }
  std::size_t file_count() const noexcept { return m_; }
  std::size_t parts() const noexcept { return parts_; }
  std::size_t batch() const noexcept { return s_; }
  const SymbolVector& data() const noexcept { return x_; }

  SymbolVector file(std::size_t index) const {
    if (index < 1 || index > m_) throw Error(ErrorCode::kFileIndexOutOfRange, std::to_string(index));
    SymbolVector out;
    out.reserve(parts_ * s_);
    for (std::size_t c = 0; c < parts_; ++c) {
      for (std::size_t j = 0; j < s_; ++j) out.push_back(x_[(c * m_ + index - 1) * s_ + j]);
    }
    return out;
  }

  /**
   * Lane-wise projection: symbol j of the result is the inner product of the
   * j-th symbol of every slab of `query` with the same symbol of every slab
   * of x. With s = 1 this is the plain inner product q^T x.
   */
  SymbolVector project(const SymbolVector& query) const {
    if (query.size() != x_.size()) throw Error(ErrorCode::kDimensionMismatch, "query length != data length");
    SymbolVector out(s_, field_.zero());
    for (std::size_t u = 0; u < m_ * parts_; ++u) {
      for (std::size_t j = 0; j < s_; ++j) {
        const auto& q = query[u * s_ + j];
        if (!q.is_zero()) out[j] += q * x_[u * s_ + j];
      }
    }
    return out;
  }

 private:
  PrimeField field_;
  std::size_t m_;
  std::size_t parts_;
  std::size_t s_;
  SymbolVector x_;
};

/// FNV-1a over the six scheme integers; identifies a parameter set on queries.
inline std::uint64_t params_fingerprint(const SchemeParams& p) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::uint64_t v : {std::uint64_t{p.n}, std::uint64_t{p.k}, std::uint64_t{p.t}, std::uint64_t{p.m},
                          p.field.modulus(), std::uint64_t{p.s}}) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

struct Query {
  std::size_t server = 0;
  std::vector<SymbolVector> sub_queries;  // alpha of them
  std::uint64_t params_fingerprint = 0;
};

/// Fresh randomness, grid for file i, Q = V * M; one Query per server.
inline std::vector<Query> make_queries(const SchemeParams& p, const FieldMatrix& v, std::size_t file_index,
                                       std::uint64_t seed, RowOrder order = kDefaultRowOrder) {
  const auto randomness = generate_randomness(p, seed);
  const ShareSet shares = encode_shares(p, v, build_message_grid(p, file_index, randomness, order));
  std::vector<Query> out;
  out.reserve(p.n);
  const std::uint64_t fp = params_fingerprint(p);
  for (std::size_t l = 0; l < p.n; ++l) out.push_back({l, shares.rows[l], fp});
  return out;
}

/// Projections of the data on the requested sub-queries, in request order.
inline std::vector<SymbolVector> server_respond(const Database& db, const Query& query,
                                                std::span<const std::size_t> columns) {
  std::vector<SymbolVector> out;
  out.reserve(columns.size());
  for (std::size_t c : columns) {
    if (c >= query.sub_queries.size()) {
      throw Error(ErrorCode::kColumnOutOfRange, "column " + std::to_string(c));
    }
    out.push_back(db.project(query.sub_queries[c]));
  }
  return out;
}

inline std::vector<std::size_t> leading_columns(std::size_t count) {
  std::vector<std::size_t> cols(count);
  for (std::size_t c = 0; c < count; ++c) cols[c] = c;
  return cols;
}

struct DownloadPlan {
  std::vector<std::size_t> responders;  // sorted, 0-based
  std::size_t level = 0;                // j = n - |L| + 1, 1-based as in the construction
  std::size_t prefix = 0;               // sub-responses fetched per responder
  std::size_t total_symbols = 0;        // |L| * prefix * s
};

/// Depends only on the params and the responder set, never on the file.
inline DownloadPlan plan_download(const SchemeParams& p, std::vector<std::size_t> responders) {
  std::sort(responders.begin(), responders.end());
  if (std::adjacent_find(responders.begin(), responders.end()) != responders.end()) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate responder");
  }
  if (!responders.empty() && responders.back() >= p.n) {
    throw Error(ErrorCode::kOutOfRange, "server id out of range");
  }
  if (responders.size() < p.k) {
    throw Error(ErrorCode::kInsufficientResponders,
                std::to_string(responders.size()) + " of the required " + std::to_string(p.k) + " responded");
  }
  DownloadPlan plan;
  plan.level = p.level_for(responders.size()) + 1;
  plan.prefix = p.prefix_length(responders.size());
  plan.total_symbols = responders.size() * plan.prefix * p.s;
  plan.responders = std::move(responders);
  return plan;
}

/// Peels file content (alpha' * s symbols) from the plan's prefix responses.
/// Entries beyond the prefix, if present, are ignored.
inline SymbolVector decode_file(const SchemeParams& p, const FieldMatrix& v, const DownloadPlan& plan,
                                const std::map<std::size_t, std::vector<SymbolVector>>& responses,
                                RowOrder order = kDefaultRowOrder) {
  std::vector<std::vector<SymbolVector>> prefixes;
  prefixes.reserve(plan.responders.size());
  for (std::size_t l : plan.responders) {
    auto it = responses.find(l);
    if (it == responses.end() || it->second.size() < plan.prefix) {
      throw Error(ErrorCode::kMissingResponse, "server " + std::to_string(l) + " prefix incomplete");
    }
    prefixes.emplace_back(it->second.begin(), it->second.begin() + static_cast<std::ptrdiff_t>(plan.prefix));
  }
  const auto parts = peel_decode(StaircaseLayout(p, order), v, plan.responders, prefixes);
  SymbolVector file;
  file.reserve(p.file_symbols());
  for (const auto& slab : parts) {
    if (slab.size() != p.s) throw Error(ErrorCode::kDimensionMismatch, "response slab width != s");
    file.insert(file.end(), slab.begin(), slab.end());
  }
  return file;
}

/// Finite-m capacity (1 - t/k) / (1 - (t/k)^m).
inline Rational capacity_finite(std::size_t m, std::size_t t, std::size_t k) {
  if (t < 1 || t >= k) throw Error(ErrorCode::kInvalidThreshold, "need 1 <= t < k");
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "need m >= 1");
  const Rational ratio(static_cast<std::int64_t>(t), static_cast<std::int64_t>(k));
  Rational power = 1;
  for (std::size_t i = 0; i < m; ++i) power *= ratio;
  return (1 - ratio) / (1 - power);
}

/// Asymptotic capacity 1 - t/k.
inline Rational capacity_asymptotic(std::size_t t, std::size_t k) {
  if (t < 1 || t >= k) throw Error(ErrorCode::kInvalidThreshold, "need 1 <= t < k");
  return 1 - Rational(static_cast<std::int64_t>(t), static_cast<std::int64_t>(k));
}

inline Rational rate_achieved(const DownloadPlan& plan, std::size_t file_symbols) {
  return Rational(static_cast<std::int64_t>(file_symbols), static_cast<std::int64_t>(plan.total_symbols));
}

/**
 * One retrieval: fresh queries, an accumulator for arriving sub-responses,
 * and a single decode. Responses may be added from several threads; the
 * session refuses to be decoded twice so its queries are never reused.
 */
class RetrievalSession {
 public:
  RetrievalSession(SchemeParams params, FieldMatrix v, std::size_t file_index, std::uint64_t seed,
                   RowOrder order = kDefaultRowOrder)
      : params_(std::move(params)),
        v_(std::move(v)),
        order_(order),
        queries_(make_queries(params_, v_, file_index, seed, order)) {}

  const SchemeParams& params() const noexcept { return params_; }
  const FieldMatrix& encoding_matrix() const noexcept { return v_; }
  const std::vector<Query>& queries() const noexcept { return queries_; }

  void add_responses(std::size_t server, std::vector<SymbolVector> slabs) {
    std::lock_guard lock(mu_);
    auto& dst = responses_[server];
    for (auto& s : slabs) dst.push_back(std::move(s));
  }

  SymbolVector decode(const DownloadPlan& plan) {
    std::map<std::size_t, std::vector<SymbolVector>> snapshot;
    {
      std::lock_guard lock(mu_);
      if (consumed_) throw Error(ErrorCode::kSessionConsumed, "retrieval session already decoded");
      consumed_ = true;
      snapshot = responses_;
    }
    return decode_file(params_, v_, plan, snapshot, order_);
  }

 private:
  SchemeParams params_;
  FieldMatrix v_;
  RowOrder order_;
  std::vector<Query> queries_;
  std::mutex mu_;
  std::map<std::size_t, std::vector<SymbolVector>> responses_;
  bool consumed_ = false;
};

}  // namespace spir

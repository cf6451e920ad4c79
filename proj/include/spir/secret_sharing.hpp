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
 * @file secret_sharing.hpp
 * @brief PIR from linear secret sharing.
 *
 * Any (n, k, t) linear secret sharing scheme yields a robust PIR scheme: the
 * user shares the selector vectors of the wanted file, each server projects
 * its data on the share it receives, and by linearity reconstructing the
 * secret from the responses reconstructs the file. A plain ramp scheme gives
 * rate (k - t)/k no matter how many servers answer; a communication-efficient
 * scheme such as the staircase code gives (mu - t)/mu for every mu.
 */

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spir/error.hpp"
#include "spir/field.hpp"
#include "spir/matrix.hpp"
#include "spir/params.hpp"
#include "spir/pir.hpp"
#include "spir/rational.hpp"
#include "spir/rng.hpp"
#include "spir/staircase.hpp"

namespace spir {

/// One server's share: a list of entries (sub-shares).
using Share = std::vector<SymbolVector>;

class LinearSecretSharingScheme {
 public:
  virtual ~LinearSecretSharingScheme() = default;

  virtual const PrimeField& field() const = 0;
  virtual std::size_t n() const = 0;
  virtual std::size_t k() const = 0;
  virtual std::size_t t() const = 0;
  /// Number of payload vectors in a secret.
  virtual std::size_t secret_width() const = 0;
  /// Number of entries in every share.
  virtual std::size_t share_entries() const = 0;
  /// Number of random vectors consumed by one sharing.
  virtual std::size_t randomness_width() const = 0;

  /// Deterministic, linear sharing with caller-chosen randomness.
  virtual std::vector<Share> share_with(const std::vector<SymbolVector>& secret,
                                        const std::vector<SymbolVector>& randomness) const = 0;

  /// Reconstructs from at least k complete shares.
  virtual std::vector<SymbolVector> reconstruct(std::span<const std::size_t> holders,
                                                const std::vector<Share>& shares) const = 0;

  virtual bool communication_efficient() const { return false; }

  /// Leading entries needed from each of d holders.
  virtual std::size_t prefix_entries(std::size_t /*d*/) const { return share_entries(); }

  /// Reconstructs from the prefix_entries(d) leading entries of d shares.
  virtual std::vector<SymbolVector> reconstruct_from_prefixes(std::span<const std::size_t> holders,
                                                              const std::vector<Share>& prefixes) const {
    return reconstruct(holders, prefixes);
  }

  std::vector<Share> share(const std::vector<SymbolVector>& secret, SeededRng& rng) const {
    if (secret.empty()) throw Error(ErrorCode::kDimensionMismatch, "empty secret");
    std::vector<SymbolVector> randomness;
    for (std::size_t u = 0; u < randomness_width(); ++u) {
      randomness.push_back(rng.uniform_vector(field(), secret.front().size()));
    }
    return share_with(secret, randomness);
  }
};

/**
 * Classic (n, k, t) ramp scheme: shares are V_ramp * [secret; randomness]
 * with V_ramp an n x k power Vandermonde. The secret is k - t vectors and
 * every share is a single entry.
 */
class RampScheme final : public LinearSecretSharingScheme {
 public:
  RampScheme(std::size_t n, std::size_t k, std::size_t t, PrimeField field)
      : field_(field), n_(n), k_(k), t_(t), v_(FieldMatrix::identity(field, 1)) {
    if (k > n) throw Error(ErrorCode::kInvalidK, "k > n");
    if (t < 1 || t >= k) throw Error(ErrorCode::kInvalidThreshold, "need 1 <= t < k");
    if (field.modulus() <= n) throw Error(ErrorCode::kFieldTooSmall, "need q > n");
    std::vector<FieldElement> pts;
    for (std::size_t i = 1; i <= n; ++i) pts.push_back(field.element(i));
    v_ = vandermonde(pts, k);
    if (!mds_holds() || !secrecy_holds()) {
      throw Error(ErrorCode::kBadEncodingMatrix, "ramp matrix fails the MDS or secrecy condition");
    }
  }

  const PrimeField& field() const override { return field_; }
  std::size_t n() const override { return n_; }
  std::size_t k() const override { return k_; }
  std::size_t t() const override { return t_; }
  std::size_t secret_width() const override { return k_ - t_; }
  std::size_t share_entries() const override { return 1; }
  std::size_t randomness_width() const override { return t_; }
  const FieldMatrix& matrix() const { return v_; }

  /// Every k rows of V_ramp are invertible.
  bool mds_holds() const {
    bool ok = true;
    for_each_subset(n_, k_, [&](const std::vector<std::size_t>& rows) {
      if (ok && !is_invertible(v_.leading_columns(rows, k_))) ok = false;
    });
    return ok;
  }

  /// Every t rows restricted to the randomness columns are invertible.
  bool secrecy_holds() const {
    std::vector<std::size_t> cols;
    for (std::size_t c = k_ - t_; c < k_; ++c) cols.push_back(c);
    bool ok = true;
    for_each_subset(n_, t_, [&](const std::vector<std::size_t>& rows) {
      if (ok && !is_invertible(v_.submatrix(rows, cols))) ok = false;
    });
    return ok;
  }

  std::vector<Share> share_with(const std::vector<SymbolVector>& secret,
                                const std::vector<SymbolVector>& randomness) const override {
    if (secret.size() != secret_width() || randomness.size() != t_) {
      throw Error(ErrorCode::kDimensionMismatch, "ramp secret/randomness width");
    }
    std::vector<const SymbolVector*> msg;
    for (const auto& s : secret) msg.push_back(&s);
    for (const auto& r : randomness) msg.push_back(&r);
    const std::size_t len = secret.front().size();
    std::vector<Share> out;
    for (std::size_t l = 0; l < n_; ++l) {
      SymbolVector acc = zero_vector(field_, len);
      for (std::size_t r = 0; r < k_; ++r) axpy(acc, v_.at(l, r), *msg[r]);
      out.push_back({std::move(acc)});
    }
    return out;
  }

  std::vector<SymbolVector> reconstruct(std::span<const std::size_t> holders,
                                        const std::vector<Share>& shares) const override {
    if (holders.size() < k_ || shares.size() != holders.size()) {
      throw Error(ErrorCode::kNotEnoughShares, "ramp reconstruction needs k shares");
    }
    const std::vector<std::size_t> rows(holders.begin(), holders.begin() + static_cast<std::ptrdiff_t>(k_));
    const std::size_t len = shares.front().front().size();
    FieldMatrix rhs(field_, k_, len);
    for (std::size_t a = 0; a < k_; ++a)
      for (std::size_t e = 0; e < len; ++e) rhs.at(a, e) = shares[a].front()[e];
    const FieldMatrix x = matrix_solve(v_.leading_columns(rows, k_), rhs);
    std::vector<SymbolVector> secret;
    for (std::size_t r = 0; r < secret_width(); ++r) {
      SymbolVector v;
      for (std::size_t e = 0; e < len; ++e) v.push_back(x.at(r, e));
      secret.push_back(std::move(v));
    }
    return secret;
  }

 private:
  PrimeField field_;
  std::size_t n_, k_, t_;
  FieldMatrix v_;
};

/// The staircase code seen through the generic interface.
class StaircaseScheme final : public LinearSecretSharingScheme {
 public:
  StaircaseScheme(SchemeParams params, FieldMatrix v, RowOrder order = kDefaultRowOrder)
      : layout_(std::move(params), order), v_(std::move(v)) {
    if (!validate_encoding_matrix(v_, layout_.params())) {
      throw Error(ErrorCode::kBadEncodingMatrix, "encoding matrix fails the leading-columns property");
    }
  }

  const SchemeParams& params() const { return layout_.params(); }
  const FieldMatrix& matrix() const { return v_; }

  const PrimeField& field() const override { return params().field; }
  std::size_t n() const override { return params().n; }
  std::size_t k() const override { return params().k; }
  std::size_t t() const override { return params().t; }
  std::size_t secret_width() const override { return params().alpha_prime; }
  std::size_t share_entries() const override { return params().alpha; }
  std::size_t randomness_width() const override { return params().randomness_count(); }
  bool communication_efficient() const override { return true; }
  std::size_t prefix_entries(std::size_t d) const override { return params().prefix_length(d); }

  std::vector<Share> share_with(const std::vector<SymbolVector>& secret,
                                const std::vector<SymbolVector>& randomness) const override {
    return detail::encode_unchecked(v_, realize_grid(layout_, secret, randomness)).rows;
  }

  std::vector<SymbolVector> reconstruct(std::span<const std::size_t> holders,
                                        const std::vector<Share>& shares) const override {
    if (holders.size() < k() || shares.size() != holders.size()) {
      throw Error(ErrorCode::kNotEnoughShares, "reconstruction needs k shares");
    }
    const std::span<const std::size_t> first(holders.data(), k());
    std::vector<Share> prefixes(shares.begin(), shares.begin() + static_cast<std::ptrdiff_t>(k()));
    for (auto& p : prefixes) p.resize(prefix_entries(k()));
    return peel_decode(layout_, v_, first, prefixes);
  }

  std::vector<SymbolVector> reconstruct_from_prefixes(std::span<const std::size_t> holders,
                                                      const std::vector<Share>& prefixes) const override {
    return peel_decode(layout_, v_, holders, prefixes);
  }

 private:
  StaircaseLayout layout_;
  FieldMatrix v_;
};

struct SsPirResult {
  SymbolVector file;
  std::size_t downloaded_symbols = 0;
  Rational rate;
  /// Download in units where the file is k - t units.
  Rational download_units;
};

/// SS-PIR: queries are shares of the selector vectors of the wanted file.
class SsPirAdapter {
 public:
  SsPirAdapter(std::shared_ptr<const LinearSecretSharingScheme> scheme, std::shared_ptr<const Database> db)
      : scheme_(std::move(scheme)), db_(std::move(db)) {
    if (db_->parts() != scheme_->secret_width()) {
      throw Error(ErrorCode::kDimensionMismatch, "database parts must equal the scheme secret width");
    }
    if (db_->field() != scheme_->field()) throw Error(ErrorCode::kFieldMismatch, "database field");
  }

  const LinearSecretSharingScheme& scheme() const { return *scheme_; }
  const Database& database() const { return *db_; }

  /// Selector vector of part `part` (0-based) of file `file_index` (1-based).
  SymbolVector selector(std::size_t part, std::size_t file_index) const {
    if (file_index < 1 || file_index > db_->file_count()) {
      throw Error(ErrorCode::kFileIndexOutOfRange, std::to_string(file_index));
    }
    SymbolVector e = zero_vector(db_->field(), db_->data().size());
    const std::size_t slab = part * db_->file_count() + file_index - 1;
    for (std::size_t j = 0; j < db_->batch(); ++j) e[slab * db_->batch() + j] = db_->field().one();
    return e;
  }

  std::vector<Share> queries(std::size_t file_index, SeededRng& rng) const {
    std::vector<SymbolVector> secret;
    for (std::size_t c = 0; c < scheme_->secret_width(); ++c) secret.push_back(selector(c, file_index));
    return scheme_->share(secret, rng);
  }

  /// Server side: project the data on the first `entries` entries of a share.
  std::vector<SymbolVector> respond(const Share& query, std::size_t entries) const {
    if (entries > query.size()) throw Error(ErrorCode::kColumnOutOfRange, "share has fewer entries");
    std::vector<SymbolVector> out;
    for (std::size_t c = 0; c < entries; ++c) out.push_back(db_->project(query[c]));
    return out;
  }

  std::size_t file_symbols() const { return db_->parts() * db_->batch(); }

  Rational units(std::size_t symbols) const {
    // file of parts * s symbols == k - t units
    return Rational(static_cast<std::int64_t>(symbols * (scheme_->k() - scheme_->t())),
                    static_cast<std::int64_t>(file_symbols()));
  }

 private:
  std::shared_ptr<const LinearSecretSharingScheme> scheme_;
  std::shared_ptr<const Database> db_;
};

namespace detail {

inline SymbolVector join_parts(const std::vector<SymbolVector>& parts) {
  SymbolVector file;
  for (const auto& p : parts) file.insert(file.end(), p.begin(), p.end());
  return file;
}

inline SsPirResult finish(const SsPirAdapter& adapter, std::vector<SymbolVector> parts, std::size_t symbols) {
  SsPirResult r;
  r.file = join_parts(parts);
  r.downloaded_symbols = symbols;
  r.rate = Rational(static_cast<std::int64_t>(adapter.file_symbols()), static_cast<std::int64_t>(symbols));
  r.download_units = adapter.units(symbols);
  return r;
}

inline void check_responders(const SsPirAdapter& adapter, std::span<const std::size_t> responders) {
  if (responders.size() < adapter.scheme().k()) {
    throw Error(ErrorCode::kInsufficientResponders, "fewer than k responders");
  }
  if (responders.size() > adapter.scheme().n()) throw Error(ErrorCode::kOutOfRange, "more than n responders");
}

}  // namespace detail

/// Robust retrieval through any linear scheme: full shares from the first k
/// responders. Rate (k - t)/k.
inline SsPirResult sspir_retrieve(const SsPirAdapter& adapter, std::size_t file_index,
                                  std::span<const std::size_t> responders, std::uint64_t seed) {
  detail::check_responders(adapter, responders);
  SeededRng rng(seed);
  const auto queries = adapter.queries(file_index, rng);
  const std::size_t k = adapter.scheme().k();
  const std::size_t entries = adapter.scheme().share_entries();
  std::vector<Share> answers;
  for (std::size_t a = 0; a < k; ++a) answers.push_back(adapter.respond(queries[responders[a]], entries));
  const std::span<const std::size_t> used(responders.data(), k);
  return detail::finish(adapter, adapter.scheme().reconstruct(used, answers),
                        k * entries * adapter.database().batch());
}

/// A scheme built for the worst case, used with mu > k responders, still
/// downloads a full share from everyone it heard from: rate (k - t)/mu.
inline SsPirResult nonuniversality_demo(const SsPirAdapter& adapter, std::size_t file_index,
                                        std::span<const std::size_t> responders, std::uint64_t seed) {
  detail::check_responders(adapter, responders);
  SeededRng rng(seed);
  const auto queries = adapter.queries(file_index, rng);
  const std::size_t entries = adapter.scheme().share_entries();
  std::vector<Share> answers;
  for (std::size_t l : responders) answers.push_back(adapter.respond(queries[l], entries));
  return detail::finish(adapter, adapter.scheme().reconstruct(responders, answers),
                        responders.size() * entries * adapter.database().batch());
}

/// Universal retrieval over a communication-efficient scheme: only the
/// prefix_entries(mu) leading entries of each responder. Rate (mu - t)/mu.
inline SsPirResult sspir_universal_retrieve(const SsPirAdapter& adapter, std::size_t file_index,
                                            std::span<const std::size_t> responders, std::uint64_t seed) {
  if (!adapter.scheme().communication_efficient()) {
    throw Error(ErrorCode::kInvalidArgument, "universal retrieval needs a communication-efficient scheme");
  }
  detail::check_responders(adapter, responders);
  SeededRng rng(seed);
  const auto queries = adapter.queries(file_index, rng);
  const std::size_t entries = adapter.scheme().prefix_entries(responders.size());
  std::vector<Share> answers;
  for (std::size_t l : responders) answers.push_back(adapter.respond(queries[l], entries));
  return detail::finish(adapter, adapter.scheme().reconstruct_from_prefixes(responders, answers),
                        responders.size() * entries * adapter.database().batch());
}

}  // namespace spir

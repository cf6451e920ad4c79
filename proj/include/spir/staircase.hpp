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
 * @file staircase.hpp
 * @brief The staircase message grid, its encoding by V, and the level-by-level
 *        peeling decoder.
 *
 * The grid has n rows and alpha columns split into h blocks. Block b serves
 * the case of mu_b = n - b responders:
 *
 *   block 0:      alpha_0 payload rows (the alpha' secret/unit vectors,
 *                 column-major) and t randomness rows.
 *   block b >= 1: alpha_b rows replicating row mu_{b-1} of blocks 0..b-1
 *                 (reading order, wrapped column-major), t fresh randomness
 *                 rows, and zeros below row mu_b.
 *
 * The same machinery is a communication-efficient secret sharing codec:
 * when the payload holds an arbitrary secret the n rows of V * M are shares,
 * and any d >= k of them reconstruct from their first alpha'/(d - t) entries.
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spir/error.hpp"
#include "spir/field.hpp"
#include "spir/matrix.hpp"
#include "spir/params.hpp"
#include "spir/rng.hpp"

namespace spir {

/// Vertical order of the payload and randomness rows inside every block.
/// Both orders decode and are private with a Vandermonde V; the first one
/// is used unless a caller asks otherwise.
enum class RowOrder {
  kPayloadFirst,
  kRandomnessFirst,
};

inline constexpr RowOrder kDefaultRowOrder = RowOrder::kPayloadFirst;

/// Symbolic content of one grid cell.
struct Cell {
  enum class Kind : std::uint8_t { kZero, kPayload, kRandom };
  Kind kind = Kind::kZero;
  std::size_t index = 0;  // payload part or randomness vector, 0-based

  static Cell zero() { return {}; }
  static Cell payload(std::size_t i) { return {Kind::kPayload, i}; }
  static Cell random(std::size_t i) { return {Kind::kRandom, i}; }
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct CellPos {
  std::size_t row = 0;
  std::size_t col = 0;
  friend auto operator<=>(const CellPos&, const CellPos&) = default;
};

/// A D-row cell and the earlier-block cell it copies.
struct Replica {
  CellPos dest;
  CellPos source;
};

struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool contains(std::size_t r) const { return r >= begin && r < end; }
};

/// Data-independent shape of the message grid: which symbol sits in which
/// cell, and the D-row bookkeeping the decoder needs.
class StaircaseLayout {
 public:
  explicit StaircaseLayout(SchemeParams params, RowOrder order = kDefaultRowOrder)
      : params_(std::move(params)), order_(order), cells_(params_.n * params_.alpha) {
    const auto& p = params_;
    std::size_t next_random = 0;
    for (std::size_t b = 0; b < p.h; ++b) {
      const RowRange pay = payload_rows(b);
      const RowRange rnd = randomness_rows(b);
      for (std::size_t cc = 0; cc < p.block_columns[b]; ++cc) {
        const std::size_t col = p.block_offsets[b] + cc;
        for (std::size_t rr = 0; rr < pay.size(); ++rr) {
          const CellPos dest{pay.begin + rr, col};
          if (b == 0) {
            at(dest) = Cell::payload(cc * pay.size() + rr);
          } else {
            const CellPos src{p.mu[b - 1] - 1, cc * pay.size() + rr};
            at(dest) = at(src);
            replicas_.push_back({dest, src});
          }
        }
        for (std::size_t rr = 0; rr < rnd.size(); ++rr) {
          at({rnd.begin + rr, col}) = Cell::random(next_random++);
        }
      }
    }
  }

  const SchemeParams& params() const noexcept { return params_; }
  RowOrder order() const noexcept { return order_; }

  const Cell& cell(std::size_t row, std::size_t col) const { return cells_[row * params_.alpha + col]; }
  const Cell& cell(CellPos pos) const { return cell(pos.row, pos.col); }

  const std::vector<Replica>& replicas() const noexcept { return replicas_; }

  std::size_t block_of(std::size_t col) const {
    for (std::size_t b = params_.h; b-- > 0;) {
      if (col >= params_.block_offsets[b]) return b;
    }
    return 0;
  }

  /// Rows holding E (block 0) or D_{b} (block b >= 1).
  RowRange payload_rows(std::size_t block) const {
    const std::size_t a = params_.alpha_level[block];
    return order_ == RowOrder::kPayloadFirst ? RowRange{0, a} : RowRange{params_.t, params_.t + a};
  }

  /// Rows holding fresh randomness R_{b}.
  RowRange randomness_rows(std::size_t block) const {
    const std::size_t a = params_.alpha_level[block];
    return order_ == RowOrder::kPayloadFirst ? RowRange{a, a + params_.t} : RowRange{0, params_.t};
  }

  /// Where payload part c sits in block 0.
  CellPos payload_position(std::size_t c) const {
    const RowRange pay = payload_rows(0);
    return {pay.begin + c % pay.size(), c / pay.size()};
  }

 private:
  Cell& at(CellPos pos) { return cells_[pos.row * params_.alpha + pos.col]; }

  SchemeParams params_;
  RowOrder order_;
  std::vector<Cell> cells_;
  std::vector<Replica> replicas_;
};

/// The grid with every cell realized as a vector.
struct MessageGrid {
  StaircaseLayout layout;
  std::vector<SymbolVector> entries;  // row-major, n x alpha

  const SymbolVector& at(std::size_t row, std::size_t col) const {
    return entries[row * layout.params().alpha + col];
  }
};

/// The n rows of Q = V * M.
struct ShareSet {
  FieldMatrix v;
  std::vector<std::vector<SymbolVector>> rows;  // rows[server][column]
};

/// e'_{c,i}: the unit vector selecting part c (0-based) of file i (1-based).
/// Part c of file i is the s-symbol slab at ((c * m) + i - 1) * s.
inline SymbolVector unit_vector(const SchemeParams& p, std::size_t part, std::size_t file_index) {
  if (file_index < 1 || file_index > p.m) {
    throw Error(ErrorCode::kFileIndexOutOfRange, "file index " + std::to_string(file_index));
  }
  SymbolVector e = zero_vector(p.field, p.vector_length());
  const std::size_t slab = part * p.m + (file_index - 1);
  for (std::size_t j = 0; j < p.s; ++j) e[slab * p.s + j] = p.field.one();
  return e;
}

inline std::vector<SymbolVector> generate_randomness(const SchemeParams& p, SeededRng& rng,
                                                     std::size_t length) {
  std::vector<SymbolVector> out;
  out.reserve(p.randomness_count());
  for (std::size_t u = 0; u < p.randomness_count(); ++u) out.push_back(rng.uniform_vector(p.field, length));
  return out;
}

/// t * alpha vectors of length alpha' * m * s, uniform over GF(q).
inline std::vector<SymbolVector> generate_randomness(const SchemeParams& p, std::uint64_t seed) {
  SeededRng rng(seed);
  return generate_randomness(p, rng, p.vector_length());
}

/// Fills a layout with concrete payload and randomness vectors.
inline MessageGrid realize_grid(const StaircaseLayout& layout, const std::vector<SymbolVector>& payload,
                                const std::vector<SymbolVector>& randomness) {
  const auto& p = layout.params();
  if (payload.size() != p.alpha_prime) {
    throw Error(ErrorCode::kDimensionMismatch, "payload must hold alpha' vectors");
  }
  if (randomness.size() != p.randomness_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "randomness must hold t * alpha vectors");
  }
  const std::size_t len = payload.front().size();
  for (const auto& v : payload) {
    if (v.size() != len) throw Error(ErrorCode::kDimensionMismatch, "payload vectors differ in length");
  }
  for (const auto& v : randomness) {
    if (v.size() != len) throw Error(ErrorCode::kDimensionMismatch, "randomness length mismatch");
  }
  MessageGrid grid{layout, {}};
  grid.entries.reserve(p.n * p.alpha);
  for (std::size_t r = 0; r < p.n; ++r) {
    for (std::size_t c = 0; c < p.alpha; ++c) {
      const Cell& cell = layout.cell(r, c);
      switch (cell.kind) {
        case Cell::Kind::kZero: grid.entries.push_back(zero_vector(p.field, len)); break;
        case Cell::Kind::kPayload: grid.entries.push_back(payload[cell.index]); break;
        case Cell::Kind::kRandom: grid.entries.push_back(randomness[cell.index]); break;
      }
    }
  }
  return grid;
}

/// The PIR grid for file `file_index` (1-based).
inline MessageGrid build_message_grid(const SchemeParams& p, std::size_t file_index,
                                      const std::vector<SymbolVector>& randomness,
                                      RowOrder order = kDefaultRowOrder) {
  std::vector<SymbolVector> payload;
  for (std::size_t c = 0; c < p.alpha_prime; ++c) payload.push_back(unit_vector(p, c, file_index));
  return realize_grid(StaircaseLayout(p, order), payload, randomness);
}

namespace detail {

inline ShareSet encode_unchecked(const FieldMatrix& v, const MessageGrid& grid) {
  const auto& p = grid.layout.params();
  ShareSet out{v, {}};
  out.rows.resize(p.n);
  const std::size_t len = grid.entries.front().size();
  for (std::size_t l = 0; l < p.n; ++l) {
    out.rows[l].reserve(p.alpha);
    for (std::size_t c = 0; c < p.alpha; ++c) {
      SymbolVector acc = zero_vector(p.field, len);
      for (std::size_t r = 0; r < p.n; ++r) {
        if (grid.layout.cell(r, c).kind == Cell::Kind::kZero) continue;
        axpy(acc, v.at(l, r), grid.at(r, c));
      }
      out.rows[l].push_back(std::move(acc));
    }
  }
  return out;
}

}  // namespace detail

/// Q = V * M. Throws BadEncodingMatrix when V fails validation.
inline ShareSet encode_shares(const SchemeParams& p, const FieldMatrix& v, const MessageGrid& grid) {
  if (grid.layout.params() != p) throw Error(ErrorCode::kInvalidArgument, "grid built for other params");
  if (v.rows() != p.n || v.cols() != p.n || v.field() != p.field || !validate_encoding_matrix(v, p)) {
    throw Error(ErrorCode::kBadEncodingMatrix, "encoding matrix fails the leading-columns property");
  }
  return detail::encode_unchecked(v, grid);
}

/**
 * Coefficients of every sub-query over the symbols of the grid.
 *
 * Row l * alpha + c describes sub-query c of server l; columns 0..alpha'-1
 * are the payload parts and the next t * alpha columns are the randomness
 * vectors.
 */
inline FieldMatrix symbolic_queries(const StaircaseLayout& layout, const FieldMatrix& v) {
  const auto& p = layout.params();
  FieldMatrix out(p.field, p.n * p.alpha, p.alpha_prime + p.randomness_count());
  for (std::size_t l = 0; l < p.n; ++l) {
    for (std::size_t c = 0; c < p.alpha; ++c) {
      for (std::size_t r = 0; r < p.n; ++r) {
        const Cell& cell = layout.cell(r, c);
        if (cell.kind == Cell::Kind::kZero) continue;
        const std::size_t sym = cell.kind == Cell::Kind::kPayload ? cell.index : p.alpha_prime + cell.index;
        out.at(l * p.alpha + c, sym) += v.at(l, r);
      }
    }
  }
  return out;
}

/// Number of leading sub-queries a user fetches from each of `responders`
/// servers: alpha' / alpha_j with j the matching level.
inline std::size_t prefix_columns(const SchemeParams& p, std::size_t responders) {
  return p.prefix_length(responders);
}

/**
 * Recovers the alpha' payload projections from the prefix sub-responses of
 * `responders` distinct servers (0-based ids).
 *
 * projections[a][c] is the value (any fixed length) of sub-query c of server
 * responders[a], for c below prefix_columns(|responders|). Blocks are solved
 * from the deepest level back to block 0: rows below |responders| of each
 * block are already known through the D-row replicas of later blocks, so
 * subtracting them leaves a square system in the first |responders| columns
 * of V.
 */
inline std::vector<SymbolVector> peel_decode(const StaircaseLayout& layout, const FieldMatrix& v,
                                             std::span<const std::size_t> responders,
                                             const std::vector<std::vector<SymbolVector>>& projections) {
  const auto& p = layout.params();
  const std::size_t mu = responders.size();
  if (mu < p.k) {
    throw Error(ErrorCode::kInsufficientResponders,
                std::to_string(mu) + " responders, need at least " + std::to_string(p.k));
  }
  if (mu > p.n) throw Error(ErrorCode::kOutOfRange, "more responders than servers");
  for (std::size_t a = 0; a < mu; ++a) {
    if (responders[a] >= p.n) throw Error(ErrorCode::kOutOfRange, "server id out of range");
    for (std::size_t b = 0; b < a; ++b) {
      if (responders[a] == responders[b]) throw Error(ErrorCode::kInvalidArgument, "duplicate responder");
    }
  }
  const std::size_t level = p.level_for(mu);
  const std::size_t prefix = p.prefix_length(mu);
  if (projections.size() != mu) throw Error(ErrorCode::kMissingResponse, "one projection list per responder");
  const std::size_t width = projections.front().empty() ? 0 : projections.front().front().size();
  for (const auto& per : projections) {
    if (per.size() < prefix) throw Error(ErrorCode::kMissingResponse, "responder prefix incomplete");
    if (per.size() > prefix) {
      throw Error(ErrorCode::kDimensionMismatch, "projections beyond the level prefix are not accepted");
    }
    for (const auto& val : per) {
      if (val.size() != width || width == 0) {
        throw Error(ErrorCode::kDimensionMismatch, "projection width mismatch");
      }
    }
  }

  std::vector<std::optional<SymbolVector>> known(p.n * prefix);
  auto slot = [&](std::size_t r, std::size_t c) -> std::optional<SymbolVector>& { return known[r * prefix + c]; };

  const FieldMatrix a_inv = matrix_inverse(v.leading_columns(responders, mu));

  for (std::size_t b = level + 1; b-- > 0;) {
    const std::size_t off = p.block_offsets[b];
    const std::size_t cols = p.block_columns[b];
    FieldMatrix rhs(p.field, mu, cols * width);
    for (std::size_t a = 0; a < mu; ++a) {
      for (std::size_t cc = 0; cc < cols; ++cc) {
        SymbolVector y = projections[a][off + cc];
        for (std::size_t r = mu; r < p.mu[b]; ++r) {
          const auto& val = slot(r, off + cc);
          if (!val) throw std::logic_error("peel_decode: replica row not yet decoded");
          axpy(y, -v.at(responders[a], r), *val);
        }
        for (std::size_t e = 0; e < width; ++e) rhs.at(a, cc * width + e) = y[e];
      }
    }
    const FieldMatrix x = matrix_mul(a_inv, rhs);
    for (std::size_t r = 0; r < mu; ++r) {
      for (std::size_t cc = 0; cc < cols; ++cc) {
        SymbolVector val;
        val.reserve(width);
        for (std::size_t e = 0; e < width; ++e) val.push_back(x.at(r, cc * width + e));
        slot(r, off + cc) = std::move(val);
      }
    }
    for (const Replica& rep : layout.replicas()) {
      if (layout.block_of(rep.dest.col) == b) slot(rep.source.row, rep.source.col) = slot(rep.dest.row, rep.dest.col);
    }
  }

  std::vector<SymbolVector> out;
  out.reserve(p.alpha_prime);
  for (std::size_t c = 0; c < p.alpha_prime; ++c) {
    const CellPos pos = layout.payload_position(c);
    out.push_back(*slot(pos.row, pos.col));
  }
  return out;
}

/// Communication-efficient sharing of an alpha'-vector secret.
inline ShareSet ss_share(const SchemeParams& p, const FieldMatrix& v, const std::vector<SymbolVector>& secret,
                         SeededRng& rng, RowOrder order = kDefaultRowOrder) {
  if (secret.size() != p.alpha_prime || secret.front().empty()) {
    throw Error(ErrorCode::kDimensionMismatch, "secret must be alpha' nonempty vectors");
  }
  const auto randomness = generate_randomness(p, rng, secret.front().size());
  return encode_shares(p, v, realize_grid(StaircaseLayout(p, order), secret, randomness));
}

/// Reconstructs the secret from the leading entries of d >= k shares.
inline std::vector<SymbolVector> ss_reconstruct(const SchemeParams& p, const FieldMatrix& v,
                                                std::span<const std::size_t> holders,
                                                const std::vector<std::vector<SymbolVector>>& prefixes,
                                                RowOrder order = kDefaultRowOrder) {
  return peel_decode(StaircaseLayout(p, order), v, holders, prefixes);
}

/// Share entries downloaded when reconstructing from d shares:
/// d * alpha' / (d - t).
inline std::size_t ss_download_entries(const SchemeParams& p, std::size_t d) {
  return d * p.prefix_length(d);
}

}  // namespace spir

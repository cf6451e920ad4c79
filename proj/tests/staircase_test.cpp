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

#include "spir/staircase.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace spir {
namespace {

using testing::Eq6Matrix;
using testing::Eq7Matrix;
using testing::ReferenceProjection;
using testing::ReferenceSlab;

// Cell shorthands; numbers follow the 1-based naming of the examples.
Cell E(std::size_t i) { return Cell::payload(i - 1); }
Cell R(std::size_t i) { return Cell::random(i - 1); }
const Cell Z = Cell::zero();

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

TEST(DeriveParamsTest, FourServerExample) {
  const auto p = derive_params(4, 2, 1, 3, 5);
  EXPECT_EQ(p.h, 3U);
  EXPECT_EQ(p.mu, (std::vector<std::size_t>{4, 3, 2}));
  EXPECT_EQ(p.alpha_level, (std::vector<std::size_t>{3, 2, 1}));
  EXPECT_EQ(p.alpha, 6U);
  EXPECT_EQ(p.alpha_prime, 6U);
  EXPECT_EQ(p.block_columns, (std::vector<std::size_t>{2, 1, 3}));
  EXPECT_EQ(p.block_offsets, (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(p.vector_length(), 18U);
}

TEST(DeriveParamsTest, ThreeServerExample) {
  const auto p = derive_params(3, 2, 1, 2, 5);
  EXPECT_EQ(p.alpha, 2U);
  EXPECT_EQ(p.alpha_prime, 2U);
  EXPECT_EQ(p.block_columns, (std::vector<std::size_t>{1, 1}));
}

TEST(DeriveParamsTest, NoStragglersDegeneratesToOneBlock) {
  const auto p = derive_params(3, 3, 1, 1, 5);
  EXPECT_EQ(p.h, 1U);
  EXPECT_EQ(p.alpha, 1U);
  EXPECT_EQ(p.alpha_prime, 2U);
  // E is alpha_1 x alpha'/alpha_1 = 2 x 1: one sub-query carrying both parts.
  EXPECT_EQ(p.block_columns, (std::vector<std::size_t>{1}));
  EXPECT_EQ(p.prefix_length(3), 1U);
}

TEST(DeriveParamsTest, Errors) {
  EXPECT_EQ(CodeOf([] { derive_params(4, 2, 2, 1, 5); }), ErrorCode::kInvalidThreshold);
  EXPECT_EQ(CodeOf([] { derive_params(4, 2, 0, 1, 5); }), ErrorCode::kInvalidThreshold);
  EXPECT_EQ(CodeOf([] { derive_params(3, 4, 1, 1, 5); }), ErrorCode::kInvalidK);
  EXPECT_EQ(CodeOf([] { derive_params(5, 2, 1, 1, 5); }), ErrorCode::kFieldTooSmall);
  EXPECT_EQ(CodeOf([] { derive_params(3, 2, 1, 1, 9); }), ErrorCode::kNotPrime);
  EXPECT_EQ(CodeOf([] { derive_params(3, 2, 1, 0, 5); }), ErrorCode::kInvalidArgument);
  EXPECT_NO_THROW(derive_params(3, 2, 1, 1, 3, 1, FieldCheck::kExplicitMatrix));
}

// Column counts telescope to alpha'/alpha_j and randomness totals t * alpha.
TEST(DeriveParamsTest, TelescopingExhaustive) {
  for (std::size_t n = 2; n <= 10; ++n) {
    for (std::size_t k = 2; k <= n; ++k) {
      for (std::size_t t = 1; t < k; ++t) {
        const auto p = derive_params(n, k, t, 1, 11);
        std::size_t total = 0;
        for (std::size_t b = 0; b < p.h; ++b) {
          total += p.block_columns[b];
          ASSERT_EQ(total * p.alpha_level[b], p.alpha_prime) << n << k << t;
          ASSERT_EQ(total, p.prefix_length(p.mu[b]));
        }
        ASSERT_EQ(total, p.alpha);
        const StaircaseLayout layout(p);
        std::size_t randoms = 0;
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t c = 0; c < p.alpha; ++c)
            randoms = std::max(randoms, layout.cell(r, c).kind == Cell::Kind::kRandom ? layout.cell(r, c).index + 1 : 0);
        ASSERT_EQ(randoms, p.randomness_count());
      }
    }
  }
}

TEST(RandomnessTest, CountsAndDeterminism) {
  EXPECT_EQ(generate_randomness(derive_params(4, 2, 1, 2, 5), 1).size(), 6U);
  EXPECT_EQ(generate_randomness(derive_params(3, 2, 1, 2, 5), 1).size(), 2U);
  const auto p = derive_params(5, 3, 2, 2, 7);
  const auto a = generate_randomness(p, 42);
  EXPECT_EQ(a, generate_randomness(p, 42));
  EXPECT_NE(a, generate_randomness(p, 43));
  for (const auto& v : a) EXPECT_EQ(v.size(), p.vector_length());
}

TEST(LayoutTest, FourServerGridMatchesExample) {
  const StaircaseLayout layout(derive_params(4, 2, 1, 2, 5));
  const std::vector<std::vector<Cell>> expected{
      {E(1), E(4), R(1), E(3), E(6), R(3)},
      {E(2), E(5), R(2), R(4), R(5), R(6)},
      {E(3), E(6), R(3), Z, Z, Z},
      {R(1), R(2), Z, Z, Z, Z},
  };
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(layout.cell(r, c), expected[r][c]) << r << "," << c;
}

TEST(LayoutTest, ThreeServerGridRandomnessFirst) {
  const StaircaseLayout layout(derive_params(3, 2, 1, 2, 5), RowOrder::kRandomnessFirst);
  const std::vector<std::vector<Cell>> expected{{R(1), R(2)}, {E(1), E(2)}, {E(2), Z}};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(layout.cell(r, c), expected[r][c]) << r << "," << c;
}

TEST(LayoutTest, BlockOneHoldsEveryPayloadOnce) {
  for (auto order : {RowOrder::kPayloadFirst, RowOrder::kRandomnessFirst}) {
    for (auto [n, k, t] : std::vector<std::tuple<int, int, int>>{{3, 2, 1}, {4, 2, 1}, {5, 3, 2}, {6, 4, 2}, {7, 3, 1}}) {
      const auto p = derive_params(n, k, t, 1, 11);
      const StaircaseLayout layout(p, order);
      std::multiset<std::size_t> seen;
      for (std::size_t r = 0; r < p.n; ++r)
        for (std::size_t c = 0; c < p.block_columns[0]; ++c)
          if (layout.cell(r, c).kind == Cell::Kind::kPayload) seen.insert(layout.cell(r, c).index);
      ASSERT_EQ(seen.size(), p.alpha_prime);
      ASSERT_EQ(std::set<std::size_t>(seen.begin(), seen.end()).size(), p.alpha_prime);
      for (std::size_t c = 0; c < p.alpha_prime; ++c) {
        ASSERT_EQ(layout.cell(layout.payload_position(c)), Cell::payload(c));
      }
    }
  }
}

TEST(LayoutTest, RowsBelowMuAreZeroAndReplicasCopyTheirSource) {
  for (auto order : {RowOrder::kPayloadFirst, RowOrder::kRandomnessFirst}) {
    for (std::size_t n = 2; n <= 8; ++n) {
      for (std::size_t k = 2; k <= n; ++k) {
        for (std::size_t t = 1; t < k; ++t) {
          const auto p = derive_params(n, k, t, 1, 11);
          const StaircaseLayout layout(p, order);
          for (std::size_t b = 0; b < p.h; ++b) {
            for (std::size_t cc = 0; cc < p.block_columns[b]; ++cc) {
              const std::size_t col = p.block_offsets[b] + cc;
              for (std::size_t r = 0; r < n; ++r) {
                ASSERT_EQ(layout.cell(r, col).kind == Cell::Kind::kZero, r >= p.mu[b]) << n << k << t;
              }
            }
          }
          for (const auto& rep : layout.replicas()) {
            ASSERT_EQ(layout.cell(rep.dest), layout.cell(rep.source));
            ASSERT_LT(rep.source.col, p.block_offsets[layout.block_of(rep.dest.col)]);
          }
        }
      }
    }
  }
}

TEST(GridTest, RealizedCellsHoldUnitAndRandomVectors) {
  const auto p = derive_params(4, 2, 1, 3, 5);
  const auto rnd = generate_randomness(p, 7);
  const auto grid = build_message_grid(p, 2, rnd);
  EXPECT_EQ(grid.at(2, 0), unit_vector(p, 2, 2));  // e'_3
  EXPECT_EQ(grid.at(2, 1), unit_vector(p, 5, 2));  // e'_6
  EXPECT_EQ(grid.at(2, 2), rnd[2]);
  EXPECT_EQ(grid.at(3, 0), rnd[0]);
  EXPECT_EQ(grid.at(3, 2), zero_vector(p.field, p.vector_length()));
  // e'_{c,i} = e_{(c-1)m+i}
  const auto e = unit_vector(p, 1, 2);
  EXPECT_EQ(e[1 * 3 + 1].value(), 1U);
  EXPECT_EQ(std::count_if(e.begin(), e.end(), [](auto x) { return !x.is_zero(); }), 1);
}

TEST(GridTest, FileIndexOutOfRange) {
  const auto p = derive_params(3, 2, 1, 2, 5);
  const auto rnd = generate_randomness(p, 1);
  EXPECT_EQ(CodeOf([&] { build_message_grid(p, 0, rnd); }), ErrorCode::kFileIndexOutOfRange);
  EXPECT_EQ(CodeOf([&] { build_message_grid(p, 3, rnd); }), ErrorCode::kFileIndexOutOfRange);
}

TEST(EncodeTest, ThreeServerQueriesMatchTable) {
  const auto p = derive_params(3, 2, 1, 2, 5);
  const StaircaseLayout layout(p, RowOrder::kRandomnessFirst);
  const auto q = symbolic_queries(layout, Eq6Matrix());
  // symbol order: e_i, e_{m+i}, r_1, r_2
  auto row = [&](std::size_t server, std::size_t col) {
    std::vector<std::uint64_t> out;
    for (std::size_t s = 0; s < 4; ++s) out.push_back(q.at(server * 2 + col, s).value());
    return out;
  };
  EXPECT_EQ(row(0, 0), (std::vector<std::uint64_t>{0, 0, 1, 0}));
  EXPECT_EQ(row(0, 1), (std::vector<std::uint64_t>{0, 0, 0, 1}));
  EXPECT_EQ(row(1, 0), (std::vector<std::uint64_t>{1, 0, 1, 0}));
  EXPECT_EQ(row(1, 1), (std::vector<std::uint64_t>{0, 1, 0, 1}));
  EXPECT_EQ(row(2, 0), (std::vector<std::uint64_t>{2, 1, 1, 0}));
  EXPECT_EQ(row(2, 1), (std::vector<std::uint64_t>{0, 2, 0, 1}));
}

TEST(EncodeTest, FourServerFirstSubQuery) {
  const auto p = derive_params(4, 2, 1, 2, 5);
  const auto q = symbolic_queries(StaircaseLayout(p), Eq7Matrix());
  // server 2, sub-query 1: e'_1 + 2e'_2 + 4e'_3 + 3r_1
  std::vector<std::uint64_t> row;
  for (std::size_t s = 0; s < 12; ++s) row.push_back(q.at(1 * 6 + 0, s).value());
  EXPECT_EQ(row, (std::vector<std::uint64_t>{1, 2, 4, 0, 0, 0, 3, 0, 0, 0, 0, 0}));
}

TEST(EncodeTest, RealizedSharesAgreeWithSymbolicCoefficients) {
  const auto p = derive_params(4, 2, 1, 2, 5);
  const auto v = Eq7Matrix();
  const auto rnd = generate_randomness(p, 3);
  const auto grid = build_message_grid(p, 1, rnd);
  const auto shares = encode_shares(p, v, grid);
  const auto sym = symbolic_queries(grid.layout, v);
  for (std::size_t l = 0; l < p.n; ++l) {
    for (std::size_t c = 0; c < p.alpha; ++c) {
      SymbolVector expect = zero_vector(p.field, p.vector_length());
      for (std::size_t e = 0; e < p.alpha_prime; ++e) axpy(expect, sym.at(l * p.alpha + c, e), unit_vector(p, e, 1));
      for (std::size_t u = 0; u < p.randomness_count(); ++u)
        axpy(expect, sym.at(l * p.alpha + c, p.alpha_prime + u), rnd[u]);
      ASSERT_EQ(shares.rows[l][c], expect);
    }
  }
}

TEST(EncodeTest, ZeroGridGivesZeroShares) {
  const auto p = derive_params(4, 2, 1, 2, 5);
  const std::vector<SymbolVector> zeros(p.alpha_prime, zero_vector(p.field, 3));
  const std::vector<SymbolVector> zr(p.randomness_count(), zero_vector(p.field, 3));
  const auto shares = encode_shares(p, Eq7Matrix(), realize_grid(StaircaseLayout(p), zeros, zr));
  for (const auto& row : shares.rows)
    for (const auto& e : row) EXPECT_EQ(e, zero_vector(p.field, 3));
}

TEST(EncodeTest, RejectsBadEncodingMatrix) {
  const auto p = derive_params(4, 2, 1, 1, 5);
  const auto grid = build_message_grid(p, 1, generate_randomness(p, 1));
  EXPECT_EQ(CodeOf([&] { encode_shares(p, FieldMatrix::identity(p.field, 4), grid); }),
            ErrorCode::kBadEncodingMatrix);
}

TEST(PrefixColumnsTest, Levels) {
  const auto p = derive_params(4, 2, 1, 1, 5);
  EXPECT_EQ(prefix_columns(p, 4), 2U);
  EXPECT_EQ(prefix_columns(p, 3), 3U);
  EXPECT_EQ(prefix_columns(p, 2), p.alpha);
  EXPECT_EQ(CodeOf([&] { prefix_columns(p, 1); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(CodeOf([&] { prefix_columns(p, 5); }), ErrorCode::kOutOfRange);
  for (std::size_t n = 3; n <= 9; ++n) {
    const auto q = derive_params(n, 2, 1, 1, 11);
    EXPECT_EQ(prefix_columns(q, 2), q.alpha);
  }
}

// Projections of a random x on the share prefix of the given servers.
std::vector<std::vector<SymbolVector>> Project(const ShareSet& shares, const std::vector<std::size_t>& servers,
                                               std::size_t prefix, const SymbolVector& x, std::size_t s) {
  std::vector<std::vector<SymbolVector>> out;
  for (auto l : servers) {
    out.emplace_back();
    for (std::size_t c = 0; c < prefix; ++c) out.back().push_back(ReferenceProjection(shares.rows[l][c], x, s));
  }
  return out;
}

TEST(PeelDecodeTest, FourServerEveryTripleAndPair) {
  const auto p = derive_params(4, 2, 1, 2, 5);
  const auto v = Eq7Matrix();
  SeededRng rng(5);
  const auto x = rng.uniform_vector(p.field, p.vector_length());
  const auto shares = encode_shares(p, v, build_message_grid(p, 2, generate_randomness(p, 11)));
  for (std::size_t mu = 2; mu <= 4; ++mu) {
    for_each_subset(4, mu, [&](const std::vector<std::size_t>& servers) {
      const auto decoded = peel_decode(StaircaseLayout(p), v, servers, Project(shares, servers, p.prefix_length(mu), x, 1));
      for (std::size_t c = 0; c < 6; ++c) ASSERT_EQ(decoded[c], ReferenceSlab(x, 2, 1, c, 2));
    });
  }
}

TEST(PeelDecodeTest, ThreeServerPairSubtractsRandomness) {
  const auto p = derive_params(3, 2, 1, 2, 5);
  const auto v = Eq6Matrix();
  const StaircaseLayout layout(p, RowOrder::kRandomnessFirst);
  SeededRng rng(8);
  const auto x = rng.uniform_vector(p.field, p.vector_length());
  const auto rnd = generate_randomness(p, 2);
  const auto shares = encode_shares(p, v, build_message_grid(p, 1, rnd, RowOrder::kRandomnessFirst));
  const std::vector<std::size_t> servers{0, 1};
  const auto proj = Project(shares, servers, 2, x, 1);
  const auto decoded = peel_decode(layout, v, servers, proj);
  // x_i = (e_i + r_1)^T x - r_1^T x
  EXPECT_EQ(decoded[0][0], proj[1][0][0] - proj[0][0][0]);
  EXPECT_EQ(decoded[0][0], x[0]);
  EXPECT_EQ(decoded[1][0], x[2]);
}

TEST(PeelDecodeTest, ZeroDataDecodesToZero) {
  const auto p = derive_params(5, 3, 2, 2, 7);
  const auto v = default_vandermonde(p.field, 5);
  const auto shares = encode_shares(p, v, build_message_grid(p, 1, generate_randomness(p, 4)));
  const SymbolVector x = zero_vector(p.field, p.vector_length());
  const std::vector<std::size_t> servers{0, 2, 4};
  for (const auto& part : peel_decode(StaircaseLayout(p), v, servers, Project(shares, servers, p.prefix_length(3), x, 1)))
    EXPECT_EQ(part, zero_vector(p.field, 1));
}

TEST(PeelDecodeTest, ErrorPaths) {
  const auto p = derive_params(4, 2, 1, 1, 5);
  const auto v = Eq7Matrix();
  const StaircaseLayout layout(p);
  const auto shares = encode_shares(p, v, build_message_grid(p, 1, generate_randomness(p, 4)));
  SeededRng rng(1);
  const auto x = rng.uniform_vector(p.field, p.vector_length());
  const std::vector<std::size_t> one{0};
  EXPECT_EQ(CodeOf([&] { peel_decode(layout, v, one, Project(shares, one, 6, x, 1)); }),
            ErrorCode::kInsufficientResponders);
  const std::vector<std::size_t> three{0, 1, 3};
  EXPECT_EQ(CodeOf([&] { peel_decode(layout, v, three, Project(shares, three, 2, x, 1)); }),
            ErrorCode::kMissingResponse);
  // The decoder refuses responses past the prefix instead of silently reading them.
  EXPECT_EQ(CodeOf([&] { peel_decode(layout, v, three, Project(shares, three, 4, x, 1)); }),
            ErrorCode::kDimensionMismatch);
  const std::vector<std::size_t> dup{0, 0, 1};
  EXPECT_EQ(CodeOf([&] { peel_decode(layout, v, dup, Project(shares, dup, 3, x, 1)); }),
            ErrorCode::kInvalidArgument);
}

// Round trip over every responder subset in both row orders, with batching.
TEST(PeelDecodeTest, RoundTripPropertyBothRowOrders) {
  struct Case {
    std::size_t n, k, t;
  };
  for (auto order : {RowOrder::kPayloadFirst, RowOrder::kRandomnessFirst}) {
    for (Case cs : {Case{3, 2, 1}, Case{4, 2, 1}, Case{4, 3, 1}, Case{5, 3, 2}, Case{6, 4, 2}}) {
      const auto p = derive_params(cs.n, cs.k, cs.t, 2, 7, 2);
      const auto v = default_vandermonde(p.field, p.n);
      const StaircaseLayout layout(p, order);
      SeededRng rng(cs.n * 100 + cs.k * 10 + cs.t);
      for (int trial = 0; trial < 5; ++trial) {
        const std::size_t file = 1 + rng.below(p.m);
        const auto x = rng.uniform_vector(p.field, p.vector_length());
        const auto shares = encode_shares(p, v, build_message_grid(p, file, generate_randomness(p, rng.next_u64()), order));
        for (std::size_t mu = p.k; mu <= p.n; ++mu) {
          for_each_subset(p.n, mu, [&](const std::vector<std::size_t>& servers) {
            const auto decoded = peel_decode(layout, v, servers, Project(shares, servers, p.prefix_length(mu), x, p.s));
            for (std::size_t c = 0; c < p.alpha_prime; ++c) ASSERT_EQ(decoded[c], ReferenceSlab(x, p.m, p.s, c, file));
          });
        }
      }
    }
  }
}

TEST(SecretSharingTest, ShareReconstructFromEverySubset) {
  const auto p = derive_params(4, 2, 1, 1, 5);
  const auto v = Eq7Matrix();
  SeededRng rng(77);
  std::vector<SymbolVector> secret;
  for (std::size_t c = 0; c < p.alpha_prime; ++c) secret.push_back(rng.uniform_vector(p.field, 3));
  const auto shares = ss_share(p, v, secret, rng);
  for (std::size_t d = 2; d <= 4; ++d) {
    for_each_subset(4, d, [&](const std::vector<std::size_t>& holders) {
      std::vector<std::vector<SymbolVector>> prefixes;
      for (auto l : holders)
        prefixes.emplace_back(shares.rows[l].begin(), shares.rows[l].begin() + static_cast<std::ptrdiff_t>(p.prefix_length(d)));
      ASSERT_EQ(ss_reconstruct(p, v, holders, prefixes), secret);
    });
    // d * alpha' / (d - t) entries
    EXPECT_EQ(ss_download_entries(p, d), d * 6 / (d - 1));
  }
}

TEST(SecretSharingTest, UnitVectorSecretIsThePirGrid) {
  const auto p = derive_params(4, 2, 1, 2, 5);
  std::vector<SymbolVector> secret;
  for (std::size_t c = 0; c < p.alpha_prime; ++c) secret.push_back(unit_vector(p, c, 2));
  SeededRng rng(5);
  const auto shares = ss_share(p, Eq7Matrix(), secret, rng);
  const auto pir = encode_shares(p, Eq7Matrix(), build_message_grid(p, 2, generate_randomness(p, 5)));
  EXPECT_EQ(shares.rows, pir.rows);
}

}  // namespace
}  // namespace spir

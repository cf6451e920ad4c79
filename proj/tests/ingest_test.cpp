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

#include "spir/ingest.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "spir/rng.hpp"

namespace spir {
namespace {

namespace fs = std::filesystem;

ByteVector RandomBytes(std::size_t len, std::uint64_t seed) {
  SeededRng rng(seed);
  ByteVector out(len);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng.below(256));
  return out;
}

TEST(PackingTest, BitsPerSymbol) {
  EXPECT_EQ(bits_per_symbol(257), 8u);
  EXPECT_EQ(bits_per_symbol(65537), 8u);
  EXPECT_EQ(bits_per_symbol(251), 4u);
  EXPECT_EQ(bits_per_symbol(17), 4u);
  EXPECT_EQ(bits_per_symbol(13), 2u);
  EXPECT_EQ(bits_per_symbol(5), 2u);
  EXPECT_EQ(bits_per_symbol(3), 1u);
  EXPECT_EQ(bits_per_symbol(2), 1u);
}

TEST(PackingTest, TwoBitChunksAreMostSignificantFirst) {
  const auto sym = pack_bytes({0b11100100}, PrimeField(5), 2);
  EXPECT_EQ(to_values(sym), (std::vector<std::uint64_t>{3, 2, 1, 0}));
}

TEST(PackingTest, RoundTripEveryMode) {
  const ByteVector bytes = RandomBytes(97, 1);
  for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 17ULL, 257ULL}) {
    const unsigned bits = bits_per_symbol(q);
    SymbolVector sym = pack_bytes(bytes, PrimeField(q), bits);
    EXPECT_EQ(sym.size(), packed_length(bytes.size(), bits));
    sym.resize(sym.size() + 5, PrimeField(q).zero());
    EXPECT_EQ(unpack_symbols(sym, bits, bytes.size()), bytes) << "q=" << q;
  }
}

TEST(PackingTest, Errors) {
  EXPECT_THROW(pack_bytes({1}, PrimeField(5), 4), Error);
  EXPECT_THROW(pack_bytes({1}, PrimeField(257), 3), Error);
  EXPECT_THROW(unpack_symbols(to_symbols(PrimeField(5), {4, 0, 0, 0}), 2, 1), Error);
  EXPECT_THROW(unpack_symbols(to_symbols(PrimeField(5), {1}), 2, 1), Error);
}

TEST(IngestTest, PicksBatchWidthAndPads) {
  const auto res = ingest({{"a", RandomBytes(10, 2)}, {"b", RandomBytes(3, 3)}}, 3, 2, 1, 257);
  // alpha' = 2, longest file 10 symbols -> s = 5.
  EXPECT_EQ(res.params.s, 5u);
  EXPECT_EQ(res.params.m, 2u);
  EXPECT_EQ(res.database.file(2).size(), 10u);
  EXPECT_EQ(restore(res.manifest, 1, res.database.file(1)), RandomBytes(10, 2));
  EXPECT_EQ(restore(res.manifest, 2, res.database.file(2)), RandomBytes(3, 3));
  EXPECT_THROW(ingest({{"a", RandomBytes(10, 2)}}, 3, 2, 1, 257, 2), Error);
  EXPECT_THROW(ingest({}, 3, 2, 1, 257), Error);
}

TEST(IngestTest, EmptyFileIsFine) {
  const auto res = ingest({{"empty", {}}}, 3, 2, 1, 257);
  EXPECT_EQ(res.params.s, 1u);
  EXPECT_TRUE(restore(res.manifest, 1, res.database.file(1)).empty());
}

TEST(ManifestTest, JsonRoundTripAndReload) {
  const fs::path dir = fs::temp_directory_path() / "spir_ingest_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_bytes(dir / "one.bin", RandomBytes(33, 4));
  write_bytes(dir / "two.bin", RandomBytes(7, 5));
  const auto res = ingest(read_directory(dir), 4, 2, 1, 5);
  EXPECT_EQ(res.manifest.bits, 2u);
  ASSERT_EQ(res.manifest.files.size(), 2u);
  EXPECT_EQ(res.manifest.files[0].name, "one.bin");

  res.manifest.save(dir / "manifest.json.out");
  const Manifest back = Manifest::load(dir / "manifest.json.out");
  EXPECT_EQ(back.to_json(), res.manifest.to_json());
  const auto again = reload(back, dir);
  EXPECT_EQ(again.database.data(), res.database.data());

  write_bytes(dir / "two.bin", RandomBytes(8, 5));
  EXPECT_THROW(reload(back, dir), Error);
  fs::remove_all(dir);
}

TEST(ManifestTest, RejectsMalformed) {
  EXPECT_THROW(Manifest::from_json(nlohmann::json{{"n", 3}}), Error);
  auto j = ingest({{"a", {1}}}, 3, 2, 1, 257).manifest.to_json();
  j["m"] = 2;
  EXPECT_THROW(Manifest::from_json(j), Error);
}

}  // namespace
}  // namespace spir

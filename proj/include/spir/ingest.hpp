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
 * @file ingest.hpp
 * @brief Packing byte files into field symbols and back.
 *
 * With q >= 257 every byte is one symbol. Smaller fields carry b bits per
 * symbol, b the largest of 1, 2, 4 with 2^b <= q, most significant chunk
 * first. Files are zero-padded to alpha' * s symbols; a JSON manifest keeps
 * the parameters, the packing and each original length so decoded files
 * restore exactly.
 */

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "json.hpp"
#include "spir/error.hpp"
#include "spir/field.hpp"
#include "spir/params.hpp"
#include "spir/pir.hpp"

namespace spir {

using ByteVector = std::vector<std::uint8_t>;

inline unsigned bits_per_symbol(std::uint64_t q) {
  if (q >= 257) return 8;
  for (unsigned b : {4u, 2u, 1u})
    if ((std::uint64_t{1} << b) <= q) return b;
  throw Error(ErrorCode::kFieldTooSmall, "q must be at least 2");
}

inline std::size_t packed_length(std::size_t bytes, unsigned bits) { return (bytes * 8 + bits - 1) / bits; }

inline SymbolVector pack_bytes(const ByteVector& bytes, const PrimeField& field, unsigned bits) {
  if (bits != 1 && bits != 2 && bits != 4 && bits != 8) throw Error(ErrorCode::kInvalidArgument, "bits per symbol");
  if ((std::uint64_t{1} << bits) > field.modulus()) {
    throw Error(ErrorCode::kFieldTooSmall, "chunk values do not fit below q");
  }
  SymbolVector out;
  out.reserve(packed_length(bytes.size(), bits));
  const unsigned mask = (1u << bits) - 1;
  for (std::uint8_t byte : bytes) {
    for (int shift = 8 - static_cast<int>(bits); shift >= 0; shift -= static_cast<int>(bits)) {
      out.push_back(field.element((byte >> shift) & mask));
    }
  }
  return out;
}

/// Inverse of pack_bytes for the first `length` bytes; padding is ignored.
inline ByteVector unpack_symbols(const SymbolVector& symbols, unsigned bits, std::size_t length) {
  if (packed_length(length, bits) > symbols.size()) throw Error(ErrorCode::kDimensionMismatch, "too few symbols");
  ByteVector out;
  out.reserve(length);
  const std::size_t per_byte = 8 / bits;
  for (std::size_t i = 0; i < length; ++i) {
    unsigned byte = 0;
    for (std::size_t c = 0; c < per_byte; ++c) {
      const std::uint64_t v = symbols[i * per_byte + c].value();
      if (v >> bits) throw Error(ErrorCode::kOutOfRange, "symbol does not hold a packed chunk");
      byte = (byte << bits) | static_cast<unsigned>(v);
    }
    out.push_back(static_cast<std::uint8_t>(byte));
  }
  return out;
}

struct ManifestEntry {
  std::string name;
  std::size_t length = 0;
};

struct Manifest {
  std::size_t n = 0, k = 0, t = 0, m = 0, s = 1;
  std::uint64_t q = 0;
  unsigned bits = 8;
  std::vector<ManifestEntry> files;

  SchemeParams params(FieldCheck check = FieldCheck::kVandermonde) const { return derive_params(n, k, t, m, q, s, check); }

  nlohmann::json to_json() const {
    nlohmann::json j{{"n", n}, {"k", k}, {"t", t}, {"m", m}, {"q", q}, {"s", s}, {"bits", bits}};
    j["files"] = nlohmann::json::array();
    for (const auto& f : files) j["files"].push_back({{"name", f.name}, {"length", f.length}});
    return j;
  }

  static Manifest from_json(const nlohmann::json& j) {
    try {
      Manifest mf;
      j.at("n").get_to(mf.n);
      j.at("k").get_to(mf.k);
      j.at("t").get_to(mf.t);
      j.at("m").get_to(mf.m);
      j.at("q").get_to(mf.q);
      j.at("s").get_to(mf.s);
      j.at("bits").get_to(mf.bits);
      for (const auto& f : j.at("files")) mf.files.push_back({f.at("name").get<std::string>(), f.at("length").get<std::size_t>()});
      if (mf.files.size() != mf.m) throw Error(ErrorCode::kInvalidArgument, "manifest lists " + std::to_string(mf.files.size()) + " files, m = " + std::to_string(mf.m));
      return mf;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, std::string("bad manifest: ") + e.what());
    }
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
    out << to_json().dump(2) << '\n';
  }

  static Manifest load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kInvalidArgument, std::string("bad manifest: ") + e.what());
    }
  }
};

inline ByteVector read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  return ByteVector(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_bytes(const std::filesystem::path& path, const ByteVector& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

struct IngestResult {
  Manifest manifest;
  SchemeParams params;
  Database database;
};

/// Builds the database from named byte blobs; s = 0 picks the smallest batch
/// width that fits the longest file.
inline IngestResult ingest(const std::vector<std::pair<std::string, ByteVector>>& files, std::size_t n,
                           std::size_t k, std::size_t t, std::uint64_t q, std::size_t s = 0,
                           FieldCheck check = FieldCheck::kVandermonde) {
  if (files.empty()) throw Error(ErrorCode::kInvalidArgument, "no files to ingest");
  Manifest mf;
  mf.n = n;
  mf.k = k;
  mf.t = t;
  mf.m = files.size();
  mf.q = q;
  mf.bits = bits_per_symbol(q);
  std::size_t longest = 1;
  for (const auto& [name, bytes] : files) {
    mf.files.push_back({name, bytes.size()});
    longest = std::max(longest, packed_length(bytes.size(), mf.bits));
  }
  if (s == 0) {
    const auto probe = derive_params(n, k, t, mf.m, q, 1, check);
    s = (longest + probe.alpha_prime - 1) / probe.alpha_prime;
  }
  mf.s = s;
  const SchemeParams p = mf.params(check);
  if (longest > p.file_symbols()) {
    throw Error(ErrorCode::kInvalidArgument, "batch width too small for the longest file");
  }
  std::vector<SymbolVector> packed;
  for (const auto& [name, bytes] : files) {
    SymbolVector sym = pack_bytes(bytes, p.field, mf.bits);
    sym.resize(p.file_symbols(), p.field.zero());
    packed.push_back(std::move(sym));
  }
  return {mf, p, Database::for_params(p, packed)};
}

/// Regular files of `dir` in name order.
inline std::vector<std::pair<std::string, ByteVector>> read_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::kIoError, dir.string() + " is not a directory");
  std::vector<std::filesystem::path> paths;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file()) paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  std::vector<std::pair<std::string, ByteVector>> out;
  for (const auto& path : paths) out.emplace_back(path.filename().string(), read_bytes(path));
  return out;
}

/// Rebuilds the database a manifest describes from the files it names.
inline IngestResult reload(const Manifest& mf, const std::filesystem::path& dir,
                           FieldCheck check = FieldCheck::kVandermonde) {
  std::vector<std::pair<std::string, ByteVector>> files;
  for (const auto& f : mf.files) {
    files.emplace_back(f.name, read_bytes(dir / f.name));
    if (files.back().second.size() != f.length) {
      throw Error(ErrorCode::kDimensionMismatch, f.name + " changed since the manifest was written");
    }
  }
  auto res = ingest(files, mf.n, mf.k, mf.t, mf.q, mf.s, check);
  if (res.manifest.bits != mf.bits) throw Error(ErrorCode::kInvalidArgument, "manifest packing differs");
  return res;
}

/// Original bytes of file `index` (1-based) from its decoded symbols.
inline ByteVector restore(const Manifest& mf, std::size_t index, const SymbolVector& symbols) {
  if (index < 1 || index > mf.files.size()) throw Error(ErrorCode::kFileIndexOutOfRange, std::to_string(index));
  return unpack_symbols(symbols, mf.bits, mf.files[index - 1].length);
}

}  // namespace spir

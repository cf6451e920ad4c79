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
 * @file wire.hpp
 * @brief Length-prefixed binary framing for the socket protocol.
 *
 * Frame: "SPIR", version byte, type byte, u64 payload length, payload. All
 * integers are little-endian u64. Field symbols travel as u64 values below q.
 */

#include <openssl/evp.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spir/error.hpp"
#include "spir/field.hpp"
#include "spir/matrix.hpp"
#include "spir/params.hpp"
#include "spir/pir.hpp"

namespace spir::wire {

inline constexpr std::array<std::uint8_t, 4> kMagic{'S', 'P', 'I', 'R'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 14;
inline constexpr std::uint64_t kMaxPayload = std::uint64_t{1} << 30;

enum class MessageType : std::uint8_t { kQuery = 1, kFetch = 2, kResponse = 3, kError = 4 };

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

inline void put_u64(Bytes& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

/// Bounds-checked cursor; running off the end is a malformed frame.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= std::uint64_t{data_[pos_ + b]} << (8 * b);
    pos_ += 8;
    return v;
  }

  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const noexcept { return data_.size() - pos_; }

  void expect_end() const {
    if (remaining() != 0) throw Error(ErrorCode::kMalformedFrame, "trailing bytes in payload");
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw Error(ErrorCode::kMalformedFrame, "payload truncated");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

struct Frame {
  MessageType type = MessageType::kError;
  Bytes payload;
};

inline Bytes encode_frame(MessageType type, const Bytes& payload) {
  Bytes out(kMagic.begin(), kMagic.end());
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(type));
  put_u64(out, payload.size());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

/// Validates a 14-byte header and returns the type and payload length.
inline std::pair<MessageType, std::uint64_t> parse_header(std::span<const std::uint8_t> header) {
  if (header.size() != kHeaderSize) throw Error(ErrorCode::kMalformedFrame, "short header");
  for (std::size_t i = 0; i < kMagic.size(); ++i) {
    if (header[i] != kMagic[i]) throw Error(ErrorCode::kMalformedFrame, "bad magic");
  }
  if (header[4] != kVersion) throw Error(ErrorCode::kMalformedFrame, "unsupported version " + std::to_string(header[4]));
  const std::uint8_t type = header[5];
  if (type < 1 || type > 4) throw Error(ErrorCode::kMalformedFrame, "unknown message type " + std::to_string(type));
  Reader r(header.subspan(6));
  const std::uint64_t len = r.u64();
  if (len > kMaxPayload) throw Error(ErrorCode::kMalformedFrame, "payload too large");
  return {static_cast<MessageType>(type), len};
}

/// Decodes exactly one frame occupying all of `bytes`.
inline Frame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw Error(ErrorCode::kMalformedFrame, "short header");
  const auto [type, len] = parse_header(bytes.first(kHeaderSize));
  if (bytes.size() - kHeaderSize != len) throw Error(ErrorCode::kMalformedFrame, "length prefix mismatch");
  return {type, Bytes(bytes.begin() + kHeaderSize, bytes.end())};
}

/// SHA-256 over n and the row-major entries of V.
inline Digest encoding_fingerprint(const FieldMatrix& v) {
  Bytes buf;
  put_u64(buf, v.field().modulus());
  put_u64(buf, v.rows());
  put_u64(buf, v.cols());
  for (std::size_t r = 0; r < v.rows(); ++r)
    for (std::size_t c = 0; c < v.cols(); ++c) put_u64(buf, v.at(r, c).value());
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(buf.data(), buf.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size()) {
    throw Error(ErrorCode::kIoError, "SHA-256 failed");
  }
  return out;
}

struct QueryMessage {
  SchemeParams params;
  Digest v_fingerprint{};
  Query query;
};

inline Bytes encode_query(const SchemeParams& p, const Digest& vfp, const Query& q) {
  Bytes out;
  for (std::uint64_t x : {std::uint64_t{p.n}, std::uint64_t{p.k}, std::uint64_t{p.t}, std::uint64_t{p.m},
                          p.field.modulus(), std::uint64_t{p.s}}) {
    put_u64(out, x);
  }
  out.insert(out.end(), vfp.begin(), vfp.end());
  put_u64(out, q.server);
  put_u64(out, q.sub_queries.size());
  for (const auto& sub : q.sub_queries)
    for (const auto& e : sub) put_u64(out, e.value());
  return out;
}

/// Rebuilds the parameters from the params block; the field-size check is
/// left to the encoding matrix, which the peer validated on its side.
inline QueryMessage decode_query(std::span<const std::uint8_t> payload) {
  Reader r(payload);
  std::array<std::uint64_t, 6> block{};
  for (auto& x : block) x = r.u64();
  QueryMessage msg;
  try {
    msg.params = derive_params(block[0], block[1], block[2], block[3], block[4], block[5], FieldCheck::kExplicitMatrix);
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedFrame, std::string("bad params block: ") + e.what());
  }
  const auto fp = r.bytes(32);
  std::copy(fp.begin(), fp.end(), msg.v_fingerprint.begin());
  msg.query.server = r.u64();
  msg.query.params_fingerprint = params_fingerprint(msg.params);
  const std::uint64_t alpha = r.u64();
  if (alpha != msg.params.alpha) throw Error(ErrorCode::kMalformedFrame, "sub-query count != alpha");
  const std::size_t len = msg.params.vector_length();
  if (r.remaining() != alpha * len * 8) throw Error(ErrorCode::kMalformedFrame, "sub-query length mismatch");
  const PrimeField& f = msg.params.field;
  msg.query.sub_queries.resize(alpha);
  for (auto& sub : msg.query.sub_queries) {
    sub.reserve(len);
    for (std::size_t e = 0; e < len; ++e) {
      const std::uint64_t v = r.u64();
      if (v >= f.modulus()) throw Error(ErrorCode::kMalformedFrame, "symbol not below q");
      sub.push_back(f.element(v));
    }
  }
  return msg;
}

struct FetchMessage {
  std::uint64_t session = 0;
  std::vector<std::size_t> columns;
};

inline Bytes encode_fetch(const FetchMessage& m) {
  Bytes out;
  put_u64(out, m.session);
  put_u64(out, m.columns.size());
  for (auto c : m.columns) put_u64(out, c);
  return out;
}

inline FetchMessage decode_fetch(std::span<const std::uint8_t> payload) {
  Reader r(payload);
  FetchMessage m;
  m.session = r.u64();
  const std::uint64_t count = r.u64();
  if (count > r.remaining() / 8 || r.remaining() != count * 8) throw Error(ErrorCode::kMalformedFrame, "column list length mismatch");
  for (std::uint64_t i = 0; i < count; ++i) m.columns.push_back(r.u64());
  return m;
}

/// A response with zero columns acknowledges a query and names its session.
struct ResponseMessage {
  std::uint64_t session = 0;
  std::vector<SymbolVector> columns;  // s symbols each
};

inline Bytes encode_response(const ResponseMessage& m) {
  Bytes out;
  put_u64(out, m.session);
  put_u64(out, m.columns.size());
  for (const auto& col : m.columns)
    for (const auto& e : col) put_u64(out, e.value());
  return out;
}

inline ResponseMessage decode_response(std::span<const std::uint8_t> payload, const PrimeField& field,
                                       std::size_t s) {
  Reader r(payload);
  ResponseMessage m;
  m.session = r.u64();
  const std::uint64_t count = r.u64();
  if (s == 0 || count > r.remaining() / (s * 8) || r.remaining() != count * s * 8) throw Error(ErrorCode::kMalformedFrame, "response length mismatch");
  m.columns.resize(count);
  for (auto& col : m.columns) {
    col.reserve(s);
    for (std::size_t j = 0; j < s; ++j) {
      const std::uint64_t v = r.u64();
      if (v >= field.modulus()) throw Error(ErrorCode::kMalformedFrame, "symbol not below q");
      col.push_back(field.element(v));
    }
  }
  return m;
}

struct ErrorMessage {
  ErrorCode code = ErrorCode::kInvalidArgument;
  std::string message;
};

inline Bytes encode_error(const ErrorMessage& m) {
  Bytes out;
  put_u64(out, static_cast<std::uint64_t>(m.code));
  out.insert(out.end(), m.message.begin(), m.message.end());
  return out;
}

inline ErrorMessage decode_error(std::span<const std::uint8_t> payload) {
  Reader r(payload);
  ErrorMessage m;
  m.code = static_cast<ErrorCode>(r.u64());
  const auto rest = r.bytes(r.remaining());
  m.message.assign(rest.begin(), rest.end());
  return m;
}

}  // namespace spir::wire

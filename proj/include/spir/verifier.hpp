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
 * @file verifier.hpp
 * @brief Executable checks of privacy, robustness and rate on concrete
 *        instances.
 *
 * Privacy is checked two ways. The exhaustive check enumerates every
 * randomness assignment and compares, for each t-subset of servers, the
 * exact multiset of query tuples those servers see under each file index.
 * The rank check is a sufficient linear-algebra condition that scales: if
 * the coefficients of the t * alpha random vectors in the t * alpha
 * sub-queries of a t-subset form an invertible matrix, those sub-queries
 * are uniform and independent of the file index.
 */

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "spir/error.hpp"
#include "spir/matrix.hpp"
#include "spir/params.hpp"
#include "spir/pir.hpp"
#include "spir/rational.hpp"
#include "spir/rng.hpp"
#include "spir/staircase.hpp"

namespace spir {

enum class PrivacyMode { kExhaustive, kRank };

inline const char* mode_name(PrivacyMode m) { return m == PrivacyMode::kExhaustive ? "exhaustive" : "rank"; }

/// Deliberate weakening of the scheme, for mutation tests of the checks.
struct Mutation {
  /// Random vectors (0-based) forced to zero.
  std::set<std::size_t> zeroed_randomness;
};

using QueryHistogram = std::map<std::vector<std::uint64_t>, std::uint64_t>;

struct SubsetVerdict {
  std::vector<std::size_t> subset;  // 0-based server ids
  bool verdict = false;
  std::string detail;
  /// Exhaustive mode only: one histogram per file index.
  std::vector<QueryHistogram> histograms;
};

struct PrivacyReport {
  SchemeParams params;
  PrivacyMode mode = PrivacyMode::kRank;
  std::vector<SubsetVerdict> subsets;
  std::uint64_t assignments = 0;  // exhaustive mode: randomness assignments enumerated

  bool verdict() const {
    for (const auto& s : subsets)
      if (!s.verdict) return false;
    return true;
  }
};

struct RobustnessEntry {
  std::vector<std::size_t> subset;
  std::size_t attempts = 0;
  std::size_t failures = 0;
  bool verdict() const { return failures == 0; }
};

struct RobustnessReport {
  SchemeParams params;
  std::size_t trials = 0;
  std::vector<RobustnessEntry> subsets;

  bool verdict() const {
    for (const auto& s : subsets)
      if (!s.verdict()) return false;
    return true;
  }
  std::size_t total_attempts() const {
    std::size_t n = 0;
    for (const auto& s : subsets) n += s.attempts;
    return n;
  }
};

struct RateRow {
  std::size_t mu = 0;
  std::size_t symbols = 0;
  Rational rate;
  Rational capacity;
  bool match() const { return rate == capacity; }
};

inline std::string format_subset(const std::vector<std::size_t>& subset, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(subset[i] + 1);
  }
  return out;
}

namespace detail {

inline void require_valid(const SchemeParams& p, const FieldMatrix& v) {
  if (v.rows() != p.n || v.cols() != p.n || v.field() != p.field || !validate_encoding_matrix(v, p)) {
    throw Error(ErrorCode::kBadEncodingMatrix, "encoding matrix fails the leading-columns property");
  }
}

}  // namespace detail

inline constexpr std::uint64_t kExhaustiveLimit = 10'000'000;

/// Brute-force privacy over every randomness assignment. The search space is
/// q^(t * alpha * alpha' * m * s) and must not exceed `limit`.
inline PrivacyReport verify_privacy_exhaustive(const SchemeParams& p, const FieldMatrix& v,
                                               RowOrder order = kDefaultRowOrder, const Mutation& mutation = {},
                                               std::uint64_t limit = kExhaustiveLimit) {
  detail::require_valid(p, v);
  const std::size_t len = p.vector_length();
  const std::size_t digits = p.randomness_count() * len;
  const std::uint64_t q = p.field.modulus();
  std::uint64_t space = 1;
  for (std::size_t d = 0; d < digits; ++d) {
    if (space > limit / q) {
      throw Error(ErrorCode::kSearchSpaceTooLarge, "q^" + std::to_string(digits) + " assignments exceed the cap");
    }
    space *= q;
  }

  PrivacyReport report{p, PrivacyMode::kExhaustive, {}, space};
  std::vector<std::vector<std::size_t>> subsets;
  for_each_subset(p.n, p.t, [&](const std::vector<std::size_t>& s) { subsets.push_back(s); });
  std::vector<std::vector<QueryHistogram>> hist(subsets.size(), std::vector<QueryHistogram>(p.m));

  const StaircaseLayout layout(p, order);
  std::vector<std::uint64_t> code(digits, 0);
  for (std::uint64_t a = 0; a < space; ++a) {
    std::vector<SymbolVector> rnd(p.randomness_count());
    for (std::size_t u = 0; u < p.randomness_count(); ++u) {
      rnd[u].reserve(len);
      const bool zeroed = mutation.zeroed_randomness.count(u) > 0;
      for (std::size_t e = 0; e < len; ++e) rnd[u].push_back(p.field.element(zeroed ? 0 : code[u * len + e]));
    }
    for (std::size_t i = 1; i <= p.m; ++i) {
      std::vector<SymbolVector> payload;
      for (std::size_t c = 0; c < p.alpha_prime; ++c) payload.push_back(unit_vector(p, c, i));
      const ShareSet shares = detail::encode_unchecked(v, realize_grid(layout, payload, rnd));
      for (std::size_t si = 0; si < subsets.size(); ++si) {
        std::vector<std::uint64_t> key;
        key.reserve(p.t * p.alpha * len);
        for (std::size_t l : subsets[si])
          for (const auto& sub : shares.rows[l])
            for (const auto& e : sub) key.push_back(e.value());
        ++hist[si][i - 1][key];
      }
    }
    for (std::size_t d = 0; d < digits; ++d) {
      if (++code[d] < q) break;
      code[d] = 0;
    }
  }

  for (std::size_t si = 0; si < subsets.size(); ++si) {
    SubsetVerdict sv;
    sv.subset = subsets[si];
    sv.verdict = true;
    for (std::size_t i = 1; i < p.m; ++i) {
      if (hist[si][i] != hist[si][0]) sv.verdict = false;
    }
    sv.detail = std::to_string(hist[si][0].size()) + " distinct query tuples";
    sv.histograms = std::move(hist[si]);
    report.subsets.push_back(std::move(sv));
  }
  return report;
}

/// Coefficients of the random vectors in every sub-query of `subset`:
/// a (|subset| * alpha) x (t * alpha) matrix.
/// `sym` is the output of symbolic_queries().
inline FieldMatrix randomness_coefficients(const SchemeParams& p, const FieldMatrix& sym,
                                           const std::vector<std::size_t>& subset, const Mutation& mutation = {}) {
  FieldMatrix out(p.field, subset.size() * p.alpha, p.randomness_count());
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t c = 0; c < p.alpha; ++c)
      for (std::size_t u = 0; u < p.randomness_count(); ++u) {
        if (mutation.zeroed_randomness.count(u)) continue;
        out.at(a * p.alpha + c, u) = sym.at(subset[a] * p.alpha + c, p.alpha_prime + u);
      }
  return out;
}

/// Rank criterion; a failed subset is inconclusive rather than insecure.
inline PrivacyReport verify_privacy_rank(const SchemeParams& p, const FieldMatrix& v,
                                         RowOrder order = kDefaultRowOrder, const Mutation& mutation = {}) {
  detail::require_valid(p, v);
  const FieldMatrix sym = symbolic_queries(StaircaseLayout(p, order), v);
  PrivacyReport report{p, PrivacyMode::kRank, {}, 0};
  for_each_subset(p.n, p.t, [&](const std::vector<std::size_t>& subset) {
    const std::size_t rank = matrix_rank(randomness_coefficients(p, sym, subset, mutation));
    SubsetVerdict sv;
    sv.subset = subset;
    sv.verdict = rank == p.randomness_count();
    sv.detail = "rank " + std::to_string(rank) + "/" + std::to_string(p.randomness_count());
    if (!sv.verdict) sv.detail += "; sufficient condition not met, run the exhaustive check";
    report.subsets.push_back(std::move(sv));
  });
  return report;
}

/// Every subset of at least k servers, every file, `trials` random databases
/// and query seeds: the decoded file must equal the stored one.
inline RobustnessReport verify_robustness(const SchemeParams& p, const FieldMatrix& v, std::size_t trials,
                                          std::uint64_t seed = 1, RowOrder order = kDefaultRowOrder) {
  if (trials < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one trial");
  detail::require_valid(p, v);
  RobustnessReport report{p, trials, {}};
  std::vector<std::vector<std::size_t>> subsets;
  for (std::size_t mu = p.k; mu <= p.n; ++mu)
    for_each_subset(p.n, mu, [&](const std::vector<std::size_t>& s) { subsets.push_back(s); });
  report.subsets.resize(subsets.size());
  for (std::size_t si = 0; si < subsets.size(); ++si) report.subsets[si].subset = subsets[si];

  SeededRng rng(seed);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const Database db = Database::random(p.field, p.m, p.alpha_prime, p.s, rng);
    for (std::size_t i = 1; i <= p.m; ++i) {
      const auto queries = make_queries(p, v, i, rng.next_u64(), order);
      std::vector<std::vector<SymbolVector>> full;
      for (const auto& q : queries) full.push_back(server_respond(db, q, leading_columns(p.alpha)));
      const SymbolVector stored = db.file(i);
      for (std::size_t si = 0; si < subsets.size(); ++si) {
        auto& entry = report.subsets[si];
        ++entry.attempts;
        try {
          const auto plan = plan_download(p, subsets[si]);
          std::map<std::size_t, std::vector<SymbolVector>> resp;
          for (auto l : plan.responders) resp[l] = full[l];
          if (decode_file(p, v, plan, resp, order) != stored) ++entry.failures;
        } catch (const Error&) {
          ++entry.failures;
        }
      }
    }
  }
  return report;
}

/// Downloaded symbols, rate and capacity for every mu in [k, n].
inline std::vector<RateRow> verify_rates(const SchemeParams& p) {
  std::vector<RateRow> rows;
  for (std::size_t mu = p.n + 1; mu-- > p.k;) {
    std::vector<std::size_t> servers(mu);
    for (std::size_t i = 0; i < mu; ++i) servers[i] = i;
    const auto plan = plan_download(p, servers);
    rows.push_back({mu, plan.total_symbols, rate_achieved(plan, p.file_symbols()), capacity_asymptotic(p.t, mu)});
  }
  return rows;
}

inline std::string to_text(const PrivacyReport& r) {
  std::ostringstream os;
  os << "privacy " << mode_name(r.mode) << ' ' << r.params << '\n';
  if (r.mode == PrivacyMode::kExhaustive) os << "assignments " << r.assignments << '\n';
  for (const auto& s : r.subsets) {
    os << "subset {" << format_subset(s.subset) << "} " << (s.verdict ? "PASS" : "FAIL") << ' ' << s.detail << '\n';
  }
  os << "verdict " << (r.verdict() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

inline std::string to_csv(const PrivacyReport& r) {
  std::ostringstream os;
  os << "subset,mode,verdict\n";
  for (const auto& s : r.subsets) {
    os << format_subset(s.subset, ';') << ',' << mode_name(r.mode) << ',' << (s.verdict ? "pass" : "fail") << '\n';
  }
  return os.str();
}

inline std::string to_text(const RobustnessReport& r) {
  std::ostringstream os;
  os << "robustness " << r.params << " trials=" << r.trials << '\n';
  for (const auto& s : r.subsets) {
    os << "subset {" << format_subset(s.subset) << "} " << (s.verdict() ? "PASS" : "FAIL") << ' '
       << (s.attempts - s.failures) << '/' << s.attempts << " decoded\n";
  }
  os << "verdict " << (r.verdict() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

inline std::string to_csv(const RobustnessReport& r) {
  std::ostringstream os;
  os << "subset,mode,verdict\n";
  for (const auto& s : r.subsets) {
    os << format_subset(s.subset, ';') << ",robustness," << (s.verdict() ? "pass" : "fail") << '\n';
  }
  return os.str();
}

inline std::string to_text(const std::vector<RateRow>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    os << "mu=" << r.mu << " symbols=" << r.symbols << " rate=" << to_string(r.rate)
       << " capacity=" << to_string(r.capacity) << ' ' << (r.match() ? "match" : "MISMATCH") << '\n';
  }
  return os.str();
}

inline std::string to_csv(const std::vector<RateRow>& rows) {
  std::ostringstream os;
  os << "mu,symbols,rate,capacity,match\n";
  for (const auto& r : rows) {
    os << r.mu << ',' << r.symbols << ',' << to_string(r.rate) << ',' << to_string(r.capacity) << ','
       << (r.match() ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace spir

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
 * @file sim.hpp
 * @brief Discrete-event straggler simulation of one-shot retrievals.
 *
 * Each repetition samples when every server's whole response becomes
 * available, lets the client strategy pick the responder set, then runs the
 * real encode, prefix download and decode on those responders. The clock is
 * integer microseconds and ties break by server id, so a seed fixes every
 * outcome.
 */

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "spir/error.hpp"
#include "spir/matrix.hpp"
#include "spir/params.hpp"
#include "spir/pir.hpp"
#include "spir/rational.hpp"
#include "spir/rng.hpp"
#include "spir/staircase.hpp"

namespace spir {

/// Time until a server's full response is available, in milliseconds.
class LatencyModel {
 public:
  enum class Kind { kDeterministic, kExponential, kUnresponsive };

  static LatencyModel deterministic(double ms) {
    if (!(ms > 0)) throw Error(ErrorCode::kInvalidArgument, "latency must be positive");
    return LatencyModel(Kind::kDeterministic, ms, 0, nullptr);
  }
  static LatencyModel exponential(double mean_ms) {
    if (!(mean_ms > 0)) throw Error(ErrorCode::kInvalidArgument, "mean latency must be positive");
    return LatencyModel(Kind::kExponential, mean_ms, 0, nullptr);
  }
  /// Never responds with probability p, otherwise behaves like `fallback`.
  static LatencyModel unresponsive(double p, const LatencyModel& fallback) {
    if (!(p >= 0 && p <= 1)) throw Error(ErrorCode::kInvalidArgument, "probability outside [0, 1]");
    return LatencyModel(Kind::kUnresponsive, 0, p, std::make_shared<LatencyModel>(fallback));
  }

  Kind kind() const noexcept { return kind_; }

  /// Microseconds until the response is available; nullopt means never.
  std::optional<std::int64_t> sample_us(SeededRng& rng) const {
    switch (kind_) {
      case Kind::kDeterministic:
        return std::llround(value_ * 1000.0);
      case Kind::kExponential:
        return std::llround(std::exponential_distribution<double>(1.0 / value_)(rng.engine()) * 1000.0);
      case Kind::kUnresponsive:
        if (rng.unit() < p_) return std::nullopt;
        return fallback_->sample_us(rng);
    }
    return std::nullopt;
  }

 private:
  LatencyModel(Kind kind, double value, double p, std::shared_ptr<const LatencyModel> fallback)
      : kind_(kind), value_(value), p_(p), fallback_(std::move(fallback)) {}

  Kind kind_;
  double value_;
  double p_;
  std::shared_ptr<const LatencyModel> fallback_;
};

/**
 * How long the client waits. wait_for(mu) fixes the responder count up front;
 * deadline(T) takes whoever answered within T ms and adapts the download to
 * that count. The deadline strategy is an extension beyond a fixed mu.
 */
struct Strategy {
  enum class Kind { kWaitFor, kDeadline };
  Kind kind = Kind::kWaitFor;
  std::size_t mu = 0;
  double deadline_ms = 0;

  static Strategy wait_for(std::size_t mu) { return {Kind::kWaitFor, mu, 0}; }
  static Strategy deadline(double ms) {
    if (!(ms > 0)) throw Error(ErrorCode::kInvalidArgument, "deadline must be positive");
    return {Kind::kDeadline, 0, ms};
  }
};

struct SimConfig {
  std::string id;
  SchemeParams params;
  std::vector<LatencyModel> latencies;  // one per server, or a single model shared by all
  Strategy strategy;
  std::uint64_t seed = 1;
  std::size_t repetitions = 1;
  std::optional<FieldMatrix> encoding;  // defaults to the Vandermonde on 1..n
  RowOrder order = kDefaultRowOrder;
};

struct SimMetrics {
  bool success = false;
  std::size_t realized_mu = 0;
  double wait_ms = 0;
  std::size_t symbols = 0;
  Rational rate;      // zero on failure
  Rational capacity;  // 1 - t / realized mu, zero when realized mu < k
  std::vector<std::size_t> responders;
  std::string failure;
};

namespace detail {

struct Arrival {
  std::int64_t time_us;
  std::size_t server;
  bool operator>(const Arrival& o) const {
    return time_us != o.time_us ? time_us > o.time_us : server > o.server;
  }
};

}  // namespace detail

/// One simulated retrieval per repetition, with the real code path.
inline std::vector<SimMetrics> run_simulation(const SimConfig& cfg) {
  const SchemeParams& p = cfg.params;
  if (cfg.latencies.size() != 1 && cfg.latencies.size() != p.n) {
    throw Error(ErrorCode::kDimensionMismatch, "need one latency model or one per server");
  }
  if (cfg.strategy.kind == Strategy::Kind::kWaitFor && (cfg.strategy.mu < p.k || cfg.strategy.mu > p.n)) {
    throw Error(ErrorCode::kInvalidArgument, "wait_for mu must lie in [k, n]");
  }
  const FieldMatrix v = cfg.encoding ? *cfg.encoding : default_vandermonde(p.field, p.n);
  if (!validate_encoding_matrix(v, p)) throw Error(ErrorCode::kBadEncodingMatrix, "encoding matrix rejected");

  SeededRng rng(cfg.seed);
  std::vector<SimMetrics> out;
  out.reserve(cfg.repetitions);
  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    const Database db = Database::random(p.field, p.m, p.alpha_prime, p.s, rng);
    const std::size_t file = 1 + rng.below(p.m);
    const std::uint64_t query_seed = rng.next_u64();

    std::priority_queue<detail::Arrival, std::vector<detail::Arrival>, std::greater<>> events;
    for (std::size_t l = 0; l < p.n; ++l) {
      const auto& model = cfg.latencies.size() == 1 ? cfg.latencies[0] : cfg.latencies[l];
      if (auto t = model.sample_us(rng)) events.push({*t, l});
    }

    SimMetrics m;
    std::int64_t clock = 0;
    if (cfg.strategy.kind == Strategy::Kind::kWaitFor) {
      // If servers never answer, re-plan with everyone who did (still >= k).
      while (!events.empty() && m.responders.size() < cfg.strategy.mu) {
        clock = events.top().time_us;
        m.responders.push_back(events.top().server);
        events.pop();
      }
    } else {
      const std::int64_t limit = std::llround(cfg.strategy.deadline_ms * 1000.0);
      while (!events.empty() && events.top().time_us <= limit) {
        clock = events.top().time_us;
        m.responders.push_back(events.top().server);
        events.pop();
      }
      // Once everyone has answered there is no reason to sit out the deadline.
      if (m.responders.size() < p.n) clock = limit;
    }
    m.realized_mu = m.responders.size();
    m.wait_ms = static_cast<double>(clock) / 1000.0;

    try {
      const DownloadPlan plan = plan_download(p, m.responders);
      const auto queries = make_queries(p, v, file, query_seed, cfg.order);
      std::map<std::size_t, std::vector<SymbolVector>> responses;
      const auto cols = leading_columns(plan.prefix);
      for (std::size_t l : plan.responders) responses[l] = server_respond(db, queries[l], cols);
      m.symbols = plan.total_symbols;
      m.capacity = capacity_asymptotic(p.t, m.realized_mu);
      if (decode_file(p, v, plan, responses, cfg.order) == db.file(file)) {
        m.success = true;
        m.rate = rate_achieved(plan, p.file_symbols());
      } else {
        m.failure = "decoded file differs";
      }
    } catch (const Error& e) {
      m.failure = e.what();
    }
    out.push_back(std::move(m));
  }
  return out;
}

/// Per-config averages; the rate is the exact mean over successful runs.
struct SimSummary {
  std::string config_id;
  std::optional<std::size_t> mu_target;
  double mean_realized_mu = 0;
  double mean_wait_ms = 0;
  double mean_symbols = 0;
  Rational mean_rate;
  double success_fraction = 0;
  std::size_t repetitions = 0;
};

inline SimSummary summarize(const SimConfig& cfg, const std::vector<SimMetrics>& runs) {
  SimSummary s;
  s.config_id = cfg.id;
  if (cfg.strategy.kind == Strategy::Kind::kWaitFor) s.mu_target = cfg.strategy.mu;
  s.repetitions = runs.size();
  if (runs.empty()) return s;
  std::size_t ok = 0;
  Rational rate_sum = 0;
  for (const auto& r : runs) {
    s.mean_realized_mu += static_cast<double>(r.realized_mu);
    s.mean_wait_ms += r.wait_ms;
    s.mean_symbols += static_cast<double>(r.symbols);
    if (r.success) {
      ++ok;
      rate_sum += r.rate;
    }
  }
  const double n = static_cast<double>(runs.size());
  s.mean_realized_mu /= n;
  s.mean_wait_ms /= n;
  s.mean_symbols /= n;
  s.success_fraction = static_cast<double>(ok) / n;
  if (ok) s.mean_rate = rate_sum / static_cast<std::int64_t>(ok);
  return s;
}

inline constexpr const char* kSimCsvHeader = "config_id,mu_target,realized_mu,wait_ms,symbols,rate_num,rate_den,success";

inline std::string csv_row(const SimSummary& s) {
  std::ostringstream os;
  os << s.config_id << ',' << (s.mu_target ? std::to_string(*s.mu_target) : std::string()) << ','
     << s.mean_realized_mu << ',' << s.mean_wait_ms << ',' << s.mean_symbols << ','
     << boost::multiprecision::numerator(s.mean_rate) << ',' << boost::multiprecision::denominator(s.mean_rate)
     << ',' << s.success_fraction;
  return os.str();
}

/// Per-repetition row in the same schema; success is 0 or 1.
inline std::string csv_row(const SimConfig& cfg, const SimMetrics& m) {
  std::ostringstream os;
  os << cfg.id << ','
     << (cfg.strategy.kind == Strategy::Kind::kWaitFor ? std::to_string(cfg.strategy.mu) : std::string()) << ','
     << m.realized_mu << ',' << m.wait_ms << ',' << m.symbols << ',' << boost::multiprecision::numerator(m.rate)
     << ',' << boost::multiprecision::denominator(m.rate) << ',' << (m.success ? 1 : 0);
  return os.str();
}

/// Runs every config and returns the header plus one summary row each.
inline std::vector<std::string> sweep(const std::vector<SimConfig>& configs) {
  std::vector<std::string> rows{kSimCsvHeader};
  for (const auto& cfg : configs) rows.push_back(csv_row(summarize(cfg, run_simulation(cfg))));
  return rows;
}

}  // namespace spir

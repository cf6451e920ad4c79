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

// Command-line front end: parameters, worked examples, verification,
// capacity tables, straggler simulation and the socket server/client.
//
// Exit codes: 0 success, 1 failed verification or retrieval, 2 usage error.

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spir/ingest.hpp"
#include "spir/net.hpp"
#include "spir/params.hpp"
#include "spir/pir.hpp"
#include "spir/rational.hpp"
#include "spir/sim.hpp"
#include "spir/staircase.hpp"
#include "spir/verifier.hpp"

namespace {

using namespace spir;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::size_t n = 4, k = 2, t = 1, m = 2;
  std::uint64_t q = 257;
  std::size_t batch = 1;
  std::uint64_t seed = 1;
  std::string format = "text";
  std::string out;
  std::string data_dir;
  std::string manifest;
  std::string endpoints;
  std::string strategy = "wait_for";
  std::size_t mu = 0;
  double deadline_ms = 50;

  // subcommand specific
  int example = 2;
  std::size_t file = 1;
  bool all = false, privacy = false, robustness = false, rates = false;
  std::string privacy_mode = "auto";
  std::size_t trials = 5;
  std::string latency = "exp:10";
  std::size_t reps = 100;
  bool per_run = false;
  std::string only;
  double duration_ms = 0;
  double timeout_ms = 5000;
  std::size_t serve_batch = 0;
  std::vector<std::size_t> zero_randomness;
};

/// Raised for bad flag values that CLI11 cannot catch on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_usage_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kNotPrime:
    case ErrorCode::kInvalidThreshold:
    case ErrorCode::kInvalidK:
    case ErrorCode::kFieldTooSmall:
    case ErrorCode::kFileIndexOutOfRange:
      return true;
    default:
      return false;
  }
}

/// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorCode::kIoError, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void check_format(const Options& o, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (o.format == f) return;
  throw UsageError("--format " + o.format + " is not supported here");
}

std::string list(const std::vector<std::size_t>& v, bool one_based = false) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i] + (one_based ? 1 : 0));
  return s;
}

json params_json(const SchemeParams& p) {
  return {{"n", p.n},         {"k", p.k},         {"t", p.t},
          {"m", p.m},         {"q", p.field.modulus()}, {"s", p.s},
          {"mu", p.mu},       {"alpha_levels", p.alpha_level}, {"alpha", p.alpha},
          {"alpha_prime", p.alpha_prime}, {"block_columns", p.block_columns}};
}

// ---------------------------------------------------------------- params

int cmd_params(const Options& o) {
  check_format(o, {"text", "json-lines"});
  const auto p = derive_params(o.n, o.k, o.t, o.m, o.q, o.batch);
  Output out(o.out);
  auto& os = out.stream();
  if (o.format == "json-lines") {
    os << params_json(p).dump() << '\n';
    return kExitOk;
  }
  os << p << '\n';
  os << "alpha_j=(" << list(p.alpha_level) << ") sub-query length=" << p.vector_length()
     << " randomness vectors=" << p.randomness_count() << '\n';
  for (const auto& row : verify_rates(p)) {
    os << "mu=" << row.mu << " prefix=" << p.prefix_length(row.mu) << " download=" << row.symbols
       << " rate=" << to_string(row.rate) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- demo

std::string label(const SchemeParams& p, std::size_t sym) {
  return sym < p.alpha_prime ? "e'" + std::to_string(sym + 1) : "r" + std::to_string(sym - p.alpha_prime + 1);
}

std::string label(const Cell& c) {
  switch (c.kind) {
    case Cell::Kind::kZero: return "0";
    case Cell::Kind::kPayload: return "e'" + std::to_string(c.index + 1);
    case Cell::Kind::kRandom: return "r" + std::to_string(c.index + 1);
  }
  return "?";
}

std::string expression(const SchemeParams& p, const FieldMatrix& sym, std::size_t row) {
  std::string s;
  for (std::size_t c = 0; c < sym.cols(); ++c) {
    const std::uint64_t coef = sym.at(row, c).value();
    if (coef == 0) continue;
    if (!s.empty()) s += " + ";
    if (coef != 1) s += std::to_string(coef);
    s += label(p, c);
  }
  return s.empty() ? "0" : s;
}

void print_table(std::ostream& os, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], r[c].size());
    }
  for (const auto& r : rows) {
    os << "  ";
    for (std::size_t c = 0; c < r.size(); ++c) os << std::left << std::setw(static_cast<int>(width[c] + 2)) << r[c];
    os << '\n';
  }
}

int cmd_demo(const Options& o) {
  check_format(o, {"text"});
  if (o.example != 1 && o.example != 2) throw UsageError("--example must be 1 or 2");
  const bool first = o.example == 1;
  const std::size_t n = first ? 3 : 4;
  const auto p = derive_params(n, 2, 1, o.m, 5, 1);
  const FieldMatrix v = first ? FieldMatrix::from_rows(p.field, {{1, 0, 0}, {1, 1, 0}, {1, 2, 1}})
                              : default_vandermonde(p.field, n);
  // The three-server matrix puts a unit row on server 1, so randomness goes on top there.
  const RowOrder order = first ? RowOrder::kRandomnessFirst : RowOrder::kPayloadFirst;
  if (o.mu != 0 && (o.mu < p.k || o.mu > p.n)) throw UsageError("--mu must lie in [2, " + std::to_string(n) + "]");
  if (o.file < 1 || o.file > p.m) throw UsageError("--file must lie in [1, m]");

  Output out(o.out);
  auto& os = out.stream();
  const StaircaseLayout layout(p, order);
  os << "Example " << o.example << ": " << p << '\n';
  os << "e'c selects part c of the desired file; r1..r" << p.randomness_count() << " are uniform over GF(5)\n\n";

  os << "V =\n";
  for (std::size_t r = 0; r < n; ++r) {
    os << "  ";
    for (std::size_t c = 0; c < n; ++c) os << v.at(r, c).value() << (c + 1 < n ? " " : "\n");
  }

  os << "\nM =\n";
  std::vector<std::vector<std::string>> grid;
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<std::string> row;
    for (std::size_t c = 0; c < p.alpha; ++c) {
      if (c && layout.block_of(c) != layout.block_of(c - 1)) row.push_back("|");
      row.push_back(label(layout.cell(r, c)));
    }
    grid.push_back(row);
  }
  print_table(os, grid);

  const FieldMatrix sym = symbolic_queries(layout, v);
  os << "\nResponses (Q^T x), one column per server:\n";
  std::vector<std::vector<std::string>> resp{{}};
  for (std::size_t l = 0; l < n; ++l) resp[0].push_back("server " + std::to_string(l + 1));
  for (std::size_t c = 0; c < p.alpha; ++c) {
    std::vector<std::string> row;
    for (std::size_t l = 0; l < n; ++l) row.push_back("(" + expression(p, sym, l * p.alpha + c) + ")^T x");
    resp.push_back(row);
  }
  print_table(os, resp);

  SeededRng rng(o.seed);
  const Database db = Database::random(p.field, p.m, p.alpha_prime, p.s, rng);
  const auto queries = make_queries(p, v, o.file, rng.next_u64(), order);
  bool ok = true;
  for (std::size_t mu = n; mu >= p.k; --mu) {
    if (o.mu != 0 && mu != o.mu) continue;
    std::vector<std::size_t> responders(mu);
    for (std::size_t l = 0; l < mu; ++l) responders[l] = l;
    const auto plan = plan_download(p, responders);
    os << "\nWaiting for mu=" << mu << " servers {" << list(responders, true) << "}: download the first "
       << plan.prefix << " of " << p.alpha << " responses from each\n";
    std::map<std::size_t, std::vector<SymbolVector>> got;
    for (std::size_t l : responders) {
      got[l] = server_respond(db, queries[l], leading_columns(plan.prefix));
      os << "  server " << l + 1 << ":";
      for (std::size_t c = 0; c < plan.prefix; ++c) {
        os << (c ? "," : "") << " (" << expression(p, sym, l * p.alpha + c) << ")^T x = " << got[l][c][0].value();
      }
      os << '\n';
    }
    const SymbolVector decoded = decode_file(p, v, plan, got, order);
    const bool match = decoded == db.file(o.file);
    ok = ok && match;
    const auto values = to_values(decoded);
    os << "  decoded f" << o.file << " = [" << list(std::vector<std::size_t>(values.begin(), values.end())) << "] " << (match ? "matches" : "DOES NOT MATCH") << " the stored file\n";
    os << "  " << p.alpha_prime << " file symbols from " << plan.total_symbols << " downloaded symbols\n";
    os << "rate " << to_string(rate_achieved(plan, p.file_symbols())) << '\n';
    if (mu == p.k) break;
  }
  return ok ? kExitOk : kExitFailed;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const Options& o) {
  check_format(o, {"text", "csv", "json-lines"});
  const auto p = derive_params(o.n, o.k, o.t, o.m, o.q, o.batch);
  const FieldMatrix v = default_vandermonde(p.field, p.n);
  const bool everything = o.all || !(o.privacy || o.robustness || o.rates);
  if (o.privacy_mode != "auto" && o.privacy_mode != "rank" && o.privacy_mode != "exhaustive") {
    throw UsageError("--privacy-mode must be auto, rank or exhaustive");
  }
  Mutation mutation;
  for (std::size_t u : o.zero_randomness) {
    if (u < 1 || u > p.randomness_count()) throw UsageError("--zero-randomness takes ids in [1, t * alpha]");
    mutation.zeroed_randomness.insert(u - 1);
  }
  Output out(o.out);
  auto& os = out.stream();
  bool ok = true;
  bool csv_header = false;

  auto emit_privacy = [&](const PrivacyReport& r) {
    ok = ok && r.verdict();
    if (o.format == "text") {
      os << to_text(r);
    } else if (o.format == "csv") {
      std::string csv = to_csv(r);
      if (csv_header) csv = csv.substr(csv.find('\n') + 1);
      csv_header = true;
      os << csv;
    } else {
      for (const auto& s : r.subsets) {
        os << json{{"check", "privacy"}, {"mode", mode_name(r.mode)}, {"subset", s.subset}, {"verdict", s.verdict},
                   {"detail", s.detail}}.dump()
           << '\n';
      }
    }
  };

  if (everything || o.privacy) {
    if (o.privacy_mode != "exhaustive") emit_privacy(verify_privacy_rank(p, v, kDefaultRowOrder, mutation));
    if (o.privacy_mode != "rank") {
      try {
        emit_privacy(verify_privacy_exhaustive(p, v, kDefaultRowOrder, mutation));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kSearchSpaceTooLarge || o.privacy_mode == "exhaustive") throw;
        if (o.format == "text") os << "privacy exhaustive skipped: " << e.what() << '\n';
      }
    }
  }
  if (everything || o.robustness) {
    const auto r = verify_robustness(p, v, o.trials, o.seed);
    ok = ok && r.verdict();
    if (o.format == "text") {
      os << to_text(r);
    } else if (o.format == "csv") {
      std::string csv = to_csv(r);
      if (csv_header) csv = csv.substr(csv.find('\n') + 1);
      csv_header = true;
      os << csv;
    } else {
      for (const auto& s : r.subsets) {
        os << json{{"check", "robustness"}, {"subset", s.subset}, {"attempts", s.attempts},
                   {"failures", s.failures}, {"verdict", s.verdict()}}.dump()
           << '\n';
      }
    }
  }
  if (everything || o.rates) {
    const auto rows = verify_rates(p);
    for (const auto& r : rows) ok = ok && r.match();
    if (o.format == "text") {
      os << "rates " << p << '\n' << to_text(rows);
    } else if (o.format == "json-lines") {
      for (const auto& r : rows) {
        os << json{{"check", "rate"}, {"mu", r.mu}, {"symbols", r.symbols}, {"rate", to_string(r.rate)},
                   {"capacity", to_string(r.capacity)}, {"match", r.match()}}.dump()
           << '\n';
      }
    } else {
      // Fold rate checks into the subset/mode/verdict schema: the "subset" is mu.
      if (!csv_header) os << "subset,mode,verdict\n";
      csv_header = true;
      for (const auto& r : rows) os << "mu=" << r.mu << ",rate," << (r.match() ? "pass" : "fail") << '\n';
    }
  }
  if (o.format == "text") os << "overall " << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kExitOk : kExitFailed;
}

// ---------------------------------------------------------------- capacity

int cmd_capacity(const Options& o) {
  check_format(o, {"text", "csv", "json-lines"});
  if (o.t < 1 || o.t >= o.k) throw UsageError("need 1 <= t < k");
  if (o.m < 1) throw UsageError("need m >= 1");
  Output out(o.out);
  auto& os = out.stream();
  const Rational asym = capacity_asymptotic(o.t, o.k);
  if (o.format == "csv") os << "m,capacity,unreduced,decimal,ratio_to_asymptotic\n";
  if (o.format == "text") os << "C(" << o.t << "," << o.k << ") = " << to_string(asym) << " = " << to_double(asym) << '\n';
  for (std::size_t m = 1; m <= o.m; ++m) {
    const Rational cm = capacity_finite(m, o.t, o.k);
    // Unreduced form (k - t) k^(m-1) / (k^m - t^m), as the formula reads.
    boost::multiprecision::cpp_int km = 1, tm = 1;
    for (std::size_t i = 0; i < m; ++i) {
      km *= o.k;
      tm *= o.t;
    }
    const auto num = boost::multiprecision::cpp_int(o.k - o.t) * km / o.k;
    const std::string raw = num.str() + "/" + boost::multiprecision::cpp_int(km - tm).str();
    const Rational ratio = asym / cm;
    if (o.format == "text") {
      os << "C_" << m << "(" << o.t << "," << o.k << ") = " << raw << " = " << to_string(cm) << " = "
         << std::setprecision(6) << to_double(cm) << "   C/C_" << m << " = " << to_string(ratio) << " = "
         << to_double(ratio) << '\n';
    } else if (o.format == "csv") {
      os << m << ',' << to_string(cm) << ',' << raw << ',' << to_double(cm) << ',' << to_string(ratio) << '\n';
    } else {
      os << json{{"m", m}, {"t", o.t}, {"k", o.k}, {"capacity", to_string(cm)}, {"unreduced", raw},
                 {"asymptotic", to_string(asym)}, {"ratio", to_string(ratio)}}.dump()
         << '\n';
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

/// exp:MEAN | det:D[,D...] | drop:P:<model>  (milliseconds)
std::vector<LatencyModel> parse_latency(const std::string& text, std::size_t n) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("bad number '" + s + "' in --latency");
    }
  };
  if (text.rfind("drop:", 0) == 0) {
    const auto rest = text.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw UsageError("--latency drop:P:<model>");
    const double prob = number(rest.substr(0, colon));
    std::vector<LatencyModel> out;
    for (const auto& inner : parse_latency(rest.substr(colon + 1), n)) out.push_back(LatencyModel::unresponsive(prob, inner));
    return out;
  }
  if (text.rfind("exp:", 0) == 0) return {LatencyModel::exponential(number(text.substr(4)))};
  if (text.rfind("det:", 0) == 0) {
    std::vector<LatencyModel> out;
    std::stringstream ss(text.substr(4));
    for (std::string item; std::getline(ss, item, ',');) out.push_back(LatencyModel::deterministic(number(item)));
    if (out.size() != 1 && out.size() != n) throw UsageError("det: needs one latency or one per server");
    return out;
  }
  throw UsageError("--latency must be exp:MEAN, det:D[,D...] or drop:P:<model>");
}

int cmd_simulate(const Options& o) {
  check_format(o, {"csv", "json-lines", "text"});
  const auto p = derive_params(o.n, o.k, o.t, o.m, o.q, o.batch);
  const auto lat = parse_latency(o.latency, p.n);
  std::vector<SimConfig> configs;
  auto base = [&](std::string id, Strategy s) {
    SimConfig c;
    c.id = std::move(id);
    c.params = p;
    c.latencies = lat;
    c.strategy = s;
    c.seed = o.seed;
    c.repetitions = o.reps;
    return c;
  };
  if (o.strategy == "wait_for") {
    if (o.mu != 0) {
      if (o.mu < p.k || o.mu > p.n) throw UsageError("--mu must lie in [k, n]");
      configs.push_back(base("wait_for_" + std::to_string(o.mu), Strategy::wait_for(o.mu)));
    } else {
      for (std::size_t mu = p.k; mu <= p.n; ++mu) configs.push_back(base("wait_for_" + std::to_string(mu), Strategy::wait_for(mu)));
    }
  } else if (o.strategy == "deadline") {
    if (!(o.deadline_ms > 0)) throw UsageError("--deadline-ms must be positive");
    std::ostringstream id;
    id << "deadline_" << o.deadline_ms;
    configs.push_back(base(id.str(), Strategy::deadline(o.deadline_ms)));
  } else {
    throw UsageError("--strategy must be wait_for or deadline");
  }

  Output out(o.out);
  auto& os = out.stream();
  if (o.format != "json-lines") os << kSimCsvHeader << '\n';
  for (const auto& cfg : configs) {
    const auto runs = run_simulation(cfg);
    if (o.per_run) {
      for (const auto& r : runs) {
        if (o.format == "json-lines") {
          os << json{{"config_id", cfg.id}, {"realized_mu", r.realized_mu}, {"wait_ms", r.wait_ms},
                     {"symbols", r.symbols}, {"rate", to_string(r.rate)}, {"success", r.success}}.dump()
             << '\n';
        } else {
          os << csv_row(cfg, r) << '\n';
        }
      }
    } else {
      const auto s = summarize(cfg, runs);
      if (o.format == "json-lines") {
        os << json{{"config_id", s.config_id}, {"mean_realized_mu", s.mean_realized_mu},
                   {"mean_wait_ms", s.mean_wait_ms}, {"mean_symbols", s.mean_symbols},
                   {"mean_rate", to_string(s.mean_rate)}, {"success_fraction", s.success_fraction}}.dump()
           << '\n';
      } else {
        os << csv_row(s) << '\n';
      }
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- serve / retrieve

std::vector<net::Endpoint> parse_endpoints(const std::string& text) {
  std::vector<net::Endpoint> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(net::parse_endpoint(item));
  }
  if (out.empty()) throw UsageError("--endpoints needs a comma-separated host:port list");
  return out;
}

volatile std::sig_atomic_t g_stop = 0;

int cmd_serve(const Options& o) {
  if (o.data_dir.empty() || o.manifest.empty()) throw UsageError("serve needs --data-dir and --manifest");
  const auto endpoints = parse_endpoints(o.endpoints);
  auto ing = ingest(read_directory(o.data_dir), endpoints.size(), o.k, o.t, o.q, o.serve_batch);
  ing.manifest.save(o.manifest);
  const auto& p = ing.params;
  const FieldMatrix v = default_vandermonde(p.field, p.n);

  std::vector<std::size_t> which;
  if (o.only.empty()) {
    for (std::size_t l = 0; l < p.n; ++l) which.push_back(l);
  } else {
    std::stringstream ss(o.only);
    for (std::string item; std::getline(ss, item, ',');) {
      const std::size_t id = std::stoul(item);
      if (id < 1 || id > p.n) throw UsageError("--only lists 1-based server ids");
      which.push_back(id - 1);
    }
  }
  std::vector<std::unique_ptr<net::Server>> servers;
  for (std::size_t l : which) {
    servers.push_back(std::make_unique<net::Server>(p, v, ing.database));
    const auto port = servers.back()->start(endpoints[l].host, endpoints[l].port);
    std::cout << "server " << l + 1 << " listening on " << endpoints[l].host << ':' << port << std::endl;
  }
  std::cout << "serving " << p << std::endl;

  std::signal(SIGINT, [](int) { g_stop = 1; });
  std::signal(SIGTERM, [](int) { g_stop = 1; });
  const auto start = std::chrono::steady_clock::now();
  while (!g_stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    if (o.duration_ms > 0 &&
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count() >= o.duration_ms) {
      break;
    }
  }
  for (auto& s : servers) s->stop();
  return kExitOk;
}

int cmd_retrieve(const Options& o) {
  check_format(o, {"text", "json-lines"});
  if (o.manifest.empty()) throw UsageError("retrieve needs --manifest");
  const Manifest mf = Manifest::load(o.manifest);
  const auto p = mf.params();
  const auto endpoints = parse_endpoints(o.endpoints);
  net::RetrieveOptions opt;
  opt.seed = o.seed;
  opt.timeout_ms = o.timeout_ms;
  if (o.strategy == "wait_for") {
    opt.strategy = Strategy::wait_for(o.mu);
  } else if (o.strategy == "deadline") {
    opt.strategy = Strategy::deadline(o.deadline_ms);
  } else {
    throw UsageError("--strategy must be wait_for or deadline");
  }
  if (o.file < 1 || o.file > p.m) throw UsageError("--file must lie in [1, m]");
  const auto res = net::retrieve(endpoints, p, default_vandermonde(p.field, p.n), o.file, opt);
  const ByteVector bytes = restore(mf, o.file, res.file);
  if (!o.out.empty()) write_bytes(o.out, bytes);
  const auto& m = res.metrics;
  if (o.format == "json-lines") {
    std::cout << json{{"file", o.file}, {"name", mf.files[o.file - 1].name}, {"bytes", bytes.size()},
                      {"responders", m.responders}, {"realized_mu", m.realized_mu}, {"wait_ms", m.wait_ms},
                      {"symbols", m.symbols}, {"rate", to_string(m.rate)}}.dump()
              << '\n';
  } else {
    std::vector<std::size_t> shown;
    for (auto l : m.responders) shown.push_back(l + 1);
    std::cout << "retrieved " << mf.files[o.file - 1].name << " (" << bytes.size() << " bytes) from servers {"
              << list(shown) << "} after " << m.wait_ms << " ms\n"
              << "downloaded " << m.symbols << " symbols, rate " << to_string(m.rate) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Staircase-PIR: universally robust private information retrieval"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "spir 1.0.0");

  auto scheme = [&](CLI::App* c) {
    c->add_option("--n", o.n, "servers")->check(CLI::PositiveNumber);
    c->add_option("--k", o.k, "servers that always respond")->check(CLI::PositiveNumber);
    c->add_option("--t", o.t, "collusion threshold")->check(CLI::PositiveNumber);
    c->add_option("--m", o.m, "files")->check(CLI::PositiveNumber);
    c->add_option("--q", o.q, "field size (prime)");
    c->add_option("--batch", o.batch, "field symbols per file part")->check(CLI::PositiveNumber);
  };
  auto common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--format", o.format, "text, csv or json-lines");
    c->add_option("--out", o.out, "output file");
  };

  auto* params = app.add_subcommand("params", "derive and print scheme parameters");
  scheme(params);
  common(params);

  auto* demo = app.add_subcommand("demo", "walk through the 3- or 4-server example");
  demo->add_option("--example", o.example, "1 or 2");
  demo->add_option("--mu", o.mu, "only this responder count");
  demo->add_option("--m", o.m, "files")->check(CLI::PositiveNumber);
  demo->add_option("--file", o.file, "file to retrieve (1-based)");
  common(demo);

  auto* verify = app.add_subcommand("verify", "check privacy, robustness and rates");
  scheme(verify);
  common(verify);
  verify->add_flag("--all", o.all, "run every check (default)");
  verify->add_flag("--privacy", o.privacy, "privacy checks");
  verify->add_flag("--robustness", o.robustness, "decode from every subset of at least k servers");
  verify->add_flag("--rates", o.rates, "downloaded symbols and rate per mu");
  verify->add_option("--privacy-mode", o.privacy_mode, "auto, rank or exhaustive");
  verify->add_option("--trials", o.trials, "robustness trials")->check(CLI::PositiveNumber);
  verify->add_option("--zero-randomness", o.zero_randomness,
                     "mutation control: force these random vectors (1-based) to zero in the privacy checks");

  auto* capacity = app.add_subcommand("capacity", "PIR capacity for 1..m files");
  capacity->add_option("--t", o.t, "collusion threshold");
  capacity->add_option("--k", o.k, "servers");
  capacity->add_option("--m", o.m, "files");
  common(capacity);

  auto* simulate = app.add_subcommand("simulate", "straggler simulation, CSV out");
  scheme(simulate);
  common(simulate);
  simulate->add_option("--strategy", o.strategy, "wait_for or deadline");
  simulate->add_option("--mu", o.mu, "responders to wait for (default: sweep k..n)");
  simulate->add_option("--deadline-ms", o.deadline_ms, "deadline in ms");
  simulate->add_option("--latency", o.latency, "exp:MEAN, det:D[,D...] or drop:P:<model>");
  simulate->add_option("--reps", o.reps, "repetitions per config")->check(CLI::PositiveNumber);
  simulate->add_flag("--per-run", o.per_run, "one row per repetition");

  auto* serve = app.add_subcommand("serve", "ingest a directory and serve it");
  serve->add_option("--k", o.k, "servers that always respond");
  serve->add_option("--t", o.t, "collusion threshold");
  serve->add_option("--q", o.q, "field size (prime)");
  serve->add_option("--batch", o.serve_batch, "symbols per file part (default: fit the longest file)");
  serve->add_option("--data-dir", o.data_dir, "files to serve")->required();
  serve->add_option("--manifest", o.manifest, "where to write the manifest")->required();
  serve->add_option("--endpoints", o.endpoints, "host:port for each of the n servers")->required();
  serve->add_option("--only", o.only, "start only these servers (1-based, comma separated)");
  serve->add_option("--duration-ms", o.duration_ms, "stop after this long (default: until signalled)");

  auto* fetch = app.add_subcommand("retrieve", "privately retrieve one file");
  fetch->add_option("--manifest", o.manifest, "manifest written by serve")->required();
  fetch->add_option("--endpoints", o.endpoints, "host:port for each of the n servers")->required();
  fetch->add_option("--file", o.file, "file to retrieve (1-based)");
  fetch->add_option("--strategy", o.strategy, "wait_for or deadline");
  fetch->add_option("--mu", o.mu, "responders to wait for (default n)");
  fetch->add_option("--deadline-ms", o.deadline_ms, "deadline in ms");
  fetch->add_option("--timeout-ms", o.timeout_ms, "give up after this long");
  common(fetch);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*params) return cmd_params(o);
    if (*demo) return cmd_demo(o);
    if (*verify) return cmd_verify(o);
    if (*capacity) return cmd_capacity(o);
    if (*simulate) return cmd_simulate(o);
    if (*serve) return cmd_serve(o);
    if (*fetch) return cmd_retrieve(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_usage_code(e.code()) ? kExitUsage : kExitFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}

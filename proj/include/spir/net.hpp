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
 * @file net.hpp
 * @brief Loopback-grade TCP server and client for the retrieval protocol.
 *
 * A client sends QUERY to every server. Each server stores the query and
 * answers with an empty RESPONSE naming a session: the "ready" signal. Once
 * the client strategy has picked its responders it sends FETCH for the
 * prefix columns only, and decodes. Transport is plain TCP with no
 * encryption or authentication.
 */

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstring>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "spir/error.hpp"
#include "spir/matrix.hpp"
#include "spir/params.hpp"
#include "spir/pir.hpp"
#include "spir/sim.hpp"
#include "spir/staircase.hpp"
#include "spir/wire.hpp"

namespace spir::net {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

/// "host:port"; a bare port means loopback.
inline Endpoint parse_endpoint(const std::string& text) {
  Endpoint ep;
  std::string port = text;
  if (auto colon = text.rfind(':'); colon != std::string::npos) {
    ep.host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(port, &used);
    if (used != port.size() || v == 0 || v > 65535) throw std::invalid_argument(port);
    ep.port = static_cast<std::uint16_t>(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "bad endpoint '" + text + "'");
  }
  return ep;
}

inline std::string to_string(const Endpoint& ep) { return ep.host + ":" + std::to_string(ep.port); }

namespace detail {

/// Owning file descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      close();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  int fd() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }
  /// Unblocks any thread reading or writing this socket.
  void shutdown() const noexcept {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }
  void close() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

inline void write_all(int fd, const wire::Bytes& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw Error(ErrorCode::kIoError, std::string("send: ") + std::strerror(errno));
    off += static_cast<std::size_t>(n);
  }
}

inline void read_exact(int fd, std::uint8_t* buf, std::size_t len) {
  std::size_t off = 0;
  while (off < len) {
    const ssize_t n = ::recv(fd, buf + off, len - off, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) throw Error(ErrorCode::kTimeout, "receive timed out");
    if (n < 0) throw Error(ErrorCode::kIoError, std::string("recv: ") + std::strerror(errno));
    if (n == 0) throw Error(ErrorCode::kIoError, "connection closed");
    off += static_cast<std::size_t>(n);
  }
}

inline void send_frame(int fd, wire::MessageType type, const wire::Bytes& payload) {
  write_all(fd, wire::encode_frame(type, payload));
}

inline wire::Frame read_frame(int fd) {
  std::array<std::uint8_t, wire::kHeaderSize> header{};
  read_exact(fd, header.data(), header.size());
  const auto [type, len] = wire::parse_header(header);
  wire::Frame frame{type, wire::Bytes(len)};
  if (len) read_exact(fd, frame.payload.data(), len);
  return frame;
}

inline void set_timeout(int fd, double ms) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(ms / 1000);
  tv.tv_usec = static_cast<suseconds_t>((ms - static_cast<double>(tv.tv_sec) * 1000) * 1000);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

inline Socket connect_to(const Endpoint& ep, double timeout_ms) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(ep.host.c_str(), std::to_string(ep.port).c_str(), &hints, &res) != 0 || !res) {
    throw Error(ErrorCode::kIoError, "cannot resolve " + to_string(ep));
  }
  Socket sock(::socket(res->ai_family, res->ai_socktype, res->ai_protocol));
  if (!sock.valid()) {
    ::freeaddrinfo(res);
    throw Error(ErrorCode::kIoError, "socket failed");
  }
  set_timeout(sock.fd(), timeout_ms);
  const int rc = ::connect(sock.fd(), res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0) throw Error(ErrorCode::kIoError, "connect " + to_string(ep) + ": " + std::strerror(errno));
  int one = 1;
  ::setsockopt(sock.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return sock;
}

[[noreturn]] inline void raise_remote(const wire::Frame& f) {
  const auto err = wire::decode_error(f.payload);
  throw Error(err.code, "remote: " + err.message);
}

}  // namespace detail

/// Test hooks for straggler behaviour.
struct ServerOptions {
  double response_delay_ms = 0;  // sleep before acknowledging a query
  bool drop_queries = false;     // close the connection instead of answering
  bool drop_fetches = false;     // acknowledge queries, then vanish on FETCH
};

/**
 * Answers queries over one shared read-only database. Every connection gets
 * its own thread and its own sessions.
 */
class Server {
 public:
  Server(SchemeParams params, FieldMatrix v, Database db, ServerOptions options = {})
      : params_(std::move(params)),
        v_fingerprint_(wire::encoding_fingerprint(v)),
        db_(std::move(db)),
        options_(options) {
    if (db_.file_count() != params_.m || db_.parts() != params_.alpha_prime || db_.batch() != params_.s) {
      throw Error(ErrorCode::kDimensionMismatch, "database shape does not match params");
    }
  }
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;
  ~Server() { stop(); }

  /// Binds and starts accepting; returns the bound port (0 picks a free one).
  std::uint16_t start(const std::string& host = "127.0.0.1", std::uint16_t port = 0) {
    if (listener_.valid()) throw Error(ErrorCode::kInvalidArgument, "server already started");
    detail::Socket sock(::socket(AF_INET, SOCK_STREAM, 0));
    if (!sock.valid()) throw Error(ErrorCode::kIoError, "socket failed");
    int one = 1;
    ::setsockopt(sock.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
      throw Error(ErrorCode::kInvalidArgument, "bind address must be dotted IPv4: " + host);
    }
    if (::bind(sock.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(sock.fd(), 64) != 0) {
      throw Error(ErrorCode::kIoError, "bind " + host + ":" + std::to_string(port) + ": " + std::strerror(errno));
    }
    socklen_t len = sizeof addr;
    ::getsockname(sock.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    listener_ = std::move(sock);
    stopping_ = false;
    acceptor_ = std::thread([this] { accept_loop(); });
    return port_;
  }

  std::uint16_t port() const noexcept { return port_; }

  /// Blocks until stop() is called from elsewhere.
  void wait() {
    if (acceptor_.joinable()) acceptor_.join();
  }

  /// Closes the listener and every open connection, then joins all threads.
  void stop() {
    {
      std::lock_guard lock(mu_);
      if (stopping_) return;
      stopping_ = true;
      listener_.shutdown();
      for (auto& [id, conn] : connections_) conn->shutdown();
    }
    stop_cv_.notify_all();
    if (acceptor_.joinable()) acceptor_.join();
    std::vector<std::thread> workers;
    {
      std::lock_guard lock(mu_);
      workers.swap(workers_);
    }
    for (auto& w : workers) w.join();
    listener_.close();
  }

 private:
  void accept_loop() {
    for (;;) {
      const int fd = ::accept(listener_.fd(), nullptr, nullptr);
      std::lock_guard lock(mu_);
      if (stopping_) {
        if (fd >= 0) ::close(fd);
        return;
      }
      if (fd < 0) {
        if (errno == EINTR || errno == ECONNABORTED) continue;
        return;
      }
      const std::uint64_t id = next_connection_++;
      auto conn = std::make_shared<detail::Socket>(fd);
      connections_[id] = conn;
      workers_.emplace_back([this, id, conn] {
        handle(*conn);
        std::lock_guard l(mu_);
        connections_.erase(id);
      });
    }
  }

  void reply_error(int fd, ErrorCode code, const std::string& message) {
    detail::send_frame(fd, wire::MessageType::kError, wire::encode_error({code, message}));
  }

  void handle(const detail::Socket& conn) {
    std::map<std::uint64_t, Query> sessions;
    try {
      for (;;) {
        const wire::Frame frame = detail::read_frame(conn.fd());
        if (frame.type == wire::MessageType::kQuery) {
          wire::QueryMessage msg;
          try {
            msg = wire::decode_query(frame.payload);
          } catch (const Error& e) {
            reply_error(conn.fd(), e.code(), e.what());
            continue;
          }
          if (!(msg.params == params_) || msg.v_fingerprint != v_fingerprint_) {
            reply_error(conn.fd(), ErrorCode::kHandshakeMismatch, "params or encoding matrix differ");
            continue;
          }
          if (options_.drop_queries) return;
          if (options_.response_delay_ms > 0) {
            std::unique_lock lock(mu_);
            const auto delay = std::chrono::duration<double, std::milli>(options_.response_delay_ms);
            if (stop_cv_.wait_for(lock, delay, [this] { return stopping_; })) return;
          }
          const std::uint64_t sid = next_session_++;
          sessions[sid] = std::move(msg.query);
          detail::send_frame(conn.fd(), wire::MessageType::kResponse, wire::encode_response({sid, {}}));
        } else if (frame.type == wire::MessageType::kFetch) {
          if (options_.drop_fetches) return;
          wire::FetchMessage fetch;
          try {
            fetch = wire::decode_fetch(frame.payload);
            auto it = sessions.find(fetch.session);
            if (it == sessions.end()) throw Error(ErrorCode::kOutOfRange, "unknown session");
            auto cols = server_respond(db_, it->second, fetch.columns);
            detail::send_frame(conn.fd(), wire::MessageType::kResponse,
                               wire::encode_response({fetch.session, std::move(cols)}));
          } catch (const Error& e) {
            reply_error(conn.fd(), e.code(), e.what());
          }
        } else {
          reply_error(conn.fd(), ErrorCode::kMalformedFrame, "unexpected message type");
        }
      }
    } catch (const Error&) {
      // Peer went away or sent garbage framing; drop the connection.
    }
  }

  SchemeParams params_;
  wire::Digest v_fingerprint_;
  Database db_;
  ServerOptions options_;

  std::mutex mu_;
  std::condition_variable stop_cv_;
  detail::Socket listener_;
  std::uint16_t port_ = 0;
  bool stopping_ = true;
  std::thread acceptor_;
  std::vector<std::thread> workers_;
  std::map<std::uint64_t, std::shared_ptr<detail::Socket>> connections_;
  std::uint64_t next_connection_ = 0;
  std::atomic<std::uint64_t> next_session_{1};
};

struct RetrieveOptions {
  Strategy strategy = Strategy::wait_for(0);  // mu = 0 means wait for all n
  std::uint64_t seed = 1;
  RowOrder order = kDefaultRowOrder;
  double timeout_ms = 5000;
};

struct RetrieveResult {
  SymbolVector file;
  SimMetrics metrics;
};

/**
 * Runs one retrieval against n endpoints, endpoint l playing server l.
 *
 * Servers that refuse the connection or drop it count as unresponsive. If a
 * chosen server fails during the fetch, the client re-plans with the
 * remaining chosen servers and tops up their deeper prefixes, as long as at
 * least k are left.
 */
inline RetrieveResult retrieve(const std::vector<Endpoint>& endpoints, const SchemeParams& p, const FieldMatrix& v,
                               std::size_t file_index, const RetrieveOptions& opt = {}) {
  if (endpoints.size() != p.n) throw Error(ErrorCode::kDimensionMismatch, "need exactly n endpoints");
  Strategy strategy = opt.strategy;
  if (strategy.kind == Strategy::Kind::kWaitFor) {
    if (strategy.mu == 0) strategy.mu = p.n;
    if (strategy.mu < p.k || strategy.mu > p.n) throw Error(ErrorCode::kInvalidArgument, "mu must lie in [k, n]");
  }
  RetrievalSession session(p, v, file_index, opt.seed, opt.order);
  const wire::Digest vfp = wire::encoding_fingerprint(v);

  enum class State { kPending, kReady, kDead, kMismatch };
  struct Peer {
    detail::Socket sock;
    State state = State::kPending;
    std::uint64_t session = 0;
    std::string error;
  };
  std::vector<Peer> peers(p.n);
  std::vector<std::size_t> arrival;  // ready servers in arrival order
  std::mutex mu;
  std::condition_variable cv;
  std::size_t resolved = 0;
  bool selected = false;
  const auto start = std::chrono::steady_clock::now();

  std::vector<std::thread> handshakes;
  for (std::size_t l = 0; l < p.n; ++l) {
    handshakes.emplace_back([&, l] {
      State state = State::kDead;
      std::uint64_t sid = 0;
      std::string error;
      try {
        detail::Socket sock = detail::connect_to(endpoints[l], opt.timeout_ms);
        {
          std::lock_guard lock(mu);
          if (selected) throw Error(ErrorCode::kTimeout, "too late");
          peers[l].sock = std::move(sock);
        }
        const int fd = peers[l].sock.fd();
        detail::send_frame(fd, wire::MessageType::kQuery, wire::encode_query(p, vfp, session.queries()[l]));
        const wire::Frame f = detail::read_frame(fd);
        if (f.type == wire::MessageType::kError) detail::raise_remote(f);
        if (f.type != wire::MessageType::kResponse) throw Error(ErrorCode::kMalformedFrame, "expected RESPONSE");
        const auto ack = wire::decode_response(f.payload, p.field, p.s);
        if (!ack.columns.empty()) throw Error(ErrorCode::kMalformedFrame, "acknowledgement carries columns");
        sid = ack.session;
        state = State::kReady;
      } catch (const Error& e) {
        state = e.code() == ErrorCode::kHandshakeMismatch ? State::kMismatch : State::kDead;
        error = e.what();
      }
      std::lock_guard lock(mu);
      peers[l].state = state;
      peers[l].session = sid;
      peers[l].error = error;
      if (state == State::kReady && !selected) arrival.push_back(l);
      ++resolved;
      cv.notify_all();
    });
  }

  std::vector<std::size_t> chosen;
  bool mismatch = false;
  bool all_resolved = false;
  double waited_ms = 0;
  std::string first_error;
  {
    std::unique_lock lock(mu);
    if (strategy.kind == Strategy::Kind::kWaitFor) {
      const auto limit = start + std::chrono::duration<double, std::milli>(opt.timeout_ms);
      cv.wait_until(lock, std::chrono::time_point_cast<std::chrono::steady_clock::duration>(limit),
                    [&] { return arrival.size() >= strategy.mu || resolved == p.n; });
      chosen.assign(arrival.begin(), arrival.begin() + static_cast<std::ptrdiff_t>(
                                                          std::min(arrival.size(), strategy.mu)));
    } else {
      const auto limit = start + std::chrono::duration<double, std::milli>(strategy.deadline_ms);
      cv.wait_until(lock, std::chrono::time_point_cast<std::chrono::steady_clock::duration>(limit),
                    [&] { return resolved == p.n; });
      chosen = arrival;
    }
    selected = true;
    all_resolved = resolved == p.n;
    waited_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    for (const auto& peer : peers) {
      if (peer.state == State::kMismatch) mismatch = true;
      if (first_error.empty() && !peer.error.empty()) first_error = peer.error;
    }
    // Unblock stragglers still waiting on a reply; their threads then exit.
    for (std::size_t l = 0; l < p.n; ++l) {
      if (std::find(chosen.begin(), chosen.end(), l) == chosen.end()) peers[l].sock.shutdown();
    }
  }
  for (auto& t : handshakes) t.join();

  RetrieveResult result;
  auto& m = result.metrics;
  m.wait_ms = waited_ms;
  if (mismatch) throw Error(ErrorCode::kHandshakeMismatch, first_error);
  if (chosen.size() < p.k) {
    if (!all_resolved) throw Error(ErrorCode::kTimeout, std::to_string(chosen.size()) + " servers ready in time");
    throw Error(ErrorCode::kInsufficientResponders, std::to_string(chosen.size()) + " of " + std::to_string(p.k) +
                                                        " required servers ready" +
                                                        (first_error.empty() ? "" : " (" + first_error + ")"));
  }

  std::map<std::size_t, std::size_t> fetched;  // columns already held per server
  DownloadPlan plan;
  for (;;) {
    plan = plan_download(p, chosen);
    std::vector<std::future<bool>> jobs;
    for (std::size_t l : plan.responders) {
      const std::size_t have = fetched[l];
      jobs.push_back(std::async(std::launch::async, [&, l, have] {
        if (have >= plan.prefix) return true;
        wire::FetchMessage req{peers[l].session, {}};
        for (std::size_t c = have; c < plan.prefix; ++c) req.columns.push_back(c);
        try {
          const int fd = peers[l].sock.fd();
          detail::send_frame(fd, wire::MessageType::kFetch, wire::encode_fetch(req));
          const wire::Frame f = detail::read_frame(fd);
          if (f.type == wire::MessageType::kError) detail::raise_remote(f);
          if (f.type != wire::MessageType::kResponse) throw Error(ErrorCode::kMalformedFrame, "expected RESPONSE");
          auto resp = wire::decode_response(f.payload, p.field, p.s);
          if (resp.session != req.session || resp.columns.size() != req.columns.size()) {
            throw Error(ErrorCode::kMalformedFrame, "response does not match fetch");
          }
          session.add_responses(l, std::move(resp.columns));
          return true;
        } catch (const Error&) {
          return false;
        }
      }));
    }
    std::vector<std::size_t> survivors;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].get()) survivors.push_back(plan.responders[i]);
    }
    for (std::size_t l : survivors) fetched[l] = plan.prefix;
    if (survivors.size() == plan.responders.size()) break;
    chosen = survivors;  // top up from the rest; plan_download rejects < k
  }

  m.responders = plan.responders;
  m.realized_mu = plan.responders.size();
  m.symbols = plan.total_symbols;
  m.capacity = capacity_asymptotic(p.t, m.realized_mu);
  result.file = session.decode(plan);
  m.rate = rate_achieved(plan, p.file_symbols());
  m.success = true;
  for (auto& peer : peers) peer.sock.close();
  return result;
}

}  // namespace spir::net

#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ogr/fixtures.hpp"

namespace ogr {

struct RequestLogEntry {
  std::uint64_t seq = 0;
  std::string method;
  std::string target;  // path plus query
  std::int64_t t_ms = 0;  // since serving started
  std::string user_agent;
};

/// Serves a fixture as two endpoints on one listener:
///   /resolve/<doi>      scripted redirect chains (plus /hop/… and /lp/…)
///   /graph/?id=…        scripted object/engagement answers
///   /__log              the request log as JSON, newest last
/// Deterministic: identical fixtures and request schedules produce
/// identical responses.
class MockServices {
 public:
  explicit MockServices(Fixture fixture);
  ~MockServices();

  MockServices(const MockServices&) = delete;
  MockServices& operator=(const MockServices&) = delete;

  /// Binds and starts serving on a background thread. port 0 picks an
  /// ephemeral port. Throws BindFailure.
  void start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

  std::string authority() const;      // "127.0.0.1:PORT"
  std::string resolver_base() const;  // "http://<authority>/resolve/"
  std::string graph_base() const;     // "http://<authority>/graph"

  std::vector<RequestLogEntry> request_log() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ogr

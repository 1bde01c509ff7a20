#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "ogr/identifiers.hpp"

namespace ogr {

struct FetchOptions {
  int timeout_ms = 5000;
  std::string user_agent;
  std::string accept = "text/html";
};

/// One HTTP GET without redirect following.
struct HopResult {
  bool ok = false;
  int status = 0;
  std::optional<std::string> location;   // raw Location header if any
  std::string content_type;
  std::string body;
  bool set_cookie = false;
  bool transport_timeout = false;        // connect/read deadline hit
  bool connect_failed = false;           // could not reach the host at all
  std::string error;
};

HopResult fetch_once(const NormalizedUrl& url, const FetchOptions& opts);

/// Drops the calling thread's pooled keep-alive connections. Servers being
/// torn down otherwise sit out their keep-alive timeout waiting on parked
/// sockets.
void close_idle_http_clients();

/// Resolves a Location header against the URL it was served from.
/// Handles absolute URLs, path-absolute and relative references.
std::optional<NormalizedUrl> resolve_location(const NormalizedUrl& base,
                                              const std::string& location);

std::string url_encode_component(std::string_view s);

}  // namespace ogr

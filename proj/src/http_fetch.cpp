#include "ogr/http_fetch.hpp"

#include <httplib.h>

#include <cctype>

namespace ogr {

namespace {

std::string authority_of(const NormalizedUrl& url) {
  std::string out = to_string(url.scheme);
  out += "://";
  out += url.host;
  if (url.port) {
    out += ':';
    out += std::to_string(*url.port);
  }
  return out;
}

void apply_timeouts(httplib::Client& client, int timeout_ms) {
  if (timeout_ms < 1) timeout_ms = 1;
  auto sec = timeout_ms / 1000;
  auto usec = (timeout_ms % 1000) * 1000;
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
}

}  // namespace

namespace {

// one keep-alive client per (thread, authority); repeated hops against
// the same host reuse the connection
thread_local std::map<std::string, std::unique_ptr<httplib::Client>>
    t_client_cache;

}  // namespace

void close_idle_http_clients() { t_client_cache.clear(); }

HopResult fetch_once(const NormalizedUrl& url, const FetchOptions& opts) {
  HopResult hop;

  auto& cache = t_client_cache;
  const std::string authority = authority_of(url);
  auto [slot, inserted] = cache.try_emplace(authority, nullptr);
  if (inserted) {
    slot->second = std::make_unique<httplib::Client>(authority);
    slot->second->set_follow_location(false);
    slot->second->set_keep_alive(true);
  }
  httplib::Client& client = *slot->second;
  apply_timeouts(client, opts.timeout_ms);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.scheme == Scheme::Https) {
    hop.connect_failed = true;
    hop.error = "https requested but TLS support is not compiled in";
    return hop;
  }
#endif

  httplib::Headers headers;
  if (!opts.user_agent.empty()) headers.emplace("User-Agent", opts.user_agent);
  if (!opts.accept.empty()) headers.emplace("Accept", opts.accept);

  std::string target = url.path;
  if (url.query) {
    target += '?';
    target += *url.query;
  }

  auto res = client.Get(target, headers);
  if (!res) {
    switch (res.error()) {
      case httplib::Error::ConnectionTimeout:
        hop.transport_timeout = true;
        break;
      case httplib::Error::Connection:
      case httplib::Error::BindIPAddress:
      case httplib::Error::SSLConnection:
      case httplib::Error::SSLServerVerification:
        hop.connect_failed = true;
        break;
      default:
        break;  // read/write failures: aborted or timed out mid-response
    }
    hop.error = httplib::to_string(res.error());
    return hop;
  }

  hop.ok = true;
  hop.status = res->status;
  if (res->has_header("Location")) hop.location = res->get_header_value("Location");
  hop.content_type = res->get_header_value("Content-Type");
  hop.set_cookie = res->has_header("Set-Cookie");
  hop.body = std::move(res->body);
  return hop;
}

std::optional<NormalizedUrl> resolve_location(const NormalizedUrl& base,
                                              const std::string& location) {
  if (location.empty()) return std::nullopt;
  if (location.find("://") != std::string::npos)
    return try_parse_url(location);
  if (location.starts_with("//"))
    return try_parse_url(std::string(to_string(base.scheme)) + ":" + location);

  NormalizedUrl out = base;
  out.query.reset();
  std::string ref = location;
  std::string ref_query;
  if (std::size_t frag = ref.find('#'); frag != std::string::npos)
    ref = ref.substr(0, frag);
  if (std::size_t q = ref.find('?'); q != std::string::npos) {
    ref_query = ref.substr(q + 1);
    ref = ref.substr(0, q);
    out.query = ref_query;
  }

  if (ref.empty()) {
    out.path = base.path;
    return out;
  }
  if (ref.front() == '/') {
    out.path = ref;
    return out;
  }
  // merge relative reference against the base path's directory
  std::string dir = base.path;
  std::size_t last = dir.rfind('/');
  dir = last == std::string::npos ? "/" : dir.substr(0, last + 1);
  out.path = dir + ref;
  return out;
}

std::string url_encode_component(std::string_view s) {
  static const char hex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size() * 3);
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xf];
    }
  }
  return out;
}

}  // namespace ogr

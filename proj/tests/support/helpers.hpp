#pragma once

#include <httplib.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ogr/fixtures.hpp"
#include "ogr/graph.hpp"
#include "ogr/http_fetch.hpp"
#include "ogr/identifiers.hpp"

namespace ogr::test {

// An httplib server on an ephemeral port, torn down with the scope.
class ScopedServer {
 public:
  ScopedServer() = default;
  ~ScopedServer() { stop(); }

  httplib::Server& server() { return server_; }

  void start() {
    server_.set_keep_alive_timeout(2);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void stop() {
    close_idle_http_clients();  // parked keep-alive sockets stall shutdown
    if (server_.is_running()) server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }
  std::string authority() const {
    return "127.0.0.1:" + std::to_string(port_);
  }
  std::string base() const { return "http://" + authority(); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

inline Doi doi(const std::string& s) { return parse_doi(s); }
inline NormalizedUrl url(const std::string& s) { return normalize_url(s); }

inline Engagement eng(std::uint64_t share, std::uint64_t reaction = 0,
                      std::uint64_t comment = 0, std::uint64_t plugin = 0) {
  return Engagement{share, reaction, comment, plugin};
}

inline GraphResponse slot_with(std::optional<std::string> ob_id,
                               std::optional<Engagement> engagement,
                               const std::string& u = "https://x.org/a") {
  GraphResponse r;
  r.queried_url = url(u);
  r.ob_id = std::move(ob_id);
  r.engagement = engagement;
  return r;
}

inline VariantResponses article(
    const std::string& doi_str,
    std::array<std::optional<GraphResponse>, 4> slots) {
  VariantResponses vr;
  vr.doi = doi(doi_str);
  vr.slots = std::move(slots);
  return vr;
}

// random inputs for the property suites; fixed seeds keep runs reproducible
struct Rand {
  explicit Rand(std::uint64_t seed) : rng(seed) {}
  std::mt19937_64 rng;

  std::uint64_t pick(std::uint64_t n) { return rng() % n; }

  std::string host() {
    static const char* hosts[] = {"pub.org",      "x.example",
                                  "journals.io",  "a-b.net",
                                  "publisher.museum", "sub.pub.org"};
    return hosts[pick(6)];
  }

  std::string path_segment() {
    static const char* segs[] = {"article", "doi",   "ab%2Fcd", "View",
                                 "1234",    "a_b-c", "index.html"};
    return segs[pick(7)];
  }

  NormalizedUrl url() {
    NormalizedUrl u;
    u.scheme = pick(2) ? Scheme::Https : Scheme::Http;
    u.host = host();
    // ports drawn away from 80/443: flipping the scheme of a URL that
    // carries the other scheme's default port elides the port
    if (pick(3) == 0)
      u.port = static_cast<std::uint16_t>(3000 + pick(5000));
    std::string p;
    const int segments = 1 + static_cast<int>(pick(3));
    for (int i = 0; i < segments; ++i) p += "/" + path_segment();
    u.path = p;
    if (pick(2)) u.query = "k=" + std::to_string(pick(100));
    return u;
  }

  std::string raw_url() {
    std::string scheme = pick(2) ? "https" : "http";
    std::string s = scheme;
    if (pick(3) == 0) {
      for (auto& c : s) {
        if (pick(2)) c = static_cast<char>(std::toupper(c));
      }
    }
    std::string h = host();
    if (pick(4) == 0) {
      for (auto& c : h) {
        if (pick(2)) c = static_cast<char>(std::toupper(c));
      }
    }
    s += "://" + h;
    switch (pick(4)) {
      case 0: s += scheme == "https" ? ":443" : ":80"; break;
      case 1: s += ":" + std::to_string(1024 + pick(60000)); break;
      default: break;
    }
    const int segments = static_cast<int>(pick(3));
    for (int i = 0; i < segments; ++i) s += "/" + path_segment();
    if (pick(2)) s += "?q=" + std::to_string(pick(100));
    if (pick(3) == 0) s += "#Frag" + std::to_string(pick(10));
    return s;
  }

  Engagement engagement() {
    return Engagement{pick(5), pick(4), pick(3), pick(2)};
  }

  std::optional<GraphResponse> maybe_slot(const std::string& base_url) {
    switch (pick(5)) {
      case 0: return std::nullopt;
      case 1: return slot_with(std::nullopt, std::nullopt, base_url);
      case 2: return slot_with("ob-" + std::to_string(pick(3)), std::nullopt,
                               base_url);
      case 3:
        return slot_with("ob-" + std::to_string(pick(3)), engagement(),
                         base_url);
      default: return slot_with(std::nullopt, engagement(), base_url);
    }
  }
};

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("ogr_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// A consistent fixture spec with every feature present, small enough for
// fast unit runs.
inline FixtureSpec small_spec() {
  FixtureSpec spec;
  spec.n_dois = 400;
  spec.resolution_mix = {300, 40, 60};
  spec.shared_landing = {6, 3};
  spec.variant_coverage = {{{60, 35}, {70, 27}, {20, 10}, {40, 30}}};
  spec.any_variant = {124, 77};
  spec.case_mix.no_id = 3;
  spec.case_mix.one_id = 40;
  spec.case_mix.multi = {{{20, 8, 7, 5}, {10, 6, 5, 4}, {4, 3, 2, 2}}};
  spec.collision_spec = {3, 10, 5, 8, 2};
  spec.timeout_sample = 2;
  spec.timeout_delay_ms = 7000;
  return spec;
}

}  // namespace ogr::test

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ogr/identifiers.hpp"
#include "ogr/rate_limit.hpp"

namespace ogr {

/// The four counters the Graph endpoint reports per object.
struct Engagement {
  std::uint64_t share_count = 0;
  std::uint64_t reaction_count = 0;
  std::uint64_t comment_count = 0;
  std::uint64_t comment_plugin_count = 0;

  std::uint64_t total() const {
    return share_count + reaction_count + comment_count + comment_plugin_count;
  }

  bool operator==(const Engagement&) const = default;
};

enum class GraphStatus { Ok, RateLimited, NetworkError, MalformedPayload };

const char* to_string(GraphStatus s);
std::optional<GraphStatus> graph_status_from_string(std::string_view s);

/// One Graph-endpoint answer. ob_id absent with engagement present is
/// legal (the endpoint does produce it) and is flagged downstream.
struct GraphResponse {
  NormalizedUrl queried_url;
  std::optional<std::string> ob_id;
  std::optional<Engagement> engagement;
  GraphStatus status = GraphStatus::Ok;

  bool positive_engagement() const {
    return engagement.has_value() && engagement->total() >= 1;
  }

  bool operator==(const GraphResponse&) const = default;
};

/// Per-article responses, indexed by variant number 1-4 (slot 0 = variant 1).
/// An absent slot means the variant was never queried.
struct VariantResponses {
  Doi doi;
  std::array<std::optional<GraphResponse>, 4> slots;

  bool any_positive_engagement() const {
    for (const auto& s : slots)
      if (s && s->positive_engagement()) return true;
    return false;
  }

  bool any_ob_id() const {
    for (const auto& s : slots)
      if (s && s->ob_id) return true;
    return false;
  }

  bool operator==(const VariantResponses&) const = default;
};

struct ParsedPayload {
  bool malformed = false;
  std::optional<std::string> ob_id;
  std::optional<Engagement> engagement;

  bool operator==(const ParsedPayload&) const = default;
};

/// Pulls og_object.id and the engagement counters out of a Graph response
/// body. Total over arbitrary bytes: anything unparseable comes back with
/// malformed set instead of an exception.
ParsedPayload parse_graph_payload(std::string_view body);

struct Credentials {
  std::string access_token;
};

struct GraphClientConfig {
  std::string endpoint_base;  // e.g. "https://graph.facebook.com" or the mock
  Credentials auth;
  double rate_per_sec = 10;   // <= 0 disables pacing
  int retries = 3;            // attempts on rate-limit/transport errors
  int backoff_base_ms = 500;
  int timeout_ms = 10000;
  int workers = 8;
};

class GraphClient {
 public:
  explicit GraphClient(GraphClientConfig config);

  /// GET {endpoint_base}/?id={url}&fields=engagement,og_object&access_token=…
  /// Never throws; failures come back as RateLimited / NetworkError /
  /// MalformedPayload statuses.
  GraphResponse query_object(const NormalizedUrl& url);

  /// Queries the present variants in order 1→4. Variants rendering to the
  /// same URL text are queried once and share the response.
  VariantResponses query_variants(const Doi& doi, const VariantSet& vs);

  /// Batch form over a worker pool; output order matches input order.
  std::vector<VariantResponses> query_all(
      std::span<const std::pair<Doi, VariantSet>> articles,
      const std::function<void(const VariantResponses&)>& on_done = nullptr);

  const GraphClientConfig& config() const { return config_; }

 private:
  GraphResponse query_once(const NormalizedUrl& url, int* http_status);

  GraphClientConfig config_;
  Pacer pacer_;
};

}  // namespace ogr

#include "ogr/graph.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

#include "ogr/http_fetch.hpp"

namespace ogr {

namespace {

std::optional<std::uint64_t> read_count(const nlohmann::json& j,
                                        const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return 0;  // endpoint omits zero counters at times
  if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
    return std::nullopt;
  return it->get<std::uint64_t>();
}

}  // namespace

const char* to_string(GraphStatus s) {
  switch (s) {
    case GraphStatus::Ok: return "ok";
    case GraphStatus::RateLimited: return "rate_limited";
    case GraphStatus::NetworkError: return "network_error";
    case GraphStatus::MalformedPayload: return "malformed_payload";
  }
  return "network_error";
}

std::optional<GraphStatus> graph_status_from_string(std::string_view s) {
  if (s == "ok") return GraphStatus::Ok;
  if (s == "rate_limited") return GraphStatus::RateLimited;
  if (s == "network_error") return GraphStatus::NetworkError;
  if (s == "malformed_payload") return GraphStatus::MalformedPayload;
  return std::nullopt;
}

ParsedPayload parse_graph_payload(std::string_view body) {
  ParsedPayload out;
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    out.malformed = true;
    return out;
  }

  if (auto og = j.find("og_object"); og != j.end()) {
    if (!og->is_object()) {
      out.malformed = true;
      return out;
    }
    if (auto id = og->find("id"); id != og->end()) {
      if (!id->is_string()) {
        out.malformed = true;
        return out;
      }
      out.ob_id = id->get<std::string>();
    }
  }

  if (auto eng = j.find("engagement"); eng != j.end()) {
    if (!eng->is_object()) {
      out.malformed = true;
      return out;
    }
    Engagement e;
    auto share = read_count(*eng, "share_count");
    auto reaction = read_count(*eng, "reaction_count");
    auto comment = read_count(*eng, "comment_count");
    auto plugin = read_count(*eng, "comment_plugin_count");
    if (!share || !reaction || !comment || !plugin) {
      out.malformed = true;
      out.ob_id.reset();
      return out;
    }
    e.share_count = *share;
    e.reaction_count = *reaction;
    e.comment_count = *comment;
    e.comment_plugin_count = *plugin;
    out.engagement = e;
  }
  return out;
}

GraphClient::GraphClient(GraphClientConfig config)
    : config_(std::move(config)), pacer_(config_.rate_per_sec) {}

GraphResponse GraphClient::query_once(const NormalizedUrl& url,
                                      int* http_status) {
  GraphResponse out;
  out.queried_url = url;
  *http_status = 0;

  auto base = try_parse_url(config_.endpoint_base);
  if (!base) {
    out.status = GraphStatus::NetworkError;
    return out;
  }

  NormalizedUrl target = *base;
  if (target.path.back() != '/') target.path += '/';
  target.query = "id=" + url_encode_component(url.str()) +
                 "&fields=engagement,og_object" +
                 "&access_token=" + url_encode_component(config_.auth.access_token);

  pacer_.acquire();
  FetchOptions opts;
  opts.timeout_ms = config_.timeout_ms;
  opts.accept = "application/json";
  auto hop = fetch_once(target, opts);

  if (!hop.ok) {
    out.status = GraphStatus::NetworkError;
    return out;
  }
  *http_status = hop.status;
  if (hop.status == 429) {
    out.status = GraphStatus::RateLimited;
    return out;
  }
  if (hop.status != 200) {
    out.status = GraphStatus::NetworkError;
    return out;
  }

  auto parsed = parse_graph_payload(hop.body);
  if (parsed.malformed) {
    out.status = GraphStatus::MalformedPayload;
    return out;
  }
  out.status = GraphStatus::Ok;
  out.ob_id = std::move(parsed.ob_id);
  out.engagement = parsed.engagement;
  return out;
}

GraphResponse GraphClient::query_object(const NormalizedUrl& url) {
  const int attempts = std::max(1, config_.retries);
  GraphResponse last;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      auto delay = std::chrono::milliseconds(
          static_cast<std::int64_t>(config_.backoff_base_ms) << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }
    int http_status = 0;
    last = query_once(url, &http_status);
    if (last.status == GraphStatus::Ok ||
        last.status == GraphStatus::MalformedPayload)
      return last;
  }
  return last;
}

VariantResponses GraphClient::query_variants(const Doi& doi,
                                             const VariantSet& vs) {
  VariantResponses out;
  out.doi = doi;

  // Two variants can render to the same URL text (a DOI that resolves at
  // the proxy itself); query it once.
  std::map<std::string, GraphResponse> seen;
  for (int variant = 1; variant <= 4; ++variant) {
    auto url = vs.slot(variant);
    if (!url) continue;
    std::string key = url->str();
    auto it = seen.find(key);
    if (it == seen.end()) it = seen.emplace(key, query_object(*url)).first;
    out.slots[variant - 1] = it->second;
  }
  return out;
}

std::vector<VariantResponses> GraphClient::query_all(
    std::span<const std::pair<Doi, VariantSet>> articles,
    const std::function<void(const VariantResponses&)>& on_done) {
  std::vector<VariantResponses> results(articles.size());
  if (articles.empty()) return results;

  std::atomic<std::size_t> next{0};
  std::mutex done_mutex;
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= articles.size()) return;
      results[i] = query_variants(articles[i].first, articles[i].second);
      if (on_done) {
        std::lock_guard lock(done_mutex);
        on_done(results[i]);
      }
    }
  };

  const int workers = std::max(
      1, std::min<int>(config_.workers, static_cast<int>(articles.size())));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace ogr

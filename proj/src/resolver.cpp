#include "ogr/resolver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <thread>

#include "ogr/errors.hpp"
#include "ogr/http_fetch.hpp"
#include "ogr/rate_limit.hpp"
#include "ogr/reporting.hpp"

namespace ogr {

namespace {

bool body_matches_marker(const std::string& body,
                         const std::vector<std::string>& markers) {
  std::string lowered(body);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (const auto& m : markers) {
    if (!m.empty() && lowered.find(m) != std::string::npos) return true;
  }
  return false;
}

// A transport error near the budget is a timeout; the rest of the gray
// zone (connection reset after the deadline minus slack) is unknowable
// from outside, so 100 ms of slack draws the line.
constexpr std::int64_t kTimeoutSlackMs = 100;

}  // namespace

const char* to_string(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::ResolvedOk: return "resolved_ok";
    case OutcomeClass::ResolvedWithError: return "resolved_with_error";
    case OutcomeClass::Failed: return "failed";
  }
  return "failed";
}

const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::Timeout: return "timeout";
    case FailureReason::ServerAborted: return "server_aborted";
    case FailureReason::RequiresJsOrCookies: return "requires_js_or_cookies";
    case FailureReason::TooManyRedirects: return "too_many_redirects";
    case FailureReason::NetworkError: return "network_error";
  }
  return "network_error";
}

std::optional<OutcomeClass> outcome_class_from_string(std::string_view s) {
  if (s == "resolved_ok") return OutcomeClass::ResolvedOk;
  if (s == "resolved_with_error") return OutcomeClass::ResolvedWithError;
  if (s == "failed") return OutcomeClass::Failed;
  return std::nullopt;
}

std::optional<FailureReason> failure_reason_from_string(std::string_view s) {
  if (s == "timeout") return FailureReason::Timeout;
  if (s == "server_aborted") return FailureReason::ServerAborted;
  if (s == "requires_js_or_cookies") return FailureReason::RequiresJsOrCookies;
  if (s == "too_many_redirects") return FailureReason::TooManyRedirects;
  if (s == "network_error") return FailureReason::NetworkError;
  return std::nullopt;
}

bool ResolutionOutcome::same_semantics(const ResolutionOutcome& o) const {
  return doi == o.doi && outcome_class == o.outcome_class &&
         final_url == o.final_url && http_status == o.http_status &&
         redirect_chain == o.redirect_chain &&
         failure_reason == o.failure_reason;
}

ResolutionOutcome resolve(const Doi& doi, const ResolverConfig& config) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() -
                                                                 started)
        .count();
  };

  ResolutionOutcome out;
  out.doi = doi;

  auto fail = [&](FailureReason reason) {
    out.outcome_class = OutcomeClass::Failed;
    out.failure_reason = reason;
    out.final_url.reset();
    out.http_status.reset();
    out.elapsed_ms = elapsed_ms();
    return out;
  };

  auto start_url = try_parse_url(config.resolver_base + doi.str());
  if (!start_url) return fail(FailureReason::NetworkError);

  NormalizedUrl current = *start_url;
  out.redirect_chain.push_back(current);

  int redirects = 0;
  while (true) {
    const std::int64_t remaining = config.timeout_ms - elapsed_ms();
    if (remaining <= 0) return fail(FailureReason::Timeout);

    FetchOptions opts;
    opts.timeout_ms = static_cast<int>(remaining);
    opts.user_agent = config.user_agent;
    auto hop = fetch_once(current, opts);

    if (!hop.ok) {
      if (hop.transport_timeout ||
          elapsed_ms() + kTimeoutSlackMs >= config.timeout_ms)
        return fail(FailureReason::Timeout);
      if (hop.connect_failed) return fail(FailureReason::NetworkError);
      return fail(FailureReason::ServerAborted);
    }

    const bool is_redirect = hop.status >= 300 && hop.status < 400 &&
                             hop.location.has_value();
    if (is_redirect) {
      auto next = resolve_location(current, *hop.location);
      if (!next) return fail(FailureReason::NetworkError);
      const bool repeats = std::find(out.redirect_chain.begin(),
                                     out.redirect_chain.end(),
                                     *next) != out.redirect_chain.end();
      if (repeats && config.detect_js_cookie_walls && hop.set_cookie)
        return fail(FailureReason::RequiresJsOrCookies);
      if (++redirects > config.max_redirects || repeats)
        return fail(FailureReason::TooManyRedirects);
      current = *next;
      out.redirect_chain.push_back(current);
      continue;
    }

    if (config.detect_js_cookie_walls && hop.status < 300 &&
        body_matches_marker(hop.body, config.js_cookie_markers))
      return fail(FailureReason::RequiresJsOrCookies);

    out.final_url = current;
    out.http_status = hop.status;
    out.outcome_class = hop.status >= 400 ? OutcomeClass::ResolvedWithError
                                          : OutcomeClass::ResolvedOk;
    out.elapsed_ms = elapsed_ms();
    return out;
  }
}

std::vector<ResolutionOutcome> resolve_all(
    std::span<const Doi> dois, const ResolverConfig& config,
    const std::function<void(const ResolutionOutcome&)>& on_done) {
  std::vector<ResolutionOutcome> results(dois.size());
  if (dois.empty()) return results;

  HostPacer politeness(config.per_host_delay_ms);
  std::atomic<std::size_t> next{0};
  std::mutex done_mutex;

  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= dois.size()) return;
      if (config.per_host_delay_ms > 0) {
        if (auto base = try_parse_url(config.resolver_base + dois[i].str()))
          politeness.acquire(base->host);
      }
      results[i] = resolve(dois[i], config);
      if (on_done) {
        std::lock_guard lock(done_mutex);
        on_done(results[i]);
      }
    }
  };

  const int workers = std::max(1, std::min<int>(config.workers,
                                                static_cast<int>(dois.size())));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::sort(results.begin(), results.end(),
            [](const ResolutionOutcome& a, const ResolutionOutcome& b) {
              return a.doi < b.doi;
            });
  return results;
}

std::vector<LandingPageGroup> detect_shared_landing_pages(
    std::span<const ResolutionOutcome> outcomes) {
  std::map<NormalizedUrl, std::vector<Doi>> by_url;
  for (const auto& o : outcomes) {
    if (o.final_url) by_url[*o.final_url].push_back(o.doi);
  }

  std::vector<LandingPageGroup> groups;
  for (auto& [url, dois] : by_url) {
    if (dois.size() < 2) continue;
    std::sort(dois.begin(), dois.end());
    dois.erase(std::unique(dois.begin(), dois.end()), dois.end());
    if (dois.size() < 2) continue;
    groups.push_back({url, std::move(dois)});
  }
  std::sort(groups.begin(), groups.end(),
            [](const LandingPageGroup& a, const LandingPageGroup& b) {
              if (a.dois.size() != b.dois.size())
                return a.dois.size() > b.dois.size();
              return a.url < b.url;
            });
  return groups;
}

ResolutionStats resolution_stats_from_counts(std::uint64_t ok,
                                             std::uint64_t with_error,
                                             std::uint64_t failed) {
  ResolutionStats s;
  s.ok = ok;
  s.with_error = with_error;
  s.failed = failed;
  const std::uint64_t total = s.total();
  s.ok_pct = pct1(ok, total);
  s.with_error_pct = pct1(with_error, total);
  s.resolved_pct = pct1(ok + with_error, total);
  s.failed_pct = pct1(failed, total);
  return s;
}

ResolutionStats resolution_stats(std::span<const ResolutionOutcome> outcomes) {
  if (outcomes.empty())
    throw EmptyInput("resolution_stats: no outcomes");
  std::uint64_t ok = 0, with_error = 0, failed = 0;
  for (const auto& o : outcomes) {
    switch (o.outcome_class) {
      case OutcomeClass::ResolvedOk: ++ok; break;
      case OutcomeClass::ResolvedWithError: ++with_error; break;
      case OutcomeClass::Failed: ++failed; break;
    }
  }
  return resolution_stats_from_counts(ok, with_error, failed);
}

}  // namespace ogr

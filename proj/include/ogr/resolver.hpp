#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ogr/identifiers.hpp"
#include "ogr/version.hpp"

namespace ogr {

enum class OutcomeClass { ResolvedOk, ResolvedWithError, Failed };

enum class FailureReason {
  Timeout,
  ServerAborted,
  RequiresJsOrCookies,
  TooManyRedirects,
  NetworkError,
};

const char* to_string(OutcomeClass c);
const char* to_string(FailureReason r);
std::optional<OutcomeClass> outcome_class_from_string(std::string_view s);
std::optional<FailureReason> failure_reason_from_string(std::string_view s);

struct ResolverConfig {
  int timeout_ms = 5000;      // whole-chain budget, not per hop
  int max_redirects = 10;
  int workers = 8;
  int per_host_delay_ms = 0;
  std::string user_agent = std::string("og-reconcile/") + kVersion;
  std::string resolver_base = "https://doi.org/";

  // Optional heuristic for pages that need a browser to finish loading.
  // Off by default; when on, a 2xx body matching a marker (or a cookie-set
  // redirect back to a URL already seen) is counted as Failed.
  bool detect_js_cookie_walls = false;
  std::vector<std::string> js_cookie_markers = {"enable javascript",
                                                "cookies required"};
};

/// Result of one resolution attempt. Every failure mode is a value; resolve
/// never throws, so batch runs are total.
struct ResolutionOutcome {
  Doi doi;
  OutcomeClass outcome_class = OutcomeClass::Failed;
  std::optional<NormalizedUrl> final_url;
  std::optional<int> http_status;
  std::vector<NormalizedUrl> redirect_chain;  // starts at the proxy URL
  std::optional<FailureReason> failure_reason;
  std::int64_t elapsed_ms = 0;

  bool resolved() const { return final_url.has_value(); }

  bool operator==(const ResolutionOutcome&) const = default;

  /// Equality ignoring wall-clock timing; used by determinism checks.
  bool same_semantics(const ResolutionOutcome& o) const;
};

struct LandingPageGroup {
  NormalizedUrl url;
  std::vector<Doi> dois;  // sorted, size >= 2

  bool operator==(const LandingPageGroup&) const = default;
};

struct ResolutionStats {
  std::uint64_t ok = 0;
  std::uint64_t with_error = 0;
  std::uint64_t failed = 0;
  double ok_pct = 0;
  double with_error_pct = 0;
  double resolved_pct = 0;
  double failed_pct = 0;

  std::uint64_t resolved() const { return ok + with_error; }
  std::uint64_t total() const { return ok + with_error + failed; }

  bool operator==(const ResolutionStats&) const = default;
};

ResolutionOutcome resolve(const Doi& doi, const ResolverConfig& config);

/// Resolves a batch under a bounded worker pool; the returned list is
/// sorted by DOI so results are stable across worker counts. `on_done`,
/// when set, is called once per outcome as workers finish (used for
/// journal streaming); call order is not deterministic.
std::vector<ResolutionOutcome> resolve_all(
    std::span<const Doi> dois, const ResolverConfig& config,
    const std::function<void(const ResolutionOutcome&)>& on_done = nullptr);

/// Groups resolved DOIs by normalized final URL; returns only groups with
/// at least two members, ordered by descending size then URL.
std::vector<LandingPageGroup> detect_shared_landing_pages(
    std::span<const ResolutionOutcome> outcomes);

ResolutionStats resolution_stats(std::span<const ResolutionOutcome> outcomes);
ResolutionStats resolution_stats_from_counts(std::uint64_t ok,
                                             std::uint64_t with_error,
                                             std::uint64_t failed);

}  // namespace ogr

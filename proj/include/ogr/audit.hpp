#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ogr/identifiers.hpp"

namespace ogr {

enum class AuditCheck {
  RedirectChainTooLong,
  MissingOgUrl,
  InconsistentOgUrl,
  UrlInjectionSuspected,
  AccessNotAllowedPage,
  NotMachineReadable,
};

enum class Severity { Warn, Fail };

const char* to_string(AuditCheck c);
const char* to_string(Severity s);

struct AuditFinding {
  AuditCheck check;
  Severity severity;
  std::string detail;

  bool operator==(const AuditFinding&) const = default;
};

struct AuditReport {
  NormalizedUrl url;
  std::vector<AuditFinding> findings;  // at most one per check

  bool has_failures() const {
    for (const auto& f : findings)
      if (f.severity == Severity::Fail) return true;
    return false;
  }

  bool operator==(const AuditReport&) const = default;
};

/// What a fetch saw: the redirect chain from the requested URL to the final
/// one, plus the final response.
struct FetchedPage {
  bool ok = false;
  std::vector<NormalizedUrl> chain;
  int status = 0;
  std::string content_type;
  std::string body;
  std::string error;
};

class PageFetcher {
 public:
  virtual ~PageFetcher() = default;
  virtual FetchedPage fetch(const NormalizedUrl& url) = 0;
};

class HttpPageFetcher : public PageFetcher {
 public:
  explicit HttpPageFetcher(int timeout_ms = 10000, int max_redirects = 15,
                           std::string user_agent = "");
  FetchedPage fetch(const NormalizedUrl& url) override;

 private:
  int timeout_ms_;
  int max_redirects_;
  std::string user_agent_;
};

struct OgMeta {
  std::map<std::string, std::string> values;       // first occurrence wins
  std::vector<std::string> duplicated_properties;  // re-declared og keys
};

/// All <meta property="og:*" content="..."> pairs, tolerant of attribute
/// order, quoting style and whitespace. Non-HTML input yields an empty map.
OgMeta extract_og_meta(std::string_view html);

struct AuditConfig {
  // Facebook's sharing debugger gives up after the fifth redirect.
  int redirect_limit = 5;
  std::vector<std::string> injection_patterns = {
      "error", "errorcode=", "status=4", "status=5", "login?back="};
};

std::optional<AuditFinding> check_redirect_chain(
    std::span<const NormalizedUrl> chain, int redirect_limit = 5);

/// Word-boundary match of the configured patterns against the final URL's
/// path and query. A pattern ending in a letter must also end at a word
/// boundary, so "error" flags "?error=x" but not "/errors-in-measurement".
std::optional<AuditFinding> check_url_injection(
    const NormalizedUrl& final_url, std::span<const std::string> patterns);

std::optional<AuditFinding> check_access_status(int status,
                                                std::string_view html);

AuditReport audit_page(const NormalizedUrl& url, PageFetcher& fetch,
                       const AuditConfig& config = {});

}  // namespace ogr

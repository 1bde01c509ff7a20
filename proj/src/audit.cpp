#include "ogr/audit.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "ogr/http_fetch.hpp"

namespace ogr {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool html_like_content_type(const std::string& content_type) {
  std::string ct = lowercase(content_type);
  return ct.find("html") != std::string::npos ||
         ct.find("xml") != std::string::npos;
}

std::optional<std::string> extract_title(std::string_view html) {
  static const std::regex re("<title[^>]*>([^<]*)</title>",
                             std::regex::icase);
  std::cmatch m;
  if (std::regex_search(html.begin(), html.end(), m, re)) return m.str(1);
  return std::nullopt;
}

// Case-insensitive word-boundary search for a literal pattern. The leading
// boundary always applies; the trailing one only when the pattern ends in a
// letter, so prefixes like "status=4" still catch "status=404".
bool pattern_hits(const std::string& haystack, const std::string& pattern) {
  if (pattern.empty()) return false;
  const std::string text = lowercase(haystack);
  const std::string pat = lowercase(pattern);
  const bool bound_end = std::isalpha(static_cast<unsigned char>(pat.back()));

  std::size_t pos = 0;
  while ((pos = text.find(pat, pos)) != std::string::npos) {
    const bool start_ok = pos == 0 || !is_word_char(text[pos - 1]) ||
                          !is_word_char(pat.front());
    const std::size_t end = pos + pat.size();
    const bool end_ok = !bound_end || end == text.size() ||
                        !is_word_char(text[end]);
    if (start_ok && end_ok) return true;
    ++pos;
  }
  return false;
}

}  // namespace

const char* to_string(AuditCheck c) {
  switch (c) {
    case AuditCheck::RedirectChainTooLong: return "redirect_chain_too_long";
    case AuditCheck::MissingOgUrl: return "missing_og_url";
    case AuditCheck::InconsistentOgUrl: return "inconsistent_og_url";
    case AuditCheck::UrlInjectionSuspected: return "url_injection_suspected";
    case AuditCheck::AccessNotAllowedPage: return "access_not_allowed_page";
    case AuditCheck::NotMachineReadable: return "not_machine_readable";
  }
  return "not_machine_readable";
}

const char* to_string(Severity s) {
  return s == Severity::Fail ? "fail" : "warn";
}

OgMeta extract_og_meta(std::string_view html) {
  OgMeta out;
  static const std::regex meta_re("<meta\\b[^>]*>", std::regex::icase);
  static const std::regex attr_re(
      "([a-zA-Z][a-zA-Z0-9_:.-]*)\\s*=\\s*(\"([^\"]*)\"|'([^']*)'|([^\\s\"'>]+))",
      std::regex::icase);

  auto begin = std::cregex_iterator(html.begin(), html.end(), meta_re);
  auto end = std::cregex_iterator();
  for (auto it = begin; it != end; ++it) {
    const std::string tag = it->str();
    std::optional<std::string> property;
    std::optional<std::string> content;
    auto attrs_begin =
        std::sregex_iterator(tag.begin(), tag.end(), attr_re);
    for (auto a = attrs_begin; a != std::sregex_iterator(); ++a) {
      std::string name = lowercase((*a)[1].str());
      std::string value = (*a)[3].matched   ? (*a)[3].str()
                          : (*a)[4].matched ? (*a)[4].str()
                                            : (*a)[5].str();
      if (name == "property") property = lowercase(value);
      if (name == "content") content = value;
    }
    if (!property || !content || !property->starts_with("og:")) continue;
    auto [pos, inserted] = out.values.try_emplace(*property, *content);
    if (!inserted) {
      // first occurrence wins; remember the re-declaration for the caller
      if (std::find(out.duplicated_properties.begin(),
                    out.duplicated_properties.end(),
                    *property) == out.duplicated_properties.end())
        out.duplicated_properties.push_back(*property);
    }
  }
  return out;
}

std::optional<AuditFinding> check_redirect_chain(
    std::span<const NormalizedUrl> chain, int redirect_limit) {
  if (chain.empty()) return std::nullopt;

  std::set<std::string> seen;
  for (const auto& url : chain) {
    if (!seen.insert(url.str()).second) {
      return AuditFinding{AuditCheck::RedirectChainTooLong, Severity::Fail,
                          "loop: " + url.str() + " repeats in the chain"};
    }
  }

  const std::size_t redirects = chain.size() - 1;
  if (redirects > static_cast<std::size_t>(redirect_limit)) {
    return AuditFinding{
        AuditCheck::RedirectChainTooLong, Severity::Fail,
        std::to_string(redirects) + " redirects; crawlers stop after " +
            std::to_string(redirect_limit)};
  }
  return std::nullopt;
}

std::optional<AuditFinding> check_url_injection(
    const NormalizedUrl& final_url, std::span<const std::string> patterns) {
  std::string target = final_url.path;
  if (final_url.query) {
    target += '?';
    target += *final_url.query;
  }
  for (const auto& p : patterns) {
    if (pattern_hits(target, p)) {
      return AuditFinding{AuditCheck::UrlInjectionSuspected, Severity::Warn,
                          "final URL matches pattern \"" + p + "\""};
    }
  }
  return std::nullopt;
}

std::optional<AuditFinding> check_access_status(int status,
                                                std::string_view html) {
  if (status != 401 && status != 403) return std::nullopt;
  auto og = extract_og_meta(html);
  auto title = extract_title(html);
  const bool looks_like_content =
      !og.values.empty() || (title && !title->empty());
  if (!looks_like_content) return std::nullopt;
  return AuditFinding{AuditCheck::AccessNotAllowedPage, Severity::Fail,
                      "human-readable page served with status " +
                          std::to_string(status)};
}

HttpPageFetcher::HttpPageFetcher(int timeout_ms, int max_redirects,
                                 std::string user_agent)
    : timeout_ms_(timeout_ms),
      max_redirects_(max_redirects),
      user_agent_(std::move(user_agent)) {}

FetchedPage HttpPageFetcher::fetch(const NormalizedUrl& url) {
  FetchedPage page;
  NormalizedUrl current = url;
  page.chain.push_back(current);

  for (int hop_count = 0; hop_count <= max_redirects_; ++hop_count) {
    FetchOptions opts;
    opts.timeout_ms = timeout_ms_;
    opts.user_agent = user_agent_;
    auto hop = fetch_once(current, opts);
    if (!hop.ok) {
      page.error = hop.error;
      return page;
    }
    if (hop.status >= 300 && hop.status < 400 && hop.location) {
      auto next = resolve_location(current, *hop.location);
      if (!next) {
        page.error = "unresolvable Location header";
        return page;
      }
      current = *next;
      page.chain.push_back(current);
      // A repeated URL ends the walk; the chain itself carries the loop.
      auto first = std::find(page.chain.begin(), page.chain.end() - 1, current);
      if (first != page.chain.end() - 1) {
        page.error = "redirect loop";
        return page;
      }
      continue;
    }
    page.ok = true;
    page.status = hop.status;
    page.content_type = hop.content_type;
    page.body = std::move(hop.body);
    return page;
  }
  page.error = "redirect limit exhausted";
  return page;
}

AuditReport audit_page(const NormalizedUrl& url, PageFetcher& fetch,
                       const AuditConfig& config) {
  AuditReport report;
  report.url = url;

  auto page = fetch.fetch(url);

  if (auto f = check_redirect_chain(page.chain, config.redirect_limit))
    report.findings.push_back(*f);

  if (!page.ok) {
    report.findings.push_back(
        {AuditCheck::NotMachineReadable, Severity::Fail,
         "fetch failed: " + (page.error.empty() ? "unknown" : page.error)});
    return report;
  }

  const NormalizedUrl& final_url = page.chain.back();
  auto og = extract_og_meta(page.body);
  auto title = extract_title(page.body);

  if (auto f = check_url_injection(final_url, config.injection_patterns))
    report.findings.push_back(*f);

  if (auto f = check_access_status(page.status, page.body)) {
    report.findings.push_back(*f);
  } else {
    // Machine readability: a 2xx HTML/XML page whose metadata is
    // extractable without running scripts.
    std::string reason;
    if (page.status < 200 || page.status >= 300)
      reason = "status " + std::to_string(page.status);
    else if (!html_like_content_type(page.content_type))
      reason = "content-type is " +
               (page.content_type.empty() ? "missing" : page.content_type);
    else if (page.body.empty())
      reason = "empty body";
    else if (og.values.empty() && (!title || title->empty()))
      reason = "no og tags or title extractable";
    if (!reason.empty())
      report.findings.push_back(
          {AuditCheck::NotMachineReadable, Severity::Fail, reason});
  }
  if (page.status >= 200 && page.status < 300) {
    auto og_url_it = og.values.find("og:url");
    if (og_url_it == og.values.end()) {
      report.findings.push_back({AuditCheck::MissingOgUrl, Severity::Warn,
                                 "no og:url meta tag on the landing page"});
    } else {
      std::string detail;
      if (std::find(og.duplicated_properties.begin(),
                    og.duplicated_properties.end(),
                    "og:url") != og.duplicated_properties.end())
        detail = "og:url declared more than once; using the first; ";

      auto canonical = try_parse_url(og_url_it->second);
      if (!canonical) {
        report.findings.push_back(
            {AuditCheck::InconsistentOgUrl, Severity::Fail,
             detail + "og:url is not a parseable URL: " + og_url_it->second});
      } else if (*canonical != final_url) {
        // Canonical must confirm itself: fetch it and compare its og:url.
        auto second = fetch.fetch(*canonical);
        bool consistent = false;
        if (second.ok) {
          auto og2 = extract_og_meta(second.body);
          auto it2 = og2.values.find("og:url");
          if (it2 != og2.values.end()) {
            auto canonical2 = try_parse_url(it2->second);
            consistent = canonical2 && *canonical2 == *canonical;
          }
        }
        if (!consistent)
          report.findings.push_back(
              {AuditCheck::InconsistentOgUrl, Severity::Fail,
               detail + "og:url " + canonical->str() +
                   " does not confirm itself as canonical"});
        else if (!detail.empty())
          report.findings.push_back(
              {AuditCheck::InconsistentOgUrl, Severity::Warn, detail});
      } else if (!detail.empty()) {
        report.findings.push_back(
            {AuditCheck::InconsistentOgUrl, Severity::Warn, detail});
      }
    }
  }

  return report;
}

}  // namespace ogr

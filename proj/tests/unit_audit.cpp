#include <doctest.h>

#include <map>

#include "ogr/audit.hpp"
#include "support/helpers.hpp"

using namespace ogr;
using namespace ogr::test;

namespace {

// serves canned pages without a socket
class ScriptedFetcher : public PageFetcher {
 public:
  struct Page {
    std::vector<std::string> chain;
    int status = 200;
    std::string content_type = "text/html";
    std::string body;
    bool fail = false;
  };

  std::map<std::string, Page> pages;

  FetchedPage fetch(const NormalizedUrl& u) override {
    FetchedPage out;
    auto it = pages.find(u.str());
    if (it == pages.end()) {
      out.chain = {u};
      out.error = "no such page";
      return out;
    }
    const Page& p = it->second;
    if (p.chain.empty())
      out.chain = {u};
    else
      for (const auto& link : p.chain) out.chain.push_back(url(link));
    if (p.fail) {
      out.error = "scripted failure";
      return out;
    }
    out.ok = true;
    out.status = p.status;
    out.content_type = p.content_type;
    out.body = p.body;
    return out;
  }
};

std::vector<NormalizedUrl> chain_of(int redirects) {
  std::vector<NormalizedUrl> chain;
  for (int i = 0; i <= redirects; ++i)
    chain.push_back(url("https://pub.org/hop" + std::to_string(i)));
  return chain;
}

bool has_check(const AuditReport& r, AuditCheck c) {
  for (const auto& f : r.findings)
    if (f.check == c) return true;
  return false;
}

const std::string kArticleHtml =
    "<html><head><title>An article</title>"
    "<meta property=\"og:url\" content=\"https://pub.org/a\"/>"
    "</head><body>text</body></html>";

}  // namespace

TEST_CASE("redirect chains: five is fine, six is not") {
  CHECK_FALSE(check_redirect_chain(chain_of(5)).has_value());
  auto f = check_redirect_chain(chain_of(6));
  REQUIRE(f.has_value());
  CHECK(f->check == AuditCheck::RedirectChainTooLong);
  CHECK(f->severity == Severity::Fail);
  CHECK_FALSE(check_redirect_chain(chain_of(0)).has_value());
}

TEST_CASE("a repeated url in the chain reads as a loop") {
  std::vector<NormalizedUrl> chain = {url("https://a.org/1"),
                                      url("https://a.org/2"),
                                      url("https://a.org/1")};
  auto f = check_redirect_chain(chain);
  REQUIRE(f.has_value());
  CHECK(f->check == AuditCheck::RedirectChainTooLong);
  CHECK(f->detail.find("loop") != std::string::npos);
}

TEST_CASE("og meta extraction is tolerant of markup styles") {
  auto meta = extract_og_meta(
      "<html><head>"
      "<meta property=\"og:url\" content=\"https://pub.org/a\"/>"
      "<META CONTENT='obj' PROPERTY='og:type'>"
      "<meta   property = og:title   content = short >"
      "<meta name=\"author\" content=\"someone\">"
      "</head></html>");
  CHECK(meta.values.at("og:url") == "https://pub.org/a");
  CHECK(meta.values.at("og:type") == "obj");
  CHECK(meta.values.at("og:title") == "short");
  CHECK(meta.values.size() == 3);
  CHECK(meta.duplicated_properties.empty());
}

TEST_CASE("og meta: first declaration wins, duplicates are reported") {
  auto meta = extract_og_meta(
      "<meta property=\"og:url\" content=\"first\">"
      "<meta property=\"og:url\" content=\"second\">");
  CHECK(meta.values.at("og:url") == "first");
  CHECK(meta.duplicated_properties ==
        std::vector<std::string>{"og:url"});
}

TEST_CASE("og meta extraction on non-html input is empty") {
  CHECK(extract_og_meta("just words").values.empty());
  CHECK(extract_og_meta("").values.empty());
  CHECK(extract_og_meta(std::string_view("\x00\xff binary", 10)).values.empty());
}

TEST_CASE("og meta extraction is invariant under attribute permutation") {
  Rand rand(99);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> attrs = {
        "property=\"og:url\"", "content=\"https://pub.org/x\"",
        "data-extra='1'"};
    for (std::size_t i = attrs.size(); i > 1; --i)
      std::swap(attrs[i - 1], attrs[rand.pick(i)]);
    std::string spaces(1 + rand.pick(3), ' ');
    std::string tag = "<meta";
    for (const auto& a : attrs) tag += spaces + a;
    tag += rand.pick(2) ? "/>" : ">";
    auto meta = extract_og_meta("<html>" + tag + "</html>");
    REQUIRE(meta.values.count("og:url") == 1);
    CHECK(meta.values.at("og:url") == "https://pub.org/x");
  }
}

TEST_CASE("url injection patterns match on word boundaries") {
  const AuditConfig config;
  auto hit = [&](const std::string& u) {
    return check_url_injection(url(u), config.injection_patterns).has_value();
  };

  CHECK(hit("https://pub.org/article?error=SessionExpired"));
  CHECK(hit("https://pub.org/article?errorcode=701"));
  CHECK(hit("https://pub.org/a?status=404"));
  CHECK(hit("https://pub.org/a?status=500"));
  CHECK(hit("https://pub.org/login?back=/article/1"));
  CHECK(hit("https://pub.org/Error/NotFound"));

  CHECK_FALSE(hit("https://pub.org/article?id=42"));
  CHECK_FALSE(hit("https://pub.org/errors-in-measurement-theory"));
  CHECK_FALSE(hit("https://pub.org/terrors/page"));
  CHECK_FALSE(hit("https://pub.org/statuses/4"));
  CHECK_FALSE(hit("https://pub.org/a?errorcodes=1"));  // "errorcode=" unmatched
}

TEST_CASE("access status flags human-readable denials only") {
  auto f = check_access_status(403, kArticleHtml);
  REQUIRE(f.has_value());
  CHECK(f->check == AuditCheck::AccessNotAllowedPage);
  CHECK(f->severity == Severity::Fail);

  CHECK(check_access_status(401, kArticleHtml).has_value());
  CHECK_FALSE(check_access_status(200, kArticleHtml).has_value());
  CHECK_FALSE(check_access_status(403, "").has_value());
  CHECK_FALSE(check_access_status(403, "forbidden").has_value());
}

TEST_CASE("audit_page: clean page has no findings") {
  ScriptedFetcher fetcher;
  fetcher.pages["https://pub.org/a"] = {{}, 200, "text/html", kArticleHtml};
  auto report = audit_page(url("https://pub.org/a"), fetcher);
  CHECK(report.findings.empty());
}

TEST_CASE("audit_page: unreachable page is not machine readable") {
  ScriptedFetcher fetcher;
  auto report = audit_page(url("https://pub.org/missing"), fetcher);
  REQUIRE(report.findings.size() == 1);
  CHECK(report.findings[0].check == AuditCheck::NotMachineReadable);
  CHECK(report.findings[0].severity == Severity::Fail);
}

TEST_CASE("audit_page: missing og:url is a warning") {
  ScriptedFetcher fetcher;
  fetcher.pages["https://pub.org/bare"] = {
      {}, 200, "text/html", "<html><head><title>t</title></head></html>"};
  auto report = audit_page(url("https://pub.org/bare"), fetcher);
  REQUIRE(report.findings.size() == 1);
  CHECK(report.findings[0].check == AuditCheck::MissingOgUrl);
  CHECK(report.findings[0].severity == Severity::Warn);
}

TEST_CASE("audit_page: og:url must confirm itself on a second fetch") {
  ScriptedFetcher fetcher;
  // landing page declares /canonical; /canonical declares something else
  fetcher.pages["https://pub.org/land"] = {
      {},
      200,
      "text/html",
      "<html><head><title>t</title><meta property=\"og:url\" "
      "content=\"https://pub.org/canonical\"></head></html>"};
  fetcher.pages["https://pub.org/canonical"] = {
      {},
      200,
      "text/html",
      "<html><head><title>t</title><meta property=\"og:url\" "
      "content=\"https://pub.org/other\"></head></html>"};
  auto report = audit_page(url("https://pub.org/land"), fetcher);
  CHECK(has_check(report, AuditCheck::InconsistentOgUrl));

  // and a canonical that does confirm itself passes
  fetcher.pages["https://pub.org/canonical"].body =
      "<html><head><title>t</title><meta property=\"og:url\" "
      "content=\"https://pub.org/canonical\"></head></html>";
  report = audit_page(url("https://pub.org/land"), fetcher);
  CHECK_FALSE(has_check(report, AuditCheck::InconsistentOgUrl));
}

TEST_CASE("audit_page: 403 with a content page is flagged") {
  ScriptedFetcher fetcher;
  fetcher.pages["https://pub.org/denied"] = {{}, 403, "text/html",
                                             kArticleHtml};
  auto report = audit_page(url("https://pub.org/denied"), fetcher);
  CHECK(has_check(report, AuditCheck::AccessNotAllowedPage));
}

TEST_CASE("audit_page: injected final url is reported") {
  ScriptedFetcher fetcher;
  fetcher.pages["https://pub.org/go"] = {
      {"https://pub.org/go", "https://pub.org/view?error=NoSession"},
      200,
      "text/html",
      kArticleHtml};
  fetcher.pages["https://pub.org/view?error=NoSession"] =
      fetcher.pages["https://pub.org/go"];
  auto report = audit_page(url("https://pub.org/go"), fetcher);
  CHECK(has_check(report, AuditCheck::UrlInjectionSuspected));
}

TEST_CASE("audit_page over a live server honors the redirect boundary") {
  ScopedServer s;
  s.server().Get(R"(/chain/(\d+)/(\d+))", [](const httplib::Request& req,
                                             httplib::Response& res) {
    int remaining = std::stoi(req.matches[1].str());
    int id = std::stoi(req.matches[2].str());
    if (remaining > 0) {
      res.status = 302;
      res.set_header("Location", "/chain/" + std::to_string(remaining - 1) +
                                     "/" + std::to_string(id));
      return;
    }
    res.status = 200;
    res.set_content(kArticleHtml, "text/html");
  });
  s.start();

  HttpPageFetcher fetcher(2000);

  auto five = audit_page(url(s.base() + "/chain/5/1"), fetcher);
  CHECK_FALSE(has_check(five, AuditCheck::RedirectChainTooLong));

  auto six = audit_page(url(s.base() + "/chain/6/2"), fetcher);
  CHECK(has_check(six, AuditCheck::RedirectChainTooLong));
  s.stop();
}

TEST_CASE("audit_page is idempotent against a static page") {
  ScriptedFetcher fetcher;
  fetcher.pages["https://pub.org/a"] = {{}, 200, "text/html", kArticleHtml};
  auto first = audit_page(url("https://pub.org/a"), fetcher);
  auto second = audit_page(url("https://pub.org/a"), fetcher);
  CHECK(first == second);
}

TEST_CASE("injection corpus: benign vs injected hand-checked set") {
  const AuditConfig config;
  const std::vector<std::string> injected = {
      "https://pub.org/a?error=x",
      "https://pub.org/b?ErrorCode=44",
      "https://pub.org/c?status=403",
      "https://pub.org/d/login?back=/x",
      "https://pub.org/e?next=error",
  };
  const std::vector<std::string> benign = {
      "https://pub.org/errors-in-measurement-theory",
      "https://pub.org/article?id=42",
      "https://pub.org/catalog/statuses",
      "https://pub.org/terror/page",
      "https://pub.org/a?refstatus=4",
  };
  for (const auto& u : injected)
    CHECK_MESSAGE(
        check_url_injection(url(u), config.injection_patterns).has_value(), u);
  for (const auto& u : benign)
    CHECK_MESSAGE(
        !check_url_injection(url(u), config.injection_patterns).has_value(), u);
}

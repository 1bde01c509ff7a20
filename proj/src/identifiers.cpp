#include "ogr/identifiers.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "ogr/errors.hpp"

namespace ogr {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

// prefix shape: "10." then at least four digits, optionally more
// dot-separated digit runs (sub-registrants).
bool valid_prefix(std::string_view p) {
  if (!p.starts_with("10.")) return false;
  p.remove_prefix(3);
  std::size_t digits = 0;
  while (digits < p.size() &&
         std::isdigit(static_cast<unsigned char>(p[digits])))
    ++digits;
  if (digits < 4) return false;
  p.remove_prefix(digits);
  while (!p.empty()) {
    if (p.front() != '.') return false;
    p.remove_prefix(1);
    std::size_t run = 0;
    while (run < p.size() && std::isdigit(static_cast<unsigned char>(p[run])))
      ++run;
    if (run == 0) return false;
    p.remove_prefix(run);
  }
  return true;
}

// The suffix is opaque but must survive verbatim inside a proxy URL, so
// whitespace, '#' and control bytes are rejected.
bool valid_suffix(std::string_view s) {
  if (s.empty()) return false;
  for (unsigned char c : s) {
    if (c <= 0x20 || c == 0x7f || c == '#') return false;
  }
  return true;
}

}  // namespace

const char* to_string(Scheme s) {
  return s == Scheme::Https ? "https" : "http";
}

std::uint16_t default_port(Scheme s) { return s == Scheme::Https ? 443 : 80; }

std::string NormalizedUrl::str() const {
  std::string out = to_string(scheme);
  out += "://";
  out += host;
  if (port) {
    out += ':';
    out += std::to_string(*port);
  }
  out += path;
  if (query) {
    out += '?';
    out += *query;
  }
  return out;
}

std::optional<NormalizedUrl> try_parse_url(std::string_view raw) {
  raw = trim(raw);
  std::size_t scheme_end = raw.find("://");
  if (scheme_end == std::string_view::npos || scheme_end == 0)
    return std::nullopt;

  std::string scheme_str = lowercase(raw.substr(0, scheme_end));
  Scheme scheme;
  if (scheme_str == "http") {
    scheme = Scheme::Http;
  } else if (scheme_str == "https") {
    scheme = Scheme::Https;
  } else {
    return std::nullopt;
  }

  std::string_view rest = raw.substr(scheme_end + 3);
  if (rest.empty()) return std::nullopt;

  std::size_t authority_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, authority_end);
  std::string_view tail = authority_end == std::string_view::npos
                              ? std::string_view{}
                              : rest.substr(authority_end);

  if (authority.empty()) return std::nullopt;
  // Userinfo never appears on landing pages; treat it as malformed rather
  // than silently folding credentials into the host.
  if (authority.find('@') != std::string_view::npos) return std::nullopt;

  std::string_view host_part = authority;
  std::string_view port_part;
  bool has_port = false;
  if (authority.front() == '[') {
    // bracketed IPv6 literal
    std::size_t close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    host_part = authority.substr(0, close + 1);
    std::string_view after = authority.substr(close + 1);
    if (!after.empty()) {
      if (after.front() != ':') return std::nullopt;
      port_part = after.substr(1);
      has_port = true;
    }
  } else if (std::size_t colon = authority.rfind(':');
             colon != std::string_view::npos) {
    host_part = authority.substr(0, colon);
    port_part = authority.substr(colon + 1);
    has_port = true;
  }

  std::optional<std::uint16_t> port;
  if (has_port) {
    if (port_part.empty()) return std::nullopt;
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(
        port_part.data(), port_part.data() + port_part.size(), value);
    if (ec != std::errc{} || ptr != port_part.data() + port_part.size() ||
        value == 0 || value > 65535)
      return std::nullopt;
    port = static_cast<std::uint16_t>(value);
  }

  if (host_part.empty()) return std::nullopt;
  for (unsigned char c : host_part) {
    if (c <= 0x20 || c == 0x7f) return std::nullopt;
  }

  NormalizedUrl url;
  url.scheme = scheme;
  url.host = lowercase(host_part);
  if (port && *port != default_port(scheme)) url.port = port;

  // split tail into path / query, dropping any fragment
  std::size_t frag = tail.find('#');
  if (frag != std::string_view::npos) tail = tail.substr(0, frag);
  std::size_t qmark = tail.find('?');
  std::string_view path = qmark == std::string_view::npos
                              ? tail
                              : tail.substr(0, qmark);
  url.path = path.empty() ? "/" : std::string(path);
  if (qmark != std::string_view::npos)
    url.query = std::string(tail.substr(qmark + 1));
  return url;
}

NormalizedUrl normalize_url(std::string_view raw) {
  auto url = try_parse_url(raw);
  if (!url) throw MalformedUrl("malformed URL: " + std::string(raw));
  return *url;
}

NormalizedUrl flip_protocol(const NormalizedUrl& u) {
  NormalizedUrl out = u;
  out.scheme = u.scheme == Scheme::Http ? Scheme::Https : Scheme::Http;
  if (out.port && *out.port == default_port(out.scheme)) out.port.reset();
  return out;
}

std::optional<Doi> try_parse_doi(std::string_view raw) {
  raw = trim(raw);
  std::string from_url;
  if (iequals_prefix(raw, "doi:")) {
    raw = trim(raw.substr(4));
  } else if (raw.find("://") != std::string_view::npos) {
    auto url = try_parse_url(raw);
    if (!url) return std::nullopt;
    if (url->host != "doi.org" && url->host != "dx.doi.org" &&
        url->host != "www.doi.org")
      return std::nullopt;
    std::string_view path = url->path;
    if (path.empty() || path.front() != '/') return std::nullopt;
    // Keep any query; a '?' inside a DOI suffix parses as a query part.
    from_url.assign(path.substr(1));
    if (url->query) {
      from_url += '?';
      from_url += *url->query;
    }
    raw = from_url;
  }

  std::size_t slash = raw.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  std::string_view prefix = raw.substr(0, slash);
  std::string_view suffix = raw.substr(slash + 1);
  if (!valid_prefix(prefix) || !valid_suffix(suffix)) return std::nullopt;
  return Doi{lowercase(prefix), lowercase(suffix)};
}

Doi parse_doi(std::string_view raw) {
  auto doi = try_parse_doi(raw);
  if (!doi) throw MalformedDoi("malformed DOI: " + std::string(raw));
  return *doi;
}

std::pair<NormalizedUrl, NormalizedUrl> doi_proxy_urls(const Doi& doi) {
  NormalizedUrl current = normalize_url("https://doi.org/" + doi.str());
  NormalizedUrl legacy = normalize_url("http://dx.doi.org/" + doi.str());
  return {current, legacy};
}

VariantSet make_variant_set(const Doi& doi,
                            std::optional<NormalizedUrl> resolved) {
  VariantSet vs;
  auto [current, legacy] = doi_proxy_urls(doi);
  vs.doi_org = std::move(current);
  vs.dx_doi_org = std::move(legacy);
  if (resolved) {
    vs.opposite_protocol = flip_protocol(*resolved);
    vs.resolved = std::move(resolved);
  }
  return vs;
}

std::optional<NormalizedUrl> VariantSet::slot(int variant) const {
  switch (variant) {
    case 1: return resolved;
    case 2: return opposite_protocol;
    case 3: return doi_org;
    case 4: return dx_doi_org;
    default: return std::nullopt;
  }
}

}  // namespace ogr

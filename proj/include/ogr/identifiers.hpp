#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace ogr {

enum class Scheme { Http, Https };

const char* to_string(Scheme s);
std::uint16_t default_port(Scheme s);

/// A DOI split at the first slash. Stored lowercase so that equality is
/// case-insensitive; the suffix is otherwise opaque.
struct Doi {
  std::string prefix;  // "10." followed by the registrant code
  std::string suffix;

  std::string str() const { return prefix + "/" + suffix; }

  auto operator<=>(const Doi&) const = default;
  bool operator==(const Doi&) const = default;
};

/// A parsed http(s) URL in canonical form: lowercase scheme and host,
/// default port elided, fragment dropped. Path and query bytes are kept
/// exactly as given: trailing slashes and query order can distinguish
/// articles, so they are never touched.
struct NormalizedUrl {
  Scheme scheme = Scheme::Http;
  std::string host;
  std::optional<std::uint16_t> port;
  std::string path = "/";
  std::optional<std::string> query;

  std::string str() const;

  auto operator<=>(const NormalizedUrl&) const = default;
  bool operator==(const NormalizedUrl&) const = default;
};

/// The four query URLs derived from one DOI. Variants 3 and 4 always
/// exist; 1 and 2 only when the DOI resolved to a landing page.
struct VariantSet {
  std::optional<NormalizedUrl> resolved;           // variant 1
  std::optional<NormalizedUrl> opposite_protocol;  // variant 2
  NormalizedUrl doi_org;                           // variant 3
  NormalizedUrl dx_doi_org;                        // variant 4

  // variant is 1-based
  std::optional<NormalizedUrl> slot(int variant) const;

  bool operator==(const VariantSet&) const = default;
};

/// Accepts bare DOIs, "doi:" prefixes, and doi.org / dx.doi.org URLs.
/// Returns the lowercased bare DOI; nullopt when the 10.<digits>/<suffix>
/// shape is absent.
std::optional<Doi> try_parse_doi(std::string_view raw);
Doi parse_doi(std::string_view raw);  // throws MalformedDoi

std::optional<NormalizedUrl> try_parse_url(std::string_view raw);
NormalizedUrl normalize_url(std::string_view raw);  // throws MalformedUrl

/// Toggles http <-> https, leaving everything else alone. A stored port
/// equal to the new scheme's default is elided to keep the value canonical.
NormalizedUrl flip_protocol(const NormalizedUrl& u);

/// (https://doi.org/[doi], http://dx.doi.org/[doi]) with the suffix verbatim.
std::pair<NormalizedUrl, NormalizedUrl> doi_proxy_urls(const Doi& doi);

VariantSet make_variant_set(const Doi& doi,
                            std::optional<NormalizedUrl> resolved);

}  // namespace ogr

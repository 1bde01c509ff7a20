#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "ogr/audit.hpp"
#include "ogr/errors.hpp"
#include "ogr/fixtures.hpp"
#include "ogr/graph.hpp"
#include "ogr/identifiers.hpp"
#include "ogr/reconcile.hpp"
#include "ogr/reporting.hpp"
#include "ogr/resolver.hpp"
#include "ogr/version.hpp"

namespace py = pybind11;
using namespace ogr;

namespace {

VariantResponses responses_from_slots(
    const std::string& doi,
    const std::vector<std::optional<py::dict>>& slots) {
  if (slots.size() > 4) throw std::invalid_argument("at most 4 slots");
  VariantResponses vr;
  vr.doi = parse_doi(doi);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) continue;
    GraphResponse r;
    r.queried_url = normalize_url("https://doi.org/" + doi);
    const py::dict& d = *slots[i];
    if (d.contains("url"))
      r.queried_url = normalize_url(d["url"].cast<std::string>());
    if (d.contains("ob_id") && !d["ob_id"].is_none())
      r.ob_id = d["ob_id"].cast<std::string>();
    if (d.contains("engagement") && !d["engagement"].is_none())
      r.engagement = d["engagement"].cast<Engagement>();
    vr.slots[i] = std::move(r);
  }
  return vr;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Engagement collection and reconciliation for DOI-identified articles";
  m.attr("__version__") = kVersion;

  py::register_exception<MalformedDoi>(m, "MalformedDoi", PyExc_ValueError);
  py::register_exception<MalformedUrl>(m, "MalformedUrl", PyExc_ValueError);
  py::register_exception<InconsistentSpec>(m, "InconsistentSpec",
                                           PyExc_ValueError);
  py::register_exception<AmbiguousEngagement>(m, "AmbiguousEngagement",
                                              PyExc_ValueError);

  py::class_<Doi>(m, "Doi")
      .def(py::init([](const std::string& raw) { return parse_doi(raw); }))
      .def_readonly("prefix", &Doi::prefix)
      .def_readonly("suffix", &Doi::suffix)
      .def("__str__", &Doi::str)
      .def("__repr__",
           [](const Doi& d) { return "Doi('" + d.str() + "')"; })
      .def("__eq__", [](const Doi& a, const Doi& b) { return a == b; })
      .def("__hash__",
           [](const Doi& d) { return py::hash(py::str(d.str())); });

  py::class_<NormalizedUrl>(m, "NormalizedUrl")
      .def(py::init([](const std::string& raw) { return normalize_url(raw); }))
      .def_property_readonly(
          "scheme", [](const NormalizedUrl& u) { return to_string(u.scheme); })
      .def_readonly("host", &NormalizedUrl::host)
      .def_readonly("port", &NormalizedUrl::port)
      .def_readonly("path", &NormalizedUrl::path)
      .def_readonly("query", &NormalizedUrl::query)
      .def("__str__", &NormalizedUrl::str)
      .def("__repr__",
           [](const NormalizedUrl& u) {
             return "NormalizedUrl('" + u.str() + "')";
           })
      .def("__eq__", [](const NormalizedUrl& a, const NormalizedUrl& b) {
        return a == b;
      });

  py::class_<VariantSet>(m, "VariantSet")
      .def_readonly("resolved", &VariantSet::resolved)
      .def_readonly("opposite_protocol", &VariantSet::opposite_protocol)
      .def_readonly("doi_org", &VariantSet::doi_org)
      .def_readonly("dx_doi_org", &VariantSet::dx_doi_org)
      .def("slot", &VariantSet::slot, py::arg("variant"));

  py::class_<Engagement>(m, "Engagement")
      .def(py::init([](std::uint64_t share, std::uint64_t reaction,
                       std::uint64_t comment, std::uint64_t plugin) {
             return Engagement{share, reaction, comment, plugin};
           }),
           py::arg("share_count") = 0, py::arg("reaction_count") = 0,
           py::arg("comment_count") = 0, py::arg("comment_plugin_count") = 0)
      .def_readwrite("share_count", &Engagement::share_count)
      .def_readwrite("reaction_count", &Engagement::reaction_count)
      .def_readwrite("comment_count", &Engagement::comment_count)
      .def_readwrite("comment_plugin_count", &Engagement::comment_plugin_count)
      .def("total", &Engagement::total)
      .def("__eq__",
           [](const Engagement& a, const Engagement& b) { return a == b; })
      .def("__repr__", [](const Engagement& e) {
        return "Engagement(" + std::to_string(e.share_count) + ", " +
               std::to_string(e.reaction_count) + ", " +
               std::to_string(e.comment_count) + ", " +
               std::to_string(e.comment_plugin_count) + ")";
      });

  py::class_<CaseClassification>(m, "CaseClassification")
      .def_property_readonly(
          "doi", [](const CaseClassification& c) { return c.doi.str(); })
      .def_readonly("variants_with_id", &CaseClassification::variants_with_id)
      .def_readonly("anomalous_engagement_without_id",
                    &CaseClassification::anomalous_engagement_without_id)
      .def_readonly("has_not_matching_ids",
                    &CaseClassification::has_not_matching_ids)
      .def_readonly("has_matching_ids_matching_engagement",
                    &CaseClassification::has_matching_ids_matching_engagement)
      .def_readonly(
          "has_matching_ids_not_matching_engagement",
          &CaseClassification::has_matching_ids_not_matching_engagement);

  py::class_<ArticleEngagement>(m, "ArticleEngagement")
      .def_property_readonly(
          "doi", [](const ArticleEngagement& a) { return a.doi.str(); })
      .def_readonly("total", &ArticleEngagement::total)
      .def_readonly("per_object", &ArticleEngagement::per_object)
      .def_readonly("anonymous", &ArticleEngagement::anonymous)
      .def_readonly("ambiguous", &ArticleEngagement::ambiguous)
      .def_readonly("collision_excluded",
                    &ArticleEngagement::collision_excluded);

  m.def("parse_doi", [](const std::string& raw) { return parse_doi(raw); },
        py::arg("raw"), "Parse a DOI from bare, doi:, or proxy-URL form");
  m.def("normalize_url",
        [](const std::string& raw) { return normalize_url(raw); },
        py::arg("raw"));
  m.def("flip_protocol", &flip_protocol, py::arg("url"));
  m.def("doi_proxy_urls", &doi_proxy_urls, py::arg("doi"));
  m.def("variant_set", &make_variant_set, py::arg("doi"),
        py::arg("resolved") = std::nullopt);

  m.def("parse_graph_payload", [](const py::bytes& body) {
    auto parsed = parse_graph_payload(std::string(body));
    if (parsed.malformed)
      throw std::invalid_argument("malformed graph payload");
    return py::make_tuple(parsed.ob_id, parsed.engagement);
  });

  m.def(
      "classify_article",
      [](const std::string& doi,
         const std::vector<std::optional<py::dict>>& slots) {
        return classify_article(responses_from_slots(doi, slots));
      },
      py::arg("doi"), py::arg("slots"),
      "Classify an article from up to four slot dicts with optional "
      "'ob_id' and 'engagement' keys");

  m.def(
      "aggregate_engagement",
      [](const std::string& doi,
         const std::vector<std::optional<py::dict>>& slots,
         const std::string& policy) {
        auto p = conflict_policy_from_string(policy);
        if (!p) throw std::invalid_argument("policy: max|min|first|error");
        return aggregate_engagement(responses_from_slots(doi, slots), *p);
      },
      py::arg("doi"), py::arg("slots"), py::arg("policy") = "max");

  m.def(
      "detect_object_collisions",
      [](const std::map<std::string, std::vector<std::optional<py::dict>>>&
             articles) {
        std::vector<VariantResponses> all;
        for (const auto& [doi, slots] : articles)
          all.push_back(responses_from_slots(doi, slots));
        py::list out;
        for (const auto& g : detect_object_collisions(all).groups) {
          py::dict d;
          d["ob_id"] = g.ob_id;
          py::list dois;
          for (const auto& doi : g.dois) dois.append(doi.str());
          d["dois"] = std::move(dois);
          out.append(std::move(d));
        }
        return out;
      },
      py::arg("articles"),
      "Object IDs shared by two or more DOIs, largest groups first");

  m.def("extract_og_meta", [](const std::string& html) {
    auto meta = extract_og_meta(html);
    return py::make_tuple(meta.values, meta.duplicated_properties);
  });
  m.def(
      "check_url_injection",
      [](const std::string& url, std::vector<std::string> patterns) {
        if (patterns.empty()) patterns = AuditConfig{}.injection_patterns;
        auto finding = check_url_injection(normalize_url(url), patterns);
        return finding.has_value();
      },
      py::arg("url"), py::arg("patterns") = std::vector<std::string>{});
  m.def(
      "check_redirect_chain",
      [](const std::vector<std::string>& chain, int redirect_limit) {
        std::vector<NormalizedUrl> parsed;
        for (const auto& u : chain) parsed.push_back(normalize_url(u));
        auto finding = check_redirect_chain(parsed, redirect_limit);
        return finding ? std::optional(finding->detail) : std::nullopt;
      },
      py::arg("chain"), py::arg("redirect_limit") = 5);

  m.def(
      "generate_fixture",
      [](const std::string& spec_json, std::uint64_t seed) {
        auto spec = FixtureSpec::from_json(nlohmann::json::parse(spec_json));
        return generate_fixture(spec, seed).to_json().dump();
      },
      py::arg("spec_json"), py::arg("seed") = 1,
      "Generate a deterministic fixture; returns its JSON");
  m.def("reference_fixture_spec",
        [] { return FixtureSpec::reference().to_json().dump(); });
}

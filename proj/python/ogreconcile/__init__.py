"""Collect and reconcile Open Graph engagement counts for DOI-identified articles.

The heavy lifting lives in the C++ extension; this package re-exports the
operations most useful from Python. The batch pipeline (resolve / collect /
reconcile / audit) is driven by the `ogr` command line tool.
"""

from ._core import (
    AmbiguousEngagement,
    ArticleEngagement,
    CaseClassification,
    Doi,
    Engagement,
    InconsistentSpec,
    MalformedDoi,
    MalformedUrl,
    NormalizedUrl,
    VariantSet,
    __version__,
    aggregate_engagement,
    check_redirect_chain,
    check_url_injection,
    classify_article,
    detect_object_collisions,
    doi_proxy_urls,
    extract_og_meta,
    flip_protocol,
    generate_fixture,
    normalize_url,
    reference_fixture_spec,
    parse_doi,
    parse_graph_payload,
    variant_set,
)

__all__ = [
    "AmbiguousEngagement",
    "ArticleEngagement",
    "CaseClassification",
    "Doi",
    "Engagement",
    "InconsistentSpec",
    "MalformedDoi",
    "MalformedUrl",
    "NormalizedUrl",
    "VariantSet",
    "__version__",
    "aggregate_engagement",
    "check_redirect_chain",
    "check_url_injection",
    "classify_article",
    "detect_object_collisions",
    "doi_proxy_urls",
    "extract_og_meta",
    "flip_protocol",
    "generate_fixture",
    "normalize_url",
    "reference_fixture_spec",
    "parse_doi",
    "parse_graph_payload",
    "variant_set",
]

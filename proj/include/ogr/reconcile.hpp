#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ogr/graph.hpp"
#include "ogr/resolver.hpp"

namespace ogr {

/// Placement of one article in the response-case taxonomy. The three
/// pairwise flags are not mutually exclusive: an article with three IDs can
/// exhibit matching and non-matching pairs at once and is counted under
/// every column that applies.
struct CaseClassification {
  Doi doi;
  int variants_with_id = 0;
  bool anomalous_engagement_without_id = false;
  bool has_not_matching_ids = false;
  bool has_matching_ids_matching_engagement = false;
  bool has_matching_ids_not_matching_engagement = false;

  bool operator==(const CaseClassification&) const = default;
};

enum class ConflictPolicy { MaxPerField, Min, First, Error };

const char* to_string(ConflictPolicy p);
std::optional<ConflictPolicy> conflict_policy_from_string(std::string_view s);

struct ArticleEngagement {
  Doi doi;
  Engagement total;
  std::map<std::string, Engagement> per_object;
  // Engagement reported with no object ID, aggregated separately.
  std::optional<Engagement> anonymous;
  bool ambiguous = false;
  bool collision_excluded = false;

  bool operator==(const ArticleEngagement&) const = default;
};

struct CollisionGroup {
  std::string ob_id;
  std::vector<Doi> dois;  // sorted, size >= 2

  bool operator==(const CollisionGroup&) const = default;
};

struct CollisionReport {
  std::vector<CollisionGroup> groups;  // by descending size then ob_id

  std::vector<Doi> article_union() const;

  bool operator==(const CollisionReport&) const = default;
};

struct ProblemSummary {
  // Articles whose variants agree on an ID but disagree on engagement.
  std::uint64_t case2_residue = 0;
  std::uint64_t collision_articles = 0;
  std::uint64_t engaged_collision_articles = 0;
  std::uint64_t non_engaged_collision_articles = 0;
  std::uint64_t union_case23 = 0;  // case2_residue ∪ engaged collisions
  std::uint64_t failed_resolutions = 0;
  std::uint64_t grand_total = 0;   // union + failed + non-engaged collisions
  std::uint64_t engaged_denominator = 0;
  std::uint64_t total_denominator = 0;
  double union_pct = 0;  // of engaged_denominator
  double grand_pct = 0;  // of total_denominator

  bool operator==(const ProblemSummary&) const = default;
};

CaseClassification classify_article(const VariantResponses& vr);

/// Groups slots by object ID (engagement-only slots form one anonymous
/// group), resolves within-group conflicts per policy, and sums across
/// groups. A group with two different reported engagements sets
/// `ambiguous`; the Error policy throws AmbiguousEngagement instead.
ArticleEngagement aggregate_engagement(const VariantResponses& vr,
                                       ConflictPolicy policy);

/// Object IDs that show up under two or more distinct DOIs.
CollisionReport detect_object_collisions(std::span<const VariantResponses> all);

/// Combined problem accounting. `engaged` must be the classifications of
/// the positively engaged articles (the case-table input).
ProblemSummary problem_summary(std::span<const CaseClassification> engaged,
                               const CollisionReport& collisions,
                               const ResolutionStats& stats);

}  // namespace ogr

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ogr/graph.hpp"
#include "ogr/resolver.hpp"

namespace ogr {

/// Scripted behaviour for one DOI at the mock resolver. `chain` holds the
/// redirect steps; each location may contain the "{host}" placeholder,
/// expanded to the serving authority (or a synthetic one during replay).
/// An empty chain answers final_status at the proxy URL itself.
enum class ScriptMode { Normal, Abort, Timeout };

struct DoiScriptStep {
  int status = 302;
  std::string location;

  bool operator==(const DoiScriptStep&) const = default;
};

struct DoiScript {
  std::vector<DoiScriptStep> chain;
  int final_status = 200;
  std::string body;
  int delay_ms = 0;
  ScriptMode mode = ScriptMode::Normal;

  bool operator==(const DoiScript&) const = default;
};

struct GraphScript {
  std::optional<std::string> ob_id;
  std::optional<Engagement> engagement;

  bool operator==(const GraphScript&) const = default;
};

struct Fixture {
  std::uint64_t seed = 0;
  std::map<std::string, DoiScript> doi_scripts;     // key: doi string
  std::map<std::string, GraphScript> graph_scripts; // key: url template

  std::vector<Doi> dois() const;
  /// Stable index of a DOI within the fixture; used for /hop/<i>/<j> URLs.
  std::optional<std::size_t> doi_index(const std::string& doi) const;

  nlohmann::ordered_json to_json() const;
  static Fixture from_json(const nlohmann::json& j);

  bool operator==(const Fixture&) const = default;
};

struct ResolutionMixTarget {
  std::uint64_t ok = 0;
  std::uint64_t with_error = 0;
  std::uint64_t failed = 0;

  std::uint64_t total() const { return ok + with_error + failed; }
};

struct SharedLandingTarget {
  std::uint64_t dois = 0;    // DOIs covered by shared landing pages
  std::uint64_t groups = 0;  // groups of size >= 2
};

struct VariantCoverageTarget {
  std::uint64_t with_ob_id = 0;
  std::uint64_t engaged = 0;
};

struct CaseRowTarget {
  std::uint64_t n = 0;
  std::uint64_t not_matching = 0;
  std::uint64_t matching_matching = 0;
  std::uint64_t matching_not_matching = 0;
};

struct CaseMixTarget {
  std::uint64_t no_id = 0;   // engagement without any object ID
  std::uint64_t one_id = 0;
  std::array<CaseRowTarget, 3> multi;  // rows for 2, 3, 4 IDs

  std::uint64_t total() const {
    return no_id + one_id + multi[0].n + multi[1].n + multi[2].n;
  }
  std::uint64_t matching_not_matching_total() const {
    return multi[0].matching_not_matching + multi[1].matching_not_matching +
           multi[2].matching_not_matching;
  }
};

struct CollisionSpecTarget {
  std::uint64_t objects = 0;        // colliding object IDs
  std::uint64_t articles = 0;       // distinct DOIs across all groups
  std::uint64_t max_group = 0;
  std::uint64_t engaged_articles = 0;
  std::uint64_t case2_overlap = 0;  // engaged members that also conflict on engagement
};

/// Targets a generated fixture must hit exactly. Construction is by
/// assignment, not sampling, so a valid spec reproduces its counts with
/// zero tolerance; generate_fixture self-checks by replay before returning.
struct FixtureSpec {
  std::uint64_t n_dois = 0;
  ResolutionMixTarget resolution_mix;
  SharedLandingTarget shared_landing;
  std::array<VariantCoverageTarget, 4> variant_coverage{};
  VariantCoverageTarget any_variant;
  CaseMixTarget case_mix;
  CollisionSpecTarget collision_spec;
  int timeout_sample = 4;       // failed DOIs realized as timeouts
  int timeout_delay_ms = 7000;  // scripted delay; must exceed the client budget

  void validate() const;  // throws InconsistentSpec

  nlohmann::ordered_json to_json() const;
  static FixtureSpec from_json(const nlohmann::json& j);

  /// The complete published-table distribution: 103,539 DOIs.
  static FixtureSpec reference();
  /// Resolution mix scaled to 10,353 DOIs by largest-remainder rounding
  /// (8,551 / 597 / 1,205); no graph-phase targets.
  static FixtureSpec reference_scaled_tenth();
};

Fixture generate_fixture(const FixtureSpec& spec, std::uint64_t seed);

/// What a pipeline run against the served fixture would record, computed
/// without the network. `authority` stands in for the serving host:port.
ResolutionOutcome replay_resolution(const Fixture& f, const Doi& doi,
                                    const std::string& authority);
GraphResponse replay_graph(const Fixture& f, const NormalizedUrl& url,
                           const std::string& authority);
VariantResponses replay_variant_responses(const Fixture& f, const Doi& doi,
                                          const std::string& authority);

std::string expand_host_placeholder(const std::string& tmpl,
                                    const std::string& authority);

}  // namespace ogr

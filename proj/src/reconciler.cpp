#include "ogr/reconcile.hpp"

#include <algorithm>
#include <set>

#include "ogr/errors.hpp"
#include "ogr/reporting.hpp"

namespace ogr {

namespace {

struct IdGroup {
  std::vector<std::optional<Engagement>> engagements;  // one per slot
};

std::map<std::string, IdGroup> group_by_id(const VariantResponses& vr) {
  std::map<std::string, IdGroup> groups;
  for (const auto& slot : vr.slots) {
    if (!slot || !slot->ob_id) continue;
    groups[*slot->ob_id].engagements.push_back(slot->engagement);
  }
  return groups;
}

}  // namespace

const char* to_string(ConflictPolicy p) {
  switch (p) {
    case ConflictPolicy::MaxPerField: return "max";
    case ConflictPolicy::Min: return "min";
    case ConflictPolicy::First: return "first";
    case ConflictPolicy::Error: return "error";
  }
  return "max";
}

std::optional<ConflictPolicy> conflict_policy_from_string(std::string_view s) {
  if (s == "max") return ConflictPolicy::MaxPerField;
  if (s == "min") return ConflictPolicy::Min;
  if (s == "first") return ConflictPolicy::First;
  if (s == "error") return ConflictPolicy::Error;
  return std::nullopt;
}

CaseClassification classify_article(const VariantResponses& vr) {
  CaseClassification out;
  out.doi = vr.doi;

  for (const auto& slot : vr.slots) {
    if (!slot) continue;
    if (slot->ob_id) ++out.variants_with_id;
    if (!slot->ob_id && slot->engagement)
      out.anomalous_engagement_without_id = true;
  }

  auto groups = group_by_id(vr);
  out.has_not_matching_ids = groups.size() >= 2;
  for (const auto& [id, group] : groups) {
    const auto& e = group.engagements;
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (std::size_t j = i + 1; j < e.size(); ++j) {
        if (e[i] == e[j])
          out.has_matching_ids_matching_engagement = true;
        else
          out.has_matching_ids_not_matching_engagement = true;
      }
    }
  }
  return out;
}

ArticleEngagement aggregate_engagement(const VariantResponses& vr,
                                       ConflictPolicy policy) {
  ArticleEngagement out;
  out.doi = vr.doi;

  auto resolve_group = [&](const std::vector<Engagement>& candidates,
                           const std::string& label) -> Engagement {
    std::vector<Engagement> distinct;
    for (const auto& c : candidates) {
      if (std::find(distinct.begin(), distinct.end(), c) == distinct.end())
        distinct.push_back(c);
    }
    if (distinct.empty()) return {};
    if (distinct.size() == 1) return distinct.front();

    out.ambiguous = true;
    switch (policy) {
      case ConflictPolicy::MaxPerField: {
        Engagement r;
        for (const auto& e : distinct) {
          r.share_count = std::max(r.share_count, e.share_count);
          r.reaction_count = std::max(r.reaction_count, e.reaction_count);
          r.comment_count = std::max(r.comment_count, e.comment_count);
          r.comment_plugin_count =
              std::max(r.comment_plugin_count, e.comment_plugin_count);
        }
        return r;
      }
      case ConflictPolicy::Min: {
        Engagement r = distinct.front();
        for (const auto& e : distinct) {
          r.share_count = std::min(r.share_count, e.share_count);
          r.reaction_count = std::min(r.reaction_count, e.reaction_count);
          r.comment_count = std::min(r.comment_count, e.comment_count);
          r.comment_plugin_count =
              std::min(r.comment_plugin_count, e.comment_plugin_count);
        }
        return r;
      }
      case ConflictPolicy::First:
        return distinct.front();
      case ConflictPolicy::Error:
        throw AmbiguousEngagement(
            vr.doi.str(), "conflicting engagement for " + vr.doi.str() +
                              " (" + label + ")");
    }
    return distinct.front();
  };

  auto add = [](Engagement& acc, const Engagement& e) {
    acc.share_count += e.share_count;
    acc.reaction_count += e.reaction_count;
    acc.comment_count += e.comment_count;
    acc.comment_plugin_count += e.comment_plugin_count;
  };

  // slots in variant order so the First policy is well defined
  std::map<std::string, std::vector<Engagement>> with_id;
  std::vector<std::string> id_order;
  std::vector<Engagement> anonymous;
  for (const auto& slot : vr.slots) {
    if (!slot) continue;
    if (slot->ob_id) {
      auto [it, inserted] = with_id.try_emplace(*slot->ob_id);
      if (inserted) id_order.push_back(*slot->ob_id);
      if (slot->engagement) it->second.push_back(*slot->engagement);
    } else if (slot->engagement) {
      anonymous.push_back(*slot->engagement);
    }
  }

  for (const auto& id : id_order) {
    Engagement resolved = resolve_group(with_id[id], "object " + id);
    out.per_object[id] = resolved;
    add(out.total, resolved);
  }
  if (!anonymous.empty()) {
    Engagement resolved = resolve_group(anonymous, "no object id");
    out.anonymous = resolved;
    add(out.total, resolved);
  }
  return out;
}

CollisionReport detect_object_collisions(
    std::span<const VariantResponses> all) {
  std::map<std::string, std::set<Doi>> by_id;
  for (const auto& vr : all) {
    for (const auto& slot : vr.slots) {
      if (slot && slot->ob_id) by_id[*slot->ob_id].insert(vr.doi);
    }
  }

  CollisionReport report;
  for (auto& [id, dois] : by_id) {
    if (dois.size() < 2) continue;
    report.groups.push_back({id, {dois.begin(), dois.end()}});
  }
  std::sort(report.groups.begin(), report.groups.end(),
            [](const CollisionGroup& a, const CollisionGroup& b) {
              if (a.dois.size() != b.dois.size())
                return a.dois.size() > b.dois.size();
              return a.ob_id < b.ob_id;
            });
  return report;
}

std::vector<Doi> CollisionReport::article_union() const {
  std::set<Doi> dois;
  for (const auto& g : groups) dois.insert(g.dois.begin(), g.dois.end());
  return {dois.begin(), dois.end()};
}

ProblemSummary problem_summary(std::span<const CaseClassification> engaged,
                               const CollisionReport& collisions,
                               const ResolutionStats& stats) {
  ProblemSummary out;
  out.engaged_denominator = engaged.size();
  out.total_denominator = stats.total();
  out.failed_resolutions = stats.failed;

  std::set<Doi> engaged_dois;
  std::set<Doi> case2;
  for (const auto& c : engaged) {
    engaged_dois.insert(c.doi);
    if (c.has_matching_ids_not_matching_engagement) case2.insert(c.doi);
  }
  out.case2_residue = case2.size();

  auto collision_dois = collisions.article_union();
  out.collision_articles = collision_dois.size();

  std::set<Doi> union23 = case2;
  for (const auto& doi : collision_dois) {
    if (engaged_dois.contains(doi)) {
      ++out.engaged_collision_articles;
      union23.insert(doi);
    } else {
      ++out.non_engaged_collision_articles;
    }
  }
  out.union_case23 = union23.size();
  out.grand_total = out.union_case23 + out.failed_resolutions +
                    out.non_engaged_collision_articles;
  out.union_pct = pct1(out.union_case23, out.engaged_denominator);
  out.grand_pct = pct1(out.grand_total, out.total_denominator);
  return out;
}

}  // namespace ogr

#include "ogr/fixtures.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "ogr/errors.hpp"
#include "ogr/http_fetch.hpp"
#include "ogr/reconcile.hpp"
#include "ogr/reporting.hpp"

namespace ogr {

namespace {

const char* to_string(ScriptMode m) {
  switch (m) {
    case ScriptMode::Normal: return "normal";
    case ScriptMode::Abort: return "abort";
    case ScriptMode::Timeout: return "timeout";
  }
  return "normal";
}

ScriptMode script_mode_from_string(const std::string& s) {
  if (s == "abort") return ScriptMode::Abort;
  if (s == "timeout") return ScriptMode::Timeout;
  return ScriptMode::Normal;
}

// Deterministic Fisher-Yates; std::shuffle's draw sequence is
// implementation-defined, this one is not.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

std::vector<std::uint64_t> largest_remainder_counts(
    std::uint64_t total, const std::vector<double>& shares_pct) {
  std::vector<std::uint64_t> counts(shares_pct.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < shares_pct.size(); ++i) {
    const double exact = static_cast<double>(total) * shares_pct[i] / 100.0;
    counts[i] = static_cast<std::uint64_t>(exact);
    assigned += counts[i];
    remainders.emplace_back(exact - static_cast<double>(counts[i]), i);
  }
  std::sort(remainders.begin(), remainders.end(), [](auto& a, auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned)
    ++counts[remainders[k % remainders.size()].second];
  return counts;
}

// ---------------------------------------------------------------------
// pattern machinery for the engaged-article construction

enum class Pattern {
  NoId,      // engagement without any object ID
  OneId,
  OnlyA,     // >= 2 pairwise distinct IDs
  OnlyB,     // one ID, identical engagements
  OnlyC,     // one ID, pairwise different engagements
  AB,        // matching pair plus a distinct ID
  AC,        // conflicting pair plus a distinct ID
  BC,        // one ID with a matching pair and a conflicting value
  ABC,       // matching pair, conflicting value and a distinct ID (4 slots)
};

bool pattern_has_c_flag(Pattern p) {
  return p == Pattern::OnlyC || p == Pattern::AC || p == Pattern::BC ||
         p == Pattern::ABC;
}

struct RoleSlot {
  int role = -1;  // -1 = no ID; 0 = primary ID; 1.. = further distinct IDs
  std::optional<Engagement> engagement;
};

struct SlotPlanLists {
  std::vector<RoleSlot> engaged;
  std::vector<RoleSlot> unengaged;
};

Engagement shares(std::uint64_t n) { return Engagement{n, 0, 0, 0}; }

int min_engaged(Pattern p, int row) {
  switch (p) {
    case Pattern::NoId: return 1;
    case Pattern::OneId: return 1;
    case Pattern::OnlyA: return 1;
    case Pattern::OnlyB: return row;
    case Pattern::OnlyC: return row - 1;
    case Pattern::AB: return 2;
    case Pattern::AC: return 1;
    case Pattern::BC: return 2;
    case Pattern::ABC: return 2;
  }
  return 1;
}

int max_engaged(Pattern p, int row) {
  return p == Pattern::NoId ? 4 : row;
}

// Builds the slot values realizing the pattern with exactly k engaged
// slots. `base` varies engagement magnitudes between articles.
SlotPlanLists build_slots(Pattern p, int row, int k, std::uint64_t base) {
  SlotPlanLists out;
  auto engaged = [&](int role, std::uint64_t v) {
    out.engaged.push_back({role, shares(v)});
  };
  auto unengaged = [&](int role) { out.unengaged.push_back({role, {}}); };

  switch (p) {
    case Pattern::NoId:
      for (int i = 0; i < k; ++i) engaged(-1, base);
      break;
    case Pattern::OneId:
      engaged(0, base);
      break;
    case Pattern::OnlyA:
      for (int i = 0; i < k; ++i) engaged(i, base);
      for (int i = k; i < row; ++i) unengaged(i);
      break;
    case Pattern::OnlyB:
      for (int i = 0; i < row; ++i) engaged(0, base);
      break;
    case Pattern::OnlyC:
      for (int i = 0; i < k; ++i) engaged(0, base + i);
      for (int i = k; i < row; ++i) unengaged(0);
      break;
    case Pattern::AB: {
      engaged(0, base);
      engaged(0, base);
      int extras = row - 2;
      for (int i = 0; i < extras; ++i) {
        if (2 + i < k)
          engaged(1 + i, base + 1 + i);
        else
          unengaged(1 + i);
      }
      break;
    }
    case Pattern::AC: {
      if (k >= 2) {
        engaged(0, base);
        engaged(0, base + 1);
      } else {
        engaged(0, base);
        unengaged(0);
      }
      int extras = row - 2;
      for (int i = 0; i < extras; ++i) {
        if (2 + i < k)
          engaged(1 + i, base + 2 + i);
        else
          unengaged(1 + i);
      }
      break;
    }
    case Pattern::BC:
      engaged(0, base);
      engaged(0, base);
      for (int i = 2; i < row; ++i) {
        if (i < k)
          engaged(0, base + i);
        else
          unengaged(0);
      }
      break;
    case Pattern::ABC:
      engaged(0, base);
      engaged(0, base);
      if (k >= 3)
        engaged(0, base + 1);
      else
        unengaged(0);
      if (k >= 4)
        engaged(1, base + 2);
      else
        unengaged(1);
      break;
  }
  return out;
}

struct ColumnCounts {
  std::uint64_t n_abc = 0, n_ab = 0, n_ac = 0, n_bc = 0;
  std::uint64_t n_a = 0, n_b = 0, n_c = 0;
};

// Splits one case-table row target into overlap buckets. Every article
// with >= 2 IDs sets at least one column, so a+b+c must cover n.
ColumnCounts solve_case_row(int row, const CaseRowTarget& t) {
  const std::uint64_t n = t.n, a = t.not_matching, b = t.matching_matching,
                      c = t.matching_not_matching;
  auto fail = [&](const std::string& why) -> ColumnCounts {
    throw InconsistentSpec("case row with " + std::to_string(row) +
                           " ids cannot meet its column targets: " + why);
  };
  if (a > n || b > n || c > n) return fail("a column exceeds the row count");
  if (a + b + c < n) return fail("columns cover fewer articles than the row");

  auto solve_pairs = [&](std::uint64_t aa, std::uint64_t bb, std::uint64_t cc,
                         std::uint64_t excess,
                         ColumnCounts& out) -> bool {
    const std::uint64_t z_hi = std::min({bb, cc, excess});
    for (std::uint64_t z = excess > aa ? excess - aa : 0; z <= z_hi; ++z) {
      const std::uint64_t rest = excess - z;
      const std::uint64_t x = std::min(bb - z, rest);
      const std::uint64_t y = rest - x;
      if (y > cc - z) continue;
      out.n_ab = x;
      out.n_ac = y;
      out.n_bc = z;
      out.n_a = aa - x - y;
      out.n_b = bb - x - z;
      out.n_c = cc - y - z;
      return true;
    }
    return false;
  };

  ColumnCounts out;
  std::uint64_t excess = a + b + c - n;
  if (row == 2) {
    if (excess != 0) return fail("two IDs form one pair; columns must sum to n");
    out.n_a = a;
    out.n_b = b;
    out.n_c = c;
    return out;
  }
  if (row == 3) {
    // three slots cannot exhibit all three columns at once
    if (!solve_pairs(a, b, c, excess, out))
      return fail("no pairwise overlap assignment exists");
    return out;
  }
  // row == 4: spend overlap on triple-flag articles first if pairs alone
  // cannot absorb it
  for (std::uint64_t w = 0; w <= std::min({a, b, c, n}); ++w) {
    if (a + b + c - 3 * w < n - w) break;
    ColumnCounts trial;
    if (solve_pairs(a - w, b - w, c - w, (a + b + c - 3 * w) - (n - w),
                    trial)) {
      trial.n_abc = w;
      return trial;
    }
  }
  return fail("no overlap assignment exists");
}

struct ArticleDraft {
  Pattern pattern;
  int row = 0;  // number of ID slots (0 for NoId)
  int k = 0;    // engaged slots, set by the water fill
  int min_k = 0;
  int max_k = 0;
  std::optional<std::string> collision_id;
};

}  // namespace

// ---------------------------------------------------------------------
// Fixture basics

std::vector<Doi> Fixture::dois() const {
  std::vector<Doi> out;
  out.reserve(doi_scripts.size());
  for (const auto& [doi, script] : doi_scripts) out.push_back(parse_doi(doi));
  return out;
}

std::optional<std::size_t> Fixture::doi_index(const std::string& doi) const {
  auto it = doi_scripts.find(doi);
  if (it == doi_scripts.end()) return std::nullopt;
  return static_cast<std::size_t>(std::distance(doi_scripts.begin(), it));
}

nlohmann::ordered_json Fixture::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  // plain json sub-objects: the source maps are already sorted, and
  // ordered_json's insert does a linear key scan that goes quadratic at
  // fixture scale
  nlohmann::json scripts = nlohmann::json::object();
  for (const auto& [doi, s] : doi_scripts) {
    nlohmann::json js;
    nlohmann::json chain = nlohmann::json::array();
    for (const auto& step : s.chain)
      chain.push_back(nlohmann::json::array({step.status, step.location}));
    js["chain"] = std::move(chain);
    js["final_status"] = s.final_status;
    if (!s.body.empty()) js["body"] = s.body;
    if (s.delay_ms != 0) js["delay_ms"] = s.delay_ms;
    if (s.mode != ScriptMode::Normal) js["mode"] = to_string(s.mode);
    scripts[doi] = std::move(js);
  }
  j["doi_scripts"] = std::move(scripts);
  nlohmann::json graph = nlohmann::json::object();
  for (const auto& [url, s] : graph_scripts) {
    nlohmann::json js = nlohmann::json::object();
    if (s.ob_id) js["ob_id"] = *s.ob_id;
    if (s.engagement) {
      js["engagement"] = {
          {"share_count", s.engagement->share_count},
          {"reaction_count", s.engagement->reaction_count},
          {"comment_count", s.engagement->comment_count},
          {"comment_plugin_count", s.engagement->comment_plugin_count}};
    }
    graph[url] = std::move(js);
  }
  j["graph_scripts"] = std::move(graph);
  return j;
}

Fixture Fixture::from_json(const nlohmann::json& j) {
  Fixture f;
  f.seed = j.value("seed", 0ULL);
  for (const auto& [doi, js] : j.at("doi_scripts").items()) {
    DoiScript s;
    for (const auto& step : js.at("chain"))
      s.chain.push_back({step.at(0).get<int>(), step.at(1).get<std::string>()});
    s.final_status = js.value("final_status", 200);
    s.body = js.value("body", std::string());
    s.delay_ms = js.value("delay_ms", 0);
    s.mode = script_mode_from_string(js.value("mode", "normal"));
    f.doi_scripts[doi] = std::move(s);
  }
  for (const auto& [url, js] : j.at("graph_scripts").items()) {
    GraphScript s;
    if (js.contains("ob_id")) s.ob_id = js.at("ob_id").get<std::string>();
    if (js.contains("engagement"))
      s.engagement = engagement_from_json(js.at("engagement"));
    f.graph_scripts[url] = std::move(s);
  }
  return f;
}

std::string expand_host_placeholder(const std::string& tmpl,
                                    const std::string& authority) {
  std::string out;
  out.reserve(tmpl.size() + authority.size());
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = tmpl.find("{host}", pos);
    if (hit == std::string::npos) {
      out += tmpl.substr(pos);
      return out;
    }
    out += tmpl.substr(pos, hit - pos);
    out += authority;
    pos = hit + 6;
  }
}

// ---------------------------------------------------------------------
// FixtureSpec

void FixtureSpec::validate() const {
  auto fail = [](const std::string& why) {
    throw InconsistentSpec("fixture spec: " + why);
  };
  if (resolution_mix.total() != n_dois)
    fail("resolution mix must sum to n_dois");
  const std::uint64_t resolved = resolution_mix.ok + resolution_mix.with_error;

  if (shared_landing.dois > 0) {
    if (shared_landing.groups == 0) fail("shared landing groups missing");
    if (shared_landing.dois < 2 * shared_landing.groups)
      fail("shared landing groups need at least two DOIs each");
  }

  if (any_variant.engaged != case_mix.total())
    fail("engaged union must equal the case mix total");
  const std::uint64_t engaged_with_id = case_mix.total() - case_mix.no_id;
  if (any_variant.with_ob_id < engaged_with_id)
    fail("with-ID union smaller than the engaged articles that carry IDs");
  if (any_variant.with_ob_id + case_mix.no_id > resolved)
    fail("with-ID union plus anomalous articles exceeds resolved DOIs");

  std::uint64_t sum_w = 0, sum_e = 0;
  for (const auto& v : variant_coverage) {
    if (v.with_ob_id > any_variant.with_ob_id)
      fail("a per-variant with-ID count exceeds the union");
    sum_w += v.with_ob_id;
    sum_e += v.engaged;
  }
  if (sum_w < any_variant.with_ob_id)
    fail("per-variant with-ID counts cannot reach the union");
  if (sum_w > 4 * any_variant.with_ob_id)
    fail("per-variant with-ID counts exceed four slots per article");
  if (sum_e < any_variant.engaged)
    fail("per-variant engaged counts cannot reach the union");
  if (sum_e > 4 * any_variant.engaged)
    fail("per-variant engaged counts exceed four slots per article");

  const auto& col = collision_spec;
  if (col.objects > 0) {
    if (col.articles < 2 * col.objects)
      fail("collision groups need at least two articles each");
    if (col.max_group < 2 || col.max_group > col.articles - 2 * (col.objects - 1))
      fail("collision max group is impossible for the group count");
    if (col.engaged_articles > col.articles)
      fail("engaged collision articles exceed collision articles");
    if (col.case2_overlap > col.engaged_articles)
      fail("case-2 overlap exceeds engaged collision articles");
    if (col.case2_overlap > case_mix.matching_not_matching_total())
      fail("case-2 overlap exceeds conflicted articles");
    if (col.engaged_articles - col.case2_overlap > case_mix.one_id)
      fail("not enough single-ID articles to host collision memberships");
  }
}

nlohmann::ordered_json FixtureSpec::to_json() const {
  nlohmann::ordered_json j;
  j["n_dois"] = n_dois;
  j["resolution_mix"] = {{"ok", resolution_mix.ok},
                         {"with_error", resolution_mix.with_error},
                         {"failed", resolution_mix.failed}};
  j["shared_landing"] = {{"dois", shared_landing.dois},
                         {"groups", shared_landing.groups}};
  nlohmann::ordered_json cov = nlohmann::ordered_json::array();
  for (const auto& v : variant_coverage)
    cov.push_back({{"with_ob_id", v.with_ob_id}, {"engaged", v.engaged}});
  j["variant_coverage"] = std::move(cov);
  j["any_variant"] = {{"with_ob_id", any_variant.with_ob_id},
                      {"engaged", any_variant.engaged}};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : case_mix.multi)
    rows.push_back({{"n", r.n},
                    {"not_matching", r.not_matching},
                    {"matching_matching", r.matching_matching},
                    {"matching_not_matching", r.matching_not_matching}});
  j["case_mix"] = {{"no_id", case_mix.no_id},
                   {"one_id", case_mix.one_id},
                   {"rows", std::move(rows)}};
  j["collision_spec"] = {{"objects", collision_spec.objects},
                         {"articles", collision_spec.articles},
                         {"max_group", collision_spec.max_group},
                         {"engaged_articles", collision_spec.engaged_articles},
                         {"case2_overlap", collision_spec.case2_overlap}};
  j["timeout_sample"] = timeout_sample;
  j["timeout_delay_ms"] = timeout_delay_ms;
  return j;
}

FixtureSpec FixtureSpec::from_json(const nlohmann::json& j) {
  FixtureSpec spec;
  spec.n_dois = j.at("n_dois").get<std::uint64_t>();

  const auto& mix = j.at("resolution_mix");
  if (mix.contains("ok")) {
    spec.resolution_mix.ok = mix.at("ok").get<std::uint64_t>();
    spec.resolution_mix.with_error = mix.at("with_error").get<std::uint64_t>();
    spec.resolution_mix.failed = mix.at("failed").get<std::uint64_t>();
  } else {
    // percentage form; counts by largest remainder
    auto counts = largest_remainder_counts(
        spec.n_dois, {mix.at("ok_pct").get<double>(),
                      mix.at("error_pct").get<double>(),
                      mix.at("fail_pct").get<double>()});
    spec.resolution_mix = {counts[0], counts[1], counts[2]};
  }

  if (j.contains("shared_landing")) {
    spec.shared_landing.dois = j.at("shared_landing").value("dois", 0ULL);
    spec.shared_landing.groups = j.at("shared_landing").value("groups", 0ULL);
  }

  const std::uint64_t resolved =
      spec.resolution_mix.ok + spec.resolution_mix.with_error;
  if (j.contains("variant_coverage")) {
    const auto& cov = j.at("variant_coverage");
    for (std::size_t v = 0; v < 4 && v < cov.size(); ++v) {
      if (cov[v].contains("with_ob_id")) {
        spec.variant_coverage[v].with_ob_id =
            cov[v].at("with_ob_id").get<std::uint64_t>();
        spec.variant_coverage[v].engaged =
            cov[v].at("engaged").get<std::uint64_t>();
      } else {
        spec.variant_coverage[v].with_ob_id = largest_remainder_counts(
            resolved, {cov[v].at("ob_id_pct").get<double>()})[0];
        spec.variant_coverage[v].engaged = largest_remainder_counts(
            resolved, {cov[v].at("engaged_pct").get<double>()})[0];
      }
    }
  }
  if (j.contains("any_variant")) {
    spec.any_variant.with_ob_id =
        j.at("any_variant").at("with_ob_id").get<std::uint64_t>();
    spec.any_variant.engaged =
        j.at("any_variant").at("engaged").get<std::uint64_t>();
  }
  if (j.contains("case_mix")) {
    const auto& mix_j = j.at("case_mix");
    spec.case_mix.no_id = mix_j.value("no_id", 0ULL);
    spec.case_mix.one_id = mix_j.value("one_id", 0ULL);
    if (mix_j.contains("rows")) {
      const auto& rows = mix_j.at("rows");
      for (std::size_t i = 0; i < 3 && i < rows.size(); ++i) {
        spec.case_mix.multi[i].n = rows[i].value("n", 0ULL);
        spec.case_mix.multi[i].not_matching = rows[i].value("not_matching", 0ULL);
        spec.case_mix.multi[i].matching_matching =
            rows[i].value("matching_matching", 0ULL);
        spec.case_mix.multi[i].matching_not_matching =
            rows[i].value("matching_not_matching", 0ULL);
      }
    }
  }
  if (j.contains("collision_spec")) {
    const auto& col = j.at("collision_spec");
    spec.collision_spec.objects = col.value("objects", 0ULL);
    spec.collision_spec.articles = col.value("articles", 0ULL);
    spec.collision_spec.max_group = col.value("max_group", 0ULL);
    spec.collision_spec.engaged_articles = col.value("engaged_articles", 0ULL);
    spec.collision_spec.case2_overlap = col.value("case2_overlap", 0ULL);
  }
  spec.timeout_sample = j.value("timeout_sample", 4);
  spec.timeout_delay_ms = j.value("timeout_delay_ms", 7000);
  return spec;
}

FixtureSpec FixtureSpec::reference() {
  FixtureSpec spec;
  spec.n_dois = 103539;
  spec.resolution_mix = {85515, 5975, 12049};
  spec.shared_landing = {68, 34};
  spec.variant_coverage = {{{8452, 1426},
                            {13305, 2458},
                            {179, 74},
                            {10124, 2612}}};
  spec.any_variant = {26775, 5498};
  spec.case_mix.no_id = 106;
  spec.case_mix.one_id = 3687;
  spec.case_mix.multi = {{{1535, 769, 620, 146},
                          {161, 131, 99, 43},
                          {9, 8, 6, 3}}};
  spec.collision_spec = {66, 507, 184, 482, 26};
  spec.timeout_sample = 4;
  return spec;
}

FixtureSpec FixtureSpec::reference_scaled_tenth() {
  FixtureSpec spec;
  spec.n_dois = 10353;
  // largest-remainder scaling of 85,515 / 5,975 / 12,049
  spec.resolution_mix = {8551, 597, 1205};
  spec.shared_landing = {6, 3};
  spec.timeout_sample = 4;
  return spec;
}

// ---------------------------------------------------------------------
// generation

Fixture generate_fixture(const FixtureSpec& spec, std::uint64_t seed) {
  spec.validate();
  auto fail = [](const std::string& why) -> Fixture {
    throw InconsistentSpec("fixture generation: " + why);
  };

  const std::uint64_t resolved =
      spec.resolution_mix.ok + spec.resolution_mix.with_error;
  const std::uint64_t n_engaged = spec.case_mix.total();
  const std::uint64_t engaged_with_id = n_engaged - spec.case_mix.no_id;
  const std::uint64_t n_pool = spec.any_variant.with_ob_id - engaged_with_id;
  if (n_engaged + n_pool > resolved)
    return fail("engaged plus ID-only articles exceed resolved DOIs");
  const std::uint64_t n_plain = resolved - n_engaged - n_pool;
  if (spec.shared_landing.dois > n_plain)
    return fail("shared landing DOIs exceed plain resolved DOIs");
  if (spec.collision_spec.articles >
      spec.collision_spec.engaged_articles + n_pool)
    return fail("not enough ID-only articles for non-engaged collisions");

  // --- engaged article drafts, most constrained rows first
  std::vector<ArticleDraft> drafts;
  drafts.reserve(n_engaged + n_pool);
  auto add_bucket = [&](Pattern p, int row, std::uint64_t count) {
    for (std::uint64_t i = 0; i < count; ++i) {
      ArticleDraft d;
      d.pattern = p;
      d.row = p == Pattern::NoId ? 0 : row;
      d.min_k = min_engaged(p, row);
      d.max_k = max_engaged(p, row);
      d.k = d.min_k;
      drafts.push_back(d);
    }
  };
  for (int m = 2; m >= 0; --m) {
    const int row = m + 2;
    ColumnCounts cc = solve_case_row(row, spec.case_mix.multi[m]);
    add_bucket(Pattern::ABC, row, cc.n_abc);
    add_bucket(Pattern::AB, row, cc.n_ab);
    add_bucket(Pattern::AC, row, cc.n_ac);
    add_bucket(Pattern::BC, row, cc.n_bc);
    add_bucket(Pattern::OnlyA, row, cc.n_a);
    add_bucket(Pattern::OnlyB, row, cc.n_b);
    add_bucket(Pattern::OnlyC, row, cc.n_c);
  }
  add_bucket(Pattern::OneId, 1, spec.case_mix.one_id);
  add_bucket(Pattern::NoId, 0, spec.case_mix.no_id);

  // --- water-fill engaged slot counts to the per-variant engaged total
  std::uint64_t engaged_target = 0;
  for (const auto& v : spec.variant_coverage) engaged_target += v.engaged;
  std::uint64_t engaged_min = 0, engaged_max = 0;
  for (const auto& d : drafts) {
    engaged_min += d.min_k;
    engaged_max += d.max_k;
  }
  if (engaged_target < engaged_min || engaged_target > engaged_max)
    return fail("per-variant engaged counts are unreachable for the case mix");
  std::uint64_t extra = engaged_target - engaged_min;
  for (auto& d : drafts) {
    if (extra == 0) break;
    const std::uint64_t lift =
        std::min<std::uint64_t>(extra, d.max_k - d.min_k);
    d.k += static_cast<int>(lift);
    extra -= lift;
  }

  // --- collision membership queues
  const auto& col = spec.collision_spec;
  std::vector<std::uint64_t> group_sizes;
  if (col.objects > 0) {
    group_sizes.push_back(col.max_group);
    if (col.objects > 1) {
      const std::uint64_t rest = col.articles - col.max_group;
      const std::uint64_t groups = col.objects - 1;
      const std::uint64_t base = rest / groups;
      const std::uint64_t rem = rest % groups;
      if (base < 2) return fail("collision articles too few for group count");
      if (base + (rem ? 1 : 0) > col.max_group)
        return fail("collision max group smaller than an even split");
      for (std::uint64_t g = 0; g < groups; ++g)
        group_sizes.push_back(base + (g < rem ? 1 : 0));
    } else if (col.articles != col.max_group) {
      return fail("single collision group must hold all collision articles");
    }
  }
  auto collision_id = [](std::size_t g) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "obc-%05zu", g);
    return std::string(buf);
  };
  std::vector<std::string> q_conflicted, q_engaged, q_pool;
  {
    std::vector<std::string> memberships;
    for (std::size_t g = 0; g < group_sizes.size(); ++g)
      for (std::uint64_t i = 0; i < group_sizes[g]; ++i)
        memberships.push_back(collision_id(g));
    // Spread member kinds across groups: every group keeps at least two
    // members, so any contiguous split still works.
    std::size_t at = 0;
    for (std::uint64_t i = 0; i < col.case2_overlap; ++i)
      q_conflicted.push_back(memberships[at++]);
    for (std::uint64_t i = col.case2_overlap; i < col.engaged_articles; ++i)
      q_engaged.push_back(memberships[at++]);
    while (at < memberships.size()) q_pool.push_back(memberships[at++]);
  }
  // hand collision ids to drafts: conflicted articles first, then single-ID
  std::size_t at_conf = 0, at_eng = 0;
  for (auto& d : drafts) {
    if (at_conf < q_conflicted.size() && pattern_has_c_flag(d.pattern)) {
      d.collision_id = q_conflicted[at_conf++];
    } else if (at_eng < q_engaged.size() && d.pattern == Pattern::OneId) {
      d.collision_id = q_engaged[at_eng++];
    }
  }
  if (at_conf < q_conflicted.size() || at_eng < q_engaged.size())
    return fail("not enough articles to host collision memberships");

  // --- per-variant quota placement
  std::array<std::int64_t, 4> quota_id{}, quota_engaged{};
  for (int v = 0; v < 4; ++v) {
    quota_id[v] = static_cast<std::int64_t>(spec.variant_coverage[v].with_ob_id);
    quota_engaged[v] = static_cast<std::int64_t>(spec.variant_coverage[v].engaged);
  }

  auto pick_variants = [&](int want, bool need_id, bool by_engaged,
                           const std::vector<int>& exclude) {
    std::vector<int> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return (by_engaged ? quota_engaged[a] : quota_id[a]) >
             (by_engaged ? quota_engaged[b] : quota_id[b]);
    });
    std::vector<int> chosen;
    for (int v : order) {
      if (static_cast<int>(chosen.size()) == want) break;
      if (std::find(exclude.begin(), exclude.end(), v) != exclude.end())
        continue;
      if (by_engaged && quota_engaged[v] <= 0) continue;
      if (need_id && quota_id[v] <= 0) continue;
      if (!by_engaged && !need_id) continue;
      chosen.push_back(v);
    }
    return chosen;
  };

  // slot plan per draft: slot -> (role, engagement, engaged?)
  struct PlacedSlot {
    int role = -1;
    std::optional<Engagement> engagement;
    bool present = false;
  };
  std::vector<std::array<PlacedSlot, 4>> placements(drafts.size());

  for (std::size_t i = 0; i < drafts.size(); ++i) {
    auto& d = drafts[i];
    const std::uint64_t base = 1 + (i % 5);
    auto lists = build_slots(d.pattern, d.row, d.k, base);
    const bool need_id = d.pattern != Pattern::NoId;

    auto engaged_vs = pick_variants(static_cast<int>(lists.engaged.size()),
                                    need_id, /*by_engaged=*/true, {});
    if (engaged_vs.size() != lists.engaged.size())
      return fail("engaged quota placement wedged; spec is inconsistent");
    auto unengaged_vs = pick_variants(static_cast<int>(lists.unengaged.size()),
                                      /*need_id=*/true, /*by_engaged=*/false,
                                      engaged_vs);
    if (unengaged_vs.size() != lists.unengaged.size())
      return fail("with-ID quota placement wedged; spec is inconsistent");

    std::sort(engaged_vs.begin(), engaged_vs.end());
    std::sort(unengaged_vs.begin(), unengaged_vs.end());
    for (std::size_t s = 0; s < engaged_vs.size(); ++s) {
      const int v = engaged_vs[s];
      placements[i][v] = {lists.engaged[s].role, lists.engaged[s].engagement,
                          true};
      quota_engaged[v] -= 1;
      if (need_id) quota_id[v] -= 1;
    }
    for (std::size_t s = 0; s < unengaged_vs.size(); ++s) {
      const int v = unengaged_vs[s];
      placements[i][v] = {lists.unengaged[s].role,
                          lists.unengaged[s].engagement, true};
      quota_id[v] -= 1;
    }
  }
  for (int v = 0; v < 4; ++v)
    if (quota_engaged[v] != 0)
      return fail("per-variant engaged targets not exactly met");

  // --- ID-only articles soak up the remaining per-variant ID quotas.
  // Cyclic spread: each variant's quota covers distinct consecutive
  // articles, so every article lands between one and four slots exactly.
  const std::int64_t remaining_ids =
      quota_id[0] + quota_id[1] + quota_id[2] + quota_id[3];
  if (remaining_ids < static_cast<std::int64_t>(n_pool) ||
      remaining_ids > static_cast<std::int64_t>(4 * n_pool))
    return fail("per-variant with-ID counts leave no valid ID-only split");
  for (int v = 0; v < 4; ++v)
    if (quota_id[v] > static_cast<std::int64_t>(n_pool))
      return fail("a variant needs more ID-only articles than exist");

  struct PoolArticle {
    std::vector<int> variants;
    std::optional<std::string> collision_id;
  };
  std::vector<PoolArticle> pool(n_pool);
  if (n_pool > 0) {
    std::vector<int> variant_order{0, 1, 2, 3};
    std::stable_sort(variant_order.begin(), variant_order.end(),
                     [&](int a, int b) { return quota_id[a] > quota_id[b]; });
    std::uint64_t cursor = 0;
    for (int v : variant_order) {
      for (std::int64_t j = 0; j < quota_id[v]; ++j)
        pool[(cursor + j) % n_pool].variants.push_back(v);
      cursor = (cursor + quota_id[v]) % n_pool;
      quota_id[v] = 0;
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].variants.empty())
        return fail("ID-only quota placement wedged; spec is inconsistent");
      std::sort(pool[i].variants.begin(), pool[i].variants.end());
      if (i < q_pool.size()) pool[i].collision_id = q_pool[i];
    }
  }

  // --- DOI universe and role assignment
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::uint64_t> order(spec.n_dois);
  std::iota(order.begin(), order.end(), 0);
  seeded_shuffle(order, rng);

  auto doi_name = [](std::uint64_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "10.5555/art%07llu",
                  static_cast<unsigned long long>(i));
    return std::string(buf);
  };

  enum class ResolutionKind { Ok, WithError, Failed };
  std::vector<ResolutionKind> res_kind(spec.n_dois, ResolutionKind::Failed);
  std::vector<std::uint64_t> resolved_order;
  resolved_order.reserve(resolved);
  for (std::uint64_t p = 0; p < spec.n_dois; ++p) {
    const std::uint64_t idx = order[p];
    if (p < spec.resolution_mix.ok) {
      res_kind[idx] = ResolutionKind::Ok;
      resolved_order.push_back(idx);
    } else if (p < resolved) {
      res_kind[idx] = ResolutionKind::WithError;
      resolved_order.push_back(idx);
    }
  }

  Fixture fixture;
  fixture.seed = seed;

  // timeout sample among the failed
  std::uint64_t timeouts_left = std::min<std::uint64_t>(
      spec.timeout_sample > 0 ? static_cast<std::uint64_t>(spec.timeout_sample)
                              : 0,
      spec.resolution_mix.failed);
  for (std::uint64_t p = resolved; p < spec.n_dois; ++p) {
    const std::uint64_t idx = order[p];
    DoiScript s;
    if (timeouts_left > 0) {
      s.mode = ScriptMode::Timeout;
      s.delay_ms = spec.timeout_delay_ms;
      --timeouts_left;
    } else {
      s.mode = ScriptMode::Abort;
    }
    fixture.doi_scripts[doi_name(idx)] = std::move(s);
  }

  // landing pages for the resolved: unique, except that shared groups are
  // carved out of cleanly resolving plain DOIs (one page serves one status,
  // so mixed-status sharing is not representable)
  std::vector<std::string> landing_path(spec.n_dois);
  std::uint64_t lp_counter = 0;
  for (std::uint64_t p = 0; p < resolved_order.size(); ++p)
    landing_path[resolved_order[p]] = "/lp/" + std::to_string(lp_counter++);

  const std::uint64_t plain_start = n_engaged + n_pool;
  if (spec.shared_landing.dois > 0) {
    std::vector<std::uint64_t> shared_members;
    for (std::uint64_t p = resolved_order.size();
         p-- > plain_start && shared_members.size() < spec.shared_landing.dois;) {
      if (res_kind[resolved_order[p]] == ResolutionKind::Ok)
        shared_members.push_back(resolved_order[p]);
    }
    if (shared_members.size() < spec.shared_landing.dois)
      return fail("not enough cleanly resolving plain DOIs for shared pages");
    std::size_t at = 0;
    const std::uint64_t base =
        spec.shared_landing.dois / spec.shared_landing.groups;
    const std::uint64_t rem =
        spec.shared_landing.dois % spec.shared_landing.groups;
    for (std::uint64_t g = 0; g < spec.shared_landing.groups; ++g) {
      const std::uint64_t size = base + (g < rem ? 1 : 0);
      const std::string path = landing_path[shared_members[at]];
      for (std::uint64_t i = 0; i < size; ++i)
        landing_path[shared_members[at++]] = path;
    }
  }

  for (std::uint64_t p = 0; p < resolved_order.size(); ++p) {
    const std::uint64_t idx = resolved_order[p];
    DoiScript s;
    // a sprinkle of longer chains for realism
    if (idx % 97 == 3) {
      s.chain.push_back({302, "/hop/" + std::to_string(idx) + "/1"});
      s.chain.push_back({302, landing_path[idx]});
    } else {
      s.chain.push_back({302, landing_path[idx]});
    }
    if (res_kind[idx] == ResolutionKind::WithError) {
      static const int kErrors[] = {404, 403, 500};
      s.final_status = kErrors[idx % 3];
    }
    fixture.doi_scripts[doi_name(idx)] = std::move(s);
  }

  // graph scripts: engaged drafts then ID-only articles, mapped onto the
  // resolved DOI order
  if (drafts.size() + pool.size() > resolved_order.size())
    return fail("internal accounting error");  // guarded above

  auto variant_key = [&](std::uint64_t idx, int v,
                         const std::string& doi) -> std::string {
    switch (v) {
      case 0: return "http://{host}" + landing_path[idx];
      case 1: return "https://{host}" + landing_path[idx];
      case 2: return "https://doi.org/" + doi;
      default: return "http://dx.doi.org/" + doi;
    }
  };

  std::uint64_t fresh_id_counter = 0;
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    const auto& d = drafts[i];
    const std::uint64_t idx = resolved_order[i];
    const std::string doi = doi_name(idx);

    std::map<int, std::string> role_ids;
    auto id_for_role = [&](int role) -> std::string {
      auto it = role_ids.find(role);
      if (it != role_ids.end()) return it->second;
      std::string id;
      if (role == 0 && d.collision_id) {
        id = *d.collision_id;
      } else {
        id = "ob-" + std::to_string(fresh_id_counter++);
      }
      role_ids.emplace(role, id);
      return id;
    };

    for (int v = 0; v < 4; ++v) {
      const auto& slot = placements[i][v];
      if (!slot.present) continue;
      GraphScript script;
      if (slot.role >= 0) script.ob_id = id_for_role(slot.role);
      script.engagement = slot.engagement;
      fixture.graph_scripts[variant_key(idx, v, doi)] = std::move(script);
    }
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const std::uint64_t idx = resolved_order[drafts.size() + i];
    const std::string doi = doi_name(idx);
    for (std::size_t s = 0; s < pool[i].variants.size(); ++s) {
      GraphScript script;
      if (s == 0 && pool[i].collision_id)
        script.ob_id = *pool[i].collision_id;
      else
        script.ob_id = "ob-" + std::to_string(fresh_id_counter++);
      fixture.graph_scripts[variant_key(idx, pool[i].variants[s], doi)] =
          std::move(script);
    }
  }

  // --- self-check by replay: the fixture must hit every target exactly
  if (spec.n_dois > 0) {
    const std::string authority = "fixture.check";
    std::vector<ResolutionOutcome> outcomes;
    std::vector<VariantResponses> responses;
    outcomes.reserve(spec.n_dois);
    responses.reserve(spec.n_dois);
    for (const auto& [doi_str, script] : fixture.doi_scripts) {
      Doi doi = parse_doi(doi_str);
      outcomes.push_back(replay_resolution(fixture, doi, authority));
      responses.push_back(replay_variant_responses(fixture, doi, authority));
    }
    auto expect = [&](bool ok, const std::string& what) {
      if (!ok) throw InconsistentSpec("fixture self-check failed: " + what);
    };

    auto stats = resolution_stats(outcomes);
    expect(stats.ok == spec.resolution_mix.ok &&
               stats.with_error == spec.resolution_mix.with_error &&
               stats.failed == spec.resolution_mix.failed,
           "resolution mix");

    auto shared = detect_shared_landing_pages(outcomes);
    std::uint64_t shared_dois = 0;
    for (const auto& g : shared) shared_dois += g.dois.size();
    expect(shared.size() == spec.shared_landing.groups &&
               shared_dois == spec.shared_landing.dois,
           "shared landing pages");

    auto coverage = coverage_report(responses, resolved);
    for (int v = 0; v < 4; ++v) {
      expect(coverage.per_variant[v].with_ob_id ==
                     spec.variant_coverage[v].with_ob_id &&
                 coverage.per_variant[v].engaged ==
                     spec.variant_coverage[v].engaged,
             "variant coverage row " + std::to_string(v + 1));
    }
    expect(coverage.any_variant.with_ob_id == spec.any_variant.with_ob_id &&
               coverage.any_variant.engaged == spec.any_variant.engaged,
           "coverage union");

    std::vector<CaseClassification> engaged;
    for (const auto& vr : responses)
      if (vr.any_positive_engagement()) engaged.push_back(classify_article(vr));
    auto table = case_report(engaged);
    expect(table.rows[0].count == spec.case_mix.no_id &&
               table.rows[1].count == spec.case_mix.one_id,
           "case rows 0-1");
    for (int m = 0; m < 3; ++m) {
      const auto& want = spec.case_mix.multi[m];
      const auto& got = table.rows[m + 2];
      expect(got.count == want.n &&
                 got.not_matching_ids == want.not_matching &&
                 got.matching_ids_matching_engagement ==
                     want.matching_matching &&
                 got.matching_ids_not_matching_engagement ==
                     want.matching_not_matching,
             "case row " + std::to_string(m + 2));
    }

    auto collisions = detect_object_collisions(responses);
    expect(collisions.groups.size() == col.objects, "collision group count");
    if (!collisions.groups.empty()) {
      expect(collisions.groups.front().dois.size() == col.max_group,
             "collision max group");
      expect(collisions.article_union().size() == col.articles,
             "collision article union");

      auto summary = problem_summary(engaged, collisions, stats);
      const std::uint64_t case2 = spec.case_mix.matching_not_matching_total();
      expect(summary.case2_residue == case2, "conflicted-engagement count");
      expect(summary.engaged_collision_articles == col.engaged_articles,
             "engaged collision articles");
      expect(summary.union_case23 ==
                 case2 + col.engaged_articles - col.case2_overlap,
             "problem union");
    }
  }

  return fixture;
}

// ---------------------------------------------------------------------
// replay

ResolutionOutcome replay_resolution(const Fixture& f, const Doi& doi,
                                    const std::string& authority) {
  ResolutionOutcome out;
  out.doi = doi;
  NormalizedUrl proxy =
      normalize_url("http://" + authority + "/resolve/" + doi.str());
  out.redirect_chain.push_back(proxy);

  auto it = f.doi_scripts.find(doi.str());
  if (it == f.doi_scripts.end()) {
    // the mock answers 404 for unscripted DOIs
    out.outcome_class = OutcomeClass::ResolvedWithError;
    out.final_url = proxy;
    out.http_status = 404;
    return out;
  }
  const DoiScript& script = it->second;
  if (script.mode == ScriptMode::Abort) {
    out.outcome_class = OutcomeClass::Failed;
    out.failure_reason = FailureReason::ServerAborted;
    return out;
  }
  if (script.mode == ScriptMode::Timeout) {
    out.outcome_class = OutcomeClass::Failed;
    out.failure_reason = FailureReason::Timeout;
    return out;
  }

  NormalizedUrl current = proxy;
  for (const auto& step : script.chain) {
    auto next =
        resolve_location(current, expand_host_placeholder(step.location, authority));
    if (!next) {
      out.outcome_class = OutcomeClass::Failed;
      out.failure_reason = FailureReason::NetworkError;
      return out;
    }
    current = *next;
    out.redirect_chain.push_back(current);
  }
  out.final_url = current;
  out.http_status = script.final_status;
  out.outcome_class = script.final_status >= 400
                          ? OutcomeClass::ResolvedWithError
                          : OutcomeClass::ResolvedOk;
  return out;
}

GraphResponse replay_graph(const Fixture& f, const NormalizedUrl& url,
                           const std::string& authority) {
  GraphResponse out;
  out.queried_url = url;
  out.status = GraphStatus::Ok;

  // contract the serving authority back to the {host} placeholder so the
  // lookup hits the stored template keys
  std::string key = url.str();
  const std::string marker = "://" + authority + "/";
  if (std::size_t pos = key.find(marker); pos != std::string::npos)
    key = key.substr(0, pos) + "://{host}/" + key.substr(pos + marker.size());

  auto it = f.graph_scripts.find(key);
  if (it == f.graph_scripts.end()) return out;  // unknown URL: empty answer
  out.ob_id = it->second.ob_id;
  out.engagement = it->second.engagement;
  return out;
}

VariantResponses replay_variant_responses(const Fixture& f, const Doi& doi,
                                          const std::string& authority) {
  VariantResponses out;
  out.doi = doi;
  auto resolution = replay_resolution(f, doi, authority);
  auto vs = make_variant_set(
      doi, resolution.final_url ? std::optional(*resolution.final_url)
                                : std::nullopt);
  for (int v = 1; v <= 4; ++v) {
    auto url = vs.slot(v);
    if (!url) continue;
    out.slots[v - 1] = replay_graph(f, *url, authority);
  }
  return out;
}

}  // namespace ogr

#include "ogr/reporting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "ogr/errors.hpp"

namespace ogr {

namespace {

std::string now_iso8601() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()) % 1000;
  const std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, static_cast<int>(ms.count()));
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::vector<std::string> csv_lines(const std::string& bytes) {
  std::vector<std::string> lines;
  std::istringstream in(bytes);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::uint64_t to_u64(const std::string& s) { return std::stoull(s); }

OJson url_json(const NormalizedUrl& u) { return OJson(u.str()); }

}  // namespace

const char* to_string(RecordKind k) {
  switch (k) {
    case RecordKind::Resolution: return "resolution";
    case RecordKind::GraphQuery: return "graph_query";
    case RecordKind::Classification: return "classification";
    case RecordKind::Audit: return "audit";
  }
  return "resolution";
}

std::optional<RecordKind> record_kind_from_string(std::string_view s) {
  if (s == "resolution") return RecordKind::Resolution;
  if (s == "graph_query") return RecordKind::GraphQuery;
  if (s == "classification") return RecordKind::Classification;
  if (s == "audit") return RecordKind::Audit;
  return std::nullopt;
}

double pct1(std::uint64_t count, std::uint64_t denominator) {
  if (denominator == 0) return 0.0;
  const double raw = static_cast<double>(count) * 100.0 /
                     static_cast<double>(denominator);
  return static_cast<double>(std::llround(raw * 10.0)) / 10.0;
}

std::string fmt_pct(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", pct);
  return buf;
}

OJson engagement_to_json(const Engagement& e) {
  return OJson{{"share_count", e.share_count},
               {"reaction_count", e.reaction_count},
               {"comment_count", e.comment_count},
               {"comment_plugin_count", e.comment_plugin_count}};
}

Engagement engagement_from_json(const OJson& j) {
  Engagement e;
  e.share_count = j.at("share_count").get<std::uint64_t>();
  e.reaction_count = j.at("reaction_count").get<std::uint64_t>();
  e.comment_count = j.at("comment_count").get<std::uint64_t>();
  e.comment_plugin_count = j.at("comment_plugin_count").get<std::uint64_t>();
  return e;
}

OJson to_payload(const ResolutionOutcome& o) {
  OJson j;
  j["doi"] = o.doi.str();
  j["outcome_class"] = to_string(o.outcome_class);
  j["final_url"] = o.final_url ? url_json(*o.final_url) : OJson(nullptr);
  j["http_status"] = o.http_status ? OJson(*o.http_status) : OJson(nullptr);
  OJson chain = OJson::array();
  for (const auto& u : o.redirect_chain) chain.push_back(u.str());
  j["redirect_chain"] = std::move(chain);
  j["failure_reason"] =
      o.failure_reason ? OJson(to_string(*o.failure_reason)) : OJson(nullptr);
  j["elapsed_ms"] = o.elapsed_ms;
  return j;
}

ResolutionOutcome resolution_from_payload(const OJson& j) {
  ResolutionOutcome o;
  o.doi = parse_doi(j.at("doi").get<std::string>());
  auto cls = outcome_class_from_string(j.at("outcome_class").get<std::string>());
  if (!cls) throw JournalError("unknown outcome_class in journal");
  o.outcome_class = *cls;
  if (!j.at("final_url").is_null())
    o.final_url = normalize_url(j.at("final_url").get<std::string>());
  if (!j.at("http_status").is_null())
    o.http_status = j.at("http_status").get<int>();
  for (const auto& u : j.at("redirect_chain"))
    o.redirect_chain.push_back(normalize_url(u.get<std::string>()));
  if (!j.at("failure_reason").is_null()) {
    auto reason =
        failure_reason_from_string(j.at("failure_reason").get<std::string>());
    if (!reason) throw JournalError("unknown failure_reason in journal");
    o.failure_reason = *reason;
  }
  o.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
  return o;
}

OJson to_payload(const Doi& doi, int variant, const GraphResponse& r) {
  OJson j;
  j["doi"] = doi.str();
  j["variant"] = variant;
  j["queried_url"] = r.queried_url.str();
  j["status"] = to_string(r.status);
  j["ob_id"] = r.ob_id ? OJson(*r.ob_id) : OJson(nullptr);
  j["engagement"] =
      r.engagement ? engagement_to_json(*r.engagement) : OJson(nullptr);
  return j;
}

OJson to_payload(const CaseClassification& c) {
  OJson j;
  j["doi"] = c.doi.str();
  j["variants_with_id"] = c.variants_with_id;
  j["anomalous_engagement_without_id"] = c.anomalous_engagement_without_id;
  j["has_not_matching_ids"] = c.has_not_matching_ids;
  j["has_matching_ids_matching_engagement"] =
      c.has_matching_ids_matching_engagement;
  j["has_matching_ids_not_matching_engagement"] =
      c.has_matching_ids_not_matching_engagement;
  return j;
}

JournalWriter::JournalWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::app | std::ios::binary) {
  if (!out_) throw JournalError("cannot open journal " + path.string());
}

void JournalWriter::append(RecordKind kind, const OJson& payload) {
  OJson record;
  record["ts"] = now_iso8601();
  record["kind"] = to_string(kind);
  record["schema_version"] = kJournalSchemaVersion;
  record["payload"] = payload;
  std::lock_guard lock(mutex_);
  out_ << record.dump() << '\n';
  out_.flush();
  if (!out_) throw JournalError("write failed on journal " + path_.string());
}

Journal Journal::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw JournalError("cannot read journal " + path.string());
  Journal journal;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    OJson j = OJson::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("payload"))
      throw JournalError(path.string() + ":" + std::to_string(line_no) +
                         ": not a journal record");
    JournalRecord rec;
    rec.ts = j.value("ts", "");
    auto kind = record_kind_from_string(j.value("kind", ""));
    if (!kind)
      throw JournalError(path.string() + ":" + std::to_string(line_no) +
                         ": unknown record kind");
    rec.kind = *kind;
    rec.schema_version = j.value("schema_version", 0);
    rec.payload = j.at("payload");
    journal.records_.push_back(std::move(rec));
  }
  return journal;
}

std::vector<ResolutionOutcome> Journal::resolutions() const {
  std::vector<ResolutionOutcome> out;
  for (const auto& rec : records_) {
    if (rec.kind == RecordKind::Resolution)
      out.push_back(resolution_from_payload(rec.payload));
  }
  return out;
}

std::vector<ResolutionOutcome> Journal::latest_resolutions() const {
  std::map<Doi, ResolutionOutcome> latest;
  for (auto& o : resolutions()) latest[o.doi] = std::move(o);
  std::vector<ResolutionOutcome> out;
  out.reserve(latest.size());
  for (auto& [doi, o] : latest) out.push_back(std::move(o));
  return out;
}

std::vector<VariantResponses> Journal::variant_responses() const {
  std::map<Doi, VariantResponses> by_doi;
  for (const auto& rec : records_) {
    if (rec.kind != RecordKind::GraphQuery) continue;
    const OJson& p = rec.payload;
    Doi doi = parse_doi(p.at("doi").get<std::string>());
    int variant = p.at("variant").get<int>();
    if (variant < 1 || variant > 4)
      throw JournalError("graph_query variant out of range");
    GraphResponse r;
    r.queried_url = normalize_url(p.at("queried_url").get<std::string>());
    auto status = graph_status_from_string(p.at("status").get<std::string>());
    if (!status) throw JournalError("unknown graph status in journal");
    r.status = *status;
    if (!p.at("ob_id").is_null()) r.ob_id = p.at("ob_id").get<std::string>();
    if (!p.at("engagement").is_null())
      r.engagement = engagement_from_json(p.at("engagement"));
    auto& vr = by_doi[doi];
    vr.doi = doi;
    vr.slots[variant - 1] = std::move(r);
  }
  std::vector<VariantResponses> out;
  out.reserve(by_doi.size());
  for (auto& [doi, vr] : by_doi) out.push_back(std::move(vr));
  return out;
}

CoverageReport coverage_report(std::span<const VariantResponses> all,
                               std::uint64_t denominator) {
  if (denominator == 0)
    throw EmptyInput("coverage_report: denominator must be >= 1");
  CoverageReport report;
  report.denominator = denominator;
  std::uint64_t any_id = 0, any_engaged = 0;
  for (const auto& vr : all) {
    bool has_id = false, has_engaged = false;
    for (int v = 0; v < 4; ++v) {
      const auto& slot = vr.slots[v];
      if (!slot) continue;
      if (slot->ob_id) {
        ++report.per_variant[v].with_ob_id;
        has_id = true;
      }
      if (slot->positive_engagement()) {
        ++report.per_variant[v].engaged;
        has_engaged = true;
      }
    }
    if (has_id) ++any_id;
    if (has_engaged) ++any_engaged;
  }
  report.any_variant.with_ob_id = any_id;
  report.any_variant.engaged = any_engaged;
  for (auto& row : report.per_variant) {
    row.with_ob_id_pct = pct1(row.with_ob_id, denominator);
    row.engaged_pct = pct1(row.engaged, denominator);
  }
  report.any_variant.with_ob_id_pct = pct1(any_id, denominator);
  report.any_variant.engaged_pct = pct1(any_engaged, denominator);
  return report;
}

CaseTable case_report(std::span<const CaseClassification> classifications) {
  CaseTable table;
  for (int i = 0; i < 5; ++i) {
    table.rows[i].variants_with_id = i;
    if (i >= 2) {
      table.rows[i].not_matching_ids = 0;
      table.rows[i].matching_ids_matching_engagement = 0;
      table.rows[i].matching_ids_not_matching_engagement = 0;
    }
  }
  for (const auto& c : classifications) {
    if (c.variants_with_id < 0 || c.variants_with_id > 4) continue;
    auto& row = table.rows[c.variants_with_id];
    ++row.count;
    ++table.totals.count;
    if (c.variants_with_id >= 2) {
      if (c.has_not_matching_ids) {
        ++*row.not_matching_ids;
        ++table.totals.not_matching_ids;
      }
      if (c.has_matching_ids_matching_engagement) {
        ++*row.matching_ids_matching_engagement;
        ++table.totals.matching_ids_matching_engagement;
      }
      if (c.has_matching_ids_not_matching_engagement) {
        ++*row.matching_ids_not_matching_engagement;
        ++table.totals.matching_ids_not_matching_engagement;
      }
    }
  }
  return table;
}

ProtocolSplit protocol_split(std::span<const ResolutionOutcome> outcomes) {
  ProtocolSplit split;
  for (const auto& o : outcomes) {
    if (!o.final_url) continue;
    if (o.final_url->scheme == Scheme::Https)
      ++split.https_count;
    else
      ++split.http_count;
  }
  const std::uint64_t resolved = split.http_count + split.https_count;
  split.http_pct = pct1(split.http_count, resolved);
  split.https_pct = pct1(split.https_count, resolved);
  return split;
}

std::vector<LayoutChange> diff_layout_changes(const Journal& journal) {
  std::map<Doi, std::vector<NormalizedUrl>> history;
  for (const auto& o : journal.resolutions()) {
    if (o.final_url) history[o.doi].push_back(*o.final_url);
  }
  bool any_repeat = false;
  for (const auto& [doi, urls] : history)
    if (urls.size() >= 2) any_repeat = true;
  if (!any_repeat)
    throw InsufficientRuns("journal holds no DOI resolved more than once");

  std::vector<LayoutChange> changes;
  for (const auto& [doi, urls] : history) {
    for (std::size_t i = 1; i < urls.size(); ++i) {
      if (urls[i] != urls[i - 1])
        changes.push_back({doi, urls[i - 1], urls[i]});
    }
  }
  return changes;
}

std::optional<ExportFormat> export_format_from_string(std::string_view s) {
  if (s == "csv") return ExportFormat::Csv;
  if (s == "json") return ExportFormat::Json;
  return std::nullopt;
}

// --- coverage ---------------------------------------------------------

std::string export_report(const CoverageReport& r, ExportFormat f) {
  if (f == ExportFormat::Csv) {
    std::string out = "variant,with_ob_id,with_ob_id_pct,engaged,engaged_pct\n";
    auto row = [&](const std::string& name, const CoverageRow& c) {
      out += name + ',' + std::to_string(c.with_ob_id) + ',' +
             fmt_pct(c.with_ob_id_pct) + ',' + std::to_string(c.engaged) +
             ',' + fmt_pct(c.engaged_pct) + '\n';
    };
    for (int v = 0; v < 4; ++v) row(std::to_string(v + 1), r.per_variant[v]);
    row("any", r.any_variant);
    out += "denominator," + std::to_string(r.denominator) + ",,,\n";
    return out;
  }
  OJson j;
  j["denominator"] = r.denominator;
  OJson rows = OJson::array();
  for (int v = 0; v < 4; ++v) {
    const auto& c = r.per_variant[v];
    rows.push_back(OJson{{"variant", v + 1},
                         {"with_ob_id", c.with_ob_id},
                         {"with_ob_id_pct", c.with_ob_id_pct},
                         {"engaged", c.engaged},
                         {"engaged_pct", c.engaged_pct}});
  }
  j["rows"] = std::move(rows);
  j["any_variant"] = OJson{{"with_ob_id", r.any_variant.with_ob_id},
                           {"with_ob_id_pct", r.any_variant.with_ob_id_pct},
                           {"engaged", r.any_variant.engaged},
                           {"engaged_pct", r.any_variant.engaged_pct}};
  return j.dump(2) + "\n";
}

CoverageReport load_coverage(const std::string& bytes, ExportFormat f) {
  CoverageReport r;
  if (f == ExportFormat::Csv) {
    auto lines = csv_lines(bytes);
    auto parse_row = [](const std::vector<std::string>& fields) {
      CoverageRow c;
      c.with_ob_id = to_u64(fields.at(1));
      c.with_ob_id_pct = std::stod(fields.at(2));
      c.engaged = to_u64(fields.at(3));
      c.engaged_pct = std::stod(fields.at(4));
      return c;
    };
    for (std::size_t i = 1; i < lines.size(); ++i) {
      auto fields = csv_split(lines[i]);
      if (fields.at(0) == "any") {
        r.any_variant = parse_row(fields);
      } else if (fields.at(0) == "denominator") {
        r.denominator = to_u64(fields.at(1));
      } else {
        int v = std::stoi(fields.at(0));
        r.per_variant.at(v - 1) = parse_row(fields);
      }
    }
    return r;
  }
  OJson j = OJson::parse(bytes);
  r.denominator = j.at("denominator").get<std::uint64_t>();
  for (const auto& row : j.at("rows")) {
    int v = row.at("variant").get<int>();
    auto& c = r.per_variant.at(v - 1);
    c.with_ob_id = row.at("with_ob_id").get<std::uint64_t>();
    c.with_ob_id_pct = row.at("with_ob_id_pct").get<double>();
    c.engaged = row.at("engaged").get<std::uint64_t>();
    c.engaged_pct = row.at("engaged_pct").get<double>();
  }
  const auto& any = j.at("any_variant");
  r.any_variant.with_ob_id = any.at("with_ob_id").get<std::uint64_t>();
  r.any_variant.with_ob_id_pct = any.at("with_ob_id_pct").get<double>();
  r.any_variant.engaged = any.at("engaged").get<std::uint64_t>();
  r.any_variant.engaged_pct = any.at("engaged_pct").get<double>();
  return r;
}

// --- case table -------------------------------------------------------

std::string export_report(const CaseTable& t, ExportFormat f) {
  if (f == ExportFormat::Csv) {
    std::string out =
        "variants_with_id,count,not_matching_ids,"
        "matching_ids_matching_engagement,"
        "matching_ids_not_matching_engagement\n";
    auto cell = [](const std::optional<std::uint64_t>& v) {
      return v ? std::to_string(*v) : std::string();
    };
    for (const auto& row : t.rows) {
      out += std::to_string(row.variants_with_id) + ',' +
             std::to_string(row.count) + ',' + cell(row.not_matching_ids) +
             ',' + cell(row.matching_ids_matching_engagement) + ',' +
             cell(row.matching_ids_not_matching_engagement) + '\n';
    }
    out += "total," + std::to_string(t.totals.count) + ',' +
           std::to_string(t.totals.not_matching_ids) + ',' +
           std::to_string(t.totals.matching_ids_matching_engagement) + ',' +
           std::to_string(t.totals.matching_ids_not_matching_engagement) +
           '\n';
    return out;
  }
  OJson j;
  OJson rows = OJson::array();
  auto cell = [](const std::optional<std::uint64_t>& v) {
    return v ? OJson(*v) : OJson(nullptr);
  };
  for (const auto& row : t.rows) {
    rows.push_back(
        OJson{{"variants_with_id", row.variants_with_id},
              {"count", row.count},
              {"not_matching_ids", cell(row.not_matching_ids)},
              {"matching_ids_matching_engagement",
               cell(row.matching_ids_matching_engagement)},
              {"matching_ids_not_matching_engagement",
               cell(row.matching_ids_not_matching_engagement)}});
  }
  j["rows"] = std::move(rows);
  j["totals"] = OJson{
      {"count", t.totals.count},
      {"not_matching_ids", t.totals.not_matching_ids},
      {"matching_ids_matching_engagement",
       t.totals.matching_ids_matching_engagement},
      {"matching_ids_not_matching_engagement",
       t.totals.matching_ids_not_matching_engagement}};
  return j.dump(2) + "\n";
}

CaseTable load_case_table(const std::string& bytes, ExportFormat f) {
  CaseTable t;
  if (f == ExportFormat::Csv) {
    auto lines = csv_lines(bytes);
    auto cell = [](const std::string& s) -> std::optional<std::uint64_t> {
      if (s.empty()) return std::nullopt;
      return to_u64(s);
    };
    for (std::size_t i = 1; i < lines.size(); ++i) {
      auto fields = csv_split(lines[i]);
      if (fields.at(0) == "total") {
        t.totals.count = to_u64(fields.at(1));
        t.totals.not_matching_ids = to_u64(fields.at(2));
        t.totals.matching_ids_matching_engagement = to_u64(fields.at(3));
        t.totals.matching_ids_not_matching_engagement = to_u64(fields.at(4));
      } else {
        int v = std::stoi(fields.at(0));
        auto& row = t.rows.at(v);
        row.variants_with_id = v;
        row.count = to_u64(fields.at(1));
        row.not_matching_ids = cell(fields.at(2));
        row.matching_ids_matching_engagement = cell(fields.at(3));
        row.matching_ids_not_matching_engagement = cell(fields.at(4));
      }
    }
    return t;
  }
  OJson j = OJson::parse(bytes);
  auto cell = [](const OJson& v) -> std::optional<std::uint64_t> {
    if (v.is_null()) return std::nullopt;
    return v.get<std::uint64_t>();
  };
  for (const auto& row : j.at("rows")) {
    int v = row.at("variants_with_id").get<int>();
    auto& r = t.rows.at(v);
    r.variants_with_id = v;
    r.count = row.at("count").get<std::uint64_t>();
    r.not_matching_ids = cell(row.at("not_matching_ids"));
    r.matching_ids_matching_engagement =
        cell(row.at("matching_ids_matching_engagement"));
    r.matching_ids_not_matching_engagement =
        cell(row.at("matching_ids_not_matching_engagement"));
  }
  const auto& totals = j.at("totals");
  t.totals.count = totals.at("count").get<std::uint64_t>();
  t.totals.not_matching_ids =
      totals.at("not_matching_ids").get<std::uint64_t>();
  t.totals.matching_ids_matching_engagement =
      totals.at("matching_ids_matching_engagement").get<std::uint64_t>();
  t.totals.matching_ids_not_matching_engagement =
      totals.at("matching_ids_not_matching_engagement").get<std::uint64_t>();
  return t;
}

// --- protocol split ---------------------------------------------------

std::string export_report(const ProtocolSplit& s, ExportFormat f) {
  if (f == ExportFormat::Csv) {
    std::string out = "scheme,count,pct\n";
    out += "http," + std::to_string(s.http_count) + ',' +
           fmt_pct(s.http_pct) + '\n';
    out += "https," + std::to_string(s.https_count) + ',' +
           fmt_pct(s.https_pct) + '\n';
    return out;
  }
  OJson j;
  j["http"] = OJson{{"count", s.http_count}, {"pct", s.http_pct}};
  j["https"] = OJson{{"count", s.https_count}, {"pct", s.https_pct}};
  return j.dump(2) + "\n";
}

ProtocolSplit load_protocol_split(const std::string& bytes, ExportFormat f) {
  ProtocolSplit s;
  if (f == ExportFormat::Csv) {
    for (const auto& line : csv_lines(bytes)) {
      auto fields = csv_split(line);
      if (fields.at(0) == "http") {
        s.http_count = to_u64(fields.at(1));
        s.http_pct = std::stod(fields.at(2));
      } else if (fields.at(0) == "https") {
        s.https_count = to_u64(fields.at(1));
        s.https_pct = std::stod(fields.at(2));
      }
    }
    return s;
  }
  OJson j = OJson::parse(bytes);
  s.http_count = j.at("http").at("count").get<std::uint64_t>();
  s.http_pct = j.at("http").at("pct").get<double>();
  s.https_count = j.at("https").at("count").get<std::uint64_t>();
  s.https_pct = j.at("https").at("pct").get<double>();
  return s;
}

// --- collisions -------------------------------------------------------

std::string export_report(const CollisionReport& c, ExportFormat f) {
  if (f == ExportFormat::Csv) {
    std::string out = "ob_id,doi_count,dois\n";
    for (const auto& g : c.groups) {
      std::string dois;
      for (const auto& d : g.dois) {
        if (!dois.empty()) dois += ';';
        dois += d.str();
      }
      out += csv_escape(g.ob_id) + ',' + std::to_string(g.dois.size()) + ',' +
             csv_escape(dois) + '\n';
    }
    return out;
  }
  OJson j;
  OJson groups = OJson::array();
  for (const auto& g : c.groups) {
    OJson dois = OJson::array();
    for (const auto& d : g.dois) dois.push_back(d.str());
    groups.push_back(OJson{{"ob_id", g.ob_id}, {"dois", std::move(dois)}});
  }
  j["groups"] = std::move(groups);
  return j.dump(2) + "\n";
}

CollisionReport load_collision_report(const std::string& bytes,
                                      ExportFormat f) {
  CollisionReport c;
  if (f == ExportFormat::Csv) {
    auto lines = csv_lines(bytes);
    for (std::size_t i = 1; i < lines.size(); ++i) {
      auto fields = csv_split(lines[i]);
      CollisionGroup g;
      g.ob_id = fields.at(0);
      std::istringstream dois(fields.at(2));
      std::string doi;
      while (std::getline(dois, doi, ';')) g.dois.push_back(parse_doi(doi));
      c.groups.push_back(std::move(g));
    }
    return c;
  }
  OJson j = OJson::parse(bytes);
  for (const auto& grp : j.at("groups")) {
    CollisionGroup g;
    g.ob_id = grp.at("ob_id").get<std::string>();
    for (const auto& d : grp.at("dois"))
      g.dois.push_back(parse_doi(d.get<std::string>()));
    c.groups.push_back(std::move(g));
  }
  return c;
}

// --- problem summary ---------------------------------------------------

std::string export_report(const ProblemSummary& p, ExportFormat f) {
  const std::vector<std::pair<std::string, std::uint64_t>> counters = {
      {"case2_residue", p.case2_residue},
      {"collision_articles", p.collision_articles},
      {"engaged_collision_articles", p.engaged_collision_articles},
      {"non_engaged_collision_articles", p.non_engaged_collision_articles},
      {"union_case23", p.union_case23},
      {"failed_resolutions", p.failed_resolutions},
      {"grand_total", p.grand_total},
      {"engaged_denominator", p.engaged_denominator},
      {"total_denominator", p.total_denominator},
  };
  if (f == ExportFormat::Csv) {
    std::string out = "key,value\n";
    for (const auto& [key, value] : counters)
      out += key + ',' + std::to_string(value) + '\n';
    out += "union_pct," + fmt_pct(p.union_pct) + '\n';
    out += "grand_pct," + fmt_pct(p.grand_pct) + '\n';
    return out;
  }
  OJson j;
  for (const auto& [key, value] : counters) j[key] = value;
  j["union_pct"] = p.union_pct;
  j["grand_pct"] = p.grand_pct;
  return j.dump(2) + "\n";
}

ProblemSummary load_problem_summary(const std::string& bytes, ExportFormat f) {
  ProblemSummary p;
  auto assign = [&](const std::string& key, const std::string& value) {
    if (key == "case2_residue") p.case2_residue = to_u64(value);
    else if (key == "collision_articles") p.collision_articles = to_u64(value);
    else if (key == "engaged_collision_articles")
      p.engaged_collision_articles = to_u64(value);
    else if (key == "non_engaged_collision_articles")
      p.non_engaged_collision_articles = to_u64(value);
    else if (key == "union_case23") p.union_case23 = to_u64(value);
    else if (key == "failed_resolutions") p.failed_resolutions = to_u64(value);
    else if (key == "grand_total") p.grand_total = to_u64(value);
    else if (key == "engaged_denominator")
      p.engaged_denominator = to_u64(value);
    else if (key == "total_denominator") p.total_denominator = to_u64(value);
    else if (key == "union_pct") p.union_pct = std::stod(value);
    else if (key == "grand_pct") p.grand_pct = std::stod(value);
  };
  if (f == ExportFormat::Csv) {
    auto lines = csv_lines(bytes);
    for (std::size_t i = 1; i < lines.size(); ++i) {
      auto fields = csv_split(lines[i]);
      assign(fields.at(0), fields.at(1));
    }
    return p;
  }
  OJson j = OJson::parse(bytes);
  for (const auto& [key, value] : j.items())
    assign(key, value.is_number_float()
                    ? fmt_pct(value.get<double>())
                    : std::to_string(value.get<std::uint64_t>()));
  return p;
}

// --- resolution stats ---------------------------------------------------

std::string export_report(const ResolutionStats& s, ExportFormat f) {
  if (f == ExportFormat::Csv) {
    std::string out = "row,count,pct\n";
    out += "resolved_ok," + std::to_string(s.ok) + ',' + fmt_pct(s.ok_pct) +
           '\n';
    out += "resolved_with_error," + std::to_string(s.with_error) + ',' +
           fmt_pct(s.with_error_pct) + '\n';
    out += "total_resolved," + std::to_string(s.resolved()) + ',' +
           fmt_pct(s.resolved_pct) + '\n';
    out += "failed," + std::to_string(s.failed) + ',' + fmt_pct(s.failed_pct) +
           '\n';
    out += "total," + std::to_string(s.total()) + ",100.0\n";
    return out;
  }
  OJson j;
  j["resolved_ok"] = OJson{{"count", s.ok}, {"pct", s.ok_pct}};
  j["resolved_with_error"] =
      OJson{{"count", s.with_error}, {"pct", s.with_error_pct}};
  j["total_resolved"] =
      OJson{{"count", s.resolved()}, {"pct", s.resolved_pct}};
  j["failed"] = OJson{{"count", s.failed}, {"pct", s.failed_pct}};
  j["total"] = OJson{{"count", s.total()}, {"pct", 100.0}};
  return j.dump(2) + "\n";
}

// --- per-article engagement ----------------------------------------------

std::string export_report(std::span<const ArticleEngagement> articles,
                          ExportFormat f) {
  if (f == ExportFormat::Csv) {
    std::string out =
        "doi,share_count,reaction_count,comment_count,comment_plugin_count,"
        "total,ambiguous,collision_excluded\n";
    for (const auto& a : articles) {
      out += csv_escape(a.doi.str()) + ',' +
             std::to_string(a.total.share_count) + ',' +
             std::to_string(a.total.reaction_count) + ',' +
             std::to_string(a.total.comment_count) + ',' +
             std::to_string(a.total.comment_plugin_count) + ',' +
             std::to_string(a.total.total()) + ',' +
             (a.ambiguous ? "true" : "false") + ',' +
             (a.collision_excluded ? "true" : "false") + '\n';
    }
    return out;
  }
  OJson arr = OJson::array();
  for (const auto& a : articles) {
    OJson per_object = OJson::object();
    for (const auto& [id, e] : a.per_object)
      per_object[id] = engagement_to_json(e);
    arr.push_back(OJson{
        {"doi", a.doi.str()},
        {"total", engagement_to_json(a.total)},
        {"per_object", std::move(per_object)},
        {"anonymous",
         a.anonymous ? engagement_to_json(*a.anonymous) : OJson(nullptr)},
        {"ambiguous", a.ambiguous},
        {"collision_excluded", a.collision_excluded}});
  }
  OJson j;
  j["articles"] = std::move(arr);
  return j.dump(2) + "\n";
}

}  // namespace ogr

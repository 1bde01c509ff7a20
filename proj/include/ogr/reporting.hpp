#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ogr/graph.hpp"
#include "ogr/reconcile.hpp"
#include "ogr/resolver.hpp"

namespace ogr {

using OJson = nlohmann::ordered_json;

enum class RecordKind { Resolution, GraphQuery, Classification, Audit };

const char* to_string(RecordKind k);
std::optional<RecordKind> record_kind_from_string(std::string_view s);

inline constexpr int kJournalSchemaVersion = 1;

struct JournalRecord {
  std::string ts;
  RecordKind kind;
  int schema_version = kJournalSchemaVersion;
  OJson payload;
};

// json payload codecs shared by the journal and the mock fixtures
OJson to_payload(const ResolutionOutcome& o);
ResolutionOutcome resolution_from_payload(const OJson& j);
OJson to_payload(const Doi& doi, int variant, const GraphResponse& r);
OJson to_payload(const CaseClassification& c);
OJson engagement_to_json(const Engagement& e);
Engagement engagement_from_json(const OJson& j);

/// Append-only, line-delimited journal: {"ts","kind","schema_version","payload"}
/// one JSON document per line. Appends are flushed per record so a crash
/// mid-run loses at most the line being written.
class JournalWriter {
 public:
  explicit JournalWriter(const std::filesystem::path& path);
  void append(RecordKind kind, const OJson& payload);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::mutex mutex_;
};

class Journal {
 public:
  static Journal load(const std::filesystem::path& path);  // throws JournalError

  const std::vector<JournalRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }

  /// Resolution records in journal order (one entry per record; a DOI
  /// re-resolved in a later run appears once per run).
  std::vector<ResolutionOutcome> resolutions() const;

  /// Latest resolution per DOI, sorted by DOI.
  std::vector<ResolutionOutcome> latest_resolutions() const;

  /// Graph query records folded into per-article slots, sorted by DOI.
  /// A re-queried slot keeps the latest record.
  std::vector<VariantResponses> variant_responses() const;

 private:
  std::vector<JournalRecord> records_;
};

struct CoverageRow {
  std::uint64_t with_ob_id = 0;
  double with_ob_id_pct = 0;
  std::uint64_t engaged = 0;
  double engaged_pct = 0;

  bool operator==(const CoverageRow&) const = default;
};

struct CoverageReport {
  std::uint64_t denominator = 0;          // resolved DOIs
  std::array<CoverageRow, 4> per_variant;  // index = variant - 1
  CoverageRow any_variant;

  bool operator==(const CoverageReport&) const = default;
};

struct CaseRow {
  int variants_with_id = 0;
  std::uint64_t count = 0;
  // Pair columns only exist for rows with >= 2 IDs.
  std::optional<std::uint64_t> not_matching_ids;
  std::optional<std::uint64_t> matching_ids_matching_engagement;
  std::optional<std::uint64_t> matching_ids_not_matching_engagement;

  bool operator==(const CaseRow&) const = default;
};

struct CaseTotals {
  std::uint64_t count = 0;
  std::uint64_t not_matching_ids = 0;
  std::uint64_t matching_ids_matching_engagement = 0;
  std::uint64_t matching_ids_not_matching_engagement = 0;

  bool operator==(const CaseTotals&) const = default;
};

struct CaseTable {
  std::array<CaseRow, 5> rows;  // variants_with_id 0..4
  CaseTotals totals;

  bool operator==(const CaseTable&) const = default;
};

struct ProtocolSplit {
  std::uint64_t http_count = 0;
  double http_pct = 0;
  std::uint64_t https_count = 0;
  double https_pct = 0;

  bool operator==(const ProtocolSplit&) const = default;
};

struct LayoutChange {
  Doi doi;
  NormalizedUrl old_url;
  NormalizedUrl new_url;

  bool operator==(const LayoutChange&) const = default;
};

/// count/denominator as a percentage rounded to one decimal.
double pct1(std::uint64_t count, std::uint64_t denominator);
std::string fmt_pct(double pct);

CoverageReport coverage_report(std::span<const VariantResponses> all,
                               std::uint64_t denominator);

/// Input should be pre-filtered to positively engaged articles; the caller
/// owns that cut so the table's denominator matches its report.
CaseTable case_report(std::span<const CaseClassification> classifications);

ProtocolSplit protocol_split(std::span<const ResolutionOutcome> outcomes);

/// DOIs whose final URL moved between consecutive resolutions in the
/// journal. Throws InsufficientRuns when no DOI was resolved twice.
std::vector<LayoutChange> diff_layout_changes(const Journal& journal);

enum class ExportFormat { Csv, Json };
std::optional<ExportFormat> export_format_from_string(std::string_view s);

std::string export_report(const CoverageReport& r, ExportFormat f);
std::string export_report(const CaseTable& t, ExportFormat f);
std::string export_report(const ProtocolSplit& s, ExportFormat f);
std::string export_report(const CollisionReport& c, ExportFormat f);
std::string export_report(const ProblemSummary& p, ExportFormat f);
std::string export_report(const ResolutionStats& s, ExportFormat f);
std::string export_report(std::span<const ArticleEngagement> articles,
                          ExportFormat f);

CoverageReport load_coverage(const std::string& bytes, ExportFormat f);
CaseTable load_case_table(const std::string& bytes, ExportFormat f);
ProtocolSplit load_protocol_split(const std::string& bytes, ExportFormat f);
CollisionReport load_collision_report(const std::string& bytes, ExportFormat f);
ProblemSummary load_problem_summary(const std::string& bytes, ExportFormat f);

}  // namespace ogr

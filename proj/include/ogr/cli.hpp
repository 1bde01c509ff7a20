#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ogr/audit.hpp"
#include "ogr/graph.hpp"
#include "ogr/reconcile.hpp"
#include "ogr/reporting.hpp"
#include "ogr/resolver.hpp"

namespace ogr {

// Exit codes: 0 clean, 1 operator error (bad input/config), 2 data-level
// failures or findings (unresolved DOIs, audit failures, policy conflicts).
inline constexpr int kExitOk = 0;
inline constexpr int kExitOperatorError = 1;
inline constexpr int kExitFindings = 2;

struct ResolveArgs {
  std::filesystem::path input;
  std::filesystem::path journal;
  ResolverConfig config;
};

struct CollectArgs {
  std::filesystem::path journal;
  GraphClientConfig config;
};

struct ReconcileArgs {
  std::filesystem::path journal;
  ConflictPolicy policy = ConflictPolicy::MaxPerField;
  ExportFormat format = ExportFormat::Csv;
  std::filesystem::path out_dir;
};

struct AuditArgs {
  std::optional<std::filesystem::path> urls_file;
  std::optional<std::filesystem::path> journal;
  AuditConfig config;
  int timeout_ms = 10000;
};

struct MockGenArgs {
  std::optional<std::filesystem::path> spec_path;
  std::string preset;  // "reference" or "reference-tenth"; empty when spec_path given
  std::uint64_t seed = 1;
  std::filesystem::path out;
  std::optional<std::filesystem::path> dois_out;
};

struct MockServeArgs {
  std::filesystem::path fixture;
  std::string bind = "127.0.0.1:0";
};

int cmd_resolve(const ResolveArgs& args);
int cmd_collect(const CollectArgs& args);
int cmd_reconcile(const ReconcileArgs& args);
int cmd_audit(const AuditArgs& args);
int cmd_mock_gen(const MockGenArgs& args);
int cmd_mock_serve(const MockServeArgs& args);

int run_cli(int argc, char** argv);

}  // namespace ogr

#include "ogr/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <thread>

#include "ogr/errors.hpp"
#include "ogr/fixtures.hpp"
#include "ogr/mock_server.hpp"
#include "ogr/version.hpp"

namespace ogr {

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void print_resolution_summary(const ResolutionStats& s, std::ostream& out) {
  out << "Resolution summary\n";
  out << "  resolved ok          " << s.ok << "\t" << fmt_pct(s.ok_pct)
      << "%\n";
  out << "  resolved with error  " << s.with_error << "\t"
      << fmt_pct(s.with_error_pct) << "%\n";
  out << "  total resolved       " << s.resolved() << "\t"
      << fmt_pct(s.resolved_pct) << "%\n";
  out << "  failed               " << s.failed << "\t" << fmt_pct(s.failed_pct)
      << "%\n";
  out << "  total                " << s.total() << "\t100.0%\n";
}

std::string format_extension(ExportFormat f) {
  return f == ExportFormat::Csv ? ".csv" : ".json";
}

}  // namespace

int cmd_resolve(const ResolveArgs& args) {
  std::vector<Doi> dois;
  std::size_t malformed = 0;
  try {
    std::size_t line_no = 0;
    for (const auto& line : read_lines(args.input)) {
      ++line_no;
      std::string_view v(line);
      if (auto hash = v.find('#'); hash != std::string_view::npos)
        v = v.substr(0, hash);
      while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back())))
        v.remove_suffix(1);
      while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front())))
        v.remove_prefix(1);
      if (v.empty()) continue;
      if (auto doi = try_parse_doi(v)) {
        dois.push_back(std::move(*doi));
      } else {
        ++malformed;
        std::cerr << args.input.string() << ":" << line_no
                  << ": malformed DOI: " << v << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOperatorError;
  }
  if (dois.empty() && malformed == 0) {
    std::cerr << "error: no DOIs in " << args.input.string() << "\n";
    return kExitOperatorError;
  }

  try {
    JournalWriter journal(args.journal);

    // resume: skip DOIs that already have a resolution record
    std::set<Doi> done;
    if (std::filesystem::exists(args.journal) &&
        std::filesystem::file_size(args.journal) > 0) {
      for (const auto& o : Journal::load(args.journal).resolutions())
        done.insert(o.doi);
    }
    std::vector<Doi> todo;
    for (auto& d : dois)
      if (!done.contains(d)) todo.push_back(std::move(d));
    std::sort(todo.begin(), todo.end());
    todo.erase(std::unique(todo.begin(), todo.end()), todo.end());

    resolve_all(todo, args.config, [&](const ResolutionOutcome& o) {
      journal.append(RecordKind::Resolution, to_payload(o));
    });

    auto all = Journal::load(args.journal).latest_resolutions();
    auto stats = resolution_stats(all);
    print_resolution_summary(stats, std::cout);
    return (stats.failed > 0 || malformed > 0) ? kExitFindings : kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOperatorError;
  }
}

int cmd_collect(const CollectArgs& args) {
  try {
    auto journal_data = Journal::load(args.journal);
    auto resolutions = journal_data.latest_resolutions();
    if (resolutions.empty()) {
      std::cerr << "error: no resolution records in "
                << args.journal.string() << "\n";
      return kExitOperatorError;
    }

    // the endpoint must be reachable before a long batch starts
    GraphClient client(args.config);
    {
      auto base = try_parse_url(args.config.endpoint_base);
      if (!base) {
        std::cerr << "error: bad graph endpoint "
                  << args.config.endpoint_base << "\n";
        return kExitOperatorError;
      }
      auto probe = client.query_object(*base);
      if (probe.status == GraphStatus::NetworkError) {
        std::cerr << "error: graph endpoint unreachable or rejecting "
                  << "requests at " << args.config.endpoint_base
                  << " (check --graph-base and the token)\n";
        return kExitOperatorError;
      }
    }

    // resume: skip articles that already have query records
    std::set<Doi> done;
    for (const auto& vr : journal_data.variant_responses())
      done.insert(vr.doi);

    std::vector<std::pair<Doi, VariantSet>> todo;
    for (const auto& o : resolutions) {
      if (done.contains(o.doi)) continue;
      todo.emplace_back(o.doi, make_variant_set(o.doi, o.final_url));
    }

    JournalWriter journal(args.journal);
    std::size_t queried = 0;
    client.query_all(todo, [&](const VariantResponses& vr) {
      for (int v = 1; v <= 4; ++v) {
        if (!vr.slots[v - 1]) continue;
        journal.append(RecordKind::GraphQuery,
                       to_payload(vr.doi, v, *vr.slots[v - 1]));
        ++queried;
      }
    });
    std::cout << "collected " << queried << " graph responses for "
              << todo.size() << " articles (" << done.size()
              << " already present)\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOperatorError;
  }
}

int cmd_reconcile(const ReconcileArgs& args) {
  try {
    auto journal_data = Journal::load(args.journal);
    if (journal_data.empty()) {
      std::cerr << "error: journal is empty\n";
      return kExitOperatorError;
    }
    auto resolutions = journal_data.latest_resolutions();
    auto responses = journal_data.variant_responses();
    if (resolutions.empty() || responses.empty()) {
      std::cerr << "error: journal must hold resolution and graph records\n";
      return kExitOperatorError;
    }

    auto stats = resolution_stats(resolutions);

    std::vector<CaseClassification> engaged;
    for (const auto& vr : responses)
      if (vr.any_positive_engagement()) engaged.push_back(classify_article(vr));

    auto table = case_report(engaged);
    auto coverage = coverage_report(responses, stats.resolved());
    auto split = protocol_split(resolutions);
    auto collisions = detect_object_collisions(responses);
    auto summary = problem_summary(engaged, collisions, stats);

    std::set<Doi> collided;
    for (const auto& g : collisions.groups)
      for (const auto& d : g.dois) collided.insert(d);

    std::vector<ArticleEngagement> articles;
    for (const auto& vr : responses) {
      if (!vr.any_positive_engagement()) continue;
      auto a = aggregate_engagement(vr, args.policy);
      a.collision_excluded = collided.contains(vr.doi);
      articles.push_back(std::move(a));
    }

    JournalWriter journal(args.journal);
    for (const auto& c : engaged)
      journal.append(RecordKind::Classification, to_payload(c));

    std::filesystem::create_directories(args.out_dir);
    const std::string ext = format_extension(args.format);
    auto write = [&](const std::string& name, const std::string& bytes) {
      std::ofstream out(args.out_dir / (name + ext), std::ios::binary);
      out << bytes;
      if (!out) throw std::runtime_error("cannot write " + name + ext);
    };
    write("resolution", export_report(stats, args.format));
    write("coverage", export_report(coverage, args.format));
    write("cases", export_report(table, args.format));
    write("protocol", export_report(split, args.format));
    write("collisions", export_report(collisions, args.format));
    write("summary", export_report(summary, args.format));
    write("engagement",
          export_report(std::span<const ArticleEngagement>(articles),
                        args.format));

    std::cout << "articles with positive engagement: " << table.totals.count
              << "\n";
    std::cout << "  conflicting engagement on a shared object: "
              << table.totals.matching_ids_not_matching_engagement << "\n";
    std::cout << "  object collisions: " << collisions.groups.size()
              << " objects across " << summary.collision_articles
              << " articles\n";
    std::cout << "  combined problem articles: " << summary.union_case23
              << " (" << fmt_pct(summary.union_pct) << "% of engaged)\n";
    std::cout << "  grand total with failed resolutions: "
              << summary.grand_total << " (" << fmt_pct(summary.grand_pct)
              << "% of " << summary.total_denominator << ")\n";
    std::cout << "reports written to " << args.out_dir.string() << "\n";
    return kExitOk;
  } catch (const AmbiguousEngagement& e) {
    std::cerr << "conflicting engagement for DOI " << e.doi << "\n";
    return kExitFindings;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOperatorError;
  }
}

int cmd_audit(const AuditArgs& args) {
  try {
    bool any_failure = false;
    HttpPageFetcher fetcher(args.timeout_ms, 15,
                            std::string("og-reconcile/") + kVersion);

    std::vector<NormalizedUrl> targets;
    if (args.urls_file) {
      for (const auto& line : read_lines(*args.urls_file)) {
        if (line.empty() || line.front() == '#') continue;
        targets.push_back(normalize_url(line));
      }
    }

    if (args.journal) {
      auto journal_data = Journal::load(*args.journal);
      try {
        for (const auto& change : diff_layout_changes(journal_data)) {
          any_failure = true;
          std::cout << change.doi.str() << " layout changed: "
                    << change.old_url.str() << " -> " << change.new_url.str()
                    << "\n";
        }
      } catch (const InsufficientRuns&) {
        // single-run journals have no cross-run story to tell
      }
      if (!args.urls_file) {
        for (const auto& o : journal_data.latest_resolutions())
          if (o.final_url) targets.push_back(*o.final_url);
      }
    }

    if (targets.empty() && !args.journal) {
      std::cerr << "error: nothing to audit\n";
      return kExitOperatorError;
    }

    std::unique_ptr<JournalWriter> journal;
    if (args.journal) journal = std::make_unique<JournalWriter>(*args.journal);

    for (const auto& url : targets) {
      auto report = audit_page(url, fetcher, args.config);
      if (journal) {
        OJson findings = OJson::array();
        for (const auto& f : report.findings)
          findings.push_back(OJson{{"check", to_string(f.check)},
                                   {"severity", to_string(f.severity)},
                                   {"detail", f.detail}});
        journal->append(RecordKind::Audit, OJson{{"url", url.str()},
                                                 {"findings", findings}});
      }
      if (report.findings.empty()) {
        std::cout << url.str() << " ok\n";
        continue;
      }
      for (const auto& f : report.findings) {
        std::cout << url.str() << " " << to_string(f.severity) << " "
                  << to_string(f.check) << ": " << f.detail << "\n";
        if (f.severity == Severity::Fail) any_failure = true;
      }
    }
    return any_failure ? kExitFindings : kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOperatorError;
  }
}

int cmd_mock_gen(const MockGenArgs& args) {
  try {
    FixtureSpec spec;
    if (args.spec_path) {
      std::ifstream in(*args.spec_path);
      if (!in)
        throw std::runtime_error("cannot read " + args.spec_path->string());
      spec = FixtureSpec::from_json(nlohmann::json::parse(in));
    } else if (args.preset == "reference") {
      spec = FixtureSpec::reference();
    } else if (args.preset == "reference-tenth") {
      spec = FixtureSpec::reference_scaled_tenth();
    } else {
      std::cerr << "error: pass --spec FILE or --preset reference|reference-tenth\n";
      return kExitOperatorError;
    }

    auto fixture = generate_fixture(spec, args.seed);
    {
      std::ofstream out(args.out, std::ios::binary);
      out << fixture.to_json().dump() << "\n";
      if (!out) throw std::runtime_error("cannot write " + args.out.string());
    }
    if (args.dois_out) {
      std::ofstream out(*args.dois_out, std::ios::binary);
      for (const auto& [doi, script] : fixture.doi_scripts) out << doi << "\n";
      if (!out)
        throw std::runtime_error("cannot write " + args.dois_out->string());
    }
    std::cout << "fixture with " << fixture.doi_scripts.size()
              << " DOIs written to " << args.out.string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOperatorError;
  }
}

namespace {
std::atomic<bool> g_stop_requested{false};
void handle_stop_signal(int) { g_stop_requested.store(true); }
}  // namespace

int cmd_mock_serve(const MockServeArgs& args) {
  try {
    std::ifstream in(args.fixture);
    if (!in) throw std::runtime_error("cannot read " + args.fixture.string());
    auto fixture = Fixture::from_json(nlohmann::json::parse(in));

    std::string host = args.bind;
    int port = 0;
    if (auto colon = host.rfind(':'); colon != std::string::npos) {
      port = std::stoi(host.substr(colon + 1));
      host = host.substr(0, colon);
    }

    MockServices mock(std::move(fixture));
    mock.start(host, port);
    std::cout << "listening http://" << mock.authority() << "\n" << std::flush;

    std::signal(SIGINT, handle_stop_signal);
    std::signal(SIGTERM, handle_stop_signal);
    while (!g_stop_requested.load())
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    mock.stop();
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOperatorError;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Collect and reconcile Open Graph engagement for DOI lists"};
  app.set_config("--config", "", "Config file mirroring the flags");
  app.set_version_flag("--version", std::string("ogr ") + kVersion);
  app.require_subcommand(1);

  ResolveArgs resolve_args;
  auto* resolve = app.add_subcommand("resolve", "Resolve DOIs to landing pages");
  resolve->add_option("--input", resolve_args.input, "DOI list, one per line")
      ->required();
  resolve->add_option("--journal", resolve_args.journal, "Journal file (JSONL)")
      ->required();
  resolve->add_option("--timeout-ms", resolve_args.config.timeout_ms,
                      "Whole-chain timeout per DOI");
  resolve->add_option("--max-redirects", resolve_args.config.max_redirects,
                      "Redirect limit per DOI");
  resolve->add_option("--workers", resolve_args.config.workers,
                      "Concurrent resolution workers");
  resolve->add_option("--per-host-delay-ms",
                      resolve_args.config.per_host_delay_ms,
                      "Politeness delay per host");
  resolve->add_option("--resolver-base", resolve_args.config.resolver_base,
                      "DOI proxy base URL");
  resolve->add_option("--user-agent", resolve_args.config.user_agent,
                      "User-Agent header");

  CollectArgs collect_args;
  auto* collect =
      app.add_subcommand("collect", "Query the graph endpoint per URL variant");
  collect->add_option("--journal", collect_args.journal, "Journal file")
      ->required();
  collect->add_option("--graph-base", collect_args.config.endpoint_base,
                      "Graph endpoint base URL")
      ->required();
  collect
      ->add_option("--token", collect_args.config.auth.access_token,
                   "Access token")
      ->envname("OGR_TOKEN");
  collect->add_option("--rate", collect_args.config.rate_per_sec,
                      "Requests per second (0 = unlimited)");
  collect->add_option("--retries", collect_args.config.retries,
                      "Attempts per query");
  collect->add_option("--backoff-base-ms", collect_args.config.backoff_base_ms,
                      "Base backoff between attempts");
  collect->add_option("--workers", collect_args.config.workers,
                      "Concurrent query workers");
  collect->add_option("--timeout-ms", collect_args.config.timeout_ms,
                      "Per-request timeout");

  ReconcileArgs reconcile_args;
  std::string policy_name = "max";
  std::string format_name = "csv";
  auto* reconcile =
      app.add_subcommand("reconcile", "Classify responses and write reports");
  reconcile->add_option("--journal", reconcile_args.journal, "Journal file")
      ->required();
  reconcile->add_option("--policy", policy_name,
                        "Conflict policy: max|min|first|error");
  reconcile->add_option("--format", format_name, "Export format: csv|json");
  reconcile->add_option("--out", reconcile_args.out_dir, "Report directory")
      ->required();

  AuditArgs audit_args;
  std::filesystem::path audit_urls, audit_journal, patterns_file;
  auto* audit =
      app.add_subcommand("audit", "Check landing pages against crawler traps");
  audit->add_option("--urls", audit_urls, "URL list to audit");
  audit->add_option("--journal", audit_journal,
                    "Journal whose landing pages to audit");
  audit->add_option("--injection-patterns,--patterns", patterns_file,
                    "Extra URL injection patterns, one per line");
  audit->add_option("--timeout-ms", audit_args.timeout_ms,
                    "Per-request timeout");
  audit->add_option("--redirect-limit", audit_args.config.redirect_limit,
                    "Redirects a crawler will follow");

  auto* mock = app.add_subcommand("mock", "Offline fixture tooling");
  mock->require_subcommand(1);

  MockGenArgs gen_args;
  std::filesystem::path gen_spec, gen_dois;
  auto* gen = mock->add_subcommand("gen", "Generate a fixture from a spec");
  gen->add_option("--spec", gen_spec, "Fixture spec (JSON)");
  gen->add_option("--preset", gen_args.preset,
                  "Built-in spec: reference|reference-tenth");
  gen->add_option("--seed", gen_args.seed, "Generation seed");
  gen->add_option("--out", gen_args.out, "Fixture output path")->required();
  gen->add_option("--dois-out", gen_dois, "Also write the DOI list here");

  MockServeArgs serve_args;
  auto* serve = mock->add_subcommand("serve", "Serve a fixture over HTTP");
  serve->add_option("--fixture", serve_args.fixture, "Fixture file (JSON)")
      ->required();
  serve->add_option("--bind", serve_args.bind, "host:port (port 0 = ephemeral)");

  CLI11_PARSE(app, argc, argv);

  if (resolve->parsed()) return cmd_resolve(resolve_args);
  if (collect->parsed()) return cmd_collect(collect_args);
  if (reconcile->parsed()) {
    auto policy = conflict_policy_from_string(policy_name);
    auto format = export_format_from_string(format_name);
    if (!policy || !format) {
      std::cerr << "error: bad --policy or --format\n";
      return kExitOperatorError;
    }
    reconcile_args.policy = *policy;
    reconcile_args.format = *format;
    return cmd_reconcile(reconcile_args);
  }
  if (audit->parsed()) {
    if (!audit_urls.empty()) audit_args.urls_file = audit_urls;
    if (!audit_journal.empty()) audit_args.journal = audit_journal;
    if (!patterns_file.empty()) {
      try {
        for (const auto& line : read_lines(patterns_file))
          if (!line.empty()) audit_args.config.injection_patterns.push_back(line);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOperatorError;
      }
    }
    return cmd_audit(audit_args);
  }
  if (gen->parsed()) {
    if (!gen_spec.empty()) gen_args.spec_path = gen_spec;
    if (!gen_dois.empty()) gen_args.dois_out = gen_dois;
    return cmd_mock_gen(gen_args);
  }
  if (serve->parsed()) return cmd_mock_serve(serve_args);
  return kExitOperatorError;
}

}  // namespace ogr

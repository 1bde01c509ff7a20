#include "ogr/mock_server.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <condition_variable>

#include "ogr/errors.hpp"
#include "ogr/http_fetch.hpp"
#include "ogr/reporting.hpp"

namespace ogr {

struct MockServices::Impl {
  explicit Impl(Fixture f) : fixture(std::move(f)) {
    scripts_by_index.reserve(fixture.doi_scripts.size());
    for (const auto& [doi, script] : fixture.doi_scripts)
      scripts_by_index.push_back(&script);
  }

  Fixture fixture;
  std::vector<const DoiScript*> scripts_by_index;
  std::map<std::string, GraphScript> graph_by_url;  // keys expanded
  std::map<std::string, std::pair<int, std::string>> landing;  // path -> status, body

  httplib::Server server;
  std::thread thread;
  std::string host;
  int port = 0;
  std::chrono::steady_clock::time_point started;

  mutable std::mutex log_mutex;
  std::vector<RequestLogEntry> log;
  std::atomic<std::uint64_t> log_seq{0};

  void record(const httplib::Request& req) {
    RequestLogEntry entry;
    entry.seq = log_seq.fetch_add(1);
    entry.method = req.method;
    entry.target = req.path;
    if (!req.params.empty()) {
      entry.target += '?';
      bool first = true;
      for (const auto& [k, v] : req.params) {
        if (!first) entry.target += '&';
        first = false;
        entry.target += k + '=' + v;
      }
    }
    entry.t_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - started)
                     .count();
    entry.user_agent = req.get_header_value("User-Agent");
    std::lock_guard lock(log_mutex);
    log.push_back(std::move(entry));
  }

  static void abort_connection(httplib::Response& res) {
    // A content provider that refuses to produce bytes drops the
    // connection mid-response, which the client sees as a server abort.
    res.set_content_provider(
        1, "text/html",
        [](std::size_t, std::size_t, httplib::DataSink&) { return false; });
  }

  void redirect_step(const DoiScript& script, std::size_t step,
                     httplib::Response& res) {
    if (script.delay_ms > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(script.delay_ms));
    if (script.mode == ScriptMode::Abort) {
      abort_connection(res);
      return;
    }
    if (step < script.chain.size()) {
      const auto& s = script.chain[step];
      res.status = s.status;
      res.set_header("Location",
                     expand_host_placeholder(s.location, authority()));
      res.set_content("", "text/html");
      return;
    }
    res.status = script.final_status;
    res.set_content(script.body, "text/html");
  }

  std::string authority() const { return host + ":" + std::to_string(port); }
};

MockServices::MockServices(Fixture fixture)
    : impl_(std::make_unique<Impl>(std::move(fixture))) {}

MockServices::~MockServices() { stop(); }

void MockServices::start(const std::string& host, int port) {
  Impl& impl = *impl_;
  impl.host = host;
  impl.started = std::chrono::steady_clock::now();

  auto& server = impl.server;
  server.new_task_queue = [] { return new httplib::ThreadPool(32); };
  server.set_keep_alive_timeout(2);

  server.Get(R"(/resolve/(.+))", [&impl](const httplib::Request& req,
                                         httplib::Response& res) {
    impl.record(req);
    const std::string doi = req.matches[1].str();
    auto it = impl.fixture.doi_scripts.find(doi);
    if (it == impl.fixture.doi_scripts.end()) {
      res.status = 404;
      res.set_content("unknown doi", "text/plain");
      return;
    }
    impl.redirect_step(it->second, 0, res);
  });

  server.Get(R"(/hop/(\d+)/(\d+))", [&impl](const httplib::Request& req,
                                            httplib::Response& res) {
    impl.record(req);
    const std::size_t index = std::stoull(req.matches[1].str());
    const std::size_t step = std::stoull(req.matches[2].str());
    if (index >= impl.scripts_by_index.size()) {
      res.status = 404;
      return;
    }
    impl.redirect_step(*impl.scripts_by_index[index], step, res);
  });

  server.Get(R"(/lp/(\d+))", [&impl](const httplib::Request& req,
                                     httplib::Response& res) {
    impl.record(req);
    auto it = impl.landing.find(req.path);
    if (it == impl.landing.end()) {
      res.status = 404;
      res.set_content("unknown landing page", "text/plain");
      return;
    }
    res.status = it->second.first;
    res.set_content(it->second.second, "text/html");
  });

  auto graph_handler = [&impl](const httplib::Request& req,
                               httplib::Response& res) {
    impl.record(req);
    if (!req.has_param("access_token") ||
        req.get_param_value("access_token").empty()) {
      res.status = 400;
      res.set_content(R"({"error":"missing access_token"})", "application/json");
      return;
    }
    if (!req.has_param("id")) {
      res.status = 400;
      res.set_content(R"({"error":"missing id"})", "application/json");
      return;
    }
    const std::string id = req.get_param_value("id");
    OJson body;
    body["id"] = id;
    auto it = impl.graph_by_url.find(id);
    if (it != impl.graph_by_url.end()) {
      if (it->second.ob_id)
        body["og_object"] = OJson{{"id", *it->second.ob_id}};
      if (it->second.engagement)
        body["engagement"] = engagement_to_json(*it->second.engagement);
    }
    res.status = 200;
    res.set_content(body.dump(), "application/json");
  };
  server.Get("/graph", graph_handler);
  server.Get("/graph/", graph_handler);

  server.Get("/__log", [this](const httplib::Request&, httplib::Response& res) {
    OJson entries = OJson::array();
    for (const auto& e : request_log()) {
      entries.push_back(OJson{{"seq", e.seq},
                              {"method", e.method},
                              {"target", e.target},
                              {"t_ms", e.t_ms},
                              {"user_agent", e.user_agent}});
    }
    res.status = 200;
    res.set_content(entries.dump(), "application/json");
  });

  if (port == 0) {
    impl.port = server.bind_to_any_port(host);
    if (impl.port <= 0) throw BindFailure("cannot bind " + host);
  } else {
    impl.port = port;
    if (!server.bind_to_port(host, port))
      throw BindFailure("cannot bind " + host + ":" + std::to_string(port));
  }

  // tables that need the bound authority
  const std::string auth = impl.authority();
  for (const auto& [tmpl, script] : impl.fixture.graph_scripts)
    impl.graph_by_url[expand_host_placeholder(tmpl, auth)] = script;
  for (const auto& [doi, script] : impl.fixture.doi_scripts) {
    if (script.mode != ScriptMode::Normal || script.chain.empty()) continue;
    std::string path =
        expand_host_placeholder(script.chain.back().location, auth);
    // accept absolute-URL locations as well as path form
    if (auto url = try_parse_url(path)) path = url->path;
    if (path.starts_with("/lp/"))
      impl.landing[path] = {script.final_status, script.body};
  }

  impl.thread = std::thread([&impl] { impl.server.listen_after_bind(); });
  server.wait_until_ready();
}

void MockServices::stop() {
  if (!impl_) return;
  close_idle_http_clients();  // this thread's parked connections block stop
  if (impl_->server.is_running()) impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockServices::authority() const { return impl_->authority(); }

std::string MockServices::resolver_base() const {
  return "http://" + authority() + "/resolve/";
}

std::string MockServices::graph_base() const {
  return "http://" + authority() + "/graph";
}

std::vector<RequestLogEntry> MockServices::request_log() const {
  std::lock_guard lock(impl_->log_mutex);
  return impl_->log;
}

}  // namespace ogr

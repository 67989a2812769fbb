#include "mvu/bridge.hpp"

#include "httplib.h"
#include "mvu/events.hpp"
#include "mvu/printer.hpp"

namespace mvu {

using nlohmann::json;

struct Bridge::Server {
  httplib::Server http;
};

namespace {

void attrs_to_json(const TermPtr& a, json& attributes, json& handlers) {
  switch (a->tag) {
    case TermTag::Append:
      attrs_to_json(a->kids[0], attributes, handlers);
      attrs_to_json(a->kids[1], attributes, handlers);
      return;
    case TermTag::Attr:
      if (const EventSignature* sig = find_handler(a->text)) {
        handlers.push_back({{"eventName", sig->event_name}, {"payloadType", to_string(sig->payload_type)}});
      } else {
        const TermPtr& v = a->kids[0];
        attributes.push_back({{"key", a->text}, {"value", v->tag == TermTag::Str ? v->text : print_term(v)}});
      }
      return;
    default: return;
  }
}

}  // namespace

json page_to_json(const PagePtr& d) {
  json out = json::array();
  for (const auto& n : flatten(d)) {
    if (n->tag == PageTag::Text) {
      const TermPtr& t = n->text;
      out.push_back({{"kind", "text"}, {"text", t->tag == TermTag::Str ? t->text : print_term(t)}});
      continue;
    }
    json attributes = json::array();
    json handlers = json::array();
    attrs_to_json(n->attrs, attributes, handlers);
    out.push_back({{"nodeId", n->id},
                   {"kind", "tag"},
                   {"tagName", n->name},
                   {"attributes", attributes},
                   {"handlers", handlers},
                   {"children", page_to_json(n->children)}});
  }
  return out;
}

json page_snapshot(const PagePtr& d, std::uint64_t revision) {
  return {{"revision", revision}, {"children", page_to_json(d)}};
}

namespace {

constexpr std::size_t kHistory = 256;

bool renders(const std::string& rule) { return rule == "E-Update" || rule == "E-Transition"; }

}  // namespace

// Called under mu_ from inside settle().
RunOptions Bridge::hooked(RunOptions options) {
  options.on_step = [this](const Configuration&, const std::string& rule) {
    if (renders(rule)) bump_locked();
  };
  return options;
}

Bridge::Bridge(const LinkedProgram& p, RunOptions options)
    : runner_(start(p), hooked(options)), server_(std::make_unique<Server>()) {
  std::lock_guard<std::mutex> lock(mu_);
  last_page_ = print_term(erase(runner_.configuration().page));
  history_[0] = page_snapshot(runner_.configuration().page, 0);
  runner_.settle();
}

Bridge::~Bridge() { stop(); }

json Bridge::snapshot() {
  std::lock_guard<std::mutex> lock(mu_);
  return page_snapshot(runner_.configuration().page, revision_);
}

json Bridge::status() {
  std::lock_guard<std::mutex> lock(mu_);
  const Configuration& c = runner_.configuration();
  const RunReport& rep = runner_.report();
  const Classification& cl = rep.quiescences.back();
  json threads = json::array();
  for (const auto& t : cl.threads) threads.push_back({{"thread", t.thread}, {"status", t.status}});
  json failures = rep.failures;
  return {{"revision", revision_},
          {"mode", to_string(c.mode)},
          {"model", model_text(c)},
          {"status", cl.ok ? to_string(cl.kind) : "unclassified: " + cl.failure},
          {"threads", threads},
          {"steps", rep.steps},
          {"failures", failures}};
}

std::uint64_t Bridge::revision() {
  std::lock_guard<std::mutex> lock(mu_);
  return revision_;
}

void Bridge::bump_locked() {
  std::string page = print_term(erase(runner_.configuration().page));
  if (page == last_page_) return;
  last_page_ = page;
  ++revision_;
  history_[revision_] = page_snapshot(runner_.configuration().page, revision_);
  while (history_.size() > kHistory) history_.erase(history_.begin());
  changed_.notify_all();
}

json Bridge::post_event(const json& body) {
  std::istringstream line(body.dump());
  std::vector<TraceEvent> events = parse_trace(line);
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& e : events) validate_injection(runner_.configuration(), e);
  for (const auto& e : events) runner_.inject(e);
  runner_.settle();
  return page_snapshot(runner_.configuration().page, revision_);
}

json Bridge::snapshot_after(std::uint64_t seen) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = history_.upper_bound(seen);
  if (it == history_.end()) return page_snapshot(runner_.configuration().page, revision_);
  return it->second;
}

bool Bridge::wait_for_change(std::uint64_t seen, std::chrono::milliseconds timeout) {
  std::unique_lock<std::mutex> lock(mu_);
  return changed_.wait_for(lock, timeout, [&] { return revision_ > seen || stopping_; }) && !stopping_;
}

void Bridge::serve(const std::string& host, int port) {
  httplib::Server& http = server_->http;
  http.Get("/snapshot", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(snapshot().dump(), "application/json");
  });
  http.Get("/status", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(status().dump(), "application/json");
  });
  http.Post("/event", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      res.set_content(post_event(json::parse(req.body)).dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  });
  http.Get("/events", [this](const httplib::Request&, httplib::Response& res) {
    // The first frame is the current snapshot; later frames replay each
    // revision in order.
    auto seen = std::make_shared<std::optional<std::uint64_t>>();
    res.set_chunked_content_provider("text/event-stream", [this, seen](std::size_t, httplib::DataSink& sink) {
      json s;
      if (!*seen) {
        s = snapshot();
      } else {
        if (!wait_for_change(**seen, std::chrono::seconds(15))) {
          if (stopping_) return false;
          return sink.write(": keepalive\n\n", 13);
        }
        s = snapshot_after(**seen);
      }
      *seen = s["revision"].get<std::uint64_t>();
      std::string frame = "data: " + s.dump() + "\n\n";
      return sink.write(frame.data(), frame.size());
    });
  });
  int bound = port == 0 ? http.bind_to_any_port(host) : (http.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
  bound_port_ = bound;
  http.listen_after_bind();
}

void Bridge::wait_until_serving() {
  while (bound_port_ <= 0 && !stopping_) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  server_->http.wait_until_ready();
}

void Bridge::stop() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stopping_ = true;
    changed_.notify_all();
  }
  server_->http.stop();
}

}  // namespace mvu

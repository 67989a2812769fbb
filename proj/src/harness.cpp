#include "mvu/harness.hpp"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "mvu/events.hpp"
#include "mvu/printer.hpp"
#include "mvu/runtime_check.hpp"

namespace mvu {

using nlohmann::json;

TermPtr payload_from_json(const json& j) {
  if (j.is_null()) return tm::unit();
  if (j.is_number_integer()) return tm::integer(j.get<std::int64_t>());
  if (j.is_string()) return tm::str(j.get<std::string>());
  if (j.is_array() && j.size() == 2) return tm::pair(payload_from_json(j[0]), payload_from_json(j[1]));
  throw InjectionError("unsupported payload " + j.dump());
}

json payload_to_json(const TermPtr& v) {
  switch (v->tag) {
    case TermTag::Unit: return nullptr;
    case TermTag::Int: return v->number;
    case TermTag::Str: return v->text;
    case TermTag::Pair: return json::array({payload_to_json(v->kids[0]), payload_to_json(v->kids[1])});
    default: return print_term(v);
  }
}

namespace {

TraceEvent event_at(std::optional<NodeId> target, const std::string& name, TermPtr payload, bool settle) {
  return TraceEvent{target, Event{name, std::move(payload)}, settle};
}

std::optional<NodeId> target_from_json(const json& j) {
  if (j.is_number_unsigned() || j.is_number_integer()) return j.get<NodeId>();
  if (j.is_string() && j.get<std::string>() == "env") return std::nullopt;
  throw InjectionError("target must be a node id or \"env\", got " + j.dump());
}

}  // namespace

std::vector<TraceEvent> parse_trace(std::istream& in) {
  std::vector<TraceEvent> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      json j = json::parse(line);
      if (!j.is_object() || !j.contains("target")) throw InjectionError("each record needs a target");
      std::optional<NodeId> target = target_from_json(j["target"]);
      if (j.contains("keystroke")) {
        std::string text = j["keystroke"].get<std::string>();
        std::int64_t code = text.empty() ? 0 : static_cast<unsigned char>(std::toupper(text[0]));
        out.push_back(event_at(target, "click", tm::unit(), false));
        out.push_back(event_at(target, "keyDown", tm::integer(code), false));
        out.push_back(event_at(target, "keyUp", tm::integer(code), false));
        out.push_back(event_at(target, "input", tm::str(text), j.value("settle", true)));
        continue;
      }
      TermPtr payload = payload_from_json(j.value("payload", json(nullptr)));
      out.push_back(event_at(target, j.at("event").get<std::string>(), payload, j.value("settle", true)));
    } catch (const std::exception& e) {
      throw InjectionError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<TraceEvent> load_trace(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw InjectionError("cannot open " + file);
  return parse_trace(in);
}

json trace_event_to_json(const TraceEvent& e) {
  json j;
  j["target"] = e.target ? json(*e.target) : json("env");
  j["event"] = e.event.name;
  j["payload"] = payload_to_json(e.event.payload);
  if (!e.settle) j["settle"] = false;
  return j;
}

void validate_injection(const Configuration& c, const TraceEvent& e) {
  validate_event(e.event, !e.target);
  if (!e.target) {
    if (c.mode != RunMode::Subscriptions) throw InjectionError("this program has no subscriptions");
  } else if (!find_node(c.page, *e.target)) {
    throw InjectionError("no element with node id " + std::to_string(*e.target));
  }
}

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << v;
  return out.str();
}

}  // namespace

Runner::Runner(Configuration c, RunOptions options) : c_(std::move(c)), options_(options) {
  if (options_.check_every_step) check_invariants("initial");
}

void Runner::inject(const TraceEvent& e) {
  if (e.target) inject_dom_event(c_, *e.target, e.event);
  else inject_env_event(c_, e.event);
  report_.rules.push_back("E-Interact");
  if (options_.log)
    *options_.log << json{{"rule", "E-Interact"}, {"event", trace_event_to_json(e)}, {"digest", hex(digest(c_))}}.dump()
                  << "\n";
  if (options_.check_every_step && !report_.aborted) check_invariants("E-Interact");
}

const Classification& Runner::settle() {
  long budget = options_.max_steps;
  while (!report_.aborted && budget-- > 0) {
    auto rule = step(c_);
    if (!rule) break;
    ++report_.steps;
    report_.rules.push_back(*rule);
    if (options_.log)
      *options_.log << json{{"step", report_.steps}, {"rule", *rule}, {"digest", hex(digest(c_))}}.dump() << "\n";
    if (options_.check_every_step) check_invariants(*rule);
    if (options_.on_step) options_.on_step(c_, *rule);
  }
  if (budget < 0) report_.out_of_steps = true;
  Classification cl = classify(c_);
  if (!cl.ok && !report_.out_of_steps && !report_.aborted) {
    ++report_.unclassified;
    report_.failures.push_back("step " + std::to_string(report_.steps) + ": not classifiable: " + cl.failure);
  }
  if (!options_.check_every_step && detect_error_process(c_)) {
    ++report_.error_processes;
    report_.failures.push_back("step " + std::to_string(report_.steps) + ": error process\n" + print_configuration(c_));
  }
  report_.quiescences.push_back(std::move(cl));
  return report_.quiescences.back();
}

void Runner::check_invariants(const std::string& rule) {
  ++report_.checks;
  std::string at = "step " + std::to_string(report_.steps) + " (" + rule + "): ";
  std::vector<std::string> found;
  if (auto d = check_configuration(c_)) found.push_back(d->rule + ": " + d->message);
  if (auto why = check_name_linearity(c_)) found.push_back(*why);
  report_.check_failures += static_cast<long>(found.size());
  if (detect_error_process(c_)) {
    ++report_.error_processes;
    found.push_back("error process");
  }
  if (found.empty()) return;
  std::string message = at;
  for (const auto& f : found) message += f + "; ";
  report_.failures.push_back(message + "\n" + print_configuration(c_));
  report_.aborted = true;
}

RunReport run_trace(const LinkedProgram& p, const std::vector<TraceEvent>& trace, const RunOptions& options) {
  Runner r(start(p), options);
  r.settle();
  for (const auto& e : trace) {
    r.inject(e);
    if (e.settle) r.settle();
  }
  if (!trace.empty() && !trace.back().settle) r.settle();
  return r.report();
}

std::string model_text(const Configuration& c) {
  const Proc* m = main_thread(c);
  if (!m) return "<none>";
  switch (m->tag) {
    case ProcTag::Halt: return "<halted>";
    case ProcTag::Run: return "<starting>";
    default: return m->thread.model ? print_term(m->thread.model) : "<busy>";
  }
}

std::uint64_t digest(const Configuration& c) {
  std::string s = model_text(c) + "\n" + print_term(erase(c.page));
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

TermPtr random_value(const TypePtr& t, std::mt19937_64& rng) {
  switch (t->tag) {
    case TypeTag::Int: return tm::integer(std::uniform_int_distribution<std::int64_t>(-50, 50)(rng));
    case TypeTag::String: {
      static const std::string letters = "abcxyz";
      std::string s;
      int n = std::uniform_int_distribution<int>(0, 4)(rng);
      for (int i = 0; i < n; ++i) s += letters[rng() % letters.size()];
      return tm::str(s);
    }
    case TypeTag::Product: return tm::pair(random_value(t->left, rng), random_value(t->right, rng));
    default: return tm::unit();
  }
}

void handled_events(const TermPtr& attrs, std::vector<std::string>& out) {
  if (attrs->tag == TermTag::Append) {
    handled_events(attrs->kids[0], out);
    handled_events(attrs->kids[1], out);
  } else if (attrs->tag == TermTag::Attr) {
    if (const EventSignature* sig = find_handler(attrs->text)) out.push_back(sig->event_name);
  }
}

}  // namespace

std::optional<TraceEvent> random_injection(const Configuration& c, std::mt19937_64& rng) {
  std::vector<std::pair<std::optional<NodeId>, std::string>> candidates;
  for (const auto& n : tag_nodes(c.page)) {
    std::vector<std::string> names;
    handled_events(n->attrs, names);
    for (const auto& e : names) candidates.emplace_back(n->id, e);
  }
  if (c.mode == RunMode::Subscriptions)
    for (const auto& sig : event_registry())
      if (sig.environment) candidates.emplace_back(std::nullopt, sig.event_name);
  if (candidates.empty()) return std::nullopt;
  const auto& [target, name] = candidates[rng() % candidates.size()];
  const EventSignature* sig = find_event(name);
  bool settle = std::uniform_int_distribution<int>(0, 3)(rng) != 0;
  return TraceEvent{target, Event{name, random_value(sig->payload_type, rng)}, settle};
}

FuzzReport fuzz(const LinkedProgram& p, long traces, long injections, std::uint64_t seed, long max_steps) {
  FuzzReport out;
  RunOptions options;
  options.check_every_step = true;
  options.max_steps = max_steps;
  for (long i = 0; i < traces; ++i) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(i));
    Runner r(start(p), options);
    r.settle();
    std::vector<TraceEvent> trace;
    for (long k = 0; k < injections; ++k) {
      auto e = random_injection(r.configuration(), rng);
      if (!e || r.report().aborted) break;
      if (k + 1 == injections) e->settle = true;
      trace.push_back(*e);
      r.inject(*e);
      ++out.injections;
      if (e->settle) r.settle();
    }
    if (!trace.empty() && !trace.back().settle) r.settle();
    ++out.traces;
    const RunReport& rep = r.report();
    out.steps += rep.steps;
    out.checks += rep.checks;
    out.quiescences += static_cast<long>(rep.quiescences.size());
    out.check_failures += rep.check_failures;
    out.error_processes += rep.error_processes;
    out.unclassified += rep.unclassified;
    for (const auto& rule : rep.rules) ++out.rules[rule];
    for (const auto& f : r.report().failures) out.failures.push_back("trace " + std::to_string(i) + ": " + f);
    if (r.report().out_of_steps) out.failures.push_back("trace " + std::to_string(i) + ": step budget exhausted");
    if (!out.failures.empty() && out.failing_trace.empty()) {
      out.failing_trace = trace;
      out.failing_seed = seed + static_cast<std::uint64_t>(i);
    }
  }
  return out;
}

}  // namespace mvu

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvu/program.hpp"
#include "mvu/runtime.hpp"

namespace mvu {

// One injection. A page event names its target node; environment events
// have no target. With settle false the next record is injected before the
// program runs again, which is how bursts are written.
struct TraceEvent {
  std::optional<NodeId> target;
  Event event;
  bool settle = true;
};

// JSON payloads: null is (), numbers are Int, strings are String and a two
// element array is a pair.
TermPtr payload_from_json(const nlohmann::json& j);
nlohmann::json payload_to_json(const TermPtr& v);

// One JSON object per line:
//   {"target": 1, "event": "input", "payload": "k"}
//   {"target": "env", "event": "mouseMove", "payload": [3, 4]}
//   {"target": 1, "keystroke": "k"}
// A keystroke expands to click, keyDown, keyUp and input, settled after the
// last one. Blank lines and lines starting with # are skipped.
std::vector<TraceEvent> parse_trace(std::istream& in);
std::vector<TraceEvent> load_trace(const std::string& file);
nlohmann::json trace_event_to_json(const TraceEvent& e);

// Throws InjectionError unless the event could be injected into c.
void validate_injection(const Configuration& c, const TraceEvent& e);

struct RunOptions {
  bool check_every_step = false;
  long max_steps = 1000000;  // per settle
  std::ostream* log = nullptr;  // one JSON line per step: rule and digest
  std::function<void(const Configuration&, const std::string& rule)> on_step;
};

struct RunReport {
  std::vector<std::string> rules;  // every step, with E-Interact for injections
  long steps = 0;
  long checks = 0;
  // Broken invariants. A failed per-step check stops the run, so there is at
  // most one of those, naming the step index and rule.
  std::vector<std::string> failures;
  std::vector<Classification> quiescences;  // one per settle
  long check_failures = 0;   // check_configuration or name linearity
  long error_processes = 0;  // detect_error_process held
  long unclassified = 0;     // quiescent but fitting no progress case
  bool out_of_steps = false;
  bool aborted = false;
};

// Drives one configuration: injections, steps, and the optional invariant
// checks after each step.
class Runner {
 public:
  Runner(Configuration c, RunOptions options);

  // Throws InjectionError when the event is rejected.
  void inject(const TraceEvent& e);
  // Steps until no rule applies or the step budget runs out, then classifies.
  const Classification& settle();

  const Configuration& configuration() const { return c_; }
  const RunReport& report() const { return report_; }

 private:
  void check_invariants(const std::string& rule);

  Configuration c_;
  RunOptions options_;
  RunReport report_;
};

RunReport run_trace(const LinkedProgram& p, const std::vector<TraceEvent>& trace, const RunOptions& options);

// Model and page digest, stable across runs: FNV-1a over the printed model
// and erased page.
std::uint64_t digest(const Configuration& c);
std::string model_text(const Configuration& c);

// A random injection that the current page or subscriptions can handle.
// Returns nothing when there is nowhere to inject.
std::optional<TraceEvent> random_injection(const Configuration& c, std::mt19937_64& rng);

struct FuzzReport {
  long traces = 0;
  long injections = 0;
  long steps = 0;
  long checks = 0;
  long quiescences = 0;
  long check_failures = 0;
  long error_processes = 0;
  long unclassified = 0;
  std::map<std::string, long> rules;  // how often each rule fired
  std::vector<std::string> failures;
  std::vector<TraceEvent> failing_trace;  // first failure, for replay
  std::uint64_t failing_seed = 0;
};

// Runs `traces` random traces of `injections` events each, checking every
// step. Trace i uses seed + i.
FuzzReport fuzz(const LinkedProgram& p, long traces, long injections, std::uint64_t seed, long max_steps = 100000);

}  // namespace mvu

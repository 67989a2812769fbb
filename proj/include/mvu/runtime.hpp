#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvu/eval.hpp"
#include "mvu/page.hpp"
#include "mvu/typecheck.hpp"

namespace mvu {

// View, update and extract functions; subscriptions only in that mode,
// extract only in the extended calculus.
struct FunctionState {
  TermPtr view;
  TermPtr update;
  TermPtr extract;
  TermPtr subscriptions;
};

// The six states of the extended event loop, plus Processing for the core
// calculus, where the loop evaluates handle(...) directly.
enum class ThreadState { Idle, Updating, Extracting, ExtractingT, Rendering, Transitioning, Processing };
const char* to_string(ThreadState s);

struct ActiveThread {
  ThreadState state = ThreadState::Idle;
  TermPtr model;                      // Idle, Rendering, Transitioning
  TermPtr cmd;                        // Extracting, ExtractingT, Rendering, Transitioning
  std::optional<FunctionState> next;  // ExtractingT, Transitioning
  TermPtr term;                       // every state but Idle
};

enum class ProcTag { Run, EventLoop, Halt, Handler, Server, Zap };
const char* to_string(ProcTag t);

struct Proc {
  ProcTag tag = ProcTag::Run;
  TermPtr term;  // Run, Handler, Server
  ActiveThread thread;
  FunctionState fstate;
  std::uint64_t version = 0;  // EventLoop, Handler; Halt keeps the last one
  Name zapped = 0;
  std::uint64_t pid = 0;  // stable identity for the round-robin scheduler
};

// (νcd): c has type `type`, d its dual.
struct Restriction {
  Name c = 0;
  Name d = 0;
  TypePtr type;
};

// Processes are kept in canonical form: every restriction hoisted to the
// front and parallel composition flattened into a list.
struct Configuration {
  RunMode mode = RunMode::Core;
  std::vector<Restriction> restrictions;
  std::vector<Proc> procs;
  PagePtr page;
  TermPtr subscriptions;
  std::vector<Event> env_queue;
  std::uint64_t fresh = 1;  // runtime names and node ids
  std::uint64_t next_pid = 1;
  std::uint64_t last_lifted = 0;
};

class InjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Configuration initial_configuration(RunMode mode, const TermPtr& main);

// Applies one reduction under the fixed priority order and returns the rule
// name, or nothing when only event injection could make progress. Garbage
// collection equivalences are applied after every step.
std::optional<std::string> step(Configuration& c);

void inject_dom_event(Configuration& c, NodeId node, const Event& e);
void inject_env_event(Configuration& c, const Event& e);
// Validates the payload against the registry; throws InjectionError.
void validate_event(const Event& e, bool environment);

Proc make_zap(Name c);
// Zappers for each free name of a value.
std::vector<Proc> zap_of(const TermPtr& v);
// Names cancelled when an active thread aborts inside a pure context.
std::vector<Name> zap_names(const ActiveThread& t, const FrameStack& pure_frames);

// A session action a thread is stuck on: send, receive or close on a name.
struct Blocked {
  Constant action;
  Name name;
};
std::optional<Blocked> blocked_on(const TermPtr& t);
// The term a process is currently evaluating, if any.
TermPtr current_term(const Proc& p);
std::optional<Blocked> blocked_on(const Proc& p);

enum class Quiescence { IdleNoEvents, MainBlocked, Halted };
const char* to_string(Quiescence q);

struct ThreadReport {
  std::string thread;
  std::string status;  // blocked on ..., value, zapper
};

struct Classification {
  bool ok = false;
  Quiescence kind = Quiescence::IdleNoEvents;
  std::vector<ThreadReport> threads;
  std::string failure;
};

// Sorts a quiescent configuration into the cases of weak event progress.
Classification classify(const Configuration& c);

// True when some restriction has its endpoints stuck on mismatched actions:
// send/send, send/close, receive/receive or receive/close.
bool detect_error_process(const Configuration& c);

// Each runtime name is free in at most one thread plus at most one zapper.
std::optional<std::string> check_name_linearity(const Configuration& c);

const Proc* main_thread(const Configuration& c);
std::string print_configuration(const Configuration& c);
std::string print_page(const PagePtr& d);

}  // namespace mvu

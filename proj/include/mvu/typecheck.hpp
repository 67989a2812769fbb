#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvu/parser.hpp"
#include "mvu/term.hpp"

namespace mvu {

class TypeError : public std::runtime_error {
 public:
  TypeError(std::string rule, const std::string& message, Span span);
  std::string rule;  // name of the typing rule whose premise failed
  std::string message;
  Span span;
};

struct EnvEntry {
  bool is_name = false;
  Sym var = 0;
  Name name = 0;
  TypePtr type;
};

// Variables and runtime names in binding order; later entries shadow earlier ones.
class TypeEnv {
 public:
  void bind(Sym x, TypePtr t);
  void bind_name(Name c, TypePtr t);
  const std::vector<EnvEntry>& entries() const { return entries_; }

 private:
  std::vector<EnvEntry> entries_;
};

struct BindingUsage {
  std::string label;  // variable spelling or #n
  Kind kind;
  int uses = 0;
};

struct UsageReport {
  std::vector<BindingUsage> bindings;  // parallel to the environment's entries
  std::vector<std::string> residual;   // linear bindings left unconsumed
  std::vector<Name> consumed_names;
};

struct CheckResult {
  TypePtr type;
  UsageReport usage;
};

// Checks t against expected (null or holes mean "infer"). Linear bindings of
// env may be consumed or left over; the report says which.
CheckResult check_term(const TypeEnv& env, const TermPtr& t, const TypePtr& expected = nullptr);
// A closed term; the result type may still contain holes.
TypePtr check_closed(const TermPtr& t, const TypePtr& expected = nullptr);

enum class RunMode { Core, Subscriptions, Extended };
const char* to_string(RunMode m);

struct RunTypes {
  RunMode mode = RunMode::Core;
  TypePtr model;       // A
  TypePtr message;     // B
  TypePtr view_model;  // C, what the view sees; A outside the extended calculus
};

// The tuple type main must have.
TypePtr run_tuple_type(const RunTypes& r);
// Reads the mode and A, B, C off the synthesized type of main.
RunTypes classify_main_type(const TypePtr& t, Span span = {});

struct CheckedProgram {
  Program program;
  std::vector<TypePtr> definition_types;
  std::optional<RunTypes> run;  // absent for check-only programs
  TypePtr main_type;
};

CheckedProgram check_program(const Program& p);

}  // namespace mvu

#pragma once

#include <string>

#include "mvu/runtime.hpp"
#include "mvu/typecheck.hpp"

namespace mvu {

// A typechecked program with its definitions desugared and substituted into
// main, ready to run.
struct LinkedProgram {
  CheckedProgram checked;
  TermPtr main;  // closed; null for check-only programs
};

// Parses, checks and links. Throws ParseError or TypeError.
LinkedProgram link_program(const Program& p);
LinkedProgram load_linked(const std::string& file);

// Throws std::invalid_argument for check-only programs.
Configuration start(const LinkedProgram& p);

}  // namespace mvu

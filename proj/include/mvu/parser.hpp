#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvu/term.hpp"

namespace mvu {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line;
  int col;
};

struct TypeAlias {
  std::string name;
  TypePtr type;
};

struct Definition {
  std::string name;
  Sym sym = 0;
  TermPtr term;  // may still contain HTML sugar
  TypePtr annotation;  // from `let name : T = ...`
  Span span;
};

struct Program {
  std::string path;
  std::vector<TypeAlias> aliases;
  std::vector<Definition> definitions;
  TermPtr main;  // null for check-only programs
};

Program parse_program(const std::string& source, const std::string& path = "<input>");
Program load_program(const std::string& file);

// Expressions and types over the built-in prelude only (Bool, no user aliases).
TermPtr parse_term(const std::string& source);
TypePtr parse_type(const std::string& source);

}  // namespace mvu

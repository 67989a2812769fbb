#pragma once

#include <string>

#include "mvu/term.hpp"

namespace mvu {

// Single-line concrete syntax accepted back by parse_term.
std::string print_term(const TermPtr& t);
std::string escape_string(const std::string& s);

}  // namespace mvu

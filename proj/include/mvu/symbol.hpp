#pragma once

#include <cstdint>
#include <string>

namespace mvu {

// Interned identifier. Two symbols are equal iff their spellings are equal.
using Sym = std::uint32_t;

Sym intern(const std::string& name);
const std::string& spelling(Sym s);

}  // namespace mvu

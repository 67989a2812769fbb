#include "mvu/symbol.hpp"

#include <deque>
#include <mutex>
#include <unordered_map>

namespace mvu {

namespace {

struct SymbolTable {
  std::mutex mu;
  std::unordered_map<std::string, Sym> ids;
  std::deque<std::string> names;  // deque keeps references stable
};

SymbolTable& table() {
  static SymbolTable t;
  return t;
}

}  // namespace

Sym intern(const std::string& name) {
  auto& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.ids.find(name);
  if (it != t.ids.end()) return it->second;
  Sym id = static_cast<Sym>(t.names.size());
  t.names.push_back(name);
  t.ids.emplace(name, id);
  return id;
}

const std::string& spelling(Sym s) {
  auto& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  return t.names.at(s);
}

}  // namespace mvu

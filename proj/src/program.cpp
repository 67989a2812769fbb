#include "mvu/program.hpp"

#include <stdexcept>

#include "mvu/desugar.hpp"

namespace mvu {

LinkedProgram link_program(const Program& p) {
  LinkedProgram out;
  out.checked = check_program(p);
  if (!p.main) return out;
  // Definitions are closed values once earlier ones are substituted in.
  std::vector<std::pair<Sym, TermPtr>> linked;
  for (const auto& d : p.definitions) {
    TermPtr t = desugar(d.term);
    for (auto it = linked.rbegin(); it != linked.rend(); ++it) t = substitute(t, it->first, it->second);
    linked.emplace_back(d.sym, t);
  }
  TermPtr main = desugar(p.main);
  for (auto it = linked.rbegin(); it != linked.rend(); ++it) main = substitute(main, it->first, it->second);
  out.main = main;
  return out;
}

LinkedProgram load_linked(const std::string& file) { return link_program(load_program(file)); }

Configuration start(const LinkedProgram& p) {
  if (!p.main || !p.checked.run) throw std::invalid_argument(p.checked.program.path + " has no main");
  return initial_configuration(p.checked.run->mode, p.main);
}

}  // namespace mvu

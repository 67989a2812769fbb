#include "mvu/events.hpp"

namespace mvu {

const std::vector<EventSignature>& event_registry() {
  static const std::vector<EventSignature> registry = {
      {"click", "onClick", ty::unit(), false},
      {"input", "onInput", ty::string(), false},
      {"keyUp", "onKeyUp", ty::integer(), false},
      {"keyDown", "onKeyDown", ty::integer(), false},
      {"mouseMove", "onMouseMove", ty::product(ty::integer(), ty::integer()), true},
  };
  return registry;
}

const EventSignature* find_event(const std::string& event_name) {
  for (const auto& e : event_registry())
    if (e.event_name == event_name) return &e;
  return nullptr;
}

const EventSignature* find_handler(const std::string& handler_name) {
  for (const auto& e : event_registry())
    if (e.handler_name == handler_name) return &e;
  return nullptr;
}

bool is_handler_name(const std::string& key) { return find_handler(key) != nullptr; }

}  // namespace mvu

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mvu/types.hpp"

namespace mvu {

struct EventSignature {
  std::string event_name;
  std::string handler_name;
  TypePtr payload_type;
  bool environment = false;  // delivered through subscriptions, not the page
};

// The fixed registry: click, input, keyUp, keyDown on pages; mouseMove from
// the environment.
const std::vector<EventSignature>& event_registry();

const EventSignature* find_event(const std::string& event_name);
const EventSignature* find_handler(const std::string& handler_name);
bool is_handler_name(const std::string& key);

}  // namespace mvu

#pragma once

#include <optional>
#include <string>

#include "mvu/runtime.hpp"

namespace mvu {

struct RuntimeDiagnostic {
  std::string rule;
  std::string message;
};

// Typechecks a whole configuration: every restriction's names are consumed
// by exactly one process or zapper, there is exactly one main thread, the
// event loop agrees with its function state, threads and the server have
// the right types, and the page and queued events are well typed.
std::optional<RuntimeDiagnostic> check_configuration(const Configuration& c);

}  // namespace mvu

#pragma once

#include <string>
#include <vector>

#include "mvu/term.hpp"

namespace mvu {

// One evaluation-context frame: parent with kids[hole] under evaluation.
// A try frame is a Try parent with hole 0.
struct Frame {
  TermPtr parent;
  std::size_t hole = 0;
};

// Outermost frame first.
using FrameStack = std::vector<Frame>;

bool is_try_frame(const Frame& f);
TermPtr plug(const FrameStack& frames, TermPtr t);
// Free runtime names of the frames' other subterms, outermost first.
std::vector<Name> frame_names(const FrameStack& frames);

struct Focus {
  FrameStack frames;
  TermPtr redex;  // null when the whole term is a value
};

// Left-to-right call-by-value decomposition.
Focus decompose(const TermPtr& t);

enum class StepKind {
  Value,    // nothing to do
  Stepped,  // term holds the reduct of the whole term
  Session,  // redex is a session constant applied to a value
  Raise,    // redex is raise
  Stuck,    // no rule applies; reason says why
};

struct StepResult {
  StepKind kind = StepKind::Value;
  TermPtr term;
  FrameStack frames;
  TermPtr redex;
  std::string reason;
};

StepResult step_term(const TermPtr& t);

// Reduces to a value with at most fuel steps; throws when it cannot.
TermPtr evaluate(const TermPtr& t, long fuel = 1000000);

// Booleans are Unit + Unit with False on the left.
TermPtr bool_value(bool b);

}  // namespace mvu

#include "mvu/eval.hpp"

#include <algorithm>
#include <stdexcept>

#include "mvu/printer.hpp"

namespace mvu {

bool is_try_frame(const Frame& f) { return f.parent->tag == TermTag::Try && f.hole == 0; }

TermPtr plug(const FrameStack& frames, TermPtr t) {
  for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
    Term copy = *it->parent;
    copy.kids[it->hole] = std::move(t);
    t = finalize(std::move(copy));
  }
  return t;
}

std::vector<Name> frame_names(const FrameStack& frames) {
  std::vector<Name> out;
  for (const auto& f : frames)
    for (std::size_t i = 0; i < f.parent->kids.size(); ++i)
      if (i != f.hole) append_free_names(f.parent->kids[i], out);
  return out;
}

TermPtr bool_value(bool b) {
  return b ? tm::inr(tm::unit(), bool_type()) : tm::inl(tm::unit(), bool_type());
}

namespace {

// How many leading kids are evaluated before the node itself reduces or
// becomes a value.
std::size_t evaluated_kids(const Term& t) {
  switch (t.tag) {
    case TermTag::App:
    case TermTag::Pair:
    case TermTag::HtmlTag:
    case TermTag::Append:
    case TermTag::NoTransition: return 2;
    case TermTag::Const:
    case TermTag::LetPair:
    case TermTag::Inl:
    case TermTag::Inr:
    case TermTag::Case:
    case TermTag::HtmlText:
    case TermTag::Attr:
    case TermTag::Try:
    case TermTag::Sub: return 1;
    case TermTag::Transition: return 5;
    default: return 0;
  }
}

std::string reverse(std::string s) {
  std::reverse(s.begin(), s.end());
  return s;
}

StepResult stepped(const FrameStack& frames, TermPtr reduct) {
  StepResult r;
  r.kind = StepKind::Stepped;
  r.term = plug(frames, std::move(reduct));
  return r;
}

StepResult stuck(const TermPtr& redex, const std::string& why) {
  StepResult r;
  r.kind = StepKind::Stuck;
  r.redex = redex;
  r.reason = why + ": " + print_term(redex);
  return r;
}

StepResult primitive(const Focus& f) {
  const TermPtr& redex = f.redex;
  const TermPtr& arg = redex->kids[0];
  auto ints = [&](std::int64_t& a, std::int64_t& b) {
    if (arg->tag != TermTag::Pair || arg->kids[0]->tag != TermTag::Int || arg->kids[1]->tag != TermTag::Int)
      return false;
    a = arg->kids[0]->number;
    b = arg->kids[1]->number;
    return true;
  };
  std::int64_t a = 0, b = 0;
  switch (redex->constant) {
    case Constant::IntAdd:
      if (ints(a, b)) return stepped(f.frames, tm::integer(a + b));
      break;
    case Constant::IntSub:
      if (ints(a, b)) return stepped(f.frames, tm::integer(a - b));
      break;
    case Constant::IntMul:
      if (ints(a, b)) return stepped(f.frames, tm::integer(a * b));
      break;
    case Constant::IntLt:
      if (ints(a, b)) return stepped(f.frames, bool_value(a < b));
      break;
    case Constant::IntEq:
      if (ints(a, b)) return stepped(f.frames, bool_value(a == b));
      break;
    case Constant::IntToString:
      if (arg->tag == TermTag::Int) return stepped(f.frames, tm::str(std::to_string(arg->number)));
      break;
    case Constant::ReverseString:
      if (arg->tag == TermTag::Str) return stepped(f.frames, tm::str(reverse(arg->text)));
      break;
    case Constant::Concat:
      if (arg->tag == TermTag::Pair && arg->kids[0]->tag == TermTag::Str && arg->kids[1]->tag == TermTag::Str)
        return stepped(f.frames, tm::str(arg->kids[0]->text + arg->kids[1]->text));
      break;
    default: break;
  }
  return stuck(redex, "bad primitive argument");
}

}  // namespace

Focus decompose(const TermPtr& t) {
  Focus f;
  TermPtr cur = t;
  while (!cur->value) {
    std::size_t n = evaluated_kids(*cur);
    std::size_t i = 0;
    while (i < n && cur->kids[i]->value) ++i;
    if (i == n) break;
    f.frames.push_back({cur, i});
    cur = cur->kids[i];
  }
  if (!cur->value) f.redex = cur;
  return f;
}

StepResult step_term(const TermPtr& t) {
  Focus f = decompose(t);
  StepResult r;
  if (!f.redex) return r;
  const TermPtr& m = f.redex;
  switch (m->tag) {
    case TermTag::App: {
      const TermPtr& fn = m->kids[0];
      const TermPtr& arg = m->kids[1];
      if (fn->tag == TermTag::Lam) return stepped(f.frames, substitute(fn->kids[0], fn->x, arg));
      if (fn->tag == TermTag::Rec) {
        TermPtr body = substitute(fn->kids[0], fn->x, fn);
        return stepped(f.frames, substitute(body, fn->y, arg));
      }
      return stuck(m, "application of a non-function");
    }
    case TermTag::Const:
      if (is_session_constant(m->constant)) {
        r.kind = StepKind::Session;
        r.frames = std::move(f.frames);
        r.redex = m;
        return r;
      }
      return primitive(f);
    case TermTag::LetPair: {
      const TermPtr& p = m->kids[0];
      if (p->tag != TermTag::Pair) return stuck(m, "let-pair on a non-pair");
      // Runtime values have no free variables, so the order is irrelevant.
      TermPtr body = substitute(m->kids[1], m->x, p->kids[0]);
      return stepped(f.frames, substitute(body, m->y, p->kids[1]));
    }
    case TermTag::Case: {
      const TermPtr& s = m->kids[0];
      if (s->tag == TermTag::Inl) return stepped(f.frames, substitute(m->kids[1], m->x, s->kids[0]));
      if (s->tag == TermTag::Inr) return stepped(f.frames, substitute(m->kids[2], m->y, s->kids[0]));
      return stuck(m, "case on a non-injection");
    }
    case TermTag::Try: return stepped(f.frames, substitute(m->kids[1], m->x, m->kids[0]));
    case TermTag::Raise:
      r.kind = StepKind::Raise;
      r.frames = std::move(f.frames);
      r.redex = m;
      return r;
    case TermTag::Var: return stuck(m, "free variable");
    default: return stuck(m, "no rule");
  }
}

TermPtr evaluate(const TermPtr& t, long fuel) {
  TermPtr cur = t;
  while (fuel-- > 0) {
    StepResult r = step_term(cur);
    switch (r.kind) {
      case StepKind::Value: return cur;
      case StepKind::Stepped: cur = r.term; break;
      case StepKind::Session: throw std::runtime_error("evaluation blocked on " + print_term(r.redex));
      case StepKind::Raise: throw std::runtime_error("unhandled raise");
      case StepKind::Stuck: throw std::runtime_error(r.reason);
    }
  }
  throw std::runtime_error("evaluation ran out of fuel");
}

}  // namespace mvu

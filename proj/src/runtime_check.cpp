#include "mvu/runtime_check.hpp"

#include <map>

#include "mvu/events.hpp"
#include "mvu/printer.hpp"

namespace mvu {

namespace {

struct Failure {
  RuntimeDiagnostic d;
};

[[noreturn]] void fail(const std::string& rule, const std::string& message) { throw Failure{{rule, message}}; }

// Types of the current view, update and extract functions.
struct StateTypes {
  TypePtr model;
  TypePtr message;
  TypePtr view_model;
};

class Checker {
 public:
  explicit Checker(const Configuration& c) : c_(c) {
    for (const auto& r : c.restrictions) {
      if (!is_session(r.type)) fail("TP-Nu", "#" + std::to_string(r.c) + " has non-session type " + to_string(r.type));
      env_.bind_name(r.c, r.type);
      env_.bind_name(r.d, dual(r.type));
      owner_[r.c] = "";
      owner_[r.d] = "";
    }
  }

  void run() {
    int mains = 0;
    for (const auto& p : c_.procs)
      mains += p.tag == ProcTag::Run || p.tag == ProcTag::EventLoop || p.tag == ProcTag::Halt;
    if (mains == 0) fail("TP-Par", "no main thread");
    if (mains > 1) fail("TP-Par", "two main threads: the flag sum of two main threads is undefined");

    std::optional<StateTypes> current;
    for (const auto& p : c_.procs)
      if (p.tag == ProcTag::EventLoop) current = state_types(p.fstate, "TP-EventLoop");

    for (const auto& p : c_.procs) {
      std::string who = std::string(to_string(p.tag)) + " " + std::to_string(p.pid);
      switch (p.tag) {
        case ProcTag::Run: {
          TypePtr t = check("TP-Run", who, p.term, nullptr);
          try {
            RunTypes r = classify_main_type(t);
            if (r.mode != c_.mode) fail("TP-Run", "main has mode " + std::string(to_string(r.mode)));
          } catch (const TypeError& e) {
            fail("TP-Run", e.message);
          }
          break;
        }
        case ProcTag::EventLoop: event_loop(p, *current, who); break;
        case ProcTag::Halt: break;
        case ProcTag::Handler:
          if (current && p.version == p_version(current_loop())) check("TP-Thread", who, p.term, current->message);
          else check("TP-OldThread", who, p.term, nullptr);
          break;
        case ProcTag::Server: check("TP-Server", who, p.term, ty::unit()); break;
        case ProcTag::Zap: consume("TP-Zap", "zap #" + std::to_string(p.zapped), {p.zapped}); break;
      }
    }
    for (const auto& [n, owner] : owner_)
      if (owner.empty()) fail("TP-Nu", "#" + std::to_string(n) + " is bound by a restriction but used by no process");

    TypePtr message = current ? current->message : nullptr;
    check_page(c_.page, message);
    if (c_.mode == RunMode::Subscriptions) {
      check("TS-Subscriptions", "subscriptions", c_.subscriptions, message ? ty::sub(message) : nullptr);
      for (const auto& e : c_.env_queue) check_event("TE-Evt", e, true);
    }
  }

 private:
  const Configuration& c_;
  TypeEnv env_;
  std::map<Name, std::string> owner_;

  const Proc* current_loop() const {
    for (const auto& p : c_.procs)
      if (p.tag == ProcTag::EventLoop) return &p;
    return nullptr;
  }
  static std::uint64_t p_version(const Proc* p) { return p ? p->version : 0; }

  void consume(const std::string& rule, const std::string& who, const std::vector<Name>& names) {
    for (Name n : names) {
      auto it = owner_.find(n);
      if (it == owner_.end()) fail(rule, who + " uses #" + std::to_string(n) + ", which no restriction binds");
      if (!it->second.empty()) fail(rule, "#" + std::to_string(n) + " is used by both " + it->second + " and " + who);
      it->second = who;
    }
  }

  // Checks a term of one process; returns its type.
  TypePtr check(const std::string& rule, const std::string& who, const TermPtr& t, const TypePtr& expected) {
    if (!t) fail(rule, who + " is missing a term");
    CheckResult r;
    try {
      r = check_term(env_, t, expected);
    } catch (const TypeError& e) {
      fail(rule, who + ": " + e.rule + ": " + e.message);
    }
    consume(rule, who, r.usage.consumed_names);
    return r.type;
  }

  StateTypes state_types(const FunctionState& f, const std::string& rule) {
    StateTypes s;
    TypePtr update = check(rule, "update", f.update, nullptr);
    if (update->tag != TypeTag::Fun || update->left->tag != TypeTag::Product)
      fail(rule, "update has type " + to_string(update));
    s.message = update->left->left;
    s.model = update->left->right;
    if (c_.mode == RunMode::Extended) {
      if (!types_match(update->right, ty::transition(s.model, s.message)))
        fail(rule, "update returns " + to_string(update->right));
      TypePtr extract = check(rule, "extract", f.extract, nullptr);
      if (extract->tag != TypeTag::Fun || extract->right->tag != TypeTag::Product ||
          !types_match(extract->left, s.model) || !types_match(extract->right->left, s.model))
        fail(rule, "extract has type " + to_string(extract));
      s.view_model = extract->right->right;
      if (kind_of(s.view_model) != Kind::U) fail(rule, "view model " + to_string(s.view_model) + " is linear");
    } else {
      if (!types_match(update->right, s.model)) fail(rule, "update returns " + to_string(update->right));
      s.view_model = s.model;
    }
    check(rule, "view", f.view, ty::fun(s.view_model, ty::html(s.message)));
    if (c_.mode == RunMode::Subscriptions)
      check(rule, "subscriptions", f.subscriptions, ty::fun(s.model, ty::sub(s.message)));
    return s;
  }

  void event_loop(const Proc& p, const StateTypes& s, const std::string& who) {
    const ActiveThread& t = p.thread;
    switch (t.state) {
      case ThreadState::Idle: check("TT-Idle", who, t.model, s.model); break;
      case ThreadState::Updating: check("TT-Updating", who, t.term, ty::transition(s.model, s.message)); break;
      case ThreadState::Extracting:
        check("TT-Extracting", who, t.cmd, ty::cmd(s.message));
        check("TT-Extracting", who, t.term, ty::product(s.model, s.view_model));
        break;
      case ThreadState::ExtractingT: {
        StateTypes n = state_types(*t.next, "TT-ExtractingT");
        check("TT-ExtractingT", who, t.cmd, ty::cmd(n.message));
        check("TT-ExtractingT", who, t.term, ty::product(n.model, n.view_model));
        break;
      }
      case ThreadState::Rendering:
        check("TT-Rendering", who, t.model, s.model);
        check("TT-Rendering", who, t.cmd, ty::cmd(s.message));
        check("TT-Rendering", who, t.term, ty::html(s.message));
        break;
      case ThreadState::Transitioning: {
        StateTypes n = state_types(*t.next, "TT-Transitioning");
        check("TT-Transitioning", who, t.model, n.model);
        check("TT-Transitioning", who, t.cmd, ty::cmd(n.message));
        check("TT-Transitioning", who, t.term, ty::html(n.message));
        break;
      }
      case ThreadState::Processing: {
        TypePtr shown = ty::html(s.message);
        if (c_.mode == RunMode::Subscriptions) shown = ty::product(shown, ty::sub(s.message));
        check("TS-Processing", who, t.term, ty::product(s.model, shown));
        break;
      }
    }
  }

  void check_event(const std::string& rule, const Event& e, bool environment) {
    try {
      validate_event(e, environment);
    } catch (const InjectionError& err) {
      fail(rule, err.what());
    }
  }

  void check_page(const PagePtr& d, const TypePtr& message) {
    switch (d->tag) {
      case PageTag::Empty: return;
      case PageTag::Text: check("TD-Text", "page text", d->text, ty::string()); return;
      case PageTag::Append:
        check_page(d->left, message);
        check_page(d->right, message);
        return;
      case PageTag::Tag:
        check("TD-Tag", "node " + std::to_string(d->id), d->attrs, message ? ty::attr(message) : nullptr);
        for (const auto& e : d->queue) check_event("TE-Evt", e, false);
        check_page(d->children, message);
        return;
    }
  }
};

}  // namespace

std::optional<RuntimeDiagnostic> check_configuration(const Configuration& c) {
  try {
    Checker(c).run();
  } catch (const Failure& f) {
    return f.d;
  }
  return std::nullopt;
}

}  // namespace mvu

#include "mvu/runtime.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mvu/events.hpp"
#include "mvu/printer.hpp"

namespace mvu {

const char* to_string(ThreadState s) {
  switch (s) {
    case ThreadState::Idle: return "idle";
    case ThreadState::Updating: return "updating";
    case ThreadState::Extracting: return "extracting";
    case ThreadState::ExtractingT: return "extractingT";
    case ThreadState::Rendering: return "rendering";
    case ThreadState::Transitioning: return "transitioning";
    case ThreadState::Processing: return "processing";
  }
  return "?";
}

const char* to_string(ProcTag t) {
  switch (t) {
    case ProcTag::Run: return "run";
    case ProcTag::EventLoop: return "loop";
    case ProcTag::Halt: return "halt";
    case ProcTag::Handler: return "thread";
    case ProcTag::Server: return "server";
    case ProcTag::Zap: return "zap";
  }
  return "?";
}

const char* to_string(Quiescence q) {
  switch (q) {
    case Quiescence::IdleNoEvents: return "Idle-NoEvents";
    case Quiescence::MainBlocked: return "Main-Blocked";
    case Quiescence::Halted: return "Halted";
  }
  return "?";
}

Configuration initial_configuration(RunMode mode, const TermPtr& main) {
  Configuration c;
  c.mode = mode;
  c.page = page::empty();
  c.subscriptions = tm::sub_empty();
  Proc run;
  run.tag = ProcTag::Run;
  run.term = main;
  run.pid = c.next_pid++;
  c.procs.push_back(std::move(run));
  return c;
}

Proc make_zap(Name c) {
  Proc p;
  p.tag = ProcTag::Zap;
  p.zapped = c;
  return p;
}

std::vector<Proc> zap_of(const TermPtr& v) {
  std::vector<Proc> out;
  for (Name n : free_names(v)) out.push_back(make_zap(n));
  return out;
}

std::vector<Name> zap_names(const ActiveThread& t, const FrameStack& pure_frames) {
  std::vector<Name> out;
  switch (t.state) {
    case ThreadState::Rendering:
    case ThreadState::Transitioning:
      append_free_names(t.model, out);
      append_free_names(t.cmd, out);
      break;
    case ThreadState::Extracting:
    case ThreadState::ExtractingT: append_free_names(t.cmd, out); break;
    default: break;
  }
  for (Name n : frame_names(pure_frames))
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  return out;
}

TermPtr current_term(const Proc& p) {
  switch (p.tag) {
    case ProcTag::Run:
    case ProcTag::Handler:
    case ProcTag::Server: return p.term;
    case ProcTag::EventLoop: return p.thread.state == ThreadState::Idle ? nullptr : p.thread.term;
    default: return nullptr;
  }
}

std::optional<Blocked> blocked_on(const TermPtr& t) {
  if (!t) return std::nullopt;
  Focus f = decompose(t);
  if (!f.redex || f.redex->tag != TermTag::Const) return std::nullopt;
  const TermPtr& arg = f.redex->kids[0];
  switch (f.redex->constant) {
    case Constant::Send:
      if (arg->tag == TermTag::Pair && arg->kids[1]->tag == TermTag::Name)
        return Blocked{Constant::Send, arg->kids[1]->name};
      return std::nullopt;
    case Constant::Receive:
    case Constant::Close:
      if (arg->tag == TermTag::Name) return Blocked{f.redex->constant, arg->name};
      return std::nullopt;
    default: return std::nullopt;
  }
}

std::optional<Blocked> blocked_on(const Proc& p) { return blocked_on(current_term(p)); }

const Proc* main_thread(const Configuration& c) {
  for (const auto& p : c.procs)
    if (p.tag == ProcTag::Run || p.tag == ProcTag::EventLoop || p.tag == ProcTag::Halt) return &p;
  return nullptr;
}

namespace {

std::vector<TermPtr> spine(const TermPtr& v, std::size_t n) {
  std::vector<TermPtr> out;
  TermPtr cur = v;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (cur->tag != TermTag::Pair) throw std::logic_error("run: expected a tuple, got " + print_term(v));
    out.push_back(cur->kids[0]);
    cur = cur->kids[1];
  }
  out.push_back(cur);
  return out;
}

class Stepper {
 public:
  explicit Stepper(Configuration& c) : c_(c) {}

  std::optional<std::string> step() {
    focus_.clear();
    for (const auto& p : c_.procs) {
      TermPtr t = current_term(p);
      focus_.push_back(t ? decompose(t) : Focus{});
    }
    std::string rule;
    if (run(rule) || update(rule) || dom_event(rule) || env_event(rule) || handle(rule) || discard(rule) ||
        state_machine(rule) || raise(rule) || session(rule) || lift(rule)) {
      collect_garbage();
      return rule;
    }
    return std::nullopt;
  }

 private:
  Configuration& c_;
  std::vector<Focus> focus_;

  Proc* loop() {
    for (auto& p : c_.procs)
      if (p.tag == ProcTag::EventLoop) return &p;
    return nullptr;
  }
  Proc* halt() {
    for (auto& p : c_.procs)
      if (p.tag == ProcTag::Halt) return &p;
    return nullptr;
  }

  Proc fresh_proc(ProcTag tag, TermPtr term, std::uint64_t version = 0) {
    Proc p;
    p.tag = tag;
    p.term = std::move(term);
    p.version = version;
    p.pid = c_.next_pid++;
    return p;
  }

  void spawn(const std::vector<TermPtr>& terms, std::uint64_t version) {
    for (const auto& t : terms) c_.procs.push_back(fresh_proc(ProcTag::Handler, t, version));
  }

  void add_zaps(const std::vector<Name>& names) {
    for (Name n : names) c_.procs.push_back(make_zap(n));
  }

  static void set_term(Proc& p, TermPtr t) {
    if (p.tag == ProcTag::EventLoop) p.thread.term = std::move(t);
    else p.term = std::move(t);
  }

  void rerender(const TermPtr& html) { c_.page = diff(html, c_.page, c_.fresh); }

  // ------------------------------------------------------------- MVU rules

  bool run(std::string& rule) {
    for (auto& p : c_.procs) {
      if (p.tag != ProcTag::Run || !p.term->value) continue;
      Proc ev;
      ev.tag = ProcTag::EventLoop;
      ev.pid = p.pid;
      ev.version = 0;
      switch (c_.mode) {
        case RunMode::Core: {
          auto parts = spine(p.term, 3);
          ev.fstate = {parts[1], parts[2], nullptr, nullptr};
          ev.thread.state = ThreadState::Processing;
          ev.thread.term = tm::pair(parts[0], tm::app(parts[1], parts[0]));
          p = std::move(ev);
          break;
        }
        case RunMode::Subscriptions: {
          auto parts = spine(p.term, 4);
          ev.fstate = {parts[1], parts[2], nullptr, parts[3]};
          ev.thread.state = ThreadState::Processing;
          ev.thread.term =
              tm::pair(parts[0], tm::pair(tm::app(parts[1], parts[0]), tm::app(parts[3], parts[0])));
          p = std::move(ev);
          break;
        }
        case RunMode::Extended: {
          auto parts = spine(p.term, 6);
          ev.fstate = {parts[1], parts[2], parts[3], nullptr};
          ev.thread.state = ThreadState::Extracting;
          ev.thread.cmd = parts[4];
          ev.thread.term = tm::app(parts[3], parts[0]);
          const TermPtr& server = parts[5];
          TermPtr body = server->tag == TermTag::Lam ? substitute(server->kids[0], server->x, tm::unit())
                                                     : tm::app(server, tm::unit());
          p = std::move(ev);
          c_.procs.push_back(fresh_proc(ProcTag::Server, body));
          break;
        }
      }
      rule = "E-Run";
      return true;
    }
    return false;
  }

  bool update(std::string& rule) {
    Proc* ev = loop();
    if (!ev) return false;
    ActiveThread& t = ev->thread;
    if (t.state == ThreadState::Idle || !t.term->value) return false;
    switch (t.state) {
      case ThreadState::Processing: {
        TermPtr model = t.term->kids[0];
        TermPtr rest = t.term->kids[1];
        if (c_.mode == RunMode::Subscriptions) {
          rerender(rest->kids[0]);
          c_.subscriptions = rest->kids[1];
        } else {
          rerender(rest);
        }
        t = ActiveThread{ThreadState::Idle, model, nullptr, std::nullopt, nullptr};
        rule = "E-Update";
        return true;
      }
      case ThreadState::Rendering: {
        TermPtr model = t.model;
        TermPtr cmd = t.cmd;
        rerender(t.term);
        t = ActiveThread{ThreadState::Idle, model, nullptr, std::nullopt, nullptr};
        spawn(procs(cmd), ev->version);
        rule = "E-Update";
        return true;
      }
      case ThreadState::Transitioning: {
        TermPtr model = t.model;
        TermPtr cmd = t.cmd;
        FunctionState next = *t.next;
        rerender(t.term);
        ev->fstate = next;
        ev->version += 1;
        t = ActiveThread{ThreadState::Idle, model, nullptr, std::nullopt, nullptr};
        // ev may dangle once procs grows
        std::uint64_t version = ev->version;
        spawn(procs(cmd), version);
        rule = "E-Transition";
        return true;
      }
      default: return false;
    }
  }

  std::uint64_t current_version() {
    if (Proc* ev = loop()) return ev->version;
    if (Proc* h = halt()) return h->version;
    return 0;
  }

  bool dom_event(std::string& rule) {
    PagePtr node = first_pending(c_.page);
    if (!node) return false;
    Event e = node->queue.front();
    std::vector<Event> rest(node->queue.begin() + 1, node->queue.end());
    c_.page = update_node(c_.page, node->id, [&](const PagePtr& n) {
      return page::tag(n->name, n->attrs, n->children, rest, n->id);
    });
    std::vector<TermPtr> spawned;
    for (const auto& h : handlers(e.name, node->attrs)) spawned.push_back(tm::app(h, e.payload));
    spawn(spawned, current_version());
    rule = "E-Evt";
    return true;
  }

  bool env_event(std::string& rule) {
    if (c_.env_queue.empty()) return false;
    Event e = c_.env_queue.front();
    c_.env_queue.erase(c_.env_queue.begin());
    std::vector<TermPtr> spawned;
    for (const auto& h : handlers(e.name, c_.subscriptions)) spawned.push_back(tm::app(h, e.payload));
    spawn(spawned, current_version());
    rule = "E-EvtS";
    return true;
  }

  bool handle(std::string& rule) {
    Proc* ev = loop();
    if (!ev || ev->thread.state != ThreadState::Idle) return false;
    for (std::size_t i = 0; i < c_.procs.size(); ++i) {
      Proc& p = c_.procs[i];
      if (p.tag != ProcTag::Handler || !p.term->value || p.version != ev->version) continue;
      TermPtr msg = p.term;
      TermPtr model = ev->thread.model;
      const FunctionState& f = ev->fstate;
      ActiveThread next;
      if (c_.mode == RunMode::Extended) {
        next.state = ThreadState::Updating;
        next.term = tm::app(f.update, tm::pair(msg, model));
        rule = "E-Handle";
      } else {
        Sym m = intern("m'");
        TermPtr shown = tm::app(f.view, tm::var(m));
        TermPtr result = c_.mode == RunMode::Subscriptions
                             ? tm::pair(tm::var(m), tm::pair(shown, tm::app(f.subscriptions, tm::var(m))))
                             : tm::pair(tm::var(m), shown);
        next.state = ThreadState::Processing;
        next.term = tm::let(m, nullptr, tm::app(f.update, tm::pair(msg, model)), result);
        rule = "EP-Handle";
      }
      ev->thread = std::move(next);
      c_.procs.erase(c_.procs.begin() + static_cast<std::ptrdiff_t>(i));
      return true;
    }
    return false;
  }

  bool discard(std::string& rule) {
    Proc* ev = loop();
    bool halted = !ev && halt();
    if (!ev && !halted) return false;
    std::uint64_t version = ev ? ev->version : 0;
    for (std::size_t i = 0; i < c_.procs.size(); ++i) {
      Proc& p = c_.procs[i];
      if (p.tag != ProcTag::Handler || !p.term->value) continue;
      if (!halted && p.version == version) continue;
      TermPtr v = p.term;
      c_.procs.erase(c_.procs.begin() + static_cast<std::ptrdiff_t>(i));
      add_zaps(free_names(v));
      rule = halted ? "E-DiscardHalt" : "E-Discard";
      return true;
    }
    return false;
  }

  bool state_machine(std::string& rule) {
    Proc* ev = loop();
    if (!ev) return false;
    ActiveThread& t = ev->thread;
    if (t.state == ThreadState::Idle || !t.term->value) return false;
    const FunctionState& f = ev->fstate;
    switch (t.state) {
      case ThreadState::Updating: {
        TermPtr v = t.term;
        if (v->tag == TermTag::NoTransition) {
          t = ActiveThread{ThreadState::Extracting, nullptr, v->kids[1], std::nullopt,
                           tm::app(f.extract, v->kids[0])};
          rule = "E-Extract";
          return true;
        }
        if (v->tag == TermTag::Transition) {
          FunctionState next{v->kids[1], v->kids[2], v->kids[3], nullptr};
          t = ActiveThread{ThreadState::ExtractingT, nullptr, v->kids[4], next, tm::app(next.extract, v->kids[0])};
          rule = "E-ExtractT";
          return true;
        }
        return false;
      }
      case ThreadState::Extracting: {
        TermPtr pair = t.term;
        t = ActiveThread{ThreadState::Rendering, pair->kids[0], t.cmd, std::nullopt, tm::app(f.view, pair->kids[1])};
        rule = "E-Render";
        return true;
      }
      case ThreadState::ExtractingT: {
        TermPtr pair = t.term;
        FunctionState next = *t.next;
        t = ActiveThread{ThreadState::Transitioning, pair->kids[0], t.cmd, next, tm::app(next.view, pair->kids[1])};
        rule = "E-RenderT";
        return true;
      }
      default: return false;
    }
  }

  // ------------------------------------------------------------ exceptions

  bool raise(std::string& rule) {
    for (std::size_t i = 0; i < c_.procs.size(); ++i) {
      const Focus& f = focus_[i];
      if (!f.redex || f.redex->tag != TermTag::Raise) continue;
      Proc& p = c_.procs[i];
      std::size_t k = f.frames.size();
      while (k > 0 && !is_try_frame(f.frames[k - 1])) --k;
      if (k > 0) {
        FrameStack outer(f.frames.begin(), f.frames.begin() + static_cast<std::ptrdiff_t>(k - 1));
        FrameStack pure(f.frames.begin() + static_cast<std::ptrdiff_t>(k), f.frames.end());
        TermPtr failure = f.frames[k - 1].parent->kids[2];
        set_term(p, plug(outer, failure));
        add_zaps(frame_names(pure));
        rule = "E-RaiseH";
        return true;
      }
      switch (p.tag) {
        case ProcTag::Run: {
          std::vector<Name> names = frame_names(f.frames);
          p = Proc{ProcTag::Halt, nullptr, {}, {}, 0, 0, p.pid};
          add_zaps(names);
          rule = "E-RaiseURun";
          return true;
        }
        case ProcTag::EventLoop: {
          std::vector<Name> names = zap_names(p.thread, f.frames);
          p = Proc{ProcTag::Halt, nullptr, {}, {}, p.version, 0, p.pid};
          add_zaps(names);
          rule = "E-RaiseUMain";
          return true;
        }
        case ProcTag::Handler:
        case ProcTag::Server: {
          std::vector<Name> names = frame_names(f.frames);
          rule = p.tag == ProcTag::Handler ? "E-RaiseUThread" : "E-RaiseUServer";
          c_.procs.erase(c_.procs.begin() + static_cast<std::ptrdiff_t>(i));
          add_zaps(names);
          return true;
        }
        default: break;
      }
    }
    return false;
  }

  // -------------------------------------------------------------- sessions

  const Restriction* restriction_of(Name n, Name& peer) const {
    for (const auto& r : c_.restrictions) {
      if (r.c == n) {
        peer = r.d;
        return &r;
      }
      if (r.d == n) {
        peer = r.c;
        return &r;
      }
    }
    return nullptr;
  }

  bool zapped(Name n) const {
    for (const auto& p : c_.procs)
      if (p.tag == ProcTag::Zap && p.zapped == n) return true;
    return false;
  }

  void replace_redex(std::size_t i, TermPtr reduct) { set_term(c_.procs[i], plug(focus_[i].frames, std::move(reduct))); }

  bool session(std::string& rule) {
    for (std::size_t i = 0; i < c_.procs.size(); ++i) {
      const Focus& f = focus_[i];
      if (!f.redex || f.redex->tag != TermTag::Const || !is_session_constant(f.redex->constant)) continue;
      if (!f.redex->kids[0]->value) continue;
      const TermPtr& arg = f.redex->kids[0];
      switch (f.redex->constant) {
        case Constant::New: {
          Name c = c_.fresh++;
          Name d = c_.fresh++;
          c_.restrictions.push_back({c, d, f.redex->type1});
          replace_redex(i, tm::pair(tm::name(c), tm::name(d)));
          rule = "E-New";
          return true;
        }
        case Constant::Cancel: {
          if (arg->tag != TermTag::Name) continue;
          Name n = arg->name;
          replace_redex(i, tm::unit());
          c_.procs.push_back(make_zap(n));
          rule = "E-Cancel";
          return true;
        }
        default: break;
      }
      auto b = blocked_on(current_term(c_.procs[i]));
      if (!b) continue;
      Name peer = 0;
      if (!restriction_of(b->name, peer)) continue;
      if (zapped(peer)) {
        std::vector<Name> names{b->name};
        if (b->action == Constant::Send) append_free_names(arg->kids[0], names);
        replace_redex(i, tm::raise());
        add_zaps(names);
        rule = b->action == Constant::Send ? "E-SendZap" : b->action == Constant::Receive ? "E-RecvZap" : "E-CloseZap";
        return true;
      }
      for (std::size_t j = 0; j < c_.procs.size(); ++j) {
        if (j == i) continue;
        auto other = blocked_on(current_term(c_.procs[j]));
        if (!other || other->name != peer) continue;
        if (b->action == Constant::Close && other->action == Constant::Close) {
          replace_redex(i, tm::unit());
          replace_redex(j, tm::unit());
          Name self = b->name;
          std::erase_if(c_.restrictions, [&](const Restriction& r) { return r.c == self || r.d == self; });
          rule = "E-Close";
          return true;
        }
        std::size_t sender = i, receiver = j;
        if (b->action == Constant::Receive && other->action == Constant::Send) std::swap(sender, receiver);
        else if (!(b->action == Constant::Send && other->action == Constant::Receive)) continue;
        const TermPtr& sent = focus_[sender].redex->kids[0];
        TermPtr payload = sent->kids[0];
        Name out = sent->kids[1]->name;
        Name in = focus_[receiver].redex->kids[0]->name;
        replace_redex(sender, tm::name(out));
        replace_redex(receiver, tm::pair(payload, tm::name(in)));
        for (auto& r : c_.restrictions)
          if (r.c == out || r.d == out) r.type = unfold(r.type)->right;
        rule = "E-Comm";
        return true;
      }
    }
    return false;
  }

  // ------------------------------------------------------------ term steps

  bool lift(std::string& rule) {
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < c_.procs.size(); ++i) {
      const Focus& f = focus_[i];
      if (!f.redex) continue;
      const TermPtr& m = f.redex;
      bool pure = m->tag == TermTag::App || m->tag == TermTag::LetPair || m->tag == TermTag::Case ||
                  m->tag == TermTag::Try || (m->tag == TermTag::Const && !is_session_constant(m->constant));
      if (pure) ready.push_back(i);
    }
    if (ready.empty()) return false;
    std::sort(ready.begin(), ready.end(),
              [&](std::size_t a, std::size_t b) { return c_.procs[a].pid < c_.procs[b].pid; });
    std::size_t pick = ready.front();
    for (std::size_t i : ready)
      if (c_.procs[i].pid > c_.last_lifted) {
        pick = i;
        break;
      }
    StepResult r = step_term(current_term(c_.procs[pick]));
    if (r.kind != StepKind::Stepped) return false;
    set_term(c_.procs[pick], r.term);
    c_.last_lifted = c_.procs[pick].pid;
    rule = "E-LiftT";
    return true;
  }

  // --------------------------------------------------- garbage collection

  void collect_garbage() {
    std::erase_if(c_.procs, [](const Proc& p) {
      return p.tag == ProcTag::Server && p.term->value && p.term->tag == TermTag::Unit;
    });
    std::set<Name> zaps;
    for (const auto& p : c_.procs)
      if (p.tag == ProcTag::Zap) zaps.insert(p.zapped);
    std::set<Name> dead;
    std::erase_if(c_.restrictions, [&](const Restriction& r) {
      if (!zaps.count(r.c) || !zaps.count(r.d)) return false;
      dead.insert(r.c);
      dead.insert(r.d);
      return true;
    });
    if (dead.empty()) return;
    std::erase_if(c_.procs, [&](const Proc& p) { return p.tag == ProcTag::Zap && dead.count(p.zapped); });
  }
};

std::string status_of(const Proc& p) {
  if (p.tag == ProcTag::Zap) return "zapper";
  if (auto b = blocked_on(p)) return std::string("blocked on ") + constant_name(b->action) + " #" + std::to_string(b->name);
  TermPtr t = current_term(p);
  if (t && t->value) return "value";
  if (!t) return "idle";
  return "running";
}

std::string label(const Proc& p) {
  std::string s = to_string(p.tag);
  if (p.tag == ProcTag::Zap) return s + " #" + std::to_string(p.zapped);
  return s + " " + std::to_string(p.pid);
}

void print_page_into(const PagePtr& d, std::string& out) {
  switch (d->tag) {
    case PageTag::Empty: out += "htmlEmpty"; return;
    case PageTag::Text: out += "htmlText " + print_term(d->text); return;
    case PageTag::Append:
      out += "(";
      print_page_into(d->left, out);
      out += " ++ ";
      print_page_into(d->right, out);
      out += ")";
      return;
    case PageTag::Tag:
      out += "<" + d->name + "#" + std::to_string(d->id) + " " + print_term(d->attrs);
      if (!d->queue.empty()) {
        out += " @";
        for (const auto& e : d->queue) out += " " + e.name + "(" + print_term(e.payload) + ")";
      }
      out += ">";
      print_page_into(d->children, out);
      out += "</" + d->name + ">";
      return;
  }
}

}  // namespace

std::optional<std::string> step(Configuration& c) { return Stepper(c).step(); }

void validate_event(const Event& e, bool environment) {
  const EventSignature* sig = find_event(e.name);
  if (!sig) throw InjectionError("unknown event " + e.name);
  if (sig->environment != environment)
    throw InjectionError(e.name + (environment ? " is not an environment event" : " is an environment event"));
  if (!e.payload || !e.payload->value || e.payload->has_names)
    throw InjectionError("payload of " + e.name + " must be a closed value");
  try {
    check_closed(e.payload, sig->payload_type);
  } catch (const TypeError& err) {
    throw InjectionError("payload of " + e.name + " must have type " + to_string(sig->payload_type) + ": " +
                         err.message);
  }
}

void inject_dom_event(Configuration& c, NodeId node, const Event& e) {
  validate_event(e, false);
  PagePtr updated = update_node(c.page, node, [&](const PagePtr& n) {
    std::vector<Event> q = n->queue;
    q.push_back(e);
    return page::tag(n->name, n->attrs, n->children, q, n->id);
  });
  if (!updated) throw InjectionError("no element with node id " + std::to_string(node));
  c.page = updated;
}

void inject_env_event(Configuration& c, const Event& e) {
  if (c.mode != RunMode::Subscriptions) throw InjectionError("this program has no subscriptions");
  validate_event(e, true);
  c.env_queue.push_back(e);
}

Classification classify(const Configuration& c) {
  Classification out;
  for (const auto& p : c.procs)
    if (p.tag != ProcTag::Run && p.tag != ProcTag::EventLoop && p.tag != ProcTag::Halt)
      out.threads.push_back({label(p), status_of(p)});
  int mains = 0;
  for (const auto& p : c.procs)
    mains += p.tag == ProcTag::Run || p.tag == ProcTag::EventLoop || p.tag == ProcTag::Halt;
  if (mains != 1) {
    out.failure = "expected exactly one main thread, found " + std::to_string(mains);
    return out;
  }
  if (first_pending(c.page)) {
    out.failure = "a page node still has pending events";
    return out;
  }
  if (!c.env_queue.empty()) {
    out.failure = "environment events are still pending";
    return out;
  }
  const Proc& m = *main_thread(c);
  auto aux_ok = [&](bool values_allowed) {
    for (const auto& r : out.threads) {
      bool ok = r.status == "zapper" || r.status.rfind("blocked", 0) == 0 || (values_allowed && r.status == "value");
      if (!ok) {
        out.failure = r.thread + " is " + r.status;
        return false;
      }
    }
    return true;
  };
  switch (m.tag) {
    case ProcTag::Halt:
      if (!aux_ok(false)) return out;
      out.kind = Quiescence::Halted;
      break;
    case ProcTag::Run:
    case ProcTag::EventLoop: {
      bool idle = m.tag == ProcTag::EventLoop && m.thread.state == ThreadState::Idle;
      if (idle) {
        if (!aux_ok(false)) return out;
        out.kind = Quiescence::IdleNoEvents;
        break;
      }
      if (!blocked_on(m)) {
        out.failure = "main thread is " + status_of(m);
        return out;
      }
      if (!aux_ok(true)) return out;
      out.kind = Quiescence::MainBlocked;
      break;
    }
    default: break;
  }
  out.threads.insert(out.threads.begin(), {label(m), m.tag == ProcTag::Halt ? "halt" : status_of(m)});
  out.ok = true;
  return out;
}

bool detect_error_process(const Configuration& c) {
  std::map<Name, Constant> action;
  for (const auto& p : c.procs)
    if (auto b = blocked_on(p)) action[b->name] = b->action;
  for (const auto& r : c.restrictions) {
    auto a = action.find(r.c);
    auto b = action.find(r.d);
    if (a == action.end() || b == action.end()) continue;
    Constant x = a->second, y = b->second;
    if (x == Constant::Close && y == Constant::Close) continue;
    bool comm = (x == Constant::Send && y == Constant::Receive) || (x == Constant::Receive && y == Constant::Send);
    if (!comm) return true;
  }
  return false;
}

namespace {

void names_of_proc(const Proc& p, std::vector<Name>& out) {
  switch (p.tag) {
    case ProcTag::Run:
    case ProcTag::Handler:
    case ProcTag::Server: append_free_names(p.term, out); break;
    case ProcTag::EventLoop:
      for (const TermPtr& t : {p.thread.model, p.thread.cmd, p.thread.term})
        if (t) append_free_names(t, out);
      if (p.thread.next)
        for (const TermPtr& t : {p.thread.next->view, p.thread.next->update, p.thread.next->extract})
          if (t) append_free_names(t, out);
      for (const TermPtr& t : {p.fstate.view, p.fstate.update, p.fstate.extract, p.fstate.subscriptions})
        if (t) append_free_names(t, out);
      break;
    default: break;
  }
}

}  // namespace

std::optional<std::string> check_name_linearity(const Configuration& c) {
  std::map<Name, int> threads, zaps;
  for (const auto& p : c.procs) {
    if (p.tag == ProcTag::Zap) {
      if (++zaps[p.zapped] > 1) return "#" + std::to_string(p.zapped) + " is zapped twice";
      continue;
    }
    std::vector<Name> names;
    names_of_proc(p, names);
    for (Name n : names)
      if (++threads[n] > 1) return "#" + std::to_string(n) + " occurs in more than one thread";
  }
  std::vector<Name> page_names;
  for (const auto& n : tag_nodes(c.page)) append_free_names(n->attrs, page_names);
  append_free_names(c.subscriptions, page_names);
  if (!page_names.empty()) return "#" + std::to_string(page_names.front()) + " occurs in the page";
  return std::nullopt;
}

std::string print_page(const PagePtr& d) {
  std::string out;
  print_page_into(d, out);
  return out;
}

std::string print_configuration(const Configuration& c) {
  std::string out;
  for (const auto& r : c.restrictions)
    out += "(nu #" + std::to_string(r.c) + " #" + std::to_string(r.d) + " : " + to_string(r.type) + ")\n";
  for (const auto& p : c.procs) {
    out += label(p);
    switch (p.tag) {
      case ProcTag::EventLoop: {
        const ActiveThread& t = p.thread;
        out += " v" + std::to_string(p.version) + " " + to_string(t.state);
        if (t.model) out += " model=" + print_term(t.model);
        if (t.cmd) out += " cmd=" + print_term(t.cmd);
        if (t.term) out += " term=" + print_term(t.term);
        break;
      }
      case ProcTag::Handler: out += " v" + std::to_string(p.version) + " " + print_term(p.term); break;
      case ProcTag::Run:
      case ProcTag::Server: out += " " + print_term(p.term); break;
      case ProcTag::Halt: out += " v" + std::to_string(p.version); break;
      default: break;
    }
    out += "\n";
  }
  out += "page " + print_page(c.page) + "\n";
  if (c.mode == RunMode::Subscriptions) {
    out += "subscriptions " + print_term(c.subscriptions) + "\n";
    for (const auto& e : c.env_queue) out += "env " + e.name + "(" + print_term(e.payload) + ")\n";
  }
  return out;
}

}  // namespace mvu

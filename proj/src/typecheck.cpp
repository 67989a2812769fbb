#include "mvu/typecheck.hpp"

#include <map>
#include <unordered_map>

#include "mvu/desugar.hpp"
#include "mvu/events.hpp"
#include "mvu/printer.hpp"

namespace mvu {

TypeError::TypeError(std::string r, const std::string& m, Span s)
    : std::runtime_error((s.line ? std::to_string(s.line) + ":" + std::to_string(s.col) + ": " : std::string()) +
                         "[" + r + "] " + m),
      rule(std::move(r)),
      message(m),
      span(s) {}

void TypeEnv::bind(Sym x, TypePtr t) {
  EnvEntry e;
  e.var = x;
  e.type = std::move(t);
  entries_.push_back(std::move(e));
}

void TypeEnv::bind_name(Name c, TypePtr t) {
  EnvEntry e;
  e.is_name = true;
  e.name = c;
  e.type = std::move(t);
  entries_.push_back(std::move(e));
}

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::Core: return "core";
    case RunMode::Subscriptions: return "subscriptions";
    case RunMode::Extended: return "extended";
  }
  return "?";
}

namespace {

std::string show(const TypePtr& t) { return t ? to_string(t) : "_"; }

TypePtr want(const TypePtr& t) { return t ? t : ty::hole(); }

bool is_hole(const TypePtr& t) { return !t || t->tag == TypeTag::Hole; }

// Results for closed, name-free values do not depend on the environment.
struct MemoKey {
  const Term* term;
  std::string expected;
  bool operator==(const MemoKey& o) const { return term == o.term && expected == o.expected; }
};
struct MemoHash {
  std::size_t operator()(const MemoKey& k) const {
    return std::hash<const void*>()(k.term) ^ (std::hash<std::string>()(k.expected) * 31);
  }
};
struct MemoEntry {
  TermPtr keep_alive;
  TypePtr type;
};
thread_local std::unordered_map<MemoKey, MemoEntry, MemoHash> memo;

class Checker {
 public:
  struct Entry {
    EnvEntry e;
    bool linear = false;
    int uses = 0;
  };

  std::vector<Entry> env;
  Span span;

  explicit Checker(const TypeEnv& initial) {
    for (const auto& e : initial.entries()) push(e);
  }

  void push(const EnvEntry& e) {
    Entry n;
    n.e = e;
    n.linear = kind_of(e.type) == Kind::L;
    env.push_back(std::move(n));
  }

  [[noreturn]] void fail(const std::string& rule, const std::string& msg) const { throw TypeError(rule, msg, span); }

  std::string label(const Entry& n) const {
    return n.e.is_name ? "#" + std::to_string(n.e.name) : spelling(n.e.var);
  }

  // ------------------------------------------------------------ usage helpers

  // Linear bindings among the first limit entries that have been consumed.
  long consumed_below(std::size_t limit) const {
    long n = 0;
    for (std::size_t i = 0; i < limit; ++i) n += env[i].linear && env[i].uses > 0;
    return n;
  }

  std::vector<int> snapshot() const {
    std::vector<int> s;
    s.reserve(env.size());
    for (const auto& n : env) s.push_back(n.uses);
    return s;
  }

  void restore(const std::vector<int>& s) {
    for (std::size_t i = 0; i < s.size(); ++i) env[i].uses = s[i];
  }

  // Linear bindings below `limit` consumed since `before`.
  std::vector<std::size_t> consumed_since(const std::vector<int>& before, std::size_t limit) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < limit && i < before.size(); ++i)
      if (env[i].linear && env[i].uses > 0 && before[i] == 0) out.push_back(i);
    return out;
  }

  void bind(Sym x, const TypePtr& t) {
    EnvEntry e;
    e.var = x;
    e.type = t;
    push(e);
  }

  void unbind(const std::string& rule, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      const Entry& n = env.back();
      if (n.linear && n.uses == 0)
        fail(rule, "linear variable " + label(n) + " : " + show(n.e.type) + " is never used");
      env.pop_back();
    }
  }

  TypePtr binder_type(const std::string& rule, const TypePtr& t, Sym x) {
    if (has_holes(t))
      fail(rule, "cannot infer the type of " + spelling(x) + " (got " + show(t) + "); add an annotation");
    return t;
  }

  // Branching rules: every branch must consume the same linear bindings.
  void same_consumption(const std::string& rule, const std::vector<int>& a, const std::vector<int>& b,
                        std::size_t limit) {
    std::string diff;
    for (std::size_t i = 0; i < limit; ++i) {
      if (!env[i].linear) continue;
      bool ua = a[i] > 0, ub = b[i] > 0;
      if (ua != ub) diff += (diff.empty() ? "" : ", ") + label(env[i]);
    }
    if (!diff.empty()) fail(rule, "branches must use the same linear variables; they differ on " + diff);
  }

  TypePtr expect(const std::string& rule, const TypePtr& actual, const TypePtr& expected) {
    if (!expected) return actual;
    TypePtr r = fit(actual, expected);
    if (!r) fail(rule, "expected " + show(expected) + " but found " + show(actual));
    return r;
  }

  // Splits an expected type of a given shape into its components.
  bool shape(const TypePtr& expected, TypeTag tag, TypePtr& left, TypePtr& right) {
    if (is_hole(expected)) {
      left = ty::hole();
      right = ty::hole();
      return true;
    }
    if (expected->tag != tag) return false;
    left = expected->left ? expected->left : ty::hole();
    right = expected->right ? expected->right : ty::hole();
    return true;
  }

  TypePtr component(const std::string& rule, const TypePtr& expected, TypeTag tag, const char* what) {
    TypePtr l, r;
    if (!shape(expected, tag, l, r)) fail(rule, std::string("expected ") + show(expected) + " but found " + what);
    return l;
  }

  // ----------------------------------------------------------------- checking

  TypePtr tc(const TermPtr& t, const TypePtr& expected_in) {
    Span saved = span;
    if (t->span.line) span = t->span;
    TypePtr expected = is_hole(expected_in) ? nullptr : expected_in;

    bool memoizable = t->value && t->free_vars.empty() && !t->has_names && t->tag != TermTag::Var;
    std::string key;
    if (memoizable) {
      key = expected ? canonical(expected) : "";
      auto it = memo.find({t.get(), key});
      if (it != memo.end()) {
        span = saved;
        return it->second.type;
      }
    }

    std::size_t scope = env.size();
    long before = consumed_below(scope);
    TypePtr result = infer(t, expected);

    // Environment kinding: an unrestricted value consumed no linear binding.
    if (t->value && !has_holes(result) && kind_of(result) == Kind::U &&
        consumed_below(scope) != before)
      throw std::logic_error("environment kinding violated by " + print_term(t) + " : " + show(result));

    if (memoizable) {
      if (memo.size() > 200000) memo.clear();
      memo.emplace(MemoKey{t.get(), key}, MemoEntry{t, result});
    }
    span = saved;
    return result;
  }

  TypePtr infer(const TermPtr& t, const TypePtr& expected) {
    switch (t->tag) {
      case TermTag::Var: {
        for (std::size_t i = env.size(); i-- > 0;) {
          Entry& n = env[i];
          if (n.e.is_name || n.e.var != t->x) continue;
          use("T-Var", n);
          return expect("T-Var", n.e.type, expected);
        }
        fail("T-Var", "unbound variable " + spelling(t->x));
      }
      case TermTag::Name: {
        for (std::size_t i = env.size(); i-- > 0;) {
          Entry& n = env[i];
          if (!n.e.is_name || n.e.name != t->name) continue;
          use("T-Name", n);
          return expect("T-Name", n.e.type, expected);
        }
        fail("T-Name", "unbound runtime name #" + std::to_string(t->name));
      }
      case TermTag::Unit: return expect("T-Unit", ty::unit(), expected);
      case TermTag::Str: return expect("T-String", ty::string(), expected);
      case TermTag::Int: return expect("T-Int", ty::integer(), expected);
      case TermTag::Lam: return lambda(t, expected);
      case TermTag::Rec: return recursive(t, expected);
      case TermTag::App: return application(t, expected);
      case TermTag::Const: return constant(t, expected);
      case TermTag::Pair: {
        TypePtr l, r;
        if (!shape(expected, TypeTag::Product, l, r))
          fail("T-Pair", "expected " + show(expected) + " but found a pair");
        TypePtr a = tc(t->kids[0], l);
        TypePtr b = tc(t->kids[1], r);
        return expect("T-Pair", ty::product(a, b), expected);
      }
      case TermTag::LetPair: {
        TypePtr p = tc(t->kids[0], ty::product(ty::hole(), ty::hole()));
        if (p->tag != TypeTag::Product) fail("T-LetPair", "expected a pair but found " + show(p));
        bind(t->x, binder_type("T-LetPair", p->left, t->x));
        bind(t->y, binder_type("T-LetPair", p->right, t->y));
        TypePtr r = tc(t->kids[1], expected);
        unbind("T-LetPair", 2);
        return r;
      }
      case TermTag::Inl:
      case TermTag::Inr: return injection(t, expected);
      case TermTag::Case: return case_of(t, expected);
      case TermTag::HtmlTag: {
        TypePtr msg = component("T-HtmlTag", expected, TypeTag::Html, "HTML");
        TypePtr a = tc(t->kids[0], ty::attr(msg));
        msg = merge(msg, a->left);
        TypePtr c = tc(t->kids[1], ty::html(msg));
        return expect("T-HtmlTag", ty::html(merge(msg, c->left)), expected);
      }
      case TermTag::HtmlText: {
        TypePtr msg = component("T-HtmlText", expected, TypeTag::Html, "HTML");
        tc(t->kids[0], ty::string());
        return expect("T-HtmlText", ty::html(msg), expected);
      }
      case TermTag::HtmlEmpty:
        return expect("T-HtmlEmpty", ty::html(component("T-HtmlEmpty", expected, TypeTag::Html, "HTML")), expected);
      case TermTag::Attr: return attribute(t, expected);
      case TermTag::AttrEmpty:
        return expect("T-AttrEmpty", ty::attr(component("T-AttrEmpty", expected, TypeTag::Attr, "an attribute")),
                      expected);
      case TermTag::Append: return append(t, expected);
      case TermTag::CmdSpawn: {
        TypePtr msg = component("T-Cmd", expected, TypeTag::Cmd, "a command");
        std::size_t scope = env.size();
        long before = consumed_below(scope);
        TypePtr a = tc(t->kids[0], msg);
        TypePtr r = expect("T-Cmd", ty::cmd(a), expected);
        if (consumed_below(scope) != before && !has_holes(r) && kind_of(r) == Kind::U)
          fail("T-Cmd", "spawned computation uses linear resources, so its message type " + show(r->left) +
                            " must be linear");
        return r;
      }
      case TermTag::CmdEmpty:
        return expect("T-CmdEmpty", ty::cmd(component("T-CmdEmpty", expected, TypeTag::Cmd, "a command")), expected);
      case TermTag::Transition: return transition(t, expected);
      case TermTag::NoTransition: {
        TypePtr a, b;
        if (!shape(expected, TypeTag::Transition, a, b))
          fail("T-NoTransition", "expected " + show(expected) + " but found a transition");
        TypePtr m = tc(t->kids[0], a);
        TypePtr c = tc(t->kids[1], ty::cmd(b));
        if (c->tag != TypeTag::Cmd) fail("T-NoTransition", "expected a command but found " + show(c));
        return expect("T-NoTransition", ty::transition(m, c->left), expected);
      }
      case TermTag::Raise: return want(expected);
      case TermTag::Try: {
        TypePtr a = tc(t->kids[0], nullptr);
        binder_type("T-Try", a, t->x);
        auto base = snapshot();
        std::size_t limit = env.size();
        bind(t->x, a);
        TypePtr m = tc(t->kids[1], expected);
        unbind("T-Try", 1);
        auto after_m = snapshot();
        restore(base);
        TypePtr n = tc(t->kids[2], expected);
        auto after_n = snapshot();
        same_consumption("T-Try", after_m, after_n, limit);
        TypePtr r = lub(m, n);
        if (!r) fail("T-Try", "the continuations have different types " + show(m) + " and " + show(n));
        return expect("T-Try", r, expected);
      }
      case TermTag::Sub: {
        TypePtr msg = component("T-Sub", expected, TypeTag::Sub, "a subscription");
        const EventSignature* sig = find_handler(t->text);
        if (!sig) fail("T-Sub", "unknown handler " + t->text);
        TypePtr f = tc(t->kids[0], ty::fun(sig->payload_type, msg, Kind::U));
        return expect("T-Sub", ty::sub(f->right), expected);
      }
      case TermTag::SubEmpty:
        return expect("T-SubEmpty", ty::sub(component("T-SubEmpty", expected, TypeTag::Sub, "a subscription")),
                      expected);
      case TermTag::HtmlSugar: return sugar(t, expected);
    }
    fail("T-Var", "unknown term");
  }

  void use(const char* rule, Entry& n) {
    if (n.linear) {
      if (n.uses > 0) fail(rule, "linear " + std::string(n.e.is_name ? "name " : "variable ") + label(n) + " : " +
                                     show(n.e.type) + " is used more than once");
    }
    ++n.uses;
  }

  TypePtr lambda(const TermPtr& t, const TypePtr& expected) {
    TypePtr ep, er;
    if (!shape(expected, TypeTag::Fun, ep, er)) fail("T-Abs", "expected " + show(expected) + " but found a function");
    TypePtr param = t->type1;
    if (param && !is_hole(ep) && !types_match(ep, param, Variance::Sub))
      fail("T-Abs", "parameter " + spelling(t->x) + " : " + show(param) + " does not match expected " + show(ep));
    if (!param) param = ep;
    binder_type("T-Abs", param, t->x);
    TypePtr result = t->type2 ? t->type2 : er;
    if (t->type2 && !is_hole(er) && !types_match(t->type2, er, Variance::Sub))
      fail("T-Abs", "result annotation " + show(t->type2) + " does not match expected " + show(er));
    auto before = snapshot();
    std::size_t limit = env.size();
    bind(t->x, param);
    TypePtr body = tc(t->kids[0], result);
    unbind("T-Abs", 1);
    if (t->kind == Kind::U) {
      auto captured = consumed_since(before, limit);
      if (!captured.empty())
        fail("T-Abs", "unrestricted function captures linear variable " + label(env[captured[0]]) +
                          "; write linfun");
    }
    if (t->type2) body = t->type2;
    return expect("T-Abs", ty::fun(param, body, t->kind), expected);
  }

  TypePtr recursive(const TermPtr& t, const TypePtr& expected) {
    if (!t->type1 || !t->type2) fail("T-Rec", "recursive functions need parameter and result annotations");
    TypePtr self = ty::fun(t->type1, t->type2, Kind::U);
    auto before = snapshot();
    std::size_t limit = env.size();
    bind(t->x, self);
    bind(t->y, t->type1);
    tc(t->kids[0], t->type2);
    unbind("T-Rec", 2);
    auto captured = consumed_since(before, limit);
    if (!captured.empty())
      fail("T-Rec", "recursive function captures linear variable " + label(env[captured[0]]));
    return expect("T-Rec", self, expected);
  }

  TypePtr application(const TermPtr& t, const TypePtr& expected) {
    const TermPtr& f = t->kids[0];
    const TermPtr& a = t->kids[1];
    if (f->tag == TermTag::Lam) {
      // let-style: the argument determines the parameter type
      TypePtr at = tc(a, f->type1);
      binder_type("T-App", at, f->x);
      TypePtr ft = tc(f, ty::fun(at, want(expected), Kind::L));
      return expect("T-App", ft->right, expected);
    }
    TypePtr ft = tc(f, nullptr);
    if (ft->tag != TypeTag::Fun) fail("T-App", "applying a non-function of type " + show(ft));
    tc(a, ft->left);
    return expect("T-App", ft->right, expected);
  }

  TypePtr session_of(const char* rule, const TypePtr& t, const char* what) {
    if (!is_session(t)) fail(rule, std::string(what) + " expects a session endpoint but found " + show(t));
    return unfold(t);
  }

  TypePtr constant(const TermPtr& t, const TypePtr& expected) {
    const TermPtr& arg = t->kids[0];
    switch (t->constant) {
      case Constant::Send: {
        TypePtr payload, chan, s;
        if (arg->tag == TermTag::Pair) {
          chan = tc(arg->kids[1], nullptr);
          s = session_of("T-AppK", chan, "send");
          if (s->tag != TypeTag::Out) fail("T-AppK", "send on an endpoint of type " + show(chan));
          tc(arg->kids[0], s->left);
        } else {
          TypePtr p = tc(arg, ty::product(ty::hole(), ty::hole()));
          if (p->tag != TypeTag::Product) fail("T-AppK", "send expects a pair but found " + show(p));
          s = session_of("T-AppK", p->right, "send");
          if (s->tag != TypeTag::Out) fail("T-AppK", "send on an endpoint of type " + show(p->right));
          if (!fit(p->left, s->left))
            fail("T-AppK", "send of " + show(p->left) + " where the session expects " + show(s->left));
        }
        return expect("T-AppK", s->right, expected);
      }
      case Constant::Receive: {
        TypePtr chan = tc(arg, nullptr);
        TypePtr s = session_of("T-AppK", chan, "receive");
        if (s->tag != TypeTag::In) fail("T-AppK", "receive on an endpoint of type " + show(chan));
        return expect("T-AppK", ty::product(s->left, s->right), expected);
      }
      case Constant::New: {
        TypePtr s = t->type1;
        if (!s) fail("T-AppK", "new needs a session type annotation, as in new[S] ()");
        if (!is_session(s) || !is_closed(s) || !is_contractive(s))
          fail("T-AppK", "new needs a closed, contractive session type but got " + show(s));
        tc(arg, ty::unit());
        return expect("T-AppK", ty::product(s, dual(s)), expected);
      }
      case Constant::Cancel: {
        TypePtr chan = tc(arg, nullptr);
        session_of("T-AppK", chan, "cancel");
        return expect("T-AppK", ty::unit(), expected);
      }
      case Constant::Close: {
        TypePtr chan = tc(arg, nullptr);
        TypePtr s = session_of("T-AppK", chan, "close");
        if (s->tag != TypeTag::End) fail("T-AppK", "close on an endpoint of type " + show(chan));
        return expect("T-AppK", ty::unit(), expected);
      }
      default: {
        TypePtr sig = primitive_type(t->constant);
        tc(arg, sig->left);
        return expect("T-AppK", sig->right, expected);
      }
    }
  }

  TypePtr injection(const TermPtr& t, const TypePtr& expected) {
    bool left = t->tag == TermTag::Inl;
    const char* rule = left ? "T-Inl" : "T-Inr";
    TypePtr sum = want(expected);
    if (t->type1) {
      if (t->type1->tag != TypeTag::Sum) fail(rule, "injection annotated with non-sum type " + show(t->type1));
      if (!types_match(t->type1, sum, Variance::Sub))
        fail(rule, "expected " + show(expected) + " but found " + show(t->type1));
      sum = merge(t->type1, sum);
    }
    TypePtr l, r;
    if (!shape(sum, TypeTag::Sum, l, r)) fail(rule, "expected " + show(expected) + " but found an injection");
    TypePtr v = tc(t->kids[0], left ? l : r);
    TypePtr result = left ? ty::sum(v, r) : ty::sum(l, v);
    return expect(rule, result, expected);
  }

  TypePtr case_of(const TermPtr& t, const TypePtr& expected) {
    TypePtr s = tc(t->kids[0], ty::sum(ty::hole(), ty::hole()));
    if (s->tag != TypeTag::Sum) fail("T-Case", "case on a non-sum of type " + show(s));
    binder_type("T-Case", s->left, t->x);
    binder_type("T-Case", s->right, t->y);
    auto base = snapshot();
    std::size_t limit = env.size();
    bind(t->x, s->left);
    TypePtr m = tc(t->kids[1], expected);
    unbind("T-Case", 1);
    auto after_m = snapshot();
    restore(base);
    bind(t->y, s->right);
    TypePtr n = tc(t->kids[2], expected ? expected : m);
    unbind("T-Case", 1);
    auto after_n = snapshot();
    same_consumption("T-Case", after_m, after_n, limit);
    TypePtr r = lub(m, n);
    if (!r) fail("T-Case", "the branches have different types " + show(m) + " and " + show(n));
    return expect("T-Case", r, expected);
  }

  TypePtr attribute(const TermPtr& t, const TypePtr& expected) {
    TypePtr msg = component("T-Attr", expected, TypeTag::Attr, "an attribute");
    if (const EventSignature* sig = find_handler(t->text)) {
      TypePtr f = tc(t->kids[0], ty::fun(sig->payload_type, msg, Kind::U));
      return expect("T-EvtAttr", ty::attr(f->right), expected);
    }
    if (t->text.empty()) fail("T-Attr", "attribute names must be non-empty");
    tc(t->kids[0], ty::string());
    return expect("T-Attr", ty::attr(msg), expected);
  }

  TypePtr append(const TermPtr& t, const TypePtr& expected) {
    static const TypeTag monoids[] = {TypeTag::Html, TypeTag::Attr, TypeTag::Cmd, TypeTag::Sub};
    auto rule_for = [](TypeTag tag) -> std::string {
      switch (tag) {
        case TypeTag::Html: return "T-HtmlAppend";
        case TypeTag::Attr: return "T-AttrAppend";
        case TypeTag::Cmd: return "T-CmdAppend";
        default: return "T-SubAppend";
      }
    };
    if (expected) {
      bool ok = false;
      for (TypeTag m : monoids) ok = ok || expected->tag == m;
      if (!ok) fail("T-HtmlAppend", "expected " + show(expected) + " but found an append");
    }
    TypePtr a = tc(t->kids[0], expected);
    bool ok = false;
    for (TypeTag m : monoids) ok = ok || a->tag == m;
    if (!ok) fail("T-HtmlAppend", "cannot append values of type " + show(a));
    std::string rule = rule_for(a->tag);
    TypePtr b = tc(t->kids[1], a);
    TypePtr r = lub(a, b);
    if (!r) fail(rule, "cannot append " + show(a) + " and " + show(b));
    return expect(rule, r, expected);
  }

  TypePtr transition(const TermPtr& t, const TypePtr& expected) {
    if (expected && expected->tag != TypeTag::Transition)
      fail("T-Transition", "expected " + show(expected) + " but found a transition");
    std::size_t scope = env.size();
    long before = consumed_below(scope);
    TypePtr a = tc(t->kids[0], nullptr);
    if (has_holes(a)) fail("T-Transition", "cannot infer the new model type " + show(a) + "; annotate it");
    TypePtr ext = tc(t->kids[3], ty::fun(a, ty::product(a, ty::hole()), Kind::U));
    TypePtr c = ext->right->right;
    if (has_holes(c)) fail("T-Transition", "cannot infer the type the extract function returns");
    if (kind_of(c) != Kind::U)
      fail("T-Transition", "the extracted view model " + show(c) + " must be unrestricted");
    TypePtr upd = tc(t->kids[2], ty::fun(ty::product(ty::hole(), a), ty::transition(a, ty::hole()), Kind::U));
    TypePtr b = upd->left->left;
    TypePtr view = tc(t->kids[1], ty::fun(c, ty::html(b), Kind::U));
    b = merge(b, view->right->left);
    TypePtr cmd = tc(t->kids[4], ty::cmd(b));
    b = merge(b, cmd->left);
    if (has_holes(b)) fail("T-Transition", "cannot infer the new message type");
    if (!fit(upd, ty::fun(ty::product(b, a), ty::transition(a, b), Kind::U)))
      fail("T-Transition", "update has type " + show(upd) + " but the new state needs " +
                               show(ty::fun(ty::product(b, a), ty::transition(a, b))));
    TypePtr r = want(expected);
    if (r->tag == TypeTag::Hole) r = ty::transition(ty::hole(), ty::hole());
    if (consumed_below(scope) != before && !has_holes(r) && kind_of(r) == Kind::U)
      fail("T-Transition", "the new state uses linear resources, so the transition type " + show(r) +
                               " must be linear");
    return r;
  }

  // Quasi-quoted HTML: T-Html, TH-*, TA-*.
  TypePtr sugar(const TermPtr& t, const TypePtr& expected) {
    TypePtr msg = component("T-Html", expected, TypeTag::Html, "HTML");
    for (const auto& h : *t->html) msg = sugar_html(t, h, msg);
    return expect("T-Html", ty::html(msg), expected);
  }

  TypePtr sugar_html(const TermPtr& owner, const SugarHtml& h, TypePtr msg) {
    Span saved = span;
    if (h.span.line) span = h.span;
    switch (h.form) {
      case SugarHtml::Form::Text: break;
      case SugarHtml::Form::Antiquote: {
        TypePtr r = tc(owner->kids[h.kid], ty::html(msg));
        if (r->tag != TypeTag::Html) fail("TH-Antiquote", "expected HTML but found " + show(r));
        msg = merge(msg, r->left);
        break;
      }
      case SugarHtml::Form::Tag:
        for (const auto& a : h.attrs) msg = sugar_attr(owner, a, msg);
        for (const auto& c : h.children) msg = sugar_html(owner, c, msg);
        break;
    }
    span = saved;
    return msg;
  }

  TypePtr sugar_attr(const TermPtr& owner, const SugarAttr& a, TypePtr msg) {
    Span saved = span;
    if (a.span.line) span = a.span;
    switch (a.form) {
      case SugarAttr::Form::Literal:
        if (find_handler(a.key)) fail("TA-Evt", "handler " + a.key + " needs a function, not a string");
        break;
      case SugarAttr::Form::Term:
        if (const EventSignature* sig = find_handler(a.key)) {
          TypePtr f = tc(owner->kids[a.kid], ty::fun(sig->payload_type, msg, Kind::U));
          msg = merge(msg, f->right);
        } else {
          tc(owner->kids[a.kid], ty::string());
        }
        break;
      case SugarAttr::Form::Antiquote: {
        TypePtr r = tc(owner->kids[a.kid], ty::attr(msg));
        if (r->tag != TypeTag::Attr) fail("TA-Antiquote", "expected attributes but found " + show(r));
        msg = merge(msg, r->left);
        break;
      }
    }
    span = saved;
    return msg;
  }
};

}  // namespace

CheckResult check_term(const TypeEnv& env, const TermPtr& t, const TypePtr& expected) {
  Checker c(env);
  CheckResult out;
  out.type = c.tc(t, expected);
  for (const auto& n : c.env) {
    out.usage.bindings.push_back({c.label(n), n.linear ? Kind::L : Kind::U, n.uses});
    if (n.linear && n.uses == 0) out.usage.residual.push_back(c.label(n));
    if (n.e.is_name && n.uses > 0) out.usage.consumed_names.push_back(n.e.name);
  }
  return out;
}

TypePtr check_closed(const TermPtr& t, const TypePtr& expected) { return check_term(TypeEnv{}, t, expected).type; }

TypePtr run_tuple_type(const RunTypes& r) {
  const TypePtr& a = r.model;
  const TypePtr& b = r.message;
  switch (r.mode) {
    case RunMode::Core:
      return ty::product(a, ty::product(ty::fun(a, ty::html(b)), ty::fun(ty::product(b, a), a)));
    case RunMode::Subscriptions:
      return ty::product(a, ty::product(ty::fun(a, ty::html(b)),
                                        ty::product(ty::fun(ty::product(b, a), a), ty::fun(a, ty::sub(b)))));
    case RunMode::Extended: {
      TypePtr server = ty::fun(ty::unit(), ty::unit(), Kind::L);
      TypePtr tail = ty::product(ty::fun(a, ty::product(a, r.view_model)), ty::product(ty::cmd(b), server));
      return ty::product(a, ty::product(ty::fun(r.view_model, ty::html(b)),
                                        ty::product(ty::fun(ty::product(b, a), ty::transition(a, b)), tail)));
    }
  }
  return nullptr;
}

RunTypes classify_main_type(const TypePtr& t, Span span) {
  std::vector<TypePtr> parts;
  TypePtr cur = t;
  while (cur->tag == TypeTag::Product) {
    parts.push_back(cur->left);
    cur = cur->right;
  }
  parts.push_back(cur);
  auto bad = [&](const std::string& why) -> RunTypes {
    throw TypeError("TP-Run",
                    "main must be (model, view, update), (model, view, update, subscriptions) or (model, view, "
                    "update, extract, command, server): " +
                        why + " in " + show(t),
                    span);
  };
  RunTypes r;
  if (parts.size() == 3) r.mode = RunMode::Core;
  else if (parts.size() == 4) r.mode = RunMode::Subscriptions;
  else if (parts.size() == 6) r.mode = RunMode::Extended;
  else return bad("a tuple of " + std::to_string(parts.size()) + " components");
  r.model = parts[0];
  const TypePtr& view = parts[1];
  if (view->tag != TypeTag::Fun || view->right->tag != TypeTag::Html) return bad("the view is not a function to HTML");
  r.message = view->right->left;
  const TypePtr& update = parts[2];
  if (update->tag != TypeTag::Fun || update->left->tag != TypeTag::Product) return bad("the update is malformed");
  if (TypePtr m = lub(r.message, update->left->left)) r.message = m;
  r.view_model = r.model;
  if (r.mode == RunMode::Extended) {
    const TypePtr& extract = parts[3];
    if (extract->tag != TypeTag::Fun || extract->right->tag != TypeTag::Product)
      return bad("the extract function is malformed");
    r.view_model = extract->right->right;
    if (parts[4]->tag == TypeTag::Cmd)
      if (TypePtr m = lub(r.message, parts[4]->left)) r.message = m;
  }
  if (has_holes(r.model) || has_holes(r.message) || has_holes(r.view_model))
    return bad("cannot determine the model and message types");
  if (r.mode == RunMode::Extended && kind_of(r.view_model) != Kind::U)
    throw TypeError("TP-Run", "the extracted view model " + show(r.view_model) + " must be unrestricted", span);
  if (!fit(t, run_tuple_type(r)))
    throw TypeError("TP-Run", "main has type " + show(t) + " but must have " + show(run_tuple_type(r)), span);
  return r;
}

CheckedProgram check_program(const Program& p) {
  CheckedProgram out;
  out.program = p;
  TypeEnv env;
  for (const auto& d : p.definitions) {
    TypePtr t = check_term(env, d.term, d.annotation).type;
    if (has_holes(t))
      throw TypeError("T-Abs", "cannot infer the type of " + d.name + " (got " + show(t) + "); add an annotation",
                      d.span);
    if (kind_of(t) != Kind::U)
      throw TypeError("T-Var", "top-level definition " + d.name + " : " + show(t) + " must be unrestricted", d.span);
    if (!desugar(d.term)->value)
      throw TypeError("T-Var", "top-level definition " + d.name + " must be a value", d.span);
    env.bind(d.sym, t);
    out.definition_types.push_back(t);
  }
  if (p.main) {
    CheckResult r = check_term(env, p.main);
    out.main_type = r.type;
    out.run = classify_main_type(r.type, p.main->span);
  }
  return out;
}

}  // namespace mvu

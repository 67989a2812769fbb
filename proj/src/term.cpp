#include "mvu/term.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace mvu {

namespace {

struct ConstantInfo {
  Constant k;
  const char* name;
};

const ConstantInfo kConstants[] = {
    {Constant::Send, "send"},
    {Constant::Receive, "receive"},
    {Constant::New, "new"},
    {Constant::Cancel, "cancel"},
    {Constant::Close, "close"},
    {Constant::IntAdd, "intAdd"},
    {Constant::IntSub, "intSub"},
    {Constant::IntMul, "intMul"},
    {Constant::IntLt, "intLt"},
    {Constant::IntEq, "intEq"},
    {Constant::IntToString, "intToString"},
    {Constant::ReverseString, "reverseString"},
    {Constant::Concat, "concat"},
};

void sorted_union(std::vector<Sym>& acc, const std::vector<Sym>& more) {
  if (more.empty()) return;
  if (acc.empty()) {
    acc = more;
    return;
  }
  std::vector<Sym> out;
  out.reserve(acc.size() + more.size());
  std::set_union(acc.begin(), acc.end(), more.begin(), more.end(), std::back_inserter(out));
  acc.swap(out);
}

}  // namespace

const char* constant_name(Constant k) {
  for (const auto& c : kConstants)
    if (c.k == k) return c.name;
  return "?";
}

std::optional<Constant> constant_from_name(const std::string& name) {
  for (const auto& c : kConstants)
    if (name == c.name) return c.k;
  return std::nullopt;
}

bool is_session_constant(Constant k) {
  return k == Constant::Send || k == Constant::Receive || k == Constant::New ||
         k == Constant::Cancel || k == Constant::Close;
}

TypePtr bool_type() {
  static const TypePtr b = ty::sum(ty::unit(), ty::unit());
  return b;
}

TypePtr primitive_type(Constant k) {
  auto ii = ty::product(ty::integer(), ty::integer());
  switch (k) {
    case Constant::IntAdd:
    case Constant::IntSub:
    case Constant::IntMul: return ty::fun(ii, ty::integer());
    case Constant::IntLt:
    case Constant::IntEq: return ty::fun(ii, bool_type());
    case Constant::IntToString: return ty::fun(ty::integer(), ty::string());
    case Constant::ReverseString: return ty::fun(ty::string(), ty::string());
    case Constant::Concat: return ty::fun(ty::product(ty::string(), ty::string()), ty::string());
    default: return nullptr;
  }
}

std::vector<Sym> binders_of(const Term& t, std::size_t i) {
  switch (t.tag) {
    case TermTag::Lam: return {t.x};
    case TermTag::Rec: return {t.x, t.y};
    case TermTag::LetPair: return i == 1 ? std::vector<Sym>{t.x, t.y} : std::vector<Sym>{};
    case TermTag::Case:
      if (i == 1) return {t.x};
      if (i == 2) return {t.y};
      return {};
    case TermTag::Try: return i == 1 ? std::vector<Sym>{t.x} : std::vector<Sym>{};
    default: return {};
  }
}

TermPtr finalize(Term t) {
  bool all_values = true;
  t.has_names = t.tag == TermTag::Name;
  t.free_vars.clear();
  if (t.tag == TermTag::Var) t.free_vars.push_back(t.x);
  for (std::size_t i = 0; i < t.kids.size(); ++i) {
    const auto& k = t.kids[i];
    if (!k) throw std::logic_error("null subterm");
    all_values = all_values && k->value;
    t.has_names = t.has_names || k->has_names;
    auto bs = binders_of(t, i);
    if (bs.empty()) {
      sorted_union(t.free_vars, k->free_vars);
    } else {
      std::vector<Sym> fv;
      for (Sym s : k->free_vars)
        if (std::find(bs.begin(), bs.end(), s) == bs.end()) fv.push_back(s);
      sorted_union(t.free_vars, fv);
    }
  }
  switch (t.tag) {
    case TermTag::Var:
    case TermTag::Lam:
    case TermTag::Rec:
    case TermTag::Unit:
    case TermTag::Str:
    case TermTag::Int:
    case TermTag::Name:
    case TermTag::HtmlEmpty:
    case TermTag::AttrEmpty:
    case TermTag::CmdEmpty:
    case TermTag::SubEmpty:
    case TermTag::CmdSpawn: t.value = true; break;
    case TermTag::Pair:
    case TermTag::Inl:
    case TermTag::Inr:
    case TermTag::HtmlTag:
    case TermTag::HtmlText:
    case TermTag::Attr:
    case TermTag::Append:
    case TermTag::Transition:
    case TermTag::NoTransition:
    case TermTag::Sub: t.value = all_values; break;
    default: t.value = false;
  }
  return std::make_shared<const Term>(std::move(t));
}

namespace tm {

namespace {
Term node(TermTag tag, std::vector<TermPtr> kids = {}) {
  Term t;
  t.tag = tag;
  t.kids = std::move(kids);
  return t;
}
}  // namespace

TermPtr var(Sym x, Span s) {
  Term t = node(TermTag::Var);
  t.x = x;
  t.span = s;
  return finalize(std::move(t));
}
TermPtr var(const std::string& x) { return var(intern(x)); }

TermPtr lam(Kind k, Sym x, TypePtr param, TypePtr result, TermPtr body) {
  Term t = node(TermTag::Lam, {std::move(body)});
  t.kind = k;
  t.x = x;
  t.type1 = std::move(param);
  t.type2 = std::move(result);
  return finalize(std::move(t));
}

TermPtr rec(Sym f, Sym x, TypePtr param, TypePtr result, TermPtr body) {
  Term t = node(TermTag::Rec, {std::move(body)});
  t.x = f;
  t.y = x;
  t.type1 = std::move(param);
  t.type2 = std::move(result);
  return finalize(std::move(t));
}

TermPtr app(TermPtr f, TermPtr a) { return finalize(node(TermTag::App, {std::move(f), std::move(a)})); }

TermPtr constant(Constant k, TermPtr arg, TypePtr annotation) {
  Term t = node(TermTag::Const, {std::move(arg)});
  t.constant = k;
  t.type1 = std::move(annotation);
  return finalize(std::move(t));
}

TermPtr unit() {
  static const TermPtr u = finalize(node(TermTag::Unit));
  return u;
}

TermPtr str(const std::string& s) {
  Term t = node(TermTag::Str);
  t.text = s;
  return finalize(std::move(t));
}

TermPtr integer(std::int64_t n) {
  Term t = node(TermTag::Int);
  t.number = n;
  return finalize(std::move(t));
}

TermPtr pair(TermPtr a, TermPtr b) { return finalize(node(TermTag::Pair, {std::move(a), std::move(b)})); }

TermPtr let_pair(Sym x, Sym y, TermPtr scrutinee, TermPtr body) {
  Term t = node(TermTag::LetPair, {std::move(scrutinee), std::move(body)});
  t.x = x;
  t.y = y;
  return finalize(std::move(t));
}

TermPtr inl(TermPtr v, TypePtr sum_type) {
  Term t = node(TermTag::Inl, {std::move(v)});
  t.type1 = std::move(sum_type);
  return finalize(std::move(t));
}

TermPtr inr(TermPtr v, TypePtr sum_type) {
  Term t = node(TermTag::Inr, {std::move(v)});
  t.type1 = std::move(sum_type);
  return finalize(std::move(t));
}

TermPtr case_of(TermPtr scrutinee, Sym x, TermPtr left, Sym y, TermPtr right) {
  Term t = node(TermTag::Case, {std::move(scrutinee), std::move(left), std::move(right)});
  t.x = x;
  t.y = y;
  return finalize(std::move(t));
}

TermPtr html_tag(const std::string& tag, TermPtr attrs, TermPtr children) {
  Term t = node(TermTag::HtmlTag, {std::move(attrs), std::move(children)});
  t.text = tag;
  return finalize(std::move(t));
}

TermPtr html_text(TermPtr s) { return finalize(node(TermTag::HtmlText, {std::move(s)})); }

TermPtr html_empty() {
  static const TermPtr e = finalize(node(TermTag::HtmlEmpty));
  return e;
}

TermPtr attr(const std::string& key, TermPtr v) {
  Term t = node(TermTag::Attr, {std::move(v)});
  t.text = key;
  return finalize(std::move(t));
}

TermPtr attr_empty() {
  static const TermPtr e = finalize(node(TermTag::AttrEmpty));
  return e;
}

TermPtr append(TermPtr a, TermPtr b) { return finalize(node(TermTag::Append, {std::move(a), std::move(b)})); }

TermPtr cmd_spawn(TermPtr m) { return finalize(node(TermTag::CmdSpawn, {std::move(m)})); }

TermPtr cmd_empty() {
  static const TermPtr e = finalize(node(TermTag::CmdEmpty));
  return e;
}

TermPtr transition(TermPtr model, TermPtr view, TermPtr update, TermPtr extract, TermPtr cmd) {
  return finalize(node(TermTag::Transition,
                       {std::move(model), std::move(view), std::move(update), std::move(extract), std::move(cmd)}));
}

TermPtr no_transition(TermPtr model, TermPtr cmd) {
  return finalize(node(TermTag::NoTransition, {std::move(model), std::move(cmd)}));
}

TermPtr raise() {
  static const TermPtr r = finalize(node(TermTag::Raise));
  return r;
}

TermPtr try_(TermPtr body, Sym x, TermPtr success, TermPtr failure) {
  Term t = node(TermTag::Try, {std::move(body), std::move(success), std::move(failure)});
  t.x = x;
  return finalize(std::move(t));
}

TermPtr sub(const std::string& handler, TermPtr f) {
  Term t = node(TermTag::Sub, {std::move(f)});
  t.text = handler;
  return finalize(std::move(t));
}

TermPtr sub_empty() {
  static const TermPtr e = finalize(node(TermTag::SubEmpty));
  return e;
}

TermPtr name(Name c) {
  Term t = node(TermTag::Name);
  t.name = c;
  return finalize(std::move(t));
}

TermPtr let(Sym x, TypePtr annotation, TermPtr m, TermPtr body) {
  return app(lam(Kind::L, x, std::move(annotation), nullptr, std::move(body)), std::move(m));
}

}  // namespace tm

bool is_let(const TermPtr& t) {
  return t->tag == TermTag::App && t->kids[0]->tag == TermTag::Lam && t->kids[0]->kind == Kind::L &&
         !t->kids[0]->type2;
}

bool occurs_free(Sym x, const TermPtr& t) {
  return std::binary_search(t->free_vars.begin(), t->free_vars.end(), x);
}

namespace {

Sym fresh_for(Sym base, const std::vector<const std::vector<Sym>*>& avoid) {
  const std::string& b = spelling(base);
  for (int i = 1;; ++i) {
    Sym cand = intern(b + "'" + std::to_string(i));
    bool clash = false;
    for (const auto* v : avoid)
      if (std::binary_search(v->begin(), v->end(), cand)) clash = true;
    if (!clash && cand != base) return cand;
  }
}

}  // namespace

TermPtr substitute(const TermPtr& body, Sym x, const TermPtr& value) {
  if (!occurs_free(x, body)) return body;
  if (body->tag == TermTag::Var) return value;
  Term copy = *body;
  bool changed = false;
  for (std::size_t i = 0; i < copy.kids.size(); ++i) {
    auto bs = binders_of(copy, i);
    if (std::find(bs.begin(), bs.end(), x) != bs.end()) continue;
    TermPtr kid = copy.kids[i];
    if (!occurs_free(x, kid)) continue;
    // Rename binders that would capture free variables of the value.
    for (Sym b : bs) {
      if (!occurs_free(b, value)) continue;
      std::vector<Sym> xs = {x};
      Sym fresh = fresh_for(b, {&value->free_vars, &kid->free_vars, &xs});
      kid = substitute(kid, b, tm::var(fresh));
      if (copy.x == b && (copy.tag != TermTag::Case || i == 1)) copy.x = fresh;
      else if (copy.y == b) copy.y = fresh;
    }
    copy.kids[i] = substitute(kid, x, value);
    changed = true;
  }
  if (!changed) return body;
  return finalize(std::move(copy));
}

void append_free_names(const TermPtr& t, std::vector<Name>& out) {
  if (!t->has_names) return;
  if (t->tag == TermTag::Name) {
    if (std::find(out.begin(), out.end(), t->name) == out.end()) out.push_back(t->name);
    return;
  }
  for (const auto& k : t->kids) append_free_names(k, out);
}

std::vector<Name> free_names(const TermPtr& t) {
  std::vector<Name> out;
  append_free_names(t, out);
  return out;
}

namespace {

bool types_same(const TypePtr& a, const TypePtr& b) {
  if (!a || !b) return !a && !b;
  return canonical(a) == canonical(b);
}

bool sugar_attr_equal(const SugarAttr& a, const SugarAttr& b) {
  return a.form == b.form && a.key == b.key && a.literal == b.literal && a.kid == b.kid;
}

bool sugar_equal(const std::vector<SugarHtml>& a, const std::vector<SugarHtml>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.form != y.form || x.name != y.name || x.text != y.text || x.kid != y.kid) return false;
    if (x.attrs.size() != y.attrs.size()) return false;
    for (std::size_t j = 0; j < x.attrs.size(); ++j)
      if (!sugar_attr_equal(x.attrs[j], y.attrs[j])) return false;
    if (!sugar_equal(x.children, y.children)) return false;
  }
  return true;
}

struct AlphaCmp {
  std::vector<Sym> left, right;

  // Position of the innermost binder for s, counted from the top; -1 if free.
  static long index(const std::vector<Sym>& stack, Sym s) {
    for (std::size_t i = stack.size(); i-- > 0;)
      if (stack[i] == s) return static_cast<long>(stack.size() - i);
    return -1;
  }

  bool eq(const TermPtr& a, const TermPtr& b) {
    if (a->tag != b->tag) return false;
    if (a->tag == TermTag::Var) {
      long ia = index(left, a->x), ib = index(right, b->x);
      if (ia != ib) return false;
      return ia != -1 || a->x == b->x;
    }
    if (a->kind != b->kind || a->text != b->text || a->number != b->number || a->name != b->name ||
        a->constant != b->constant || a->kids.size() != b->kids.size())
      return false;
    if (!types_same(a->type1, b->type1) || !types_same(a->type2, b->type2)) return false;
    if (a->tag == TermTag::HtmlSugar && !sugar_equal(*a->html, *b->html)) return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i) {
      auto ba = binders_of(*a, i);
      auto bb = binders_of(*b, i);
      for (Sym s : ba) left.push_back(s);
      for (Sym s : bb) right.push_back(s);
      bool ok = eq(a->kids[i], b->kids[i]);
      left.resize(left.size() - ba.size());
      right.resize(right.size() - bb.size());
      if (!ok) return false;
    }
    return true;
  }
};

}  // namespace

bool alpha_equal(const TermPtr& a, const TermPtr& b) {
  AlphaCmp cmp;
  return cmp.eq(a, b);
}

}  // namespace mvu

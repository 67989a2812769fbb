#include "oracles.hpp"

#include <fstream>
#include <map>
#include <memory>

#include "mvu/symbol.hpp"
#include "mvu/term.hpp"

namespace oracle {

using namespace mvu;

namespace {

struct Binding;
using Env = std::shared_ptr<const std::map<std::string, std::shared_ptr<const Binding>>>;
struct Binding {
  TypePtr mu;
  Env env;
};

Env extend(const Env& env, const std::string& var, const TypePtr& mu) {
  auto m = std::make_shared<std::map<std::string, std::shared_ptr<const Binding>>>(*env);
  (*m)[var] = std::make_shared<const Binding>(Binding{mu, env});
  return m;
}

std::string tree(const TypePtr& t, const Env& env, int depth, bool flip);

std::string payload(const TypePtr& t, const Env& env, int depth) {
  switch (t->tag) {
    case TypeTag::Unit: return "1";
    case TypeTag::Int: return "Int";
    case TypeTag::String: return "String";
    case TypeTag::Product: return "(" + payload(t->left, env, depth) + "*" + payload(t->right, env, depth) + ")";
    case TypeTag::Sum: return "(" + payload(t->left, env, depth) + "+" + payload(t->right, env, depth) + ")";
    case TypeTag::Fun:
      return "(" + payload(t->left, env, depth) + (t->kind == Kind::L ? "-o" : "->") + payload(t->right, env, depth) +
             ")";
    default: return "<" + tree(t, env, depth, false) + ">";
  }
}

std::string tree(const TypePtr& t, const Env& env, int depth, bool flip) {
  switch (t->tag) {
    case TypeTag::End: return "end";
    case TypeTag::Out:
    case TypeTag::In: {
      if (depth == 0) return "...";
      bool sends = (t->tag == TypeTag::Out) != flip;
      return std::string(sends ? "!" : "?") + payload(t->left, env, depth - 1) + "." +
             tree(t->right, env, depth - 1, flip);
    }
    case TypeTag::Mu: return tree(t->left, extend(env, t->var, t), depth, flip);
    case TypeTag::Var:
    case TypeTag::DualVar: {
      auto it = env->find(t->var);
      if (it == env->end()) return "free " + t->var;
      const Binding& b = *it->second;
      return tree(b.mu, b.env, depth, t->tag == TypeTag::DualVar ? !flip : flip);
    }
    default: return "not a session type";
  }
}

}  // namespace

std::string session_tree(const TypePtr& s, int depth, bool flip) {
  return tree(s, std::make_shared<const std::map<std::string, std::shared_ptr<const Binding>>>(), depth, flip);
}

bool derivable(const TypePtr& t, Kind k) {
  switch (t->tag) {
    case TypeTag::Unit:
    case TypeTag::String:
    case TypeTag::Int:
    case TypeTag::Html:
    case TypeTag::Attr:
    case TypeTag::Sub: return true;
    case TypeTag::Fun: return t->kind == Kind::U || k == Kind::L;
    case TypeTag::Product:
    case TypeTag::Sum:
    case TypeTag::Transition: return derivable(t->left, k) && derivable(t->right, k);
    case TypeTag::Cmd: return derivable(t->left, k);
    default: return k == Kind::L;  // session types
  }
}

Kind least_kind(const TypePtr& t) { return derivable(t, Kind::U) ? Kind::U : Kind::L; }

namespace {

using Unary = TypePtr (*)(TypePtr);
using Binary = TypePtr (*)(TypePtr, TypePtr);

TypePtr fun_u(TypePtr a, TypePtr b) { return ty::fun(std::move(a), std::move(b), Kind::U); }
TypePtr fun_l(TypePtr a, TypePtr b) { return ty::fun(std::move(a), std::move(b), Kind::L); }

std::vector<TypePtr> enumerate(int depth, const std::vector<TypePtr>& leaves, const std::vector<Unary>& unary,
                               const std::vector<Binary>& binary, bool sessions) {
  std::vector<TypePtr> out = leaves;
  if (depth <= 1) return out;
  std::vector<TypePtr> below = enumerate(depth - 1, leaves, unary, binary, sessions);
  for (Unary u : unary)
    for (const auto& a : below) out.push_back(u(a));
  for (Binary b : binary)
    for (const auto& x : below)
      for (const auto& y : below) out.push_back(b(x, y));
  if (sessions)
    for (const auto& a : below)
      for (const auto& s : below)
        if (is_session(s)) {
          out.push_back(ty::out(a, s));
          out.push_back(ty::in(a, s));
        }
  return out;
}

}  // namespace

std::vector<TypePtr> small_types(int depth) {
  return enumerate(depth, {ty::integer(), ty::end()}, {ty::cmd, ty::html}, {ty::product, fun_u, fun_l}, false);
}

std::vector<TypePtr> all_types(int depth) {
  return enumerate(depth, {ty::unit(), ty::string(), ty::integer(), ty::end()},
                   {ty::html, ty::attr, ty::cmd, ty::sub},
                   {ty::product, ty::sum, fun_u, fun_l, ty::transition}, true);
}

namespace {

struct SessionGen {
  std::mt19937_64& rng;
  int fresh = 0;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  TypePtr data(int depth, std::vector<std::string>& scope) {
    switch (depth <= 0 ? pick(3) : pick(5)) {
      case 0: return ty::integer();
      case 1: return ty::string();
      case 2: return ty::unit();
      case 3: return ty::product(data(depth - 1, scope), data(depth - 1, scope));
      default: return session(depth - 1, scope, true);
    }
  }

  // Variables may appear only once an action separates them from their
  // binder.
  TypePtr session(int depth, std::vector<std::string>& scope, bool guarded) {
    int choices = depth <= 0 ? 1 : 4;
    int c = pick(choices + (guarded && !scope.empty() ? 2 : 0));
    if (c >= choices) {
      const std::string& v = scope[static_cast<std::size_t>(pick(static_cast<int>(scope.size())))];
      return c == choices ? ty::var(v) : ty::dual_var(v);
    }
    switch (c) {
      case 0: return ty::end();
      case 1: return ty::out(data(depth - 1, scope), session(depth - 1, scope, true));
      case 2: return ty::in(data(depth - 1, scope), session(depth - 1, scope, true));
      default: {
        std::string v = "t" + std::to_string(fresh++);
        scope.push_back(v);
        TypePtr body = session(depth - 1, scope, false);
        scope.pop_back();
        return ty::mu(v, body);
      }
    }
  }
};

}  // namespace

TypePtr random_session(std::mt19937_64& rng, int depth) {
  SessionGen g{rng};
  std::vector<std::string> scope;
  return g.session(depth, scope, false);
}

namespace {

const char* const kTags[] = {"div", "p", "button"};

TermPtr random_attrs(std::mt19937_64& rng) {
  switch (rng() % 4) {
    case 0: return tm::attr_empty();
    case 1: return tm::attr("class", tm::str(rng() % 2 ? "a" : "b"));
    case 2: return tm::attr("onClick", tm::lam(Kind::U, intern("u"), ty::unit(), nullptr, tm::unit()));
    default: return tm::append(tm::attr("id", tm::str("x")), tm::attr_empty());
  }
}

std::vector<Event> random_queue(std::mt19937_64& rng) {
  std::vector<Event> q;
  for (int i = static_cast<int>(rng() % 3); i > 0; --i) q.push_back({"click", tm::unit()});
  return q;
}

}  // namespace

TermPtr random_html(std::mt19937_64& rng, int depth) {
  int c = static_cast<int>(rng() % (depth <= 0 ? 2 : 5));
  switch (c) {
    case 0: return tm::html_empty();
    case 1: return tm::html_text(tm::str(rng() % 2 ? "x" : "y"));
    case 2: return tm::append(random_html(rng, depth - 1), random_html(rng, depth - 1));
    default: return tm::html_tag(kTags[rng() % 3], random_attrs(rng), random_html(rng, depth - 1));
  }
}

PagePtr random_page(std::mt19937_64& rng, int depth, NodeId& next_id) {
  int c = static_cast<int>(rng() % (depth <= 0 ? 2 : 5));
  switch (c) {
    case 0: return page::empty();
    case 1: return page::text(tm::str(rng() % 2 ? "x" : "y"));
    case 2: {
      PagePtr a = random_page(rng, depth - 1, next_id);
      return page::append(a, random_page(rng, depth - 1, next_id));
    }
    default: {
      NodeId id = next_id++;
      TermPtr attrs = random_attrs(rng);
      PagePtr kids = random_page(rng, depth - 1, next_id);
      return page::tag(kTags[rng() % 3], attrs, kids, random_queue(rng), id);
    }
  }
}

bool page_shows(const PagePtr& d, const TermPtr& html) {
  switch (d->tag) {
    case PageTag::Empty: return html->tag == TermTag::HtmlEmpty;
    case PageTag::Text: return html->tag == TermTag::HtmlText && alpha_equal(d->text, html->kids[0]);
    case PageTag::Append:
      return html->tag == TermTag::Append && page_shows(d->left, html->kids[0]) && page_shows(d->right, html->kids[1]);
    case PageTag::Tag:
      return html->tag == TermTag::HtmlTag && html->text == d->name && alpha_equal(d->attrs, html->kids[0]) &&
             page_shows(d->children, html->kids[1]);
  }
  return false;
}

std::string expected_rule(const std::string& file) {
  std::ifstream in(file);
  std::string line;
  const std::string marker = "-- expect:";
  while (std::getline(in, line)) {
    auto at = line.find(marker);
    if (at == std::string::npos) continue;
    std::string rule = line.substr(at + marker.size());
    rule.erase(0, rule.find_first_not_of(' '));
    rule.erase(rule.find_last_not_of(" \r") + 1);
    return rule;
  }
  return "";
}

std::vector<std::string> without(const std::vector<std::string>& rules, const std::string& skip) {
  std::vector<std::string> out;
  for (const auto& r : rules)
    if (r != skip) out.push_back(r);
  return out;
}

}  // namespace oracle

#include "mvu/types.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace mvu {

namespace {

TypePtr make(TypeTag tag, TypePtr left = nullptr, TypePtr right = nullptr, Kind k = Kind::U,
             std::string var = {}) {
  auto t = std::make_shared<Type>();
  t->tag = tag;
  t->kind = k;
  t->var = std::move(var);
  t->left = std::move(left);
  t->right = std::move(right);
  return t;
}

TypePtr constant(TypeTag tag) {
  // Leaf types are shared.
  static const TypePtr leaves[] = {make(TypeTag::Unit), make(TypeTag::String), make(TypeTag::Int),
                                   make(TypeTag::End), make(TypeTag::Hole)};
  switch (tag) {
    case TypeTag::Unit: return leaves[0];
    case TypeTag::String: return leaves[1];
    case TypeTag::Int: return leaves[2];
    case TypeTag::End: return leaves[3];
    case TypeTag::Hole: return leaves[4];
    default: throw std::logic_error("not a leaf type");
  }
}

bool is_unary(TypeTag t) {
  return t == TypeTag::Html || t == TypeTag::Attr || t == TypeTag::Cmd || t == TypeTag::Sub ||
         t == TypeTag::Mu;
}

bool is_binary(TypeTag t) {
  return t == TypeTag::Fun || t == TypeTag::Product || t == TypeTag::Sum ||
         t == TypeTag::Transition || t == TypeTag::Out || t == TypeTag::In;
}

TypePtr rebuild(const TypePtr& t, TypePtr left, TypePtr right) {
  if (left == t->left && right == t->right) return t;
  return make(t->tag, std::move(left), std::move(right), t->kind, t->var);
}

}  // namespace

namespace ty {
TypePtr unit() { return constant(TypeTag::Unit); }
TypePtr string() { return constant(TypeTag::String); }
TypePtr integer() { return constant(TypeTag::Int); }
TypePtr fun(TypePtr p, TypePtr r, Kind k) { return make(TypeTag::Fun, std::move(p), std::move(r), k); }
TypePtr product(TypePtr a, TypePtr b) { return make(TypeTag::Product, std::move(a), std::move(b)); }
TypePtr sum(TypePtr a, TypePtr b) { return make(TypeTag::Sum, std::move(a), std::move(b)); }
TypePtr html(TypePtr m) { return make(TypeTag::Html, std::move(m)); }
TypePtr attr(TypePtr m) { return make(TypeTag::Attr, std::move(m)); }
TypePtr cmd(TypePtr m) { return make(TypeTag::Cmd, std::move(m)); }
TypePtr transition(TypePtr a, TypePtr b) { return make(TypeTag::Transition, std::move(a), std::move(b)); }
TypePtr sub(TypePtr m) { return make(TypeTag::Sub, std::move(m)); }
TypePtr out(TypePtr p, TypePtr s) { return make(TypeTag::Out, std::move(p), std::move(s)); }
TypePtr in(TypePtr p, TypePtr s) { return make(TypeTag::In, std::move(p), std::move(s)); }
TypePtr mu(const std::string& v, TypePtr body) {
  return make(TypeTag::Mu, std::move(body), nullptr, Kind::U, v);
}
TypePtr var(const std::string& n) { return make(TypeTag::Var, nullptr, nullptr, Kind::U, n); }
TypePtr dual_var(const std::string& n) { return make(TypeTag::DualVar, nullptr, nullptr, Kind::U, n); }
TypePtr end() { return constant(TypeTag::End); }
TypePtr hole() { return constant(TypeTag::Hole); }
}  // namespace ty

bool is_session(const TypePtr& t) {
  switch (t->tag) {
    case TypeTag::Out:
    case TypeTag::In:
    case TypeTag::Mu:
    case TypeTag::Var:
    case TypeTag::DualVar:
    case TypeTag::End: return true;
    default: return false;
  }
}

bool has_holes(const TypePtr& t) {
  if (!t) return false;
  if (t->tag == TypeTag::Hole) return true;
  return has_holes(t->left) || has_holes(t->right);
}

static void collect_free(const TypePtr& t, std::set<std::string>& bound, std::set<std::string>& out) {
  if (!t) return;
  switch (t->tag) {
    case TypeTag::Var:
    case TypeTag::DualVar:
      if (!bound.count(t->var)) out.insert(t->var);
      return;
    case TypeTag::Mu: {
      bool fresh = bound.insert(t->var).second;
      collect_free(t->left, bound, out);
      if (fresh) bound.erase(t->var);
      return;
    }
    default:
      collect_free(t->left, bound, out);
      collect_free(t->right, bound, out);
  }
}

std::set<std::string> free_type_vars(const TypePtr& t) {
  std::set<std::string> bound, out;
  collect_free(t, bound, out);
  return out;
}

bool is_closed(const TypePtr& t) { return free_type_vars(t).empty(); }

static bool guarded(const TypePtr& t, std::set<std::string>& unguarded) {
  switch (t->tag) {
    case TypeTag::Var:
    case TypeTag::DualVar: return !unguarded.count(t->var);
    case TypeTag::Mu: {
      unguarded.insert(t->var);
      bool ok = guarded(t->left, unguarded);
      unguarded.erase(t->var);
      return ok;
    }
    case TypeTag::Out:
    case TypeTag::In: {
      std::set<std::string> none;
      return is_contractive(t->left) && guarded(t->right, none);
    }
    default: {
      std::set<std::string> none;
      return (!t->left || guarded(t->left, none)) && (!t->right || guarded(t->right, none));
    }
  }
}

bool is_contractive(const TypePtr& t) {
  std::set<std::string> unguarded;
  return guarded(t, unguarded);
}

Kind kind_of(const TypePtr& t) {
  switch (t->tag) {
    case TypeTag::Unit:
    case TypeTag::String:
    case TypeTag::Int:
    case TypeTag::Html:
    case TypeTag::Attr:
    case TypeTag::Sub:
    case TypeTag::Hole: return Kind::U;
    case TypeTag::Fun: return t->kind;
    case TypeTag::Product:
    case TypeTag::Sum:
    case TypeTag::Transition: return join(kind_of(t->left), kind_of(t->right));
    case TypeTag::Cmd: return kind_of(t->left);
    default: return Kind::L;
  }
}

static std::string fresh_type_var(const std::string& base, const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string cand = base + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

TypePtr substitute_type_var(const TypePtr& body, const std::string& v, const TypePtr& rep) {
  if (!body) return body;
  switch (body->tag) {
    case TypeTag::Var: return body->var == v ? rep : body;
    case TypeTag::DualVar: return body->var == v ? dual(rep) : body;
    case TypeTag::Mu: {
      if (body->var == v) return body;
      auto fv = free_type_vars(rep);
      if (fv.count(body->var)) {
        std::set<std::string> avoid = fv;
        auto inner = free_type_vars(body->left);
        avoid.insert(inner.begin(), inner.end());
        avoid.insert(v);
        std::string renamed = fresh_type_var(body->var, avoid);
        TypePtr b = substitute_type_var(body->left, body->var, ty::var(renamed));
        return ty::mu(renamed, substitute_type_var(b, v, rep));
      }
      return rebuild(body, substitute_type_var(body->left, v, rep), nullptr);
    }
    case TypeTag::Unit:
    case TypeTag::String:
    case TypeTag::Int:
    case TypeTag::End:
    case TypeTag::Hole: return body;
    default:
      return rebuild(body, substitute_type_var(body->left, v, rep),
                     substitute_type_var(body->right, v, rep));
  }
}

TypePtr dual(const TypePtr& s) {
  switch (s->tag) {
    case TypeTag::Out: return ty::in(s->left, dual(s->right));
    case TypeTag::In: return ty::out(s->left, dual(s->right));
    case TypeTag::End: return s;
    case TypeTag::Hole: return s;
    case TypeTag::Var: return ty::dual_var(s->var);
    case TypeTag::DualVar: return ty::var(s->var);
    case TypeTag::Mu:
      return ty::mu(s->var, dual(substitute_type_var(s->left, s->var, ty::dual_var(s->var))));
    default: throw std::invalid_argument("dual of a non-session type: " + to_string(s));
  }
}

TypePtr unfold_once(const TypePtr& t) {
  if (t->tag != TypeTag::Mu) return t;
  return substitute_type_var(t->left, t->var, t);
}

TypePtr unfold(const TypePtr& t) {
  TypePtr cur = t;
  for (int i = 0; cur->tag == TypeTag::Mu; ++i) {
    if (i > 64) throw std::invalid_argument("non-contractive session type: " + to_string(t));
    cur = unfold_once(cur);
  }
  return cur;
}

namespace {

Variance flip(Variance v) {
  if (v == Variance::Sub) return Variance::Super;
  if (v == Variance::Super) return Variance::Sub;
  return v;
}

struct Matcher {
  std::unordered_set<std::string> visited;

  bool match(const TypePtr& a, const TypePtr& b, Variance v) {
    if (a == b) return true;
    if (a->tag == TypeTag::Hole || b->tag == TypeTag::Hole) return true;
    if (a->tag == TypeTag::Mu || b->tag == TypeTag::Mu) {
      std::string key = canonical(a) + "|" + canonical(b) + "|" + std::to_string(static_cast<int>(v));
      if (!visited.insert(key).second) return true;
      return match(unfold(a), unfold(b), v);
    }
    if (a->tag != b->tag) return false;
    switch (a->tag) {
      case TypeTag::Unit:
      case TypeTag::String:
      case TypeTag::Int:
      case TypeTag::End: return true;
      case TypeTag::Var:
      case TypeTag::DualVar: return a->var == b->var;
      case TypeTag::Fun: {
        bool kinds_ok = v == Variance::Exact ? a->kind == b->kind
                        : v == Variance::Sub ? subkind(a->kind, b->kind)
                                             : subkind(b->kind, a->kind);
        return kinds_ok && match(a->left, b->left, flip(v)) && match(a->right, b->right, v);
      }
      case TypeTag::Out:
      case TypeTag::In:
        return match(a->left, b->left, Variance::Exact) && match(a->right, b->right, Variance::Exact);
      default:
        if (is_unary(a->tag)) return match(a->left, b->left, v);
        return match(a->left, b->left, v) && match(a->right, b->right, v);
    }
  }
};

}  // namespace

bool types_match(const TypePtr& actual, const TypePtr& expected, Variance v) {
  Matcher m;
  return m.match(actual, expected, v);
}

bool type_equal(const TypePtr& a, const TypePtr& b) {
  return !has_holes(a) && !has_holes(b) && types_match(a, b, Variance::Exact);
}

bool session_equal(const TypePtr& a, const TypePtr& b) {
  return is_session(a) && is_session(b) && type_equal(a, b);
}

TypePtr merge(const TypePtr& pref, const TypePtr& other) {
  if (pref->tag == TypeTag::Hole) return other;
  if (other->tag == TypeTag::Hole || !has_holes(pref)) return pref;
  if (pref->tag != other->tag || pref->tag == TypeTag::Mu) return pref;
  if (is_binary(pref->tag)) return rebuild(pref, merge(pref->left, other->left), merge(pref->right, other->right));
  if (is_unary(pref->tag)) return rebuild(pref, merge(pref->left, other->left), nullptr);
  return pref;
}

TypePtr fit(const TypePtr& actual, const TypePtr& expected) {
  if (!types_match(actual, expected, Variance::Sub)) return nullptr;
  return merge(expected, actual);
}

TypePtr lub(const TypePtr& a, const TypePtr& b) {
  if (types_match(a, b, Variance::Sub)) return merge(b, a);
  if (types_match(b, a, Variance::Sub)) return merge(a, b);
  return nullptr;
}

namespace {

// Precedence: 0 = arrows and session prefixes, 1 = sums, 2 = products, 3 = atoms.
void print(const TypePtr& t, int prec, std::string& out, const std::map<std::string, int>* depth,
           int level) {
  auto paren = [&](int mine, auto body) {
    if (mine < prec) out += "(";
    body();
    if (mine < prec) out += ")";
  };
  auto varname = [&](const std::string& v) {
    if (depth) {
      auto it = depth->find(v);
      if (it != depth->end()) return "'" + std::to_string(level - it->second);
    }
    return v;
  };
  switch (t->tag) {
    case TypeTag::Unit: out += "Unit"; return;
    case TypeTag::String: out += "String"; return;
    case TypeTag::Int: out += "Int"; return;
    case TypeTag::End: out += "End"; return;
    case TypeTag::Hole: out += "_"; return;
    case TypeTag::Var: out += varname(t->var); return;
    case TypeTag::DualVar: out += "~" + varname(t->var); return;
    case TypeTag::Html:
    case TypeTag::Attr:
    case TypeTag::Cmd:
    case TypeTag::Sub: {
      out += t->tag == TypeTag::Html ? "Html(" : t->tag == TypeTag::Attr ? "Attr(" : t->tag == TypeTag::Cmd ? "Cmd(" : "Sub(";
      print(t->left, 0, out, depth, level);
      out += ")";
      return;
    }
    case TypeTag::Transition:
      out += "Transition(";
      print(t->left, 0, out, depth, level);
      out += ", ";
      print(t->right, 0, out, depth, level);
      out += ")";
      return;
    case TypeTag::Fun:
      paren(0, [&] {
        print(t->left, 1, out, depth, level);
        out += t->kind == Kind::U ? " -> " : " -o ";
        print(t->right, 0, out, depth, level);
      });
      return;
    case TypeTag::Sum:
      paren(1, [&] {
        print(t->left, 2, out, depth, level);
        out += " + ";
        print(t->right, 1, out, depth, level);
      });
      return;
    case TypeTag::Product:
      paren(2, [&] {
        print(t->left, 3, out, depth, level);
        out += " * ";
        print(t->right, 2, out, depth, level);
      });
      return;
    case TypeTag::Out:
    case TypeTag::In:
      paren(0, [&] {
        out += t->tag == TypeTag::Out ? "!" : "?";
        print(t->left, 3, out, depth, level);
        out += ".";
        print(t->right, 0, out, depth, level);
      });
      return;
    case TypeTag::Mu:
      paren(0, [&] {
        if (depth) {
          auto inner = *depth;
          inner[t->var] = level + 1;
          out += "mu.";
          print(t->left, 0, out, &inner, level + 1);
        } else {
          out += "mu " + t->var + ".";
          print(t->left, 0, out, depth, level);
        }
      });
      return;
  }
}

}  // namespace

std::string to_string(const TypePtr& t) {
  std::string out;
  print(t, 0, out, nullptr, 0);
  return out;
}

std::string canonical(const TypePtr& t) {
  std::string out;
  std::map<std::string, int> depth;
  print(t, 0, out, &depth, 0);
  return out;
}

}  // namespace mvu

#pragma once

#include <memory>
#include <set>
#include <string>

namespace mvu {

enum class Kind { U, L };

inline Kind join(Kind a, Kind b) { return (a == Kind::L || b == Kind::L) ? Kind::L : Kind::U; }
inline bool subkind(Kind a, Kind b) { return a == Kind::U || b == Kind::L; }
inline const char* to_string(Kind k) { return k == Kind::U ? "U" : "L"; }

enum class TypeTag {
  Unit,
  String,
  Int,
  Fun,
  Product,
  Sum,
  Html,
  Attr,
  Cmd,
  Transition,
  Sub,
  // session types
  Out,
  In,
  Mu,
  Var,
  DualVar,
  End,
  // unknown component of a partially synthesized type
  Hole,
};

struct Type;
using TypePtr = std::shared_ptr<const Type>;

// Fun(left=param, right=result), Product/Sum/Transition(left, right),
// Html/Attr/Cmd/Sub(left), Out/In(left=payload, right=continuation),
// Mu(var, left=body), Var/DualVar(var).
struct Type {
  TypeTag tag;
  Kind kind = Kind::U;
  std::string var;
  TypePtr left;
  TypePtr right;
};

namespace ty {
TypePtr unit();
TypePtr string();
TypePtr integer();
TypePtr fun(TypePtr param, TypePtr result, Kind k = Kind::U);
TypePtr product(TypePtr a, TypePtr b);
TypePtr sum(TypePtr a, TypePtr b);
TypePtr html(TypePtr msg);
TypePtr attr(TypePtr msg);
TypePtr cmd(TypePtr msg);
TypePtr transition(TypePtr model, TypePtr msg);
TypePtr sub(TypePtr msg);
TypePtr out(TypePtr payload, TypePtr cont);
TypePtr in(TypePtr payload, TypePtr cont);
TypePtr mu(const std::string& var, TypePtr body);
TypePtr var(const std::string& name);
TypePtr dual_var(const std::string& name);
TypePtr end();
TypePtr hole();
}  // namespace ty

bool is_session(const TypePtr& t);
bool has_holes(const TypePtr& t);
std::set<std::string> free_type_vars(const TypePtr& t);
bool is_closed(const TypePtr& t);
// Every μ body is guarded: the bound variable never appears before a prefix.
bool is_contractive(const TypePtr& t);

// Least kind: U for base types, Html, Attr, Sub; L for sessions; the
// annotation for functions; the join of components otherwise.
Kind kind_of(const TypePtr& t);

TypePtr dual(const TypePtr& s);
// Replaces free occurrences of var: Var by rep, DualVar by dual(rep).
TypePtr substitute_type_var(const TypePtr& body, const std::string& var, const TypePtr& rep);
// One μ unfolding.
TypePtr unfold_once(const TypePtr& t);
// Unfolds leading μ binders until the head is not a μ.
TypePtr unfold(const TypePtr& t);

enum class Variance { Exact, Sub, Super };

// Structural comparison identifying μ-types with their unfoldings. Holes
// match anything. Under Variance::Sub, a U function is accepted where an L
// function is expected.
bool types_match(const TypePtr& actual, const TypePtr& expected, Variance v = Variance::Exact);
bool type_equal(const TypePtr& a, const TypePtr& b);
bool session_equal(const TypePtr& a, const TypePtr& b);

// Fills the holes of pref with the corresponding parts of other.
TypePtr merge(const TypePtr& pref, const TypePtr& other);
// actual used where expected is wanted; null on mismatch.
TypePtr fit(const TypePtr& actual, const TypePtr& expected);
// Least upper bound of two branch types; null on mismatch.
TypePtr lub(const TypePtr& a, const TypePtr& b);

std::string to_string(const TypePtr& t);
// Printing with μ-bound variables replaced by binder depth.
std::string canonical(const TypePtr& t);

}  // namespace mvu

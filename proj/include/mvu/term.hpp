#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mvu/symbol.hpp"
#include "mvu/types.hpp"

namespace mvu {

using Name = std::uint64_t;

enum class Constant {
  Send,
  Receive,
  New,
  Cancel,
  Close,
  // pure primitives on base types
  IntAdd,
  IntSub,
  IntMul,
  IntLt,
  IntEq,
  IntToString,
  ReverseString,
  Concat,
};

const char* constant_name(Constant k);
std::optional<Constant> constant_from_name(const std::string& name);
bool is_session_constant(Constant k);
// Type of a pure primitive. Booleans are Unit + Unit with False on the left.
TypePtr primitive_type(Constant k);
TypePtr bool_type();

struct Span {
  int line = 0;
  int col = 0;
};

enum class TermTag {
  Var,
  Lam,
  Rec,
  App,
  Const,
  Unit,
  Str,
  Int,
  Pair,
  LetPair,
  Inl,
  Inr,
  Case,
  HtmlTag,
  HtmlText,
  HtmlEmpty,
  Attr,
  AttrEmpty,
  Append,
  CmdSpawn,
  CmdEmpty,
  Transition,
  NoTransition,
  Raise,
  Try,
  Sub,
  SubEmpty,
  Name,
  HtmlSugar,
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct SugarAttr {
  enum class Form { Literal, Term, Antiquote };
  Form form = Form::Literal;
  std::string key;
  std::string literal;
  std::size_t kid = 0;  // index into the owning term's kids
  Span span;
};

struct SugarHtml {
  enum class Form { Tag, Text, Antiquote };
  Form form = Form::Tag;
  std::string name;
  std::vector<SugarAttr> attrs;
  std::vector<SugarHtml> children;
  std::string text;
  std::size_t kid = 0;
  Span span;
};

// Children by tag:
//   Lam [body] binds x; Rec [body] binds x (function) and y (parameter);
//   App [fn, arg]; Const [arg]; Pair [a, b]; LetPair [scrutinee, body] binds
//   x, y; Inl/Inr [v]; Case [scrutinee, left, right], left binds x, right
//   binds y; HtmlTag [attrs, children]; HtmlText [v]; Attr [v]; Append [a, b];
//   CmdSpawn [m]; Transition [model, view, update, extract, cmd];
//   NoTransition [model, cmd]; Try [body, success, failure], success binds x;
//   Sub [handler fn]; HtmlSugar [antiquoted terms].
struct Term {
  TermTag tag = TermTag::Unit;
  Kind kind = Kind::U;
  Sym x = 0;
  Sym y = 0;
  std::string text;  // string literal, tag name, attribute key, handler name
  std::int64_t number = 0;
  Name name = 0;
  Constant constant = Constant::Send;
  TypePtr type1;  // Lam/Rec parameter, Inl/Inr sum type, new's session type
  TypePtr type2;  // Lam/Rec result
  std::vector<TermPtr> kids;
  std::shared_ptr<const std::vector<SugarHtml>> html;
  Span span;

  // computed by finalize()
  bool value = false;
  bool has_names = false;
  std::vector<Sym> free_vars;  // sorted, unique
};

TermPtr finalize(Term t);

namespace tm {
TermPtr var(Sym x, Span s = {});
TermPtr var(const std::string& x);
TermPtr lam(Kind k, Sym x, TypePtr param, TypePtr result, TermPtr body);
TermPtr rec(Sym f, Sym x, TypePtr param, TypePtr result, TermPtr body);
TermPtr app(TermPtr f, TermPtr a);
TermPtr constant(Constant k, TermPtr arg, TypePtr annotation = nullptr);
TermPtr unit();
TermPtr str(const std::string& s);
TermPtr integer(std::int64_t n);
TermPtr pair(TermPtr a, TermPtr b);
TermPtr let_pair(Sym x, Sym y, TermPtr scrutinee, TermPtr body);
TermPtr inl(TermPtr v, TypePtr sum_type = nullptr);
TermPtr inr(TermPtr v, TypePtr sum_type = nullptr);
TermPtr case_of(TermPtr scrutinee, Sym x, TermPtr left, Sym y, TermPtr right);
TermPtr html_tag(const std::string& tag, TermPtr attrs, TermPtr children);
TermPtr html_text(TermPtr s);
TermPtr html_empty();
TermPtr attr(const std::string& key, TermPtr v);
TermPtr attr_empty();
TermPtr append(TermPtr a, TermPtr b);
TermPtr cmd_spawn(TermPtr m);
TermPtr cmd_empty();
TermPtr transition(TermPtr model, TermPtr view, TermPtr update, TermPtr extract, TermPtr cmd);
TermPtr no_transition(TermPtr model, TermPtr cmd);
TermPtr raise();
TermPtr try_(TermPtr body, Sym x, TermPtr success, TermPtr failure);
TermPtr sub(const std::string& handler, TermPtr f);
TermPtr sub_empty();
TermPtr name(Name c);
// let x = m in body, encoded as (linfun x -> body) m
TermPtr let(Sym x, TypePtr annotation, TermPtr m, TermPtr body);
}  // namespace tm

inline bool is_value(const TermPtr& t) { return t->value; }
bool occurs_free(Sym x, const TermPtr& t);
// Binders scoping over kids[i] (zero, one or two symbols).
std::vector<Sym> binders_of(const Term& t, std::size_t i);

TermPtr substitute(const TermPtr& body, Sym x, const TermPtr& value);
// Free runtime names, left to right, depth first, without duplicates.
std::vector<Name> free_names(const TermPtr& t);
void append_free_names(const TermPtr& t, std::vector<Name>& out);
bool alpha_equal(const TermPtr& a, const TermPtr& b);
// A let-redex: (linfun x -> body) m with no result annotation.
bool is_let(const TermPtr& t);

}  // namespace mvu

#include "mvu/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mvu/events.hpp"

namespace mvu {

namespace {

enum class Tok { End, LIdent, UIdent, Int, Str, NameLit, Punct };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t number = 0;
  std::size_t start = 0;
  std::size_t end = 0;
};

const char* const kKeywords[] = {
    "let",      "in",        "fun",     "linfun",   "rec",       "case",         "if",
    "then",     "else",      "try",     "as",       "otherwise", "type",         "main",
    "html",     "mu",        "inl",     "inr",      "htmlTag",   "htmlText",     "htmlEmpty",
    "attr",     "attrEmpty", "cmdSpawn", "cmdEmpty", "transition", "noTransition", "raise",
    "sub",      "subEmpty",
};

bool is_keyword(const std::string& s) {
  for (const char* k : kKeywords)
    if (s == k) return true;
  return constant_from_name(s).has_value();
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

struct Variant {
  std::string name;
  std::vector<std::string> ctors;  // sorted
  std::vector<TypePtr> payloads;
  std::vector<bool> nullary;
  std::vector<TypePtr> levels;  // levels[k] = payloads[k] + levels[k+1]; last is the payload
};

struct CtorRef {
  std::size_t variant;
  std::size_t index;
};

struct Record {
  std::string name;
  std::vector<std::string> labels;  // sorted
};

// Pattern tree for let, lambda parameters and case branches.
struct Pattern {
  enum class Form { Var, Wild, Unit, Tuple, Ctor } form = Form::Wild;
  Sym var = 0;
  std::vector<Pattern> items;  // Tuple items, or the single Ctor payload
  std::string ctor;
  Span span;
};

class Parser {
 public:
  Parser(const std::string& src) : src_(src) {
    line_starts_.push_back(0);
    for (std::size_t i = 0; i < src.size(); ++i)
      if (src[i] == '\n') line_starts_.push_back(i + 1);
    // Words already in the source, so generated names never capture them.
    std::string word;
    for (char ch : src + " ") {
      if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '\'') {
        word += ch;
      } else if (!word.empty()) {
        words_.insert(word);
        word.clear();
      }
    }
    add_prelude();
    advance();
  }

  Program program(const std::string& path) {
    Program p;
    p.path = path;
    while (tok_.kind != Tok::End) {
      Span s = span_of(tok_);
      if (is_kw("type")) {
        advance();
        if (tok_.kind != Tok::UIdent) fail("expected a type name");
        std::string name = tok_.text;
        advance();
        expect("=");
        if (aliases_.count(name)) fail("type " + name + " is already defined", s);
        TypePtr t = type_definition(name);
        aliases_[name] = t;
        p.aliases.push_back({name, t});
      } else if (is_kw("fun")) {
        advance();
        Definition d = fun_definition(s);
        check_unique(p, d.name, s);
        p.definitions.push_back(std::move(d));
      } else if (is_kw("let")) {
        advance();
        if (tok_.kind != Tok::LIdent) fail("expected a definition name");
        Definition d;
        d.name = tok_.text;
        d.sym = intern(d.name);
        d.span = s;
        advance();
        TypePtr ann;
        if (accept(":")) ann = type();
        expect("=");
        d.term = expr();
        d.annotation = ann;
        check_unique(p, d.name, s);
        p.definitions.push_back(std::move(d));
      } else if (is_kw("main")) {
        advance();
        expect("=");
        if (p.main) fail("main is defined twice", s);
        p.main = expr();
      } else {
        fail("expected a declaration (type, fun, let or main)");
      }
    }
    return p;
  }

  TermPtr single_term() {
    TermPtr t = expr();
    if (tok_.kind != Tok::End) fail("unexpected '" + tok_.text + "'");
    return t;
  }

  TypePtr single_type() {
    TypePtr t = type();
    if (tok_.kind != Tok::End) fail("unexpected '" + tok_.text + "'");
    return t;
  }

 private:
  const std::string& src_;
  std::vector<std::size_t> line_starts_;
  std::size_t pos_ = 0;
  Token tok_;
  int fresh_ = 0;
  std::set<std::string> words_;
  std::map<std::string, TypePtr> aliases_;
  std::vector<Variant> variants_;
  std::map<std::string, CtorRef> ctors_;
  std::vector<Record> records_;
  std::vector<std::string> type_vars_;

  // ---------------------------------------------------------------- lexing

  Span span_at(std::size_t off) const {
    auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), off);
    std::size_t line = static_cast<std::size_t>(it - line_starts_.begin());
    return {static_cast<int>(line), static_cast<int>(off - line_starts_[line - 1] + 1)};
  }
  Span span_of(const Token& t) const { return span_at(t.start); }

  [[noreturn]] void fail(const std::string& msg) const { fail(msg, span_of(tok_)); }
  [[noreturn]] void fail(const std::string& msg, Span s) const { throw ParseError(msg, s.line, s.col); }

  void skip_space() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (pos_ + 1 < src_.size() && src_[pos_] == '-' && src_[pos_ + 1] == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        continue;
      }
      return;
    }
  }

  std::string string_literal() {
    // pos_ at the opening quote
    Span s = span_at(pos_);
    ++pos_;
    std::string out;
    for (;;) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') fail("unterminated string", s);
      char c = src_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ >= src_.size()) fail("unterminated string", s);
        char e = src_[pos_++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          default: fail(std::string("unknown escape \\") + e, span_at(pos_ - 2));
        }
        continue;
      }
      out += c;
    }
  }

  Token lex() {
    skip_space();
    Token t;
    t.start = pos_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      t.end = pos_;
      return t;
    }
    char c = src_[pos_];
    auto digit = [&](std::size_t i) { return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i])); };
    if (digit(pos_) || (c == '-' && digit(pos_ + 1))) {
      std::size_t b = pos_;
      if (c == '-') ++pos_;
      while (digit(pos_)) ++pos_;
      t.kind = Tok::Int;
      t.text = src_.substr(b, pos_ - b);
      try {
        t.number = std::stoll(t.text);
      } catch (const std::exception&) {
        fail("integer literal out of range", span_at(b));
      }
    } else if (c == '#' && digit(pos_ + 1)) {
      std::size_t b = ++pos_;
      while (digit(pos_)) ++pos_;
      t.kind = Tok::NameLit;
      t.text = src_.substr(b, pos_ - b);
      t.number = std::stoll(t.text);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t b = pos_;
      while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
      t.text = src_.substr(b, pos_ - b);
      t.kind = std::isupper(static_cast<unsigned char>(c)) ? Tok::UIdent : Tok::LIdent;
    } else if (c == '"') {
      t.kind = Tok::Str;
      t.text = string_literal();
    } else {
      static const char* const puncts[] = {"->", "-o", "++", "[|", "|]", "(", ")", "[", "]", "{", "}", ",",
                                           ":",  ";",  "=",  "+",  "*",  "!", "?", ".", "~", "|", "<", ">", "/"};
      t.kind = Tok::Punct;
      for (const char* p : puncts) {
        std::size_t n = std::char_traits<char>::length(p);
        if (src_.compare(pos_, n, p) != 0) continue;
        if (std::string(p) == "-o" && pos_ + 2 < src_.size() && ident_char(src_[pos_ + 2])) continue;
        t.text = p;
        pos_ += n;
        break;
      }
      if (t.text.empty()) fail(std::string("unexpected character '") + c + "'", span_at(pos_));
    }
    t.end = pos_;
    return t;
  }

  void advance() { tok_ = lex(); }

  // Token after the current one, without consuming anything.
  Token peek() {
    std::size_t saved = pos_;
    Token t = lex();
    pos_ = saved;
    return t;
  }

  bool is(const char* p) const { return tok_.kind == Tok::Punct && tok_.text == p; }
  bool is_kw(const char* k) const { return tok_.kind == Tok::LIdent && tok_.text == k; }
  bool accept(const char* p) {
    if (!is(p)) return false;
    advance();
    return true;
  }
  void expect(const char* p) {
    if (!accept(p)) fail(std::string("expected '") + p + "'" + found());
  }
  void expect_kw(const char* k) {
    if (!is_kw(k)) fail(std::string("expected '") + k + "'" + found());
    advance();
  }
  std::string found() const {
    if (tok_.kind == Tok::End) return " but reached end of input";
    return " but found '" + tok_.text + "'";
  }

  Sym binder_name() {
    if (tok_.kind != Tok::LIdent || is_keyword(tok_.text)) fail("expected a variable name" + found());
    Sym s = intern(tok_.text);
    advance();
    return s;
  }

  Sym fresh() {
    std::string name;
    do name = "_" + std::to_string(++fresh_);
    while (words_.count(name));
    return intern(name);
  }

  static TermPtr with_span(const TermPtr& t, Span s) {
    if (t->span.line) return t;
    Term c = *t;
    c.span = s;
    return std::make_shared<const Term>(std::move(c));
  }

  // ---------------------------------------------------------------- types

  void add_prelude() {
    Variant v;
    v.name = "Bool";
    v.ctors = {"False", "True"};
    v.payloads = {ty::unit(), ty::unit()};
    v.nullary = {true, true};
    register_variant(std::move(v));
    aliases_["Bool"] = variants_.back().levels[0];
  }

  void register_variant(Variant v) {
    std::size_t n = v.ctors.size();
    v.levels.assign(n, nullptr);
    v.levels[n - 1] = v.payloads[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) v.levels[k] = ty::sum(v.payloads[k], v.levels[k + 1]);
    for (std::size_t k = 0; k < n; ++k) ctors_[v.ctors[k]] = {variants_.size(), k};
    variants_.push_back(std::move(v));
  }

  TypePtr type_definition(const std::string& name) {
    Span s = span_of(tok_);
    if (is("[|")) {
      advance();
      accept("|");
      std::vector<std::tuple<std::string, TypePtr, bool>> entries;
      for (;;) {
        if (tok_.kind != Tok::UIdent) fail("expected a constructor name");
        std::string c = tok_.text;
        Span cs = span_of(tok_);
        advance();
        if (ctors_.count(c)) fail("constructor " + c + " is already defined", cs);
        for (auto& e : entries)
          if (std::get<0>(e) == c) fail("constructor " + c + " is repeated", cs);
        if (accept(":")) {
          entries.emplace_back(c, type(), false);
        } else if (is("(")) {
          advance();
          TypePtr p = type();
          expect(")");
          entries.emplace_back(c, p, false);
        } else {
          entries.emplace_back(c, ty::unit(), true);
        }
        if (accept("|]")) break;
        expect("|");
      }
      std::sort(entries.begin(), entries.end(),
                [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
      Variant v;
      v.name = name;
      for (auto& [c, p, nullary] : entries) {
        v.ctors.push_back(c);
        v.payloads.push_back(p);
        v.nullary.push_back(nullary);
      }
      register_variant(std::move(v));
      return variants_.back().levels[0];
    }
    if (is("(") && peek_is_record_type()) {
      advance();
      std::vector<std::pair<std::string, TypePtr>> fields;
      for (;;) {
        std::string label = tok_.text;
        Span ls = span_of(tok_);
        advance();
        expect(":");
        for (auto& f : fields)
          if (f.first == label) fail("field " + label + " is repeated", ls);
        fields.emplace_back(label, type());
        if (accept(")")) break;
        expect(",");
        if (tok_.kind != Tok::LIdent) fail("expected a field name");
      }
      std::sort(fields.begin(), fields.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      Record r;
      r.name = name;
      for (auto& f : fields) r.labels.push_back(f.first);
      records_.push_back(std::move(r));
      TypePtr t = fields.back().second;
      for (std::size_t i = fields.size() - 1; i-- > 0;) t = ty::product(fields[i].second, t);
      return t;
    }
    TypePtr t = type();
    (void)s;
    return t;
  }

  bool peek_is_record_type() {
    // current token is "("
    std::size_t saved = pos_;
    Token a = lex();
    Token b = lex();
    pos_ = saved;
    return a.kind == Tok::LIdent && b.kind == Tok::Punct && b.text == ":";
  }

  TypePtr type() {
    if (is_kw("mu")) {
      advance();
      if (tok_.kind != Tok::LIdent) fail("expected a type variable");
      std::string v = tok_.text;
      advance();
      expect(".");
      type_vars_.push_back(v);
      TypePtr body = type();
      type_vars_.pop_back();
      return ty::mu(v, body);
    }
    if (is("!") || is("?")) {
      bool out = is("!");
      advance();
      TypePtr payload = type_atom();
      expect(".");
      TypePtr cont = type();
      return out ? ty::out(payload, cont) : ty::in(payload, cont);
    }
    TypePtr left = sum_type();
    if (accept("->")) return ty::fun(left, type(), Kind::U);
    if (accept("-o")) return ty::fun(left, type(), Kind::L);
    return left;
  }

  // A type with no top-level arrow or session prefix.
  TypePtr sum_type() {
    TypePtr left = product_type();
    if (accept("+")) return ty::sum(left, sum_type());
    return left;
  }

  TypePtr product_type() {
    TypePtr left = type_atom();
    if (accept("*")) return ty::product(left, product_type());
    return left;
  }

  TypePtr type_atom() {
    Span s = span_of(tok_);
    if (tok_.kind == Tok::UIdent) {
      std::string n = tok_.text;
      advance();
      if (n == "Unit") return ty::unit();
      if (n == "Int") return ty::integer();
      if (n == "String") return ty::string();
      if (n == "End") return ty::end();
      if (n == "Html" || n == "Attr" || n == "Cmd" || n == "Sub") {
        expect("(");
        TypePtr a = type();
        expect(")");
        if (n == "Html") return ty::html(a);
        if (n == "Attr") return ty::attr(a);
        if (n == "Cmd") return ty::cmd(a);
        return ty::sub(a);
      }
      if (n == "Transition") {
        expect("(");
        TypePtr a = type();
        expect(",");
        TypePtr b = type();
        expect(")");
        return ty::transition(a, b);
      }
      auto it = aliases_.find(n);
      if (it == aliases_.end()) fail("unknown type " + n + " (types must be declared before use; use mu for recursion)", s);
      return it->second;
    }
    if (tok_.kind == Tok::LIdent) {
      std::string v = tok_.text;
      if (v == "_") {
        advance();
        return ty::hole();
      }
      if (std::find(type_vars_.begin(), type_vars_.end(), v) == type_vars_.end())
        fail("unbound type variable " + v, s);
      advance();
      return ty::var(v);
    }
    if (accept("~")) {
      TypePtr t = type_atom();
      if (!is_session(t) && t->tag != TypeTag::Hole) fail("~ applies to session types only", s);
      return dual(t);
    }
    if (accept("(")) {
      if (accept(")")) return ty::unit();
      if (peek_is_record_after_paren()) fail("record types must be named with a type declaration", s);
      std::vector<TypePtr> items{type()};
      while (accept(",")) items.push_back(type());
      expect(")");
      TypePtr t = items.back();
      for (std::size_t i = items.size() - 1; i-- > 0;) t = ty::product(items[i], t);
      return t;
    }
    if (is("[|")) fail("variant types must be named with a type declaration");
    fail("expected a type" + found());
  }

  bool peek_is_record_after_paren() {
    return tok_.kind == Tok::LIdent && peek().kind == Tok::Punct && peek().text == ":";
  }

  // ---------------------------------------------------------- constructors

  const CtorRef& ctor_ref(const std::string& c, Span s) const {
    auto it = ctors_.find(c);
    if (it == ctors_.end()) fail("unknown constructor " + c, s);
    return it->second;
  }

  TermPtr inject(const CtorRef& r, TermPtr payload) const {
    const Variant& v = variants_[r.variant];
    std::size_t n = v.ctors.size();
    TermPtr t = std::move(payload);
    if (r.index < n - 1) t = tm::inl(t, v.levels[r.index]);
    for (std::size_t j = std::min(r.index, n - 1); j-- > 0;) t = tm::inr(t, v.levels[j]);
    return t;
  }

  // ---------------------------------------------------------------- patterns

  Pattern pattern() {
    Pattern p;
    p.span = span_of(tok_);
    if (tok_.kind == Tok::UIdent) {
      p.form = Pattern::Form::Ctor;
      p.ctor = tok_.text;
      advance();
      if (starts_pattern_atom()) p.items.push_back(pattern());
      return p;
    }
    if (tok_.kind == Tok::LIdent) {
      if (tok_.text == "_") {
        advance();
        p.form = Pattern::Form::Wild;
        return p;
      }
      p.form = Pattern::Form::Var;
      p.var = binder_name();
      return p;
    }
    if (accept("(")) {
      if (accept(")")) {
        p.form = Pattern::Form::Unit;
        return p;
      }
      p.items.push_back(pattern());
      while (accept(",")) p.items.push_back(pattern());
      expect(")");
      if (p.items.size() == 1) return p.items[0];
      p.form = Pattern::Form::Tuple;
      return p;
    }
    fail("expected a pattern" + found());
  }

  bool starts_pattern_atom() const {
    return (tok_.kind == Tok::LIdent && !is_keyword(tok_.text)) || tok_.kind == Tok::UIdent || is("(");
  }

  // let <p> [: ann] = scrutinee in body
  TermPtr bind(const Pattern& p, TermPtr scrutinee, TypePtr ann, TermPtr body) {
    switch (p.form) {
      case Pattern::Form::Var: return tm::let(p.var, ann, scrutinee, body);
      case Pattern::Form::Wild: return tm::let(fresh(), ann, scrutinee, body);
      case Pattern::Form::Unit: return tm::let(fresh(), ann ? ann : ty::unit(), scrutinee, body);
      case Pattern::Form::Ctor: {
        const CtorRef& r = ctor_ref(p.ctor, p.span);
        if (variants_[r.variant].ctors.size() != 1)
          fail("constructor pattern " + p.ctor + " can fail here; use case", p.span);
        Pattern inner;
        inner.form = Pattern::Form::Wild;
        return bind(p.items.empty() ? inner : p.items[0], scrutinee, ann, body);
      }
      case Pattern::Form::Tuple: {
        if (ann) {
          Sym tmp = fresh();
          Pattern plain = p;
          return tm::let(tmp, ann, scrutinee, bind(plain, tm::var(tmp), nullptr, body));
        }
        return bind_tuple(p.items, 0, scrutinee, body);
      }
    }
    return body;
  }

  TermPtr bind_tuple(const std::vector<Pattern>& items, std::size_t i, TermPtr scrutinee, TermPtr body) {
    if (i + 1 == items.size()) return bind(items[i], scrutinee, nullptr, body);
    Sym a = items[i].form == Pattern::Form::Var ? items[i].var : fresh();
    bool last_var = i + 2 == items.size() && items[i + 1].form == Pattern::Form::Var;
    Sym rest = last_var ? items[i + 1].var : fresh();
    TermPtr inner = last_var ? body : bind_tuple(items, i + 1, tm::var(rest), body);
    if (items[i].form != Pattern::Form::Var) inner = bind(items[i], tm::var(a), nullptr, inner);
    return tm::let_pair(a, rest, scrutinee, inner);
  }

  // Binds a pattern to a fresh parameter; returns the parameter symbol and the new body.
  std::pair<Sym, TermPtr> parameter(const Pattern& p, TermPtr body) {
    if (p.form == Pattern::Form::Var) return {p.var, body};
    if (p.form == Pattern::Form::Wild || p.form == Pattern::Form::Unit) return {fresh(), body};
    Sym x = fresh();
    return {x, bind(p, tm::var(x), nullptr, body)};
  }

  // ---------------------------------------------------------------- terms

  TermPtr expr() {
    Span s = span_of(tok_);
    if (is_kw("fun") || is_kw("linfun")) {
      Kind k = is_kw("fun") ? Kind::U : Kind::L;
      advance();
      Pattern p;
      TypePtr param, result;
      if (accept("(")) {
        p.span = s;
        if (accept(")")) {
          p.form = Pattern::Form::Unit;
          param = ty::unit();
        } else {
          std::vector<Pattern> items{pattern()};
          while (accept(",")) items.push_back(pattern());
          if (items.size() == 1 && accept(":")) param = type();
          expect(")");
          if (items.size() == 1) {
            p = items[0];
          } else {
            p.form = Pattern::Form::Tuple;
            p.items = std::move(items);
          }
        }
        if (accept(":")) result = sum_type();
      } else {
        p = pattern();
      }
      expect("->");
      TermPtr body = expr();
      if (p.form == Pattern::Form::Unit && !param) param = ty::unit();
      auto [x, b] = parameter(p, body);
      return with_span(tm::lam(k, x, param, result, b), s);
    }
    if (is_kw("rec")) {
      advance();
      Sym f = binder_name();
      expect("(");
      Pattern p = pattern();
      expect(":");
      TypePtr param = type();
      expect(")");
      expect(":");
      TypePtr result = sum_type();
      expect("->");
      TermPtr body = expr();
      auto [x, b] = parameter(p, body);
      return with_span(tm::rec(f, x, param, result, b), s);
    }
    if (is_kw("let")) {
      advance();
      Pattern p = pattern();
      TypePtr ann;
      if (accept(":")) ann = type();
      expect("=");
      TermPtr m = expr();
      expect_kw("in");
      TermPtr body = expr();
      return with_span(bind(p, m, ann, body), s);
    }
    if (is_kw("try")) {
      advance();
      TermPtr l = expr();
      expect_kw("as");
      Sym x = binder_name();
      expect_kw("in");
      TermPtr m = expr();
      expect_kw("otherwise");
      TermPtr n = expr();
      return with_span(tm::try_(l, x, m, n), s);
    }
    if (is_kw("if")) {
      advance();
      TermPtr c = expr();
      expect_kw("then");
      TermPtr a = expr();
      expect_kw("else");
      TermPtr b = expr();
      return with_span(tm::case_of(c, fresh(), b, fresh(), a), s);
    }
    TermPtr left = append_expr();
    if (accept(";")) {
      TermPtr rest = expr();
      return with_span(tm::let(fresh(), ty::unit(), left, rest), s);
    }
    return left;
  }

  TermPtr append_expr() {
    Span s = span_of(tok_);
    TermPtr left = app_expr();
    if (accept("++")) return with_span(tm::append(left, append_expr()), s);
    return left;
  }

  bool starts_atom() const {
    switch (tok_.kind) {
      case Tok::Int:
      case Tok::Str:
      case Tok::NameLit:
      case Tok::UIdent: return true;
      case Tok::LIdent: {
        const std::string& t = tok_.text;
        if (!is_keyword(t)) return true;
        return t == "case" || t == "html" || t == "htmlEmpty" || t == "attrEmpty" || t == "cmdEmpty" ||
               t == "subEmpty" || t == "raise" || t == "transition" || t == "noTransition";
      }
      case Tok::Punct: return is("(");
      default: return false;
    }
  }

  TermPtr app_expr() {
    Span s = span_of(tok_);
    TermPtr head = head_expr();
    while (starts_atom()) head = with_span(tm::app(head, atom()), s);
    return head;
  }

  TypePtr optional_annotation() {
    if (!is("[")) return nullptr;
    advance();
    TypePtr t = type();
    expect("]");
    return t;
  }

  std::string string_arg(const char* what) {
    if (tok_.kind != Tok::Str) fail(std::string("expected a string literal for the ") + what + found());
    std::string v = tok_.text;
    advance();
    return v;
  }

  TermPtr head_expr() {
    Span s = span_of(tok_);
    if (tok_.kind == Tok::LIdent) {
      const std::string w = tok_.text;
      if (auto k = constant_from_name(w)) {
        advance();
        TypePtr ann = optional_annotation();
        return with_span(tm::constant(*k, atom(), ann), s);
      }
      if (w == "inl" || w == "inr") {
        advance();
        TypePtr ann = optional_annotation();
        TermPtr v = atom();
        return with_span(w == "inl" ? tm::inl(v, ann) : tm::inr(v, ann), s);
      }
      if (w == "htmlTag") {
        advance();
        std::string tag = string_arg("tag name");
        TermPtr a = atom();
        TermPtr c = atom();
        return with_span(tm::html_tag(tag, a, c), s);
      }
      if (w == "htmlText") {
        advance();
        return with_span(tm::html_text(atom()), s);
      }
      if (w == "attr") {
        advance();
        std::string key = string_arg("attribute key");
        if (key.size() > 2 && key.compare(0, 2, "on") == 0 && std::isupper(static_cast<unsigned char>(key[2])) &&
            !is_handler_name(key))
          fail("unknown handler " + key, s);
        return with_span(tm::attr(key, atom()), s);
      }
      if (w == "sub") {
        advance();
        std::string h = string_arg("handler name");
        const EventSignature* sig = find_handler(h);
        if (!sig || !sig->environment) fail("unknown subscription handler " + h, s);
        return with_span(tm::sub(h, atom()), s);
      }
      if (w == "cmdSpawn") {
        advance();
        return with_span(tm::cmd_spawn(atom()), s);
      }
    }
    if (tok_.kind == Tok::UIdent) {
      std::string c = tok_.text;
      advance();
      const CtorRef& r = ctor_ref(c, s);
      const Variant& v = variants_[r.variant];
      TermPtr payload;
      if (v.nullary[r.index]) {
        payload = tm::unit();
      } else {
        if (!starts_atom()) fail("constructor " + c + " expects an argument", s);
        payload = atom();
      }
      return with_span(inject(r, payload), s);
    }
    return atom();
  }

  TermPtr atom() {
    TermPtr t = atom_base();
    while (is(".") && peek().kind == Tok::LIdent) {
      Span s = span_of(tok_);
      advance();
      std::string label = tok_.text;
      advance();
      t = with_span(project(t, label, s), s);
    }
    return t;
  }

  TermPtr project(const TermPtr& t, const std::string& label, Span s) {
    std::size_t index = 0, arity = 0;
    bool found_any = false;
    for (const Record& r : records_) {
      auto it = std::find(r.labels.begin(), r.labels.end(), label);
      if (it == r.labels.end()) continue;
      std::size_t i = static_cast<std::size_t>(it - r.labels.begin());
      if (found_any && (i != index || r.labels.size() != arity))
        fail("field " + label + " is ambiguous between record types", s);
      found_any = true;
      index = i;
      arity = r.labels.size();
    }
    if (!found_any) fail("unknown field " + label, s);
    if (arity == 1) return t;
    // walk right-nested pairs
    TermPtr cur = t;
    std::vector<std::pair<Sym, Sym>> binds;
    std::vector<TermPtr> scrutinees;
    for (std::size_t i = 0; i <= index && i + 1 < arity; ++i) {
      Sym a = fresh(), rest = fresh();
      binds.emplace_back(a, rest);
      scrutinees.push_back(cur);
      cur = tm::var(rest);
    }
    TermPtr result = index + 1 < arity ? tm::var(binds.back().first) : cur;
    for (std::size_t i = binds.size(); i-- > 0;)
      result = tm::let_pair(binds[i].first, binds[i].second, scrutinees[i], result);
    return result;
  }

  TermPtr atom_base() {
    Span s = span_of(tok_);
    switch (tok_.kind) {
      case Tok::Int: {
        auto n = tok_.number;
        advance();
        return with_span(tm::integer(n), s);
      }
      case Tok::Str: {
        std::string v = tok_.text;
        advance();
        return with_span(tm::str(v), s);
      }
      case Tok::NameLit: {
        auto n = static_cast<Name>(tok_.number);
        advance();
        return with_span(tm::name(n), s);
      }
      case Tok::UIdent: {
        std::string c = tok_.text;
        const CtorRef& r = ctor_ref(c, s);
        if (!variants_[r.variant].nullary[r.index]) return head_expr();
        advance();
        return with_span(inject(r, tm::unit()), s);
      }
      default: break;
    }
    if (tok_.kind == Tok::LIdent) {
      const std::string w = tok_.text;
      if (w == "htmlEmpty") return advance(), with_span(tm::html_empty(), s);
      if (w == "attrEmpty") return advance(), with_span(tm::attr_empty(), s);
      if (w == "cmdEmpty") return advance(), with_span(tm::cmd_empty(), s);
      if (w == "subEmpty") return advance(), with_span(tm::sub_empty(), s);
      if (w == "raise") return advance(), with_span(tm::raise(), s);
      if (w == "transition" || w == "noTransition") {
        advance();
        expect("(");
        std::vector<TermPtr> args{expr()};
        while (accept(",")) args.push_back(expr());
        expect(")");
        if (w == "transition") {
          if (args.size() != 5) fail("transition takes five components", s);
          return with_span(tm::transition(args[0], args[1], args[2], args[3], args[4]), s);
        }
        if (args.size() != 2) fail("noTransition takes two components", s);
        return with_span(tm::no_transition(args[0], args[1]), s);
      }
      if (w == "case") return case_expr();
      if (w == "html") return html_expr();
      if (is_keyword(w)) fail("unexpected keyword " + w);
      Sym x = intern(w);
      advance();
      return tm::var(x, s);
    }
    if (accept("(")) {
      if (accept(")")) return with_span(tm::unit(), s);
      if (tok_.kind == Tok::LIdent && peek().kind == Tok::Punct && peek().text == "=") return record_value(s);
      std::vector<TermPtr> items{expr()};
      while (accept(",")) items.push_back(expr());
      expect(")");
      TermPtr t = items.back();
      for (std::size_t i = items.size() - 1; i-- > 0;) t = tm::pair(items[i], t);
      return with_span(t, s);
    }
    fail("expected an expression" + found());
  }

  TermPtr record_value(Span s) {
    std::vector<std::pair<std::string, TermPtr>> fields;
    for (;;) {
      if (tok_.kind != Tok::LIdent) fail("expected a field name");
      std::string label = tok_.text;
      Span ls = span_of(tok_);
      advance();
      expect("=");
      for (auto& f : fields)
        if (f.first == label) fail("field " + label + " is repeated", ls);
      fields.emplace_back(label, expr());
      if (accept(")")) break;
      expect(",");
    }
    std::sort(fields.begin(), fields.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::string> labels;
    for (auto& f : fields) labels.push_back(f.first);
    bool known = false;
    for (const Record& r : records_) known = known || r.labels == labels;
    if (!known) fail("no record type has exactly these fields", s);
    TermPtr t = fields.back().second;
    for (std::size_t i = fields.size() - 1; i-- > 0;) t = tm::pair(fields[i].second, t);
    return with_span(t, s);
  }

  TermPtr case_expr() {
    Span s = span_of(tok_);
    advance();
    TermPtr scrutinee = expr();
    expect("{");
    accept("|");
    struct Branch {
      Pattern pat;
      TermPtr body;
      bool left = false;
    };
    std::vector<Branch> branches;
    bool sum_form = false;
    for (;;) {
      Branch b;
      Span bs = span_of(tok_);
      if (is_kw("inl") || is_kw("inr")) {
        sum_form = true;
        b.left = is_kw("inl");
        advance();
        b.pat = pattern();
      } else if (tok_.kind == Tok::UIdent) {
        b.pat = pattern();
      } else {
        fail("expected a case branch" + found());
      }
      b.pat.span = bs;
      expect("->");
      b.body = expr();
      branches.push_back(std::move(b));
      if (accept("}")) break;
      expect("|");
    }
    if (sum_form) {
      if (branches.size() != 2 || branches[0].pat.form == Pattern::Form::Ctor ||
          branches[1].pat.form == Pattern::Form::Ctor || branches[0].left == branches[1].left)
        fail("a sum case needs exactly one inl and one inr branch", s);
      if (!branches[0].left) std::swap(branches[0], branches[1]);
      auto [x, l] = parameter(branches[0].pat, branches[0].body);
      auto [y, r] = parameter(branches[1].pat, branches[1].body);
      return with_span(tm::case_of(scrutinee, x, l, y, r), s);
    }
    // constructor branches
    const CtorRef& first = ctor_ref(branches[0].pat.ctor, branches[0].pat.span);
    const Variant& v = variants_[first.variant];
    std::vector<const Branch*> by_index(v.ctors.size(), nullptr);
    for (const Branch& b : branches) {
      const CtorRef& r = ctor_ref(b.pat.ctor, b.pat.span);
      if (r.variant != first.variant)
        fail("constructor " + b.pat.ctor + " does not belong to " + v.name, b.pat.span);
      if (by_index[r.index]) fail("constructor " + b.pat.ctor + " is matched twice", b.pat.span);
      by_index[r.index] = &b;
    }
    for (std::size_t i = 0; i < by_index.size(); ++i)
      if (!by_index[i]) fail("missing branch for constructor " + v.ctors[i], s);
    auto payload_param = [&](const Branch& b) {
      Pattern inner;
      inner.form = Pattern::Form::Wild;
      return parameter(b.pat.items.empty() ? inner : b.pat.items[0], b.body);
    };
    std::size_t n = v.ctors.size();
    if (n == 1) {
      auto [x, body] = payload_param(*by_index[0]);
      return with_span(tm::let(x, nullptr, scrutinee, body), s);
    }
    // innermost level first; rest_sym binds the remainder of the sum
    auto [lx, lbody] = payload_param(*by_index[n - 1]);
    Sym rest_sym = lx;
    TermPtr rest_body = lbody;
    for (std::size_t k = n - 1; k-- > 0;) {
      auto [x, body] = payload_param(*by_index[k]);
      Sym level = k == 0 ? 0 : fresh();
      TermPtr scrut = k == 0 ? scrutinee : tm::var(level);
      rest_body = tm::case_of(scrut, x, body, rest_sym, rest_body);
      rest_sym = level;
    }
    return with_span(rest_body, s);
  }

  // ---------------------------------------------------------------- html

  std::vector<TermPtr> html_kids_;

  TermPtr html_expr() {
    Span s = span_of(tok_);
    // switch to raw scanning at the first '<'
    pos_ = tok_.end;
    std::vector<TermPtr> saved = std::move(html_kids_);
    html_kids_.clear();
    std::vector<SugarHtml> elements;
    for (;;) {
      std::size_t before = pos_;
      skip_space();
      if (pos_ < src_.size() && src_[pos_] == '<' && !(pos_ + 1 < src_.size() && src_[pos_ + 1] == '/')) {
        elements.push_back(element());
        continue;
      }
      pos_ = before;
      break;
    }
    if (elements.empty()) fail("html expects at least one element", s);
    Term t;
    t.tag = TermTag::HtmlSugar;
    t.kids = std::move(html_kids_);
    t.html = std::make_shared<const std::vector<SugarHtml>>(std::move(elements));
    t.span = s;
    html_kids_ = std::move(saved);
    advance();
    return finalize(std::move(t));
  }

  [[noreturn]] void raw_fail(const std::string& msg) const { fail(msg, span_at(pos_)); }

  std::string raw_name() {
    std::size_t b = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '-' ||
                                  src_[pos_] == '_'))
      ++pos_;
    if (b == pos_) raw_fail("expected a name");
    return src_.substr(b, pos_ - b);
  }

  void raw_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  // Parses "{ expr }" starting at '{' and returns the kid index.
  std::size_t antiquote() {
    ++pos_;
    advance();
    TermPtr m = expr();
    if (!is("}")) fail("expected '}'" + found());
    pos_ = tok_.end;
    html_kids_.push_back(m);
    return html_kids_.size() - 1;
  }

  SugarHtml element() {
    SugarHtml h;
    h.form = SugarHtml::Form::Tag;
    h.span = span_at(pos_);
    ++pos_;  // '<'
    h.name = raw_name();
    for (;;) {
      raw_space();
      if (pos_ >= src_.size()) raw_fail("unterminated tag <" + h.name + ">");
      char c = src_[pos_];
      if (c == '/' || c == '>') break;
      SugarAttr a;
      a.span = span_at(pos_);
      if (c == '{') {
        a.form = SugarAttr::Form::Antiquote;
        a.kid = antiquote();
        h.attrs.push_back(a);
        continue;
      }
      a.key = raw_name();
      bool handler_like = a.key.size() > 2 && a.key.compare(0, 2, "on") == 0 &&
                          std::isupper(static_cast<unsigned char>(a.key[2]));
      if (handler_like && !is_handler_name(a.key)) fail("unknown handler " + a.key, a.span);
      raw_space();
      if (pos_ >= src_.size() || src_[pos_] != '=') raw_fail("expected '=' after attribute " + a.key);
      ++pos_;
      raw_space();
      if (pos_ < src_.size() && src_[pos_] == '"') {
        if (handler_like) fail("handler " + a.key + " needs a function in braces", a.span);
        a.form = SugarAttr::Form::Literal;
        a.literal = string_literal();
      } else if (pos_ < src_.size() && src_[pos_] == '{') {
        a.form = SugarAttr::Form::Term;
        a.kid = antiquote();
      } else {
        raw_fail("expected a quoted value or braces for attribute " + a.key);
      }
      h.attrs.push_back(a);
    }
    if (src_[pos_] == '/') {
      ++pos_;
      if (pos_ >= src_.size() || src_[pos_] != '>') raw_fail("expected '>'");
      ++pos_;
      return h;
    }
    ++pos_;  // '>'
    std::string text;
    Span text_span = span_at(pos_);
    auto flush = [&] {
      std::string collapsed;
      bool space = false;
      for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
          space = true;
          continue;
        }
        if (space && !collapsed.empty()) collapsed += ' ';
        space = false;
        collapsed += c;
      }
      text.clear();
      if (collapsed.empty()) return;
      SugarHtml t;
      t.form = SugarHtml::Form::Text;
      t.text = collapsed;
      t.span = text_span;
      h.children.push_back(t);
    };
    for (;;) {
      if (pos_ >= src_.size()) raw_fail("unterminated element <" + h.name + ">");
      char c = src_[pos_];
      if (c == '\\') {
        if (pos_ + 1 >= src_.size()) raw_fail("dangling escape");
        char e = src_[pos_ + 1];
        switch (e) {
          case '\\': case '<': case '{': case '}': text += e; break;
          case 'n': text += '\n'; break;
          case '"': text += '"'; break;
          default: raw_fail(std::string("unknown escape \\") + e);
        }
        pos_ += 2;
        continue;
      }
      if (c == '<' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        flush();
        pos_ += 2;
        std::string close = raw_name();
        if (close != h.name) raw_fail("closing </" + close + "> does not match <" + h.name + ">");
        raw_space();
        if (pos_ >= src_.size() || src_[pos_] != '>') raw_fail("expected '>'");
        ++pos_;
        return h;
      }
      if (c == '<') {
        flush();
        h.children.push_back(element());
        text_span = span_at(pos_);
        continue;
      }
      if (c == '{') {
        flush();
        SugarHtml q;
        q.form = SugarHtml::Form::Antiquote;
        q.span = span_at(pos_);
        q.kid = antiquote();
        h.children.push_back(q);
        text_span = span_at(pos_);
        continue;
      }
      if (c == '}') raw_fail("unexpected '}' in element text (write \\})");
      if (text.empty()) text_span = span_at(pos_);
      text += c;
      ++pos_;
    }
  }

  // -------------------------------------------------------------- declarations

  void check_unique(const Program& p, const std::string& name, Span s) const {
    for (const auto& d : p.definitions)
      if (d.name == name) fail(name + " is already defined", s);
  }

  Definition fun_definition(Span s) {
    Definition d;
    d.span = s;
    if (tok_.kind != Tok::LIdent || is_keyword(tok_.text)) fail("expected a function name");
    d.name = tok_.text;
    d.sym = intern(d.name);
    advance();
    expect("(");
    TypePtr param;
    Pattern p;
    if (accept(")")) {
      p.form = Pattern::Form::Unit;
      param = ty::unit();
    } else {
      p = pattern();
      expect(":");
      param = type();
      expect(")");
    }
    TypePtr result;
    if (accept(":")) result = type();
    expect("=");
    TermPtr body = expr();
    auto [x, b] = parameter(p, body);
    if (occurs_free(d.sym, b)) {
      if (!result) fail("recursive function " + d.name + " needs a result type annotation", s);
      d.term = with_span(tm::rec(d.sym, x, param, result, b), s);
    } else {
      d.term = with_span(tm::lam(Kind::U, x, param, result, b), s);
    }
    return d;
  }
};

}  // namespace

Program parse_program(const std::string& source, const std::string& path) {
  Parser p(source);
  return p.program(path);
}

Program load_program(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str(), file);
}

TermPtr parse_term(const std::string& source) {
  Parser p(source);
  return p.single_term();
}

TypePtr parse_type(const std::string& source) {
  Parser p(source);
  return p.single_type();
}

}  // namespace mvu

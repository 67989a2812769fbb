#include "mvu/printer.hpp"

namespace mvu {

std::string escape_string(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

std::string escape_text(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '<': out += "\\<"; break;
      case '{': out += "\\{"; break;
      case '}': out += "\\}"; break;
      default: out += c;
    }
  }
  return out;
}

class Printer {
 public:
  std::string out;

  // 0: binding forms, 1: append, 2: application, 3: atoms
  void term(const TermPtr& t, int prec) {
    switch (t->tag) {
      case TermTag::Var: out += spelling(t->x); return;
      case TermTag::Unit: out += "()"; return;
      case TermTag::Str: out += "\"" + escape_string(t->text) + "\""; return;
      case TermTag::Int: out += std::to_string(t->number); return;
      case TermTag::Name: out += "#" + std::to_string(t->name); return;
      case TermTag::HtmlEmpty: out += "htmlEmpty"; return;
      case TermTag::AttrEmpty: out += "attrEmpty"; return;
      case TermTag::CmdEmpty: out += "cmdEmpty"; return;
      case TermTag::SubEmpty: out += "subEmpty"; return;
      case TermTag::Raise: out += "raise"; return;
      case TermTag::Pair:
        out += "(";
        term(t->kids[0], 0);
        out += ", ";
        term(t->kids[1], 0);
        out += ")";
        return;
      case TermTag::Transition:
      case TermTag::NoTransition:
        out += t->tag == TermTag::Transition ? "transition(" : "noTransition(";
        for (std::size_t i = 0; i < t->kids.size(); ++i) {
          if (i) out += ", ";
          term(t->kids[i], 0);
        }
        out += ")";
        return;
      case TermTag::Case:
        out += "case ";
        term(t->kids[0], 0);
        out += " { inl " + spelling(t->x) + " -> ";
        term(t->kids[1], 0);
        out += " | inr " + spelling(t->y) + " -> ";
        term(t->kids[2], 0);
        out += " }";
        return;
      case TermTag::HtmlSugar:
        out += "html";
        for (const auto& h : *t->html) {
          out += " ";
          sugar(t, h);
        }
        return;
      default: break;
    }
    open(prec, t);
  }

 private:
  void parens(bool need, const auto& body) {
    if (need) out += "(";
    body();
    if (need) out += ")";
  }

  // Result annotations are followed by "->", so arrows there need parentheses.
  static std::string result_type(const TypePtr& ty) {
    switch (ty->tag) {
      case TypeTag::Fun:
      case TypeTag::Out:
      case TypeTag::In:
      case TypeTag::Mu: return "(" + to_string(ty) + ")";
      default: return to_string(ty);
    }
  }

  void annotation(const TypePtr& ty) {
    if (ty) out += "[" + to_string(ty) + "]";
  }

  void open(int prec, const TermPtr& t) {
    switch (t->tag) {
      case TermTag::Lam:
        if (!t->type1 && !t->type2) {
          parens(prec > 0, [&] {
            out += t->kind == Kind::L ? "linfun " : "fun ";
            out += spelling(t->x) + " -> ";
            term(t->kids[0], 0);
          });
          return;
        }
        parens(prec > 0, [&] {
          out += t->kind == Kind::L ? "linfun (" : "fun (";
          out += spelling(t->x);
          if (t->type1) out += " : " + to_string(t->type1);
          out += ")";
          if (t->type2) out += " : " + result_type(t->type2);
          out += " -> ";
          term(t->kids[0], 0);
        });
        return;
      case TermTag::Rec:
        parens(prec > 0, [&] {
          out += "rec " + spelling(t->x) + "(" + spelling(t->y) + " : " + to_string(t->type1) +
                 ") : " + result_type(t->type2) + " -> ";
          term(t->kids[0], 0);
        });
        return;
      case TermTag::LetPair:
        parens(prec > 0, [&] {
          out += "let (" + spelling(t->x) + ", " + spelling(t->y) + ") = ";
          term(t->kids[0], 0);
          out += " in ";
          term(t->kids[1], 0);
        });
        return;
      case TermTag::Try:
        parens(prec > 0, [&] {
          out += "try ";
          term(t->kids[0], 0);
          out += " as " + spelling(t->x) + " in ";
          term(t->kids[1], 0);
          out += " otherwise ";
          term(t->kids[2], 0);
        });
        return;
      case TermTag::App:
        if (is_let(t)) {
          const auto& lam = t->kids[0];
          parens(prec > 0, [&] {
            out += "let " + spelling(lam->x);
            if (lam->type1) out += " : " + to_string(lam->type1);
            out += " = ";
            term(t->kids[1], 0);
            out += " in ";
            term(lam->kids[0], 0);
          });
          return;
        }
        parens(prec > 2, [&] {
          term(t->kids[0], 2);
          out += " ";
          term(t->kids[1], 3);
        });
        return;
      case TermTag::Append:
        parens(prec > 1, [&] {
          term(t->kids[0], 2);
          out += " ++ ";
          term(t->kids[1], 1);
        });
        return;
      default: break;
    }
    // keyword applications
    parens(prec > 2, [&] {
      switch (t->tag) {
        case TermTag::Const:
          out += constant_name(t->constant);
          annotation(t->type1);
          break;
        case TermTag::Inl:
          out += "inl";
          annotation(t->type1);
          break;
        case TermTag::Inr:
          out += "inr";
          annotation(t->type1);
          break;
        case TermTag::HtmlTag: out += "htmlTag \"" + escape_string(t->text) + "\""; break;
        case TermTag::HtmlText: out += "htmlText"; break;
        case TermTag::Attr: out += "attr \"" + escape_string(t->text) + "\""; break;
        case TermTag::CmdSpawn: out += "cmdSpawn"; break;
        case TermTag::Sub: out += "sub \"" + escape_string(t->text) + "\""; break;
        default: out += "<?>"; break;
      }
      for (const auto& k : t->kids) {
        out += " ";
        term(k, 3);
      }
    });
  }

  void sugar(const TermPtr& owner, const SugarHtml& h) {
    switch (h.form) {
      case SugarHtml::Form::Text: out += escape_text(h.text); return;
      case SugarHtml::Form::Antiquote:
        out += "{";
        term(owner->kids[h.kid], 0);
        out += "}";
        return;
      case SugarHtml::Form::Tag:
        out += "<" + h.name;
        for (const auto& a : h.attrs) {
          out += " ";
          switch (a.form) {
            case SugarAttr::Form::Literal: out += a.key + "=\"" + escape_string(a.literal) + "\""; break;
            case SugarAttr::Form::Term:
              out += a.key + "={";
              term(owner->kids[a.kid], 0);
              out += "}";
              break;
            case SugarAttr::Form::Antiquote:
              out += "{";
              term(owner->kids[a.kid], 0);
              out += "}";
              break;
          }
        }
        out += ">";
        for (std::size_t i = 0; i < h.children.size(); ++i) {
          if (i) out += " ";
          sugar(owner, h.children[i]);
        }
        out += "</" + h.name + ">";
        return;
    }
  }
};

}  // namespace

std::string print_term(const TermPtr& t) {
  Printer p;
  p.term(t, 0);
  return p.out;
}

}  // namespace mvu

#include "mvu/desugar.hpp"

namespace mvu {

namespace {

TermPtr fold(std::vector<TermPtr> items, TermPtr empty) {
  if (items.empty()) return empty;
  TermPtr t = items.back();
  for (std::size_t i = items.size() - 1; i-- > 0;) t = tm::append(items[i], t);
  return t;
}

}  // namespace

TermPtr desugar_attr(const SugarAttr& a, const std::vector<TermPtr>& kids) {
  switch (a.form) {
    case SugarAttr::Form::Literal: return tm::attr(a.key, tm::str(a.literal));
    case SugarAttr::Form::Term: return tm::attr(a.key, kids[a.kid]);
    case SugarAttr::Form::Antiquote: return kids[a.kid];
  }
  return tm::attr_empty();
}

TermPtr desugar_html(const SugarHtml& h, const std::vector<TermPtr>& kids) {
  switch (h.form) {
    case SugarHtml::Form::Text: return tm::html_text(tm::str(h.text));
    case SugarHtml::Form::Antiquote: return kids[h.kid];
    case SugarHtml::Form::Tag: {
      std::vector<TermPtr> attrs, children;
      for (const auto& a : h.attrs) attrs.push_back(desugar_attr(a, kids));
      for (const auto& c : h.children) children.push_back(desugar_html(c, kids));
      return tm::html_tag(h.name, fold(std::move(attrs), tm::attr_empty()),
                          fold(std::move(children), tm::html_empty()));
    }
  }
  return tm::html_empty();
}

TermPtr desugar(const TermPtr& t) {
  if (t->tag == TermTag::HtmlSugar) {
    std::vector<TermPtr> kids;
    for (const auto& k : t->kids) kids.push_back(desugar(k));
    std::vector<TermPtr> items;
    for (const auto& h : *t->html) items.push_back(desugar_html(h, kids));
    return fold(std::move(items), tm::html_empty());
  }
  bool changed = false;
  std::vector<TermPtr> kids;
  kids.reserve(t->kids.size());
  for (const auto& k : t->kids) {
    kids.push_back(desugar(k));
    changed = changed || kids.back() != k;
  }
  if (!changed) return t;
  Term c = *t;
  c.kids = std::move(kids);
  return finalize(std::move(c));
}

}  // namespace mvu

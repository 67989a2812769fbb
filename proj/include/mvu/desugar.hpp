#pragma once

#include "mvu/term.hpp"

namespace mvu {

// Replaces every HTML quasi-quote with core constructors. Sibling lists fold
// to the right with ++; empty lists become htmlEmpty or attrEmpty.
TermPtr desugar(const TermPtr& t);

// Core form of a single quasi-quoted element or attribute. kids are the
// already desugared antiquotes of the owning quote.
TermPtr desugar_html(const SugarHtml& h, const std::vector<TermPtr>& kids);
TermPtr desugar_attr(const SugarAttr& a, const std::vector<TermPtr>& kids);

}  // namespace mvu

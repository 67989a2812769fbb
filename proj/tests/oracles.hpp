#pragma once

// Reference implementations used to judge the library. They are written
// from the definitions directly and share no code with src/.

#include <random>
#include <string>
#include <vector>

#include "mvu/page.hpp"
#include "mvu/types.hpp"

namespace oracle {

// The infinite tree a closed session type denotes, cut at `depth` actions.
// Recursion variables are resolved by environment lookup rather than
// substitution, and ~t is read as "the peer's view of t". With flip the
// tree of the peer's view is produced.
std::string session_tree(const mvu::TypePtr& s, int depth, bool flip = false);

// Least kind by derivation search over the kinding rules with subsumption.
mvu::Kind least_kind(const mvu::TypePtr& t);
bool derivable(const mvu::TypePtr& t, mvu::Kind k);

// Every type up to a given AST depth over a small alphabet: Int, End as
// leaves, Cmd and Html as unary constructors, product and both function
// kinds as binary ones.
std::vector<mvu::TypePtr> small_types(int depth);
// The full constructor set, shallower.
std::vector<mvu::TypePtr> all_types(int depth);

// A closed, contractive session type with about `depth` nested actions.
mvu::TypePtr random_session(std::mt19937_64& rng, int depth);

// Random HTML values and pages over the same tag names, so diffs both match
// and replace nodes. Pages get fresh ids from next_id and random queues.
mvu::TermPtr random_html(std::mt19937_64& rng, int depth);
mvu::PagePtr random_page(std::mt19937_64& rng, int depth, mvu::NodeId& next_id);

// Structural comparison of an HTML value with a page, ignoring ids and queues.
bool page_shows(const mvu::PagePtr& d, const mvu::TermPtr& html);

// `-- expect: RULE` header of an ill-typed corpus file.
std::string expected_rule(const std::string& file);

// Rules with every occurrence of `skip` removed.
std::vector<std::string> without(const std::vector<std::string>& rules, const std::string& skip);

}  // namespace oracle

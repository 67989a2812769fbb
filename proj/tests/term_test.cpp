#include <gtest/gtest.h>

#include "mvu/parser.hpp"
#include "mvu/printer.hpp"
#include "mvu/symbol.hpp"
#include "mvu/term.hpp"

using namespace mvu;

namespace {

TermPtr P(const std::string& s) { return parse_term(s); }

TEST(Values, AreComputedStructurally) {
  EXPECT_TRUE(P("fun (x : Int) -> x")->value);
  EXPECT_TRUE(P("(1, \"a\")")->value);
  EXPECT_FALSE(P("(fun (x : Int) -> x) 1")->value);
  EXPECT_TRUE(P("htmlTag \"p\" attrEmpty htmlEmpty")->value);
  EXPECT_TRUE(P("cmdSpawn ((fun (x : Int) -> x) 1)")->value);
}

TEST(Substitution, AvoidsCapture) {
  // [y/x](fun y -> x) must not bind the substituted y.
  TermPtr body = P("fun (y : Int) -> x");
  TermPtr out = substitute(body, intern("x"), tm::var("y"));
  ASSERT_EQ(out->tag, TermTag::Lam);
  EXPECT_NE(out->x, intern("y"));
  EXPECT_TRUE(occurs_free(intern("y"), out));
}

TEST(Substitution, StopsAtShadowingBinders) {
  TermPtr t = P("(x, fun (x : Int) -> x)");
  TermPtr out = substitute(t, intern("x"), tm::integer(3));
  EXPECT_TRUE(alpha_equal(out, P("(3, fun (x : Int) -> x)")));
}

TEST(AlphaEquality, IgnoresBinderNames) {
  EXPECT_TRUE(alpha_equal(P("fun (a : Int) -> a"), P("fun (b : Int) -> b")));
  EXPECT_FALSE(alpha_equal(P("fun (a : Int) -> 1"), P("fun (a : Int) -> 2")));
}

TEST(Names, AreCollectedInOrder) {
  TermPtr t = tm::pair(tm::name(4), tm::pair(tm::name(2), tm::name(4)));
  EXPECT_EQ(free_names(t), (std::vector<Name>{4, 2}));
  EXPECT_TRUE(t->has_names);
  EXPECT_FALSE(P("(1, 2)")->has_names);
}

TEST(Constants, SessionOperationsAreMarked) {
  for (Constant k : {Constant::Send, Constant::Receive, Constant::New, Constant::Cancel, Constant::Close})
    EXPECT_TRUE(is_session_constant(k));
  EXPECT_FALSE(is_session_constant(Constant::IntAdd));
  EXPECT_EQ(constant_from_name("reverseString"), Constant::ReverseString);
}

}  // namespace

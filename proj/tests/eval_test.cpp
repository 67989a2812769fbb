#include <gtest/gtest.h>

#include "mvu/eval.hpp"
#include "mvu/parser.hpp"
#include "mvu/printer.hpp"

using namespace mvu;

namespace {

TermPtr run(const std::string& src) { return evaluate(parse_term(src)); }

TEST(Evaluate, BetaAndPairs) {
  EXPECT_TRUE(alpha_equal(run("(fun (x : Int) -> intAdd (x, 1)) 2"), tm::integer(3)));
  EXPECT_TRUE(alpha_equal(run("let (a, b) = (1, \"s\") in b"), tm::str("s")));
}

TEST(Evaluate, CaseChoosesTheBranch) {
  EXPECT_TRUE(alpha_equal(run("case inr[Int + String] \"r\" { inl n -> \"l\" | inr s -> s }"), tm::str("r")));
}

TEST(Evaluate, RecursionComputesFibonacci) {
  TermPtr fib = parse_term(
      "rec fib(n : Int) : Int -> case intLt (n, 2) { inl f -> intAdd (fib (intSub (n, 1)), fib (intSub (n, 2))) "
      "| inr t -> n }");
  EXPECT_TRUE(alpha_equal(evaluate(tm::app(fib, tm::integer(6))), tm::integer(8)));
}

TEST(Evaluate, Primitives) {
  EXPECT_TRUE(alpha_equal(run("reverseString \"abc\""), tm::str("cba")));
  EXPECT_TRUE(alpha_equal(run("concat (\"a\", intToString 12)"), tm::str("a12")));
  EXPECT_TRUE(alpha_equal(run("intEq (2, 2)"), bool_value(true)));
  EXPECT_TRUE(alpha_equal(run("intLt (3, 2)"), bool_value(false)));
}

TEST(Evaluate, TryReturnsTheSuccessBranchOnValues) {
  EXPECT_TRUE(alpha_equal(run("try 4 as x in intMul (x, 2) otherwise 0"), tm::integer(8)));
}

TEST(Decompose, EvaluatesLeftToRight) {
  TermPtr t = parse_term("((fun (x : Int) -> x) 1, (fun (y : Int) -> y) 2)");
  Focus f = decompose(t);
  ASSERT_TRUE(f.redex);
  ASSERT_EQ(f.frames.size(), 1u);
  EXPECT_EQ(f.frames[0].hole, 0u);
}

TEST(Decompose, ValuesHaveNoRedex) { EXPECT_FALSE(decompose(parse_term("(1, fun (x : Int) -> x)")).redex); }

TEST(Step, RaiseIsReportedWithItsContext) {
  StepResult r = step_term(parse_term("try intAdd (raise, 1) as x in x otherwise 0"));
  ASSERT_EQ(r.kind, StepKind::Raise);
  ASSERT_FALSE(r.frames.empty());
  EXPECT_TRUE(is_try_frame(r.frames.front()));
}

TEST(Step, SessionOperationsAreLeftToTheScheduler) {
  StepResult r = step_term(tm::constant(Constant::Close, tm::name(1)));
  EXPECT_EQ(r.kind, StepKind::Session);
}

TEST(Step, FreeVariablesAreStuck) { EXPECT_EQ(step_term(tm::app(tm::var("f"), tm::unit())).kind, StepKind::Stuck); }

TEST(Plug, RebuildsTheTerm) {
  TermPtr t = parse_term("(1, (fun (x : Int) -> x) 2)");
  Focus f = decompose(t);
  EXPECT_TRUE(alpha_equal(plug(f.frames, f.redex), t));
}

}  // namespace

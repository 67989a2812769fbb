#include <gtest/gtest.h>

#include <filesystem>

#include "mvu/desugar.hpp"
#include "mvu/parser.hpp"
#include "mvu/printer.hpp"

using namespace mvu;

namespace {

TermPtr P(const std::string& s) { return parse_term(s); }

TEST(Printer, RoundTripsCoreTerms) {
  for (const char* s : {"fun (x : Int) -> intAdd (x, 1)", "let (a, b) = (1, 2) in a",
                        "case inl[Int + String] 3 { inl n -> n | inr s -> 0 }",
                        "try raise as x in x otherwise 0", "rec f(n : Int) : Int -> f n",
                        "htmlTag \"p\" (attr \"class\" \"x\") (htmlText \"hi\" ++ htmlEmpty)",
                        "linfun (u : Unit) -> ()", "new[!Int.End] ()", "transition(1, v, u, e, cmdEmpty)"}) {
    TermPtr t = P(s);
    EXPECT_TRUE(alpha_equal(P(print_term(t)), t)) << s << " printed as " << print_term(t);
  }
}

TEST(Printer, EscapesStrings) {
  TermPtr t = tm::str("a\"b\\c\n");
  EXPECT_TRUE(alpha_equal(P(print_term(t)), t));
}

TEST(HtmlSugar, DesugarsToCoreConstructors) {
  TermPtr t = desugar(P("html <p class=\"x\" onClick={fun () -> 1}>hello</p>"));
  ASSERT_EQ(t->tag, TermTag::HtmlTag);
  EXPECT_EQ(t->text, "p");
  EXPECT_EQ(t->kids[0]->tag, TermTag::Append);
  EXPECT_EQ(t->kids[1]->tag, TermTag::HtmlText);
}

TEST(HtmlSugar, EmptyListsBecomeUnits) {
  TermPtr t = desugar(P("html <br/>"));
  ASSERT_EQ(t->tag, TermTag::HtmlTag);
  EXPECT_EQ(t->kids[0]->tag, TermTag::AttrEmpty);
  EXPECT_EQ(t->kids[1]->tag, TermTag::HtmlEmpty);
}

TEST(HtmlSugar, SiblingsFoldToTheRight) {
  TermPtr t = desugar(P("html <a/><b/><c/>"));
  ASSERT_EQ(t->tag, TermTag::Append);
  EXPECT_EQ(t->kids[0]->text, "a");
  EXPECT_EQ(t->kids[1]->tag, TermTag::Append);
}

TEST(Programs, RecordsAndVariantsAreTypeSugar) {
  Program p = parse_program(
      "type M = (a: Int, b: String)\n"
      "type Msg = [| Inc | Set: Int |]\n"
      "fun get(m : M) : String = m.b\n"
      "let start : M = (a = 1, b = \"x\")\n");
  ASSERT_EQ(p.definitions.size(), 2u);
  EXPECT_FALSE(p.main);
}

TEST(Programs, ParseErrorsCarryPositions) {
  try {
    parse_program("let x = (1,\n");
    FAIL() << "accepted";
  } catch (const ParseError& e) {
    EXPECT_GE(e.line, 1);
  }
}

TEST(Programs, EveryCorpusFileParses) {
  for (const auto& entry : std::filesystem::recursive_directory_iterator(MVU_CORPUS_DIR))
    if (entry.path().extension() == ".mvu") EXPECT_NO_THROW(load_program(entry.path().string())) << entry.path();
}

TEST(Programs, GeneratedNamesAvoidSourceNames) {
  // `_1` is an ordinary identifier; pattern expansion must not capture it.
  TermPtr t = P("fun (_1 : Int * Int * Int) -> let (a, b, c) = _1 in (c, _1)");
  TermPtr again = P(print_term(t));
  EXPECT_TRUE(alpha_equal(t, again));
}

}  // namespace

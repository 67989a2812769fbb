#include <gtest/gtest.h>

#include <algorithm>

#include "mvu/harness.hpp"
#include "mvu/parser.hpp"
#include "mvu/printer.hpp"
#include "mvu/program.hpp"
#include "mvu/runtime.hpp"
#include "mvu/symbol.hpp"

using namespace mvu;

namespace {

const std::string corpus = MVU_CORPUS_DIR;

std::vector<std::string> drain(Configuration& c, long budget = 100000) {
  std::vector<std::string> rules;
  while (budget-- > 0) {
    auto r = step(c);
    if (!r) break;
    rules.push_back(*r);
  }
  return rules;
}

Configuration started(const std::string& file) {
  Configuration c = start(load_linked(corpus + "/" + file));
  drain(c);
  return c;
}

bool shows(const Configuration& c, const std::string& needle) {
  return print_term(erase(c.page)).find(needle) != std::string::npos;
}

Proc thread(TermPtr t, std::uint64_t pid) {
  Proc p;
  p.tag = ProcTag::Handler;
  p.term = std::move(t);
  p.pid = pid;
  return p;
}

TermPtr send_on(Name n) { return tm::constant(Constant::Send, tm::pair(tm::integer(1), tm::name(n))); }
TermPtr receive_on(Name n) { return tm::constant(Constant::Receive, tm::name(n)); }
TermPtr close_on(Name n) { return tm::constant(Constant::Close, tm::name(n)); }

Configuration two_threads(TermPtr a, TermPtr b, const std::string& session = "!Int.End") {
  Configuration c;
  c.mode = RunMode::Extended;
  c.page = page::empty();
  c.subscriptions = tm::sub_empty();
  c.restrictions.push_back({1, 2, parse_type(session)});
  c.fresh = 3;
  c.procs.push_back(thread(std::move(a), 1));
  c.procs.push_back(thread(std::move(b), 2));
  c.next_pid = 3;
  return c;
}

TEST(Run, ValueMainStartsWithERun) {
  for (const char* f : {"reverse-string.mvu", "mouse.mvu"}) {
    Configuration c = start(load_linked(corpus + "/" + f));
    EXPECT_EQ(step(c), "E-Run") << f;
  }
}

TEST(Run, MainIsEvaluatedBeforeERun) {
  Configuration c = start(load_linked(corpus + "/pingpong.mvu"));
  auto rules = drain(c);
  ASSERT_FALSE(rules.empty());
  EXPECT_EQ(rules[0], "E-New");
  EXPECT_NE(std::find(rules.begin(), rules.end(), "E-Run"), rules.end());
}

TEST(Run, ProgramsSettleIdleWithARenderedPage) {
  for (const char* f : {"reverse-string.mvu", "mouse.mvu", "pingpong.mvu", "pingpong-monolithic.mvu", "fib.mvu"}) {
    Configuration c = started(f);
    Classification k = classify(c);
    EXPECT_TRUE(k.ok) << f << ": " << k.failure;
    EXPECT_EQ(k.kind, Quiescence::IdleNoEvents) << f;
    EXPECT_FALSE(tag_nodes(c.page).empty()) << f;
  }
}

TEST(Run, InputIsEchoedReversed) {
  Configuration c = started("reverse-string.mvu");
  inject_dom_event(c, 1, {"input", tm::str("abc")});
  auto rules = drain(c);
  ASSERT_FALSE(rules.empty());
  EXPECT_EQ(rules.front(), "E-Evt");
  EXPECT_EQ(rules.back(), "E-Update");
  EXPECT_TRUE(shows(c, "\"cba\""));
  EXPECT_EQ(model_text(c).find("\"abc\"") != std::string::npos, true);
  EXPECT_TRUE(classify(c).ok);
}

TEST(Run, EventsWithoutHandlersSpawnNothing) {
  Configuration c = started("reverse-string.mvu");
  std::string before = model_text(c);
  inject_dom_event(c, 2, {"click", tm::unit()});
  auto rules = drain(c);
  std::vector<std::string> expected{"E-Evt"};
  EXPECT_EQ(rules, expected);
  for (const auto& p : c.procs) EXPECT_NE(p.tag, ProcTag::Handler);
  EXPECT_EQ(model_text(c), before);
}

TEST(Run, DeadlockIsMainBlocked) {
  Configuration c = started("deadlock.mvu");
  Classification k = classify(c);
  ASSERT_TRUE(k.ok) << k.failure;
  EXPECT_EQ(k.kind, Quiescence::MainBlocked);
  EXPECT_FALSE(detect_error_process(c));
}

TEST(Sessions, CommunicationAndClose) {
  Configuration c = two_threads(tm::pair(send_on(1), tm::unit()), receive_on(2));
  auto rules = drain(c);
  ASSERT_FALSE(rules.empty());
  EXPECT_EQ(rules[0], "E-Comm");
  EXPECT_EQ(c.restrictions[0].type->tag, TypeTag::End);
}

TEST(Sessions, CancelZapsAndReceiverRaisesIntoItsHandler) {
  TermPtr receiver = tm::try_(receive_on(2), intern("p"), tm::integer(1), tm::integer(0));
  Configuration c = two_threads(tm::constant(Constant::Cancel, tm::name(1)), receiver);
  auto rules = drain(c);
  std::vector<std::string> expected{"E-Cancel", "E-RecvZap", "E-RaiseH"};
  EXPECT_EQ(rules, expected);
  EXPECT_TRUE(c.restrictions.empty()) << "both ends zapped, restriction collected";
  for (const auto& p : c.procs) EXPECT_NE(p.tag, ProcTag::Zap);
}

TEST(Sessions, UncaughtRaiseKillsTheThreadAndZapsItsNames) {
  TermPtr raiser = tm::pair(tm::raise(), tm::name(1));
  Configuration c = two_threads(raiser, tm::pair(receive_on(2), tm::unit()));
  auto rules = drain(c);
  ASSERT_GE(rules.size(), 2u);
  EXPECT_EQ(rules[0], "E-RaiseUThread");
  EXPECT_EQ(rules[1], "E-RecvZap");
  EXPECT_TRUE(c.restrictions.empty());
}

TEST(Sessions, MismatchedActionsAreAnErrorProcess) {
  EXPECT_TRUE(detect_error_process(two_threads(send_on(1), send_on(2))));
  EXPECT_TRUE(detect_error_process(two_threads(receive_on(1), close_on(2), "?Int.End")));
  EXPECT_FALSE(detect_error_process(two_threads(send_on(1), receive_on(2))));
  EXPECT_FALSE(detect_error_process(two_threads(close_on(1), close_on(2), "End")));
}

TEST(Linearity, SharedNameIsReported) {
  Configuration c = two_threads(send_on(1), tm::pair(receive_on(2), tm::name(1)));
  EXPECT_TRUE(check_name_linearity(c));
  EXPECT_FALSE(check_name_linearity(two_threads(send_on(1), receive_on(2))));
  Configuration z = two_threads(send_on(1), receive_on(2));
  z.procs.push_back(make_zap(1));
  z.procs.push_back(make_zap(1));
  EXPECT_TRUE(check_name_linearity(z));
}

TEST(Classify, TwoMainThreadsFail) {
  Configuration c = started("reverse-string.mvu");
  c.procs.push_back(c.procs.front());
  EXPECT_FALSE(classify(c).ok);
}

TEST(Classify, PendingEventsAreNotQuiescent) {
  Configuration c = started("reverse-string.mvu");
  inject_dom_event(c, 1, {"input", tm::str("x")});
  EXPECT_FALSE(classify(c).ok);
}

TEST(Injection, RejectsBadEvents) {
  Configuration c = started("reverse-string.mvu");
  EXPECT_THROW(inject_dom_event(c, 1, {"input", tm::integer(3)}), InjectionError);
  EXPECT_THROW(inject_dom_event(c, 1, {"scroll", tm::unit()}), InjectionError);
  EXPECT_THROW(inject_dom_event(c, 99, {"click", tm::unit()}), InjectionError);
  EXPECT_THROW(inject_dom_event(c, 1, {"mouseMove", tm::pair(tm::integer(1), tm::integer(2))}), InjectionError);
  EXPECT_THROW(inject_env_event(c, {"mouseMove", tm::pair(tm::integer(1), tm::integer(2))}), InjectionError);
  EXPECT_FALSE(first_pending(c.page));
}

TEST(Injection, EnvironmentEventsReachSubscriptions) {
  Configuration c = started("mouse.mvu");
  std::string before = model_text(c);
  inject_env_event(c, {"mouseMove", tm::pair(tm::integer(3), tm::integer(4))});
  auto rules = drain(c);
  ASSERT_FALSE(rules.empty());
  EXPECT_EQ(rules.front(), "E-EvtS");
  EXPECT_NE(model_text(c), before);
  EXPECT_TRUE(classify(c).ok);
}

TEST(Transitions, PingPongWaitsThenReturns) {
  Configuration c = started("pingpong.mvu");
  inject_dom_event(c, 5, {"click", tm::unit()});
  auto rules = drain(c);
  auto has = [&](const std::string& r) { return std::find(rules.begin(), rules.end(), r) != rules.end(); };
  EXPECT_TRUE(has("E-Transition"));
  EXPECT_TRUE(has("E-Comm"));
  EXPECT_FALSE(shows(c, "disabled"));
  EXPECT_EQ(classify(c).kind, Quiescence::IdleNoEvents);
}

}  // namespace

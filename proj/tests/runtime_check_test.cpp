#include <gtest/gtest.h>

#include "mvu/harness.hpp"
#include "mvu/program.hpp"
#include "mvu/runtime.hpp"
#include "mvu/runtime_check.hpp"

using namespace mvu;

namespace {

const std::string corpus = MVU_CORPUS_DIR;

Configuration settled(const std::string& file) {
  Configuration c = start(load_linked(corpus + "/" + file));
  while (step(c)) {
  }
  return c;
}

std::string rule_of(const Configuration& c) {
  auto d = check_configuration(c);
  return d ? d->rule : "ok";
}

Proc& loop_of(Configuration& c) {
  for (auto& p : c.procs)
    if (p.tag == ProcTag::EventLoop) return p;
  throw std::logic_error("no event loop");
}

TEST(Check, EveryStepOfEveryProgramIsWellTyped) {
  for (const char* f : {"reverse-string.mvu", "mouse.mvu", "pingpong.mvu", "pingpong-monolithic.mvu", "fib.mvu",
                        "deadlock.mvu"}) {
    Configuration c = start(load_linked(corpus + "/" + f));
    EXPECT_EQ(rule_of(c), "ok") << f;
    while (auto r = step(c)) {
      auto d = check_configuration(c);
      ASSERT_FALSE(d) << f << " after " << *r << ": [" << d->rule << "] " << d->message;
    }
  }
}

TEST(Check, TwoMainThreadsAreRejected) {
  Configuration c = settled("reverse-string.mvu");
  c.procs.push_back(loop_of(c));
  EXPECT_EQ(rule_of(c), "TP-Par");
}

TEST(Check, MissingMainThreadIsRejected) {
  Configuration c = settled("reverse-string.mvu");
  std::erase_if(c.procs, [](const Proc& p) { return p.tag == ProcTag::EventLoop; });
  EXPECT_EQ(rule_of(c), "TP-Par");
}

TEST(Check, UnconsumedEndpointIsRejected) {
  Configuration c = settled("pingpong.mvu");
  ASSERT_FALSE(c.restrictions.empty());
  std::erase_if(c.procs, [](const Proc& p) { return p.tag == ProcTag::Server; });
  EXPECT_EQ(rule_of(c), "TP-Nu");
}

TEST(Check, ExtraZapperIsRejected) {
  Configuration c = settled("pingpong.mvu");
  c.procs.push_back(make_zap(c.restrictions.front().d));
  EXPECT_NE(rule_of(c), "ok");
}

TEST(Check, IdleModelOfTheWrongTypeIsRejected) {
  Configuration c = settled("reverse-string.mvu");
  loop_of(c).thread.model = tm::integer(3);
  EXPECT_EQ(rule_of(c), "TT-Idle");
}

TEST(Check, QueuedEventWithWrongPayloadIsRejected) {
  Configuration c = settled("reverse-string.mvu");
  c.page = update_node(c.page, 1, [](const PagePtr& n) {
    return page::tag(n->name, n->attrs, n->children, {{"input", tm::integer(1)}}, n->id);
  });
  EXPECT_EQ(rule_of(c), "TE-Evt");
}

TEST(Check, SwappedViewIsRejected) {
  Configuration c = settled("pingpong.mvu");
  Proc& loop = loop_of(c);
  std::swap(loop.fstate.view, loop.fstate.update);
  EXPECT_NE(rule_of(c), "ok");
}

}  // namespace

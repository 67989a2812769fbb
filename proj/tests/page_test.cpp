#include <gtest/gtest.h>

#include <random>

#include "mvu/page.hpp"
#include "mvu/term.hpp"
#include "oracles.hpp"

using namespace mvu;

namespace {

TermPtr div(TermPtr kids) { return tm::html_tag("div", tm::attr_empty(), std::move(kids)); }
TermPtr text(const std::string& s) { return tm::html_text(tm::str(s)); }
Event click() { return {"click", tm::unit()}; }

TEST(Diff, FromEmptyAssignsFreshIds) {
  NodeId next = 10;
  PagePtr d = diff(tm::append(div(text("a")), div(tm::html_empty())), page::empty(), next);
  auto nodes = tag_nodes(d);
  ASSERT_EQ(nodes.size(), 2u);
  EXPECT_EQ(nodes[0]->id, 10u);
  EXPECT_EQ(nodes[1]->id, 11u);
  EXPECT_EQ(next, 12u);
  EXPECT_TRUE(oracle::page_shows(d, tm::append(div(text("a")), div(tm::html_empty()))));
}

TEST(Diff, MatchingTagKeepsIdAndQueue) {
  NodeId next = 1;
  PagePtr old = diff(div(text("a")), page::empty(), next);
  old = update_node(old, 1, [](const PagePtr& n) {
    return page::tag(n->name, n->attrs, n->children, {click()}, n->id);
  });
  PagePtr d = diff(div(text("b")), old, next);
  ASSERT_EQ(d->tag, PageTag::Tag);
  EXPECT_EQ(d->id, 1u);
  EXPECT_EQ(d->queue.size(), 1u);
  EXPECT_EQ(next, 2u);
}

TEST(Diff, ChangedTagGetsAFreshIdAndEmptyQueue) {
  NodeId next = 1;
  PagePtr old = diff(div(tm::html_empty()), page::empty(), next);
  old = update_node(old, 1, [](const PagePtr& n) {
    return page::tag(n->name, n->attrs, n->children, {click()}, n->id);
  });
  PagePtr d = diff(tm::html_tag("p", tm::attr_empty(), tm::html_empty()), old, next);
  EXPECT_EQ(d->id, 2u);
  EXPECT_TRUE(d->queue.empty());
}

TEST(Diff, ErasureRecoversTheHtml) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    NodeId next = 1;
    PagePtr old = oracle::random_page(rng, 3, next);
    TermPtr html = oracle::random_html(rng, 3);
    PagePtr d = diff(html, old, next);
    EXPECT_TRUE(alpha_equal(erase(d), html));
    EXPECT_TRUE(oracle::page_shows(d, html));
  }
}

TEST(Diff, RediffingTheSameHtmlChangesNothing) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 300; ++i) {
    NodeId next = 1;
    PagePtr old = oracle::random_page(rng, 3, next);
    NodeId before = next;
    PagePtr d = diff(erase(old), old, next);
    EXPECT_EQ(next, before);
    auto a = tag_nodes(old), b = tag_nodes(d);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k]->id, b[k]->id);
      EXPECT_EQ(a[k]->queue.size(), b[k]->queue.size());
    }
  }
}

TEST(Diff, IgnoresAppendAssociation) {
  NodeId n1 = 1, n2 = 1;
  TermPtr a = div(text("a")), b = div(text("b")), c = div(text("c"));
  PagePtr l = diff(tm::append(tm::append(a, b), c), page::empty(), n1);
  PagePtr r = diff(tm::append(a, tm::append(b, c)), page::empty(), n2);
  auto x = tag_nodes(l), y = tag_nodes(r);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_EQ(x[k]->id, y[k]->id);
}

TEST(Handlers, CollectsMatchingEventsInOrder) {
  TermPtr f = tm::var("f"), g = tm::var("g"), h = tm::var("h");
  TermPtr attrs = tm::append(tm::append(tm::attr("onClick", f), tm::attr("class", tm::str("x"))),
                             tm::append(tm::attr("onInput", g), tm::attr("onClick", h)));
  auto hs = handlers("click", attrs);
  ASSERT_EQ(hs.size(), 2u);
  EXPECT_TRUE(alpha_equal(hs[0], f));
  EXPECT_TRUE(alpha_equal(hs[1], h));
  EXPECT_TRUE(handlers("keyUp", attrs).empty());
}

TEST(Handlers, UnitAndAssociationDoNotMatter) {
  TermPtr f = tm::attr("onClick", tm::var("f")), g = tm::attr("onClick", tm::var("g"));
  auto a = handlers("click", tm::append(tm::append(f, tm::attr_empty()), g));
  auto b = handlers("click", tm::append(f, tm::append(tm::attr_empty(), g)));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_TRUE(alpha_equal(a[k], b[k]));
}

TEST(Handlers, ReadsSubscriptions) {
  TermPtr subs = tm::append(tm::sub("onMouseMove", tm::var("m")), tm::sub_empty());
  EXPECT_EQ(handlers("mouseMove", subs).size(), 1u);
}

TEST(Procs, CollectsSpawnedTermsInOrder) {
  TermPtr cmd = tm::append(tm::cmd_spawn(tm::integer(1)), tm::append(tm::cmd_empty(), tm::cmd_spawn(tm::integer(2))));
  auto ps = procs(cmd);
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_EQ(ps[0]->number, 1);
  EXPECT_EQ(ps[1]->number, 2);
}

TEST(Nodes, FirstPendingFollowsDocumentOrder) {
  NodeId next = 1;
  PagePtr d = diff(tm::append(div(div(tm::html_empty())), div(tm::html_empty())), page::empty(), next);
  auto enqueue = [](const PagePtr& n) { return page::tag(n->name, n->attrs, n->children, {click()}, n->id); };
  d = update_node(d, 3, enqueue);
  EXPECT_EQ(first_pending(d)->id, 3u);
  d = update_node(d, 2, enqueue);
  EXPECT_EQ(first_pending(d)->id, 2u);
  EXPECT_EQ(find_node(d, 1)->name, "div");
  EXPECT_FALSE(find_node(d, 9));
  EXPECT_FALSE(update_node(d, 9, enqueue));
}

}  // namespace

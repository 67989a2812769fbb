#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mvu/term.hpp"

namespace mvu {

struct Event {
  std::string name;
  TermPtr payload;
};

using NodeId = std::uint64_t;

enum class PageTag { Tag, Text, Empty, Append };

struct PageNode;
using PagePtr = std::shared_ptr<const PageNode>;

// Tag(name, attrs, children, queue) carries a node id; Append(left, right);
// Text(text). Pages are immutable and shared between configurations.
struct PageNode {
  PageTag tag = PageTag::Empty;
  std::string name;
  TermPtr attrs;
  TermPtr text;
  PagePtr children;
  PagePtr left;
  PagePtr right;
  std::vector<Event> queue;
  NodeId id = 0;
};

namespace page {
PagePtr empty();
PagePtr text(TermPtr s);
PagePtr tag(const std::string& name, TermPtr attrs, PagePtr children, std::vector<Event> queue, NodeId id);
PagePtr append(PagePtr a, PagePtr b);
}  // namespace page

// HTML value of a page: queues dropped, structure kept.
TermPtr erase(const PagePtr& d);

// Top-level Tag and Text nodes of a page, left to right, with appends and
// empties flattened away.
std::vector<PagePtr> flatten(const PagePtr& d);

// A page whose erasure is html. Nodes are matched against the old page
// positionally after flattening; a new node whose tag name agrees with the
// old node at the same position keeps its id and queue and takes the new
// attributes. Inserted nodes get ids from next_id and empty queues.
PagePtr diff(const TermPtr& html, const PagePtr& old, NodeId& next_id);

// Handler functions for an event in an attribute or subscription value.
std::vector<TermPtr> handlers(const std::string& event_name, const TermPtr& attrs_or_subs);
// Terms spawned by a command value.
std::vector<TermPtr> procs(const TermPtr& cmd);

// Tag nodes in document order (parents before children).
std::vector<PagePtr> tag_nodes(const PagePtr& d);
PagePtr find_node(const PagePtr& d, NodeId id);
// Copy of d with f applied to the tag node id; null when id is absent.
PagePtr update_node(const PagePtr& d, NodeId id, const std::function<PagePtr(const PagePtr&)>& f);
// Leftmost node with a pending event, or null.
PagePtr first_pending(const PagePtr& d);

}  // namespace mvu

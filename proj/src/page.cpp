#include "mvu/page.hpp"

#include <stdexcept>

#include "mvu/events.hpp"

namespace mvu {

namespace page {

PagePtr empty() {
  static const PagePtr e = std::make_shared<const PageNode>();
  return e;
}

PagePtr text(TermPtr s) {
  PageNode n;
  n.tag = PageTag::Text;
  n.text = std::move(s);
  return std::make_shared<const PageNode>(std::move(n));
}

PagePtr tag(const std::string& name, TermPtr attrs, PagePtr children, std::vector<Event> queue, NodeId id) {
  PageNode n;
  n.tag = PageTag::Tag;
  n.name = name;
  n.attrs = std::move(attrs);
  n.children = std::move(children);
  n.queue = std::move(queue);
  n.id = id;
  return std::make_shared<const PageNode>(std::move(n));
}

PagePtr append(PagePtr a, PagePtr b) {
  PageNode n;
  n.tag = PageTag::Append;
  n.left = std::move(a);
  n.right = std::move(b);
  return std::make_shared<const PageNode>(std::move(n));
}

}  // namespace page

TermPtr erase(const PagePtr& d) {
  switch (d->tag) {
    case PageTag::Empty: return tm::html_empty();
    case PageTag::Text: return tm::html_text(d->text);
    case PageTag::Append: return tm::append(erase(d->left), erase(d->right));
    case PageTag::Tag: return tm::html_tag(d->name, d->attrs, erase(d->children));
  }
  return tm::html_empty();
}

namespace {

void flatten_into(const PagePtr& d, std::vector<PagePtr>& out) {
  switch (d->tag) {
    case PageTag::Empty: return;
    case PageTag::Append:
      flatten_into(d->left, out);
      flatten_into(d->right, out);
      return;
    default: out.push_back(d);
  }
}

class Differ {
 public:
  explicit Differ(NodeId& next_id) : next_id_(next_id) {}

  // Walks the new HTML structurally, consuming old nodes in order.
  PagePtr walk(const TermPtr& html, const std::vector<PagePtr>& old, std::size_t& pos) {
    switch (html->tag) {
      case TermTag::HtmlEmpty: return page::empty();
      case TermTag::Append: {
        PagePtr a = walk(html->kids[0], old, pos);
        PagePtr b = walk(html->kids[1], old, pos);
        return page::append(a, b);
      }
      case TermTag::HtmlText:
        ++pos;
        return page::text(html->kids[0]);
      case TermTag::HtmlTag: {
        const PagePtr matched = pos < old.size() ? old[pos] : nullptr;
        ++pos;
        std::vector<PagePtr> old_kids;
        if (matched && matched->tag == PageTag::Tag && matched->name == html->text) {
          flatten_into(matched->children, old_kids);
          std::size_t kid_pos = 0;
          PagePtr kids = walk(html->kids[1], old_kids, kid_pos);
          return page::tag(html->text, html->kids[0], kids, matched->queue, matched->id);
        }
        NodeId id = next_id_++;
        std::size_t kid_pos = 0;
        PagePtr kids = walk(html->kids[1], old_kids, kid_pos);
        return page::tag(html->text, html->kids[0], kids, {}, id);
      }
      default: throw std::logic_error("diff: not an HTML value");
    }
  }

 private:
  NodeId& next_id_;
};

void handlers_into(const std::string& event_name, const TermPtr& v, std::vector<TermPtr>& out) {
  switch (v->tag) {
    case TermTag::Append:
      handlers_into(event_name, v->kids[0], out);
      handlers_into(event_name, v->kids[1], out);
      return;
    case TermTag::Attr:
    case TermTag::Sub: {
      const EventSignature* sig = find_handler(v->text);
      if (sig && sig->event_name == event_name) out.push_back(v->kids[0]);
      return;
    }
    default: return;
  }
}

void procs_into(const TermPtr& v, std::vector<TermPtr>& out) {
  switch (v->tag) {
    case TermTag::Append:
      procs_into(v->kids[0], out);
      procs_into(v->kids[1], out);
      return;
    case TermTag::CmdSpawn: out.push_back(v->kids[0]); return;
    default: return;
  }
}

void tags_into(const PagePtr& d, std::vector<PagePtr>& out) {
  switch (d->tag) {
    case PageTag::Append:
      tags_into(d->left, out);
      tags_into(d->right, out);
      return;
    case PageTag::Tag:
      out.push_back(d);
      tags_into(d->children, out);
      return;
    default: return;
  }
}

}  // namespace

std::vector<PagePtr> flatten(const PagePtr& d) {
  std::vector<PagePtr> out;
  flatten_into(d, out);
  return out;
}

PagePtr diff(const TermPtr& html, const PagePtr& old, NodeId& next_id) {
  std::vector<PagePtr> items = flatten(old);
  std::size_t pos = 0;
  return Differ(next_id).walk(html, items, pos);
}

std::vector<TermPtr> handlers(const std::string& event_name, const TermPtr& attrs_or_subs) {
  std::vector<TermPtr> out;
  handlers_into(event_name, attrs_or_subs, out);
  return out;
}

std::vector<TermPtr> procs(const TermPtr& cmd) {
  std::vector<TermPtr> out;
  procs_into(cmd, out);
  return out;
}

std::vector<PagePtr> tag_nodes(const PagePtr& d) {
  std::vector<PagePtr> out;
  tags_into(d, out);
  return out;
}

PagePtr find_node(const PagePtr& d, NodeId id) {
  for (const auto& n : tag_nodes(d))
    if (n->id == id) return n;
  return nullptr;
}

PagePtr update_node(const PagePtr& d, NodeId id, const std::function<PagePtr(const PagePtr&)>& f) {
  switch (d->tag) {
    case PageTag::Append: {
      if (PagePtr l = update_node(d->left, id, f)) return page::append(l, d->right);
      if (PagePtr r = update_node(d->right, id, f)) return page::append(d->left, r);
      return nullptr;
    }
    case PageTag::Tag: {
      if (d->id == id) return f(d);
      if (PagePtr kids = update_node(d->children, id, f)) return page::tag(d->name, d->attrs, kids, d->queue, d->id);
      return nullptr;
    }
    default: return nullptr;
  }
}

PagePtr first_pending(const PagePtr& d) {
  for (const auto& n : tag_nodes(d))
    if (!n->queue.empty()) return n;
  return nullptr;
}

}  // namespace mvu

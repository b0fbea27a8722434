#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace butcher {

inline constexpr int kDefaultOrderCap = 12;

// Canonical unlabeled rooted tree.  Children are stored sorted ascending by
// (encoding length, then bytewise), so two structurally equal trees always
// have identical encodings.  The single node encodes as "[]"; a tree with
// children c1 <= ... <= ck encodes as "[" enc(c1)...enc(ck) "]".
class Tree {
 public:
  Tree() = default;  // single node

  static Tree leaf() { return Tree{}; }

  // Canonicalizing constructor: accepts children in any order.
  static Tree with_children(std::vector<Tree> children) {
    Tree t;
    t.children_ = std::move(children);
    std::sort(t.children_.begin(), t.children_.end(), child_less);
    t.enc_ = "[";
    t.order_ = 1;
    for (const Tree& c : t.children_) {
      t.enc_ += c.enc_;
      t.order_ += c.order_;
    }
    t.enc_ += "]";
    return t;
  }

  // Parses the "[...]" wire encoding; non-canonical child order is accepted
  // and canonicalized.
  static Tree parse(const std::string& enc) {
    std::size_t pos = 0;
    Tree t = parse_at(enc, pos);
    if (pos != enc.size())
      throw std::invalid_argument("trailing characters in tree encoding: " + enc);
    return t;
  }

  const std::vector<Tree>& children() const { return children_; }
  const std::string& encoding() const { return enc_; }
  int order() const { return order_; }

  bool operator==(const Tree& o) const { return enc_ == o.enc_; }
  bool operator!=(const Tree& o) const { return enc_ != o.enc_; }

  // Canonical total order: by (order, encoding lexicographically).
  bool operator<(const Tree& o) const {
    if (order_ != o.order_) return order_ < o.order_;
    return enc_ < o.enc_;
  }

 private:
  static bool child_less(const Tree& a, const Tree& b) {
    if (a.enc_.size() != b.enc_.size()) return a.enc_.size() < b.enc_.size();
    return a.enc_ < b.enc_;
  }

  static Tree parse_at(const std::string& enc, std::size_t& pos) {
    if (pos >= enc.size() || enc[pos] != '[')
      throw std::invalid_argument("malformed tree encoding: " + enc);
    ++pos;
    std::vector<Tree> children;
    while (pos < enc.size() && enc[pos] == '[') children.push_back(parse_at(enc, pos));
    if (pos >= enc.size() || enc[pos] != ']')
      throw std::invalid_argument("malformed tree encoding: " + enc);
    ++pos;
    return with_children(std::move(children));
  }

  std::vector<Tree> children_;
  std::string enc_ = "[]";
  int order_ = 1;
};

// Number of automorphisms of t fixing the root:
// sigma([t1^m1,...,tk^mk]) = prod_i mi! * sigma(ti)^mi over distinct child types.
inline long long symmetry(const Tree& t) {
  long long sigma = 1;
  const auto& ch = t.children();
  std::size_t i = 0;
  while (i < ch.size()) {
    std::size_t j = i;
    while (j < ch.size() && ch[j] == ch[i]) ++j;
    long long m = static_cast<long long>(j - i);
    long long cs = symmetry(ch[i]);
    for (long long k = 1; k <= m; ++k) sigma *= k * cs;  // m! * cs^m interleaved
    i = j;
  }
  return sigma;
}

// Density gamma: gamma(leaf)=1, gamma(t)=order(t)*prod gamma(child).
inline long long density(const Tree& t) {
  long long g = t.order();
  for (const Tree& c : t.children()) g *= density(c);
  return g;
}

namespace detail {

inline void extend_multisets(const std::vector<Tree>& flat, std::size_t start,
                             int remaining, std::vector<Tree>& current,
                             std::vector<Tree>& out) {
  if (remaining == 0) {
    out.push_back(Tree::with_children(current));
    return;
  }
  for (std::size_t i = start; i < flat.size(); ++i) {
    if (flat[i].order() > remaining) break;  // flat is sorted by order
    current.push_back(flat[i]);
    extend_multisets(flat, i, remaining - flat[i].order(), current, out);
    current.pop_back();
  }
}

}  // namespace detail

// All rooted trees of orders 1..n, flattened in canonical total order.
inline std::vector<Tree> trees_up_to(int n, int cap = kDefaultOrderCap) {
  if (n < 1 || n > cap) throw std::out_of_range("tree order out of range");
  std::vector<std::vector<Tree>> by_order(static_cast<std::size_t>(n) + 1);
  by_order[1] = {Tree::leaf()};
  std::vector<Tree> flat = {Tree::leaf()};
  for (int m = 2; m <= n; ++m) {
    // A tree of order m is a root with a non-decreasing multiset of smaller
    // trees whose orders sum to m-1; duplicate-free by construction.
    std::vector<Tree> current;
    detail::extend_multisets(flat, 0, m - 1, current, by_order[static_cast<std::size_t>(m)]);
    auto& lvl = by_order[static_cast<std::size_t>(m)];
    std::sort(lvl.begin(), lvl.end());
    flat.insert(flat.end(), lvl.begin(), lvl.end());
  }
  return flat;
}

// All rooted trees with exactly n nodes, in canonical order.
inline std::vector<Tree> enumerate_trees(int n, int cap = kDefaultOrderCap) {
  std::vector<Tree> flat = trees_up_to(n, cap);
  std::vector<Tree> out;
  for (Tree& t : flat)
    if (t.order() == n) out.push_back(std::move(t));
  return out;
}

inline Tree chain(int n) {
  Tree t = Tree::leaf();
  for (int i = 1; i < n; ++i) t = Tree::with_children({t});
  return t;
}

inline Tree cherry() { return Tree::with_children({Tree::leaf(), Tree::leaf()}); }

}  // namespace butcher

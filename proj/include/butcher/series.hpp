#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "butcher/elementary.hpp"
#include "butcher/rational.hpp"
#include "butcher/tree.hpp"

namespace butcher {

// Truncated B-series: c(empty) plus one exact rational coefficient per
// canonical tree of order <= order.  Convention: the series value is
// c(empty) x0 + sum_t c(t) h^|t| F(t)(x0), so the exact flow has
// c(t) = 1/(sigma(t) gamma(t)).
struct BSeries {
  int order = 0;
  Rational empty = 1;  // c(emptytree)
  std::map<Tree, Rational> coeff;

  Rational operator[](const Tree& t) const {
    auto it = coeff.find(t);
    if (it == coeff.end()) throw std::out_of_range("tree beyond truncation order");
    return it->second;
  }

  bool operator==(const BSeries& o) const {
    return order == o.order && empty == o.empty && coeff == o.coeff;
  }
};

inline BSeries zero_filled_series(int n, int cap = kDefaultOrderCap) {
  BSeries s;
  s.order = n;
  for (const Tree& t : trees_up_to(n, cap)) s.coeff[t] = 0;
  return s;
}

inline BSeries identity_series(int n, int cap = kDefaultOrderCap) {
  return zero_filled_series(n, cap);
}

inline BSeries euler_series(int n, int cap = kDefaultOrderCap) {
  BSeries s = zero_filled_series(n, cap);
  s.coeff[Tree::leaf()] = 1;
  return s;
}

inline BSeries exact_flow_series(int n, int cap = kDefaultOrderCap) {
  BSeries s = zero_filled_series(n, cap);
  for (auto& [t, c] : s.coeff) c = Rational(1, Integer(symmetry(t)) * density(t));
  return s;
}

// One step of x + phi(h f') h f with phi(z) = (e^z - 1)/z: expanding
// phi(hf')hf = sum_k (hf')^k hf / (k+1)! puts 1/m! on the order-m chain and
// zero on every branching tree.
inline BSeries exponential_integrator_series(int n, int cap = kDefaultOrderCap) {
  BSeries s = zero_filled_series(n, cap);
  Rational fact = 1;
  for (int m = 1; m <= n; ++m) {
    fact *= m;
    s.coeff[chain(m)] = Rational(1) / fact;
  }
  return s;
}

// Average-vector-field map: order-by-order fixed point of
// x1 = x0 + h * int_0^1 f(xi x1 + (1-xi) x0) dxi.  Each child of a node
// carries one factor of xi, so a root with k children integrates to 1/(k+1);
// repeated child types contribute 1/multiplicity!.
inline BSeries avf_series(int n, int cap = kDefaultOrderCap) {
  BSeries s = zero_filled_series(n, cap);
  for (auto& [t, c] : s.coeff) {
    const auto& ch = t.children();
    Rational v(1, static_cast<int>(ch.size()) + 1);
    std::size_t i = 0;
    while (i < ch.size()) {
      std::size_t j = i;
      while (j < ch.size() && ch[j] == ch[i]) ++j;
      Rational cc = s.coeff.at(ch[i]);  // lower order: already final (map is ordered)
      for (std::size_t m = 1; m <= j - i; ++m) v *= cc / static_cast<int>(m);
      i = j;
    }
    c = v;
  }
  return s;
}

inline Vec evaluate(const BSeries& s, const VectorField& f, const Vec& x0, double h) {
  if (static_cast<int>(x0.size()) != f.dim) throw std::invalid_argument("dimension mismatch");
  Vec r = to_double(s.empty) * x0;
  for (const auto& [t, c] : s.coeff) {
    if (c == 0) continue;
    r += to_double(c) * std::pow(h, t.order()) * elementary_differential(t, f, x0);
  }
  return r;
}

namespace detail {

// One way of cutting a tree into a rooted part (containing the root) and the
// forest of removed components; mult counts the node subsets realizing it.
struct RootSplit {
  Tree sub;
  std::vector<std::string> forest;  // component encodings, sorted
  long long mult = 1;
};

using SplitMemo = std::map<std::string, std::vector<RootSplit>>;

// All splittings with nonempty rooted part; the empty rooted part (whole tree
// removed) is handled by callers.
inline const std::vector<RootSplit>& root_splittings(const Tree& t, SplitMemo& memo) {
  auto found = memo.find(t.encoding());
  if (found != memo.end()) return found->second;

  struct Partial {
    std::vector<Tree> sub_children;
    std::vector<std::string> forest;
    long long mult = 1;
  };
  std::vector<Partial> partials{{}};
  for (const Tree& c : t.children()) {
    std::vector<Partial> next;
    for (const Partial& p : partials) {
      Partial dropped = p;  // whole child subtree removed
      dropped.forest.push_back(c.encoding());
      next.push_back(std::move(dropped));
      for (const RootSplit& cs : root_splittings(c, memo)) {
        Partial kept = p;
        kept.sub_children.push_back(cs.sub);
        kept.forest.insert(kept.forest.end(), cs.forest.begin(), cs.forest.end());
        kept.mult *= cs.mult;
        next.push_back(std::move(kept));
      }
    }
    partials = std::move(next);
  }

  std::map<std::pair<std::string, std::vector<std::string>>, RootSplit> merged;
  for (Partial& p : partials) {
    RootSplit rs;
    rs.sub = Tree::with_children(std::move(p.sub_children));
    std::sort(p.forest.begin(), p.forest.end());
    rs.forest = std::move(p.forest);
    rs.mult = p.mult;
    auto key = std::make_pair(rs.sub.encoding(), rs.forest);
    auto [it, inserted] = merged.emplace(std::move(key), rs);
    if (!inserted) it->second.mult += rs.mult;
  }
  std::vector<RootSplit> out;
  out.reserve(merged.size());
  for (auto& [k, v] : merged) out.push_back(std::move(v));
  return memo.emplace(t.encoding(), std::move(out)).first->second;
}

}  // namespace detail

// Butcher group product: the series of applying the map of b after the map
// of a.  Computed over rooted-subtree splittings in the sigma-normalized
// convention, then converted back.
inline BSeries compose(const BSeries& a, const BSeries& b) {
  if (a.empty != 1 || b.empty != 1)
    throw std::invalid_argument("composition operands must have c(empty) = 1");
  if (a.order != b.order)
    throw std::invalid_argument("composition operands must share a truncation order");

  std::map<std::string, Rational> an, bn;  // normalized: sigma(t) * c(t)
  for (const auto& [t, c] : a.coeff) an[t.encoding()] = c * symmetry(t);
  for (const auto& [t, c] : b.coeff) bn[t.encoding()] = c * symmetry(t);

  detail::SplitMemo memo;
  BSeries r = zero_filled_series(a.order);
  for (auto& [t, c] : r.coeff) {
    Rational acc = an.at(t.encoding());  // empty rooted part: b(empty) * a~(t)
    for (const auto& sp : detail::root_splittings(t, memo)) {
      Rational term = bn.at(sp.sub.encoding());
      if (term == 0) continue;
      for (const std::string& e : sp.forest) term *= an.at(e);
      acc += sp.mult * term;
    }
    c = acc / symmetry(t);
  }
  return r;
}

// Group inverse by order-by-order triangular solve of compose(a, x) = id:
// the full-subtree splitting isolates x~(t) against terms of lower order.
inline BSeries inverse(const BSeries& a) {
  if (a.empty != 1) throw std::invalid_argument("inverse requires c(empty) = 1");
  std::map<std::string, Rational> an, xn;
  for (const auto& [t, c] : a.coeff) an[t.encoding()] = c * symmetry(t);

  detail::SplitMemo memo;
  BSeries r = zero_filled_series(a.order);
  for (auto& [t, c] : r.coeff) {  // ascending canonical order: children first
    Rational acc = an.at(t.encoding());
    for (const auto& sp : detail::root_splittings(t, memo)) {
      if (sp.sub == t) continue;
      Rational term = xn.at(sp.sub.encoding());
      if (term == 0) continue;
      for (const std::string& e : sp.forest) term *= an.at(e);
      acc += sp.mult * term;
    }
    xn[t.encoding()] = -acc;
    c = -acc / symmetry(t);
  }
  return r;
}

}  // namespace butcher

#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "butcher/elementary.hpp"
#include "butcher/rational.hpp"
#include "butcher/tree.hpp"
#include "butcher/vector_field.hpp"

namespace butcher {

// Finite rational linear combination of canonical trees; zero coefficients
// are pruned, equality is coefficient-wise.
struct TreeCombination {
  std::map<Tree, Rational> terms;

  TreeCombination() = default;
  explicit TreeCombination(const Tree& t) { terms[t] = 1; }

  void add(const Tree& t, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms.emplace(t, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
  }

  bool zero() const { return terms.empty(); }
  bool operator==(const TreeCombination& o) const { return terms == o.terms; }
};

inline TreeCombination operator+(TreeCombination a, const TreeCombination& b) {
  for (const auto& [t, c] : b.terms) a.add(t, c);
  return a;
}

inline TreeCombination operator-(TreeCombination a, const TreeCombination& b) {
  for (const auto& [t, c] : b.terms) a.add(t, -c);
  return a;
}

inline TreeCombination operator*(const Rational& s, const TreeCombination& a) {
  TreeCombination r;
  for (const auto& [t, c] : a.terms) r.add(t, s * c);
  return r;
}

// Grafting t1 |> t2: attach the root of t1 with a new edge to each node of
// t2 and add the results; multiplicities accumulate as integer coefficients.
inline TreeCombination graft(const Tree& t1, const Tree& t2) {
  TreeCombination out;
  // attach at the root of t2
  std::vector<Tree> ch = t2.children();
  ch.push_back(t1);
  out.add(Tree::with_children(std::move(ch)), 1);
  // attach inside each child
  for (std::size_t i = 0; i < t2.children().size(); ++i) {
    for (const auto& [g, c] : graft(t1, t2.children()[i]).terms) {
      std::vector<Tree> rebuilt = t2.children();
      rebuilt[i] = g;
      out.add(Tree::with_children(std::move(rebuilt)), c);
    }
  }
  return out;
}

// Bilinear extension of grafting to combinations.
inline TreeCombination graft(const TreeCombination& a, const TreeCombination& b) {
  TreeCombination out;
  for (const auto& [ta, ca] : a.terms)
    for (const auto& [tb, cb] : b.terms)
      for (const auto& [g, c] : graft(ta, tb).terms) out.add(g, ca * cb * c);
  return out;
}

// [a |> (b |> c) - (a |> b) |> c] - [b |> (a |> c) - (b |> a) |> c];
// identically zero on the free pre-Lie algebra of trees.
inline TreeCombination prelie_defect(const TreeCombination& a, const TreeCombination& b,
                                     const TreeCombination& c) {
  TreeCombination left = graft(a, graft(b, c)) - graft(graft(a, b), c);
  TreeCombination right = graft(b, graft(a, c)) - graft(graft(b, a), c);
  return left - right;
}

// Flat-connection covariant derivative: f |> g = g'(f).
inline Vec vf_graft(const VectorField& f, const VectorField& g, const Vec& x) {
  if (f.dim != g.dim) throw std::invalid_argument("field dimension mismatch");
  return g.derivative(x, {f(x)});
}

// Checks F(t1 |> t2) = F(t1) |> F(t2) at the sample points.
inline bool morphism_check(const Tree& t1, const Tree& t2, const VectorField& f,
                           const std::vector<Vec>& points, double tol) {
  TreeCombination grafted = graft(t1, t2);
  VectorField f1 = tree_differential_field(t1, f);
  VectorField f2 = tree_differential_field(t2, f);
  for (const Vec& x : points) {
    Vec lhs(x.size(), 0.0);
    for (const auto& [t, c] : grafted.terms)
      lhs += to_double(c) * elementary_differential(t, f, x);
    Vec rhs = vf_graft(f1, f2, x);
    if (norm_inf(lhs - rhs) > tol) return false;
  }
  return true;
}

}  // namespace butcher

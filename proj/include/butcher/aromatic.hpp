#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "butcher/elementary.hpp"
#include "butcher/linalg.hpp"
#include "butcher/tree.hpp"
#include "butcher/vector_field.hpp"

namespace butcher {

inline constexpr int kAromaticOrderCap = 8;

// Canonical shape of a total function {2..n} -> {1..n}: one rooted tree at
// node 1 plus unicyclic components.  parent[k] is the image of node k+2;
// the stored labeling is the lexicographically minimal parent sequence over
// all relabelings of {2..n}.
struct AromaticTree {
  int n = 1;
  std::vector<int> parent;  // size n-1, values in 1..n

  // "p2,p3,...,pn"; the bare root encodes as "-".
  std::string encoding() const {
    if (parent.empty()) return "-";
    std::string s;
    for (std::size_t i = 0; i < parent.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(parent[i]);
    }
    return s;
  }

  bool operator==(const AromaticTree& o) const { return n == o.n && parent == o.parent; }
  bool operator<(const AromaticTree& o) const {
    if (n != o.n) return n < o.n;
    return parent < o.parent;
  }
};

// Lexicographically minimal representative over all relabelings fixing node 1.
inline AromaticTree canonicalize_aromatic(int n, const std::vector<int>& parent) {
  if (n < 1) throw std::invalid_argument("node count must be positive");
  if (static_cast<int>(parent.size()) != n - 1)
    throw std::invalid_argument("parent map must cover nodes 2..n");
  for (int p : parent)
    if (p < 1 || p > n) throw std::invalid_argument("parent value out of range");
  if (n == 1) return AromaticTree{1, {}};

  std::vector<int> perm(static_cast<std::size_t>(n) - 1);
  std::iota(perm.begin(), perm.end(), 2);  // images of nodes 2..n
  std::vector<int> best;
  std::vector<int> rel(static_cast<std::size_t>(n) + 1);
  do {
    rel[1] = 1;
    for (int v = 2; v <= n; ++v) rel[static_cast<std::size_t>(v)] = perm[static_cast<std::size_t>(v) - 2];
    std::vector<int> seq(static_cast<std::size_t>(n) - 1);
    for (int v = 2; v <= n; ++v)
      seq[static_cast<std::size_t>(rel[static_cast<std::size_t>(v)]) - 2] =
          rel[static_cast<std::size_t>(parent[static_cast<std::size_t>(v) - 2])];
    if (best.empty() || seq < best) best = std::move(seq);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return AromaticTree{n, std::move(best)};
}

namespace detail {

// Appends a rooted tree component to a parent map under construction.
// `next` is the next free label; the tree's root takes label `root_label`
// (0 means: allocate a fresh label for the root).
inline int append_tree(const Tree& t, int root_label, std::vector<int>& parent, int& next) {
  int my = root_label ? root_label : next++;
  for (const Tree& c : t.children()) {
    int cl = next++;
    parent[static_cast<std::size_t>(cl) - 2] = my;
    append_tree(c, cl, parent, next);
  }
  return my;
}

// A unicyclic component: a directed cycle of length cycle_len with a rooted
// tree hanging at each cycle node; isomorphic iff equal up to rotation.
struct Unicyclic {
  int size = 0;
  std::vector<Tree> hangs;  // one per cycle position

  std::vector<std::string> key() const {
    std::vector<std::string> k;
    k.reserve(hangs.size());
    for (const Tree& t : hangs) k.push_back(t.encoding());
    return k;
  }
};

inline std::vector<Unicyclic> unicyclic_components(int m) {
  std::vector<std::vector<Tree>> trees_by_order(static_cast<std::size_t>(m) + 1);
  for (int k = 1; k <= m; ++k) trees_by_order[static_cast<std::size_t>(k)] = enumerate_trees(k);

  std::set<std::vector<std::string>> seen;
  std::vector<Unicyclic> out;
  std::vector<Tree> seq;
  // all cycle lengths, all tuples of hanging trees; keep minimal rotations
  auto emit = [&](int len) {
    std::vector<std::string> key(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) key[static_cast<std::size_t>(i)] = seq[static_cast<std::size_t>(i)].encoding();
    std::vector<std::string> minrot = key;
    for (int r = 1; r < len; ++r) {
      std::rotate(key.begin(), key.begin() + 1, key.end());
      if (key < minrot) minrot = key;
    }
    if (seen.insert(minrot).second) {
      // rebuild the minimal rotation as trees
      std::vector<Tree> hangs;
      for (const std::string& e : minrot) hangs.push_back(Tree::parse(e));
      out.push_back(Unicyclic{m, std::move(hangs)});
    }
  };
  std::function<void(int, int)> rec = [&](int len, int remaining) {
    if (static_cast<int>(seq.size()) == len) {
      if (remaining == 0) emit(len);
      return;
    }
    int slots_left = len - static_cast<int>(seq.size());
    for (int k = 1; k + (slots_left - 1) <= remaining; ++k)
      for (const Tree& t : trees_by_order[static_cast<std::size_t>(k)]) {
        seq.push_back(t);
        rec(len, remaining - k);
        seq.pop_back();
      }
  };
  for (int len = 1; len <= m; ++len) rec(len, m);
  return out;
}

inline AromaticTree assemble(const Tree& root_tree, const std::vector<Unicyclic>& comps) {
  int n = root_tree.order();
  for (const Unicyclic& u : comps) n += u.size;
  std::vector<int> parent(static_cast<std::size_t>(n) - 1, 0);
  int next = 2;
  append_tree(root_tree, 1, parent, next);
  for (const Unicyclic& u : comps) {
    int len = static_cast<int>(u.hangs.size());
    std::vector<int> cyc(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i)
      cyc[static_cast<std::size_t>(i)] = append_tree(u.hangs[static_cast<std::size_t>(i)], 0, parent, next);
    for (int i = 0; i < len; ++i)
      parent[static_cast<std::size_t>(cyc[static_cast<std::size_t>(i)]) - 2] =
          cyc[static_cast<std::size_t>((i + 1) % len)];
  }
  return canonicalize_aromatic(n, parent);
}

}  // namespace detail

// All distinct aromatic shapes with n nodes, in canonical order.
inline std::vector<AromaticTree> enumerate_aromatic(int n) {
  if (n < 1 || n > kAromaticOrderCap) throw std::out_of_range("aromatic order out of range");
  // one rooted-tree part (at node 1) plus a multiset of unicyclic components
  std::vector<detail::Unicyclic> all_comps;
  for (int m = 1; m < n; ++m) {
    auto cm = detail::unicyclic_components(m);
    all_comps.insert(all_comps.end(), cm.begin(), cm.end());
  }
  std::set<AromaticTree> out;
  std::vector<detail::Unicyclic> chosen;
  std::function<void(int, std::size_t, int)> pick = [&](int tree_order, std::size_t start,
                                                        int remaining) {
    if (remaining == 0) {
      for (const Tree& rt : enumerate_trees(tree_order)) out.insert(detail::assemble(rt, chosen));
      return;
    }
    for (std::size_t i = start; i < all_comps.size(); ++i) {
      if (all_comps[i].size > remaining) continue;
      chosen.push_back(all_comps[i]);
      pick(tree_order, i, remaining - all_comps[i].size);
      chosen.pop_back();
    }
  };
  for (int k = 1; k <= n; ++k) pick(k, 0, n - k);
  return {out.begin(), out.end()};
}

// Embeds a rooted tree as the loop-free aromatic shape.
inline AromaticTree from_rooted_tree(const Tree& t) {
  int n = t.order();
  std::vector<int> parent(static_cast<std::size_t>(std::max(n - 1, 0)), 0);
  int next = 2;
  detail::append_tree(t, 1, parent, next);
  return canonicalize_aromatic(n, parent);
}

// Generalized elementary differential: contract the partial-derivative
// tensors prod_v f^{i_v}_{(i_u : u -> v)} over all internal indices; the
// root's index is the free output index.
inline Vec aromatic_differential(const AromaticTree& A, const VectorField& f, const Vec& x) {
  int dim = f.dim;
  if (dim > 6) throw std::invalid_argument("aromatic differentials support dim <= 6");
  if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("point dimension mismatch");
  int n = A.n;

  std::vector<std::vector<int>> in(static_cast<std::size_t>(n) + 1);
  for (int v = 2; v <= n; ++v)
    in[static_cast<std::size_t>(A.parent[static_cast<std::size_t>(v) - 2])].push_back(v);
  int max_deg = 0;
  for (int v = 1; v <= n; ++v) max_deg = std::max(max_deg, static_cast<int>(in[static_cast<std::size_t>(v)].size()));

  // full derivative tensors D_k[i][j1..jk], from directional derivatives at
  // basis vectors
  std::vector<std::vector<double>> tensors(static_cast<std::size_t>(max_deg) + 1);
  for (int k = 0; k <= max_deg; ++k) {
    std::size_t jcount = 1;
    for (int q = 0; q < k; ++q) jcount *= static_cast<std::size_t>(dim);
    std::vector<double>& D = tensors[static_cast<std::size_t>(k)];
    D.resize(static_cast<std::size_t>(dim) * jcount);
    std::vector<int> js(static_cast<std::size_t>(k), 0);
    for (std::size_t flat = 0; flat < jcount; ++flat) {
      std::size_t rem = flat;
      for (int q = k - 1; q >= 0; --q) {
        js[static_cast<std::size_t>(q)] = static_cast<int>(rem % static_cast<std::size_t>(dim));
        rem /= static_cast<std::size_t>(dim);
      }
      std::vector<Vec> dirs;
      for (int q = 0; q < k; ++q) {
        Vec e(static_cast<std::size_t>(dim), 0.0);
        e[static_cast<std::size_t>(js[static_cast<std::size_t>(q)])] = 1.0;
        dirs.push_back(std::move(e));
      }
      Vec val = f.derivative(x, dirs);
      for (int i = 0; i < dim; ++i)
        D[static_cast<std::size_t>(i) * jcount + flat] = val[static_cast<std::size_t>(i)];
    }
  }

  // sum over all index assignments
  double combos = std::pow(static_cast<double>(dim), n);
  if (combos > 5e7) throw std::invalid_argument("contraction too large");
  std::size_t total = static_cast<std::size_t>(combos);
  Vec out(static_cast<std::size_t>(dim), 0.0);
  std::vector<int> idx(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int v = n; v >= 1; --v) {
      idx[static_cast<std::size_t>(v)] = static_cast<int>(rem % static_cast<std::size_t>(dim));
      rem /= static_cast<std::size_t>(dim);
    }
    double term = 1.0;
    for (int v = 1; v <= n && term != 0.0; ++v) {
      const auto& nb = in[static_cast<std::size_t>(v)];
      std::size_t k = nb.size();
      std::size_t jflat = 0;
      for (int u : nb) jflat = jflat * static_cast<std::size_t>(dim) + static_cast<std::size_t>(idx[static_cast<std::size_t>(u)]);
      std::size_t jcount = 1;
      for (std::size_t q = 0; q < k; ++q) jcount *= static_cast<std::size_t>(dim);
      term *= tensors[k][static_cast<std::size_t>(idx[static_cast<std::size_t>(v)]) * jcount + jflat];
    }
    out[static_cast<std::size_t>(idx[1])] += term;
  }
  return out;
}

// A F_A(f)(x) = F_A(phi.f)(phi(x)) at every sample point.
inline bool aromatic_equivariance_check(const AromaticTree& A, const VectorField& f,
                                        const AffineMap& phi, const std::vector<Vec>& points,
                                        double tol) {
  VectorField g = apply_affine_to_field(phi, f);  // throws on singular phi
  for (const Vec& x : points) {
    Vec lhs = mat_vec(phi.A, aromatic_differential(A, f, x));
    Vec rhs = aromatic_differential(A, g, phi(x));
    if (norm_inf(lhs - rhs) > tol) return false;
  }
  return true;
}

struct RelatedFieldPair {
  VectorField f;    // on V
  VectorField g;    // on W
  AffineMap phi;    // V -> W
};

// g(A x + b) = A f(x) at every sample point (points live in V).
inline bool affine_related_check(const RelatedFieldPair& pair, const std::vector<Vec>& points,
                                 double tol) {
  for (const Vec& x : points) {
    Vec lhs = pair.g(pair.phi(x));
    Vec rhs = mat_vec(pair.phi.A, pair.f(x));
    if (norm_inf(lhs - rhs) > tol) return false;
  }
  return true;
}

// x1 = x0 + h f(x0) (1 + h (div f)(x0)): affine-equivariant but not a
// B-series method.
inline Vec aromatic_first_order_step(const VectorField& f, const Vec& x0, double h) {
  double amp = 1.0 + h * divergence(f, x0);
  return x0 + (h * amp) * f(x0);
}

struct KnockoutReport {
  double self_loop_on_f1 = 0.0;  // first component of f1 (div f1) at the sample
  double self_loop_on_f2 = 0.0;
  bool aromatic_term_violates = false;  // the self-loop term breaks relatedness
  bool trees_transport_ok = false;      // rooted trees of order <= 3 respect it

  bool pass() const { return aromatic_term_violates && trees_transport_ok; }
};

// The related pair of the affine-relatedness separation: f1: (1, x2) on R^2,
// f2: (1) on R, phi(x1,x2) = x1.  The self-loop aromatic term takes values
// 1 vs 0, so it cannot appear in a relatedness-preserving expansion, while
// every pure rooted-tree differential transports correctly.
inline KnockoutReport relatedness_knockout_demo(double tol = 1e-10) {
  VectorField f1 = polynomial_field(2, {{{1.0, {0, 0}}}, {{1.0, {0, 1}}}});
  VectorField f2 = polynomial_field(1, {{{1.0, {0}}}});
  Matrix A(1, 2);
  A(0, 0) = 1.0;
  AffineMap phi{A, Vec{0.0}};

  std::vector<Vec> points = {{0.3, -0.7}, {1.2, 0.4}, {-0.5, 2.0}};
  AromaticTree self_loop = canonicalize_aromatic(2, {2});

  KnockoutReport rep;
  rep.self_loop_on_f1 = aromatic_differential(self_loop, f1, points[0])[0];
  rep.self_loop_on_f2 = aromatic_differential(self_loop, f2, {points[0][0]})[0];
  rep.aromatic_term_violates =
      std::abs(rep.self_loop_on_f1 - rep.self_loop_on_f2) > tol;

  rep.trees_transport_ok = true;
  for (int p = 1; p <= 3; ++p)
    for (const Tree& t : enumerate_trees(p))
      for (const Vec& x : points) {
        Vec lhs = mat_vec(A, elementary_differential(t, f1, x));
        Vec rhs = elementary_differential(t, f2, phi(x));
        if (norm_inf(lhs - rhs) > tol) rep.trees_transport_ok = false;
      }
  return rep;
}

}  // namespace butcher

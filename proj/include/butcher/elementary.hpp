#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "butcher/linalg.hpp"
#include "butcher/tree.hpp"
#include "butcher/vector_field.hpp"

namespace butcher {

// F(leaf)(x) = f(x); F([t1,...,tk])(x) = f^(k)(x)(F(t1)(x), ..., F(tk)(x)).
inline Vec elementary_differential(const Tree& t, const VectorField& f, const Vec& x) {
  const auto& ch = t.children();
  if (ch.empty()) return f(x);
  std::vector<Vec> args;
  args.reserve(ch.size());
  for (const Tree& c : ch) args.push_back(elementary_differential(c, f, x));
  return f.derivative(x, args);
}

// Directional derivative of x -> F(t)(x) along v, by the product rule on the
// recursion.  Needs f's derivatives one order deeper than F(t) itself.
inline Vec elementary_differential_jvp(const Tree& t, const VectorField& f, const Vec& x,
                                       const Vec& v) {
  const auto& ch = t.children();
  if (ch.empty()) return f.derivative(x, {v});
  std::vector<Vec> args;
  args.reserve(ch.size());
  for (const Tree& c : ch) args.push_back(elementary_differential(c, f, x));
  std::vector<Vec> extended = args;
  extended.push_back(v);
  Vec r = f.derivative(x, extended);
  for (std::size_t i = 0; i < ch.size(); ++i) {
    std::vector<Vec> modified = args;
    modified[i] = elementary_differential_jvp(ch[i], f, x, v);
    r += f.derivative(x, modified);
  }
  return r;
}

// Linear combination of elementary differentials wrapped as a VectorField.
// First derivatives use the analytic product-rule recursion; higher ones fall
// back to finite differences of the composite value.
inline VectorField combination_field(std::vector<std::pair<Tree, double>> terms,
                                     const VectorField& f) {
  auto ts = std::make_shared<std::vector<std::pair<Tree, double>>>(std::move(terms));
  VectorField g;
  g.dim = f.dim;
  g.value = [ts, f](const Vec& x) {
    Vec r(x.size(), 0.0);
    for (const auto& [t, w] : *ts) r += w * elementary_differential(t, f, x);
    return r;
  };
  g.deriv = [ts, f, value = g.value](const Vec& x, const std::vector<Vec>& dirs) {
    if (dirs.size() == 1) {
      Vec r(x.size(), 0.0);
      for (const auto& [t, w] : *ts) r += w * elementary_differential_jvp(t, f, x, dirs[0]);
      return r;
    }
    return detail::fd_directional(value, x, dirs);
  };
  return g;
}

inline VectorField tree_differential_field(const Tree& t, const VectorField& f) {
  return combination_field({{t, 1.0}}, f);
}

// True iff grad H . g vanishes (within tol) at every sample point.
inline bool is_energy_preserving_sample(const VectorField& g, const ScalarFunction& H,
                                        const std::vector<Vec>& points, double tol) {
  if (points.empty()) throw std::invalid_argument("no sample points");
  for (const Vec& x : points)
    if (std::abs(dot(H.gradient(x), g(x))) > tol) return false;
  return true;
}

// Locally-exact-gradient criterion: the Jacobian of x -> J g(x) must be
// symmetric (entrywise within tol) at every sample point.
inline bool is_hamiltonian_sample(const VectorField& g, const Matrix& J,
                                  const std::vector<Vec>& points, double tol) {
  if (J.rows != J.cols || J.rows != g.dim)
    throw std::invalid_argument("J dimension mismatch");
  for (int i = 0; i < J.rows; ++i)
    for (int j = 0; j < J.cols; ++j)
      if (std::abs(J(i, j) + J(j, i)) > 1e-14)
        throw std::invalid_argument("J is not antisymmetric");
  inverse(J);  // throws if singular
  int n = g.dim;
  for (const Vec& x : points) {
    Matrix M(n, n);
    for (int j = 0; j < n; ++j) {
      Vec e(static_cast<std::size_t>(n), 0.0);
      e[static_cast<std::size_t>(j)] = 1.0;
      Vec col = mat_vec(J, g.derivative(x, {e}));
      for (int i = 0; i < n; ++i) M(i, j) = col[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::abs(M(i, j) - M(j, i)) > tol) return false;
  }
  return true;
}

}  // namespace butcher

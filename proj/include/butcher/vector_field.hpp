#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "butcher/linalg.hpp"

namespace butcher {

namespace detail {

// Nested central differences: differentiates along dirs.back() with step
// eps^(1/(k+2)) for the current derivative order k, recursing on the rest.
inline Vec fd_directional(const std::function<Vec(const Vec&)>& value, const Vec& x,
                          const std::vector<Vec>& dirs) {
  if (dirs.empty()) return value(x);
  std::size_t k = dirs.size();
  double eps = std::pow(std::numeric_limits<double>::epsilon(),
                        1.0 / static_cast<double>(k + 2));
  const Vec& v = dirs.back();
  std::vector<Vec> rest(dirs.begin(), dirs.end() - 1);
  Vec xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] += eps * v[i];
    xm[i] -= eps * v[i];
  }
  Vec fp = fd_directional(value, xp, rest);
  Vec fm = fd_directional(value, xm, rest);
  Vec r(fp.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (fp[i] - fm[i]) / (2.0 * eps);
  return r;
}

}  // namespace detail

// A smooth vector field on R^dim.  `deriv` evaluates the k-th derivative as a
// multilinear map, f^(k)(x)(v1,...,vk); when absent, nested central
// differences on `value` are used.  Evaluators must be pure.
struct VectorField {
  int dim = 0;
  std::function<Vec(const Vec&)> value;
  std::function<Vec(const Vec&, const std::vector<Vec>&)> deriv;

  Vec operator()(const Vec& x) const {
    if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("point dimension mismatch");
    return value(x);
  }

  Vec derivative(const Vec& x, const std::vector<Vec>& dirs) const {
    if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("point dimension mismatch");
    for (const Vec& d : dirs)
      if (static_cast<int>(d.size()) != dim) throw std::invalid_argument("direction dimension mismatch");
    if (dirs.empty()) return value(x);
    if (deriv) return deriv(x, dirs);
    return detail::fd_directional(value, x, dirs);
  }

  bool analytic() const { return static_cast<bool>(deriv); }
};

inline double divergence(const VectorField& f, const Vec& x) {
  double d = 0.0;
  for (int j = 0; j < f.dim; ++j) {
    Vec e(static_cast<std::size_t>(f.dim), 0.0);
    e[static_cast<std::size_t>(j)] = 1.0;
    d += f.derivative(x, {e})[static_cast<std::size_t>(j)];
  }
  return d;
}

// --- polynomial fields (exact analytic derivatives) ---

struct Monomial {
  double coeff = 0.0;
  std::vector<int> expo;  // one exponent per coordinate
};

namespace detail {

inline double monomial_deriv(double coeff, std::vector<int> expo, const Vec& x,
                             const std::vector<Vec>& dirs, std::size_t k) {
  if (k == 0) {
    double v = coeff;
    for (std::size_t j = 0; j < expo.size(); ++j)
      for (int e = 0; e < expo[j]; ++e) v *= x[j];
    return v;
  }
  const Vec& d = dirs[k - 1];
  double sum = 0.0;
  for (std::size_t j = 0; j < expo.size(); ++j) {
    if (expo[j] == 0 || d[j] == 0.0) continue;
    std::vector<int> e2 = expo;
    e2[j] -= 1;
    sum += monomial_deriv(coeff * expo[j], std::move(e2), x, dirs, k - 1) * d[j];
  }
  return sum;
}

}  // namespace detail

// Vector field with polynomial components; derivatives of any order are exact.
inline VectorField polynomial_field(int dim, std::vector<std::vector<Monomial>> comps) {
  VectorField f;
  f.dim = dim;
  auto c = std::make_shared<std::vector<std::vector<Monomial>>>(std::move(comps));
  f.value = [c, dim](const Vec& x) {
    Vec r(static_cast<std::size_t>(dim), 0.0);
    for (std::size_t i = 0; i < c->size(); ++i)
      for (const Monomial& m : (*c)[i])
        r[i] += detail::monomial_deriv(m.coeff, m.expo, x, {}, 0);
    return r;
  };
  f.deriv = [c, dim](const Vec& x, const std::vector<Vec>& dirs) {
    Vec r(static_cast<std::size_t>(dim), 0.0);
    for (std::size_t i = 0; i < c->size(); ++i)
      for (const Monomial& m : (*c)[i])
        r[i] += detail::monomial_deriv(m.coeff, m.expo, x, dirs, dirs.size());
    return r;
  };
  return f;
}

inline VectorField linear_field(const Matrix& A) {
  std::vector<std::vector<Monomial>> comps(static_cast<std::size_t>(A.rows));
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) {
      if (A(i, j) == 0.0) continue;
      std::vector<int> e(static_cast<std::size_t>(A.cols), 0);
      e[static_cast<std::size_t>(j)] = 1;
      comps[static_cast<std::size_t>(i)].push_back({A(i, j), e});
    }
  return polynomial_field(A.cols, std::move(comps));
}

// --- built-in test corpus ---

// f(x) = x^2 in one dimension.
inline VectorField poly1d() { return polynomial_field(1, {{{1.0, {2}}}}); }

inline Matrix linear2d_matrix() {
  Matrix A(2, 2);
  A(0, 0) = 1.0;
  A(0, 1) = 2.0;
  A(1, 0) = -1.0;
  A(1, 1) = 1.0;
  return A;
}

inline VectorField linear2d() { return linear_field(linear2d_matrix()); }

// Pendulum: x = (q, p), H = p^2/2 - cos q, f = (p, -sin q).
// All derivatives act only through p (first order) and q (any order).
inline VectorField pendulum() {
  VectorField f;
  f.dim = 2;
  f.value = [](const Vec& x) { return Vec{x[1], -std::sin(x[0])}; };
  f.deriv = [](const Vec& x, const std::vector<Vec>& dirs) {
    std::size_t k = dirs.size();
    double c0 = (k == 1) ? dirs[0][1] : 0.0;
    // d^k/dq^k of -sin(q), times the q-components of the directions
    double base = 0.0;
    switch (k % 4) {
      case 0: base = -std::sin(x[0]); break;
      case 1: base = -std::cos(x[0]); break;
      case 2: base = std::sin(x[0]); break;
      case 3: base = std::cos(x[0]); break;
    }
    double c1 = base;
    for (const Vec& d : dirs) c1 *= d[0];
    return Vec{c0, c1};
  };
  return f;
}

struct ScalarFunction {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

inline ScalarFunction pendulum_energy() {
  ScalarFunction H;
  H.value = [](const Vec& x) { return 0.5 * x[1] * x[1] - std::cos(x[0]); };
  H.gradient = [](const Vec& x) { return Vec{std::sin(x[0]), x[1]}; };
  return H;
}

// Symplectic structure matrix J with f = J^{-1} grad H for the pendulum.
inline Matrix symplectic_j2() {
  Matrix J(2, 2);
  J(0, 1) = -1.0;
  J(1, 0) = 1.0;
  return J;
}

// Lotka-Volterra with unit rates: (x - x y, x y - y).
inline VectorField lotka() {
  return polynomial_field(
      2, {{{1.0, {1, 0}}, {-1.0, {1, 1}}}, {{1.0, {1, 1}}, {-1.0, {0, 1}}}});
}

inline VectorField field_by_name(const std::string& name) {
  if (name == "poly1d") return poly1d();
  if (name == "linear2d") return linear2d();
  if (name == "pendulum") return pendulum();
  if (name == "lotka") return lotka();
  throw std::out_of_range("unknown field name: " + name);
}

// phi . f = (phi') o f o phi^{-1}: the field x -> A f(A^{-1}(x - b)).
// Derivatives transform as A f^(k)(A^{-1}(x-b))(A^{-1}v1, ..., A^{-1}vk).
inline VectorField apply_affine_to_field(const AffineMap& phi, const VectorField& f) {
  if (phi.A.rows != phi.A.cols || phi.A.rows != f.dim)
    throw std::invalid_argument("affine action requires a square map of matching dimension");
  Matrix Ainv = inverse(phi.A);
  auto pull = [Ainv, b = phi.b](const Vec& x) {
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - b[i];
    return mat_vec(Ainv, y);
  };
  VectorField g;
  g.dim = f.dim;
  g.value = [f, A = phi.A, pull](const Vec& x) { return mat_vec(A, f(pull(x))); };
  g.deriv = [f, A = phi.A, Ainv, pull](const Vec& x, const std::vector<Vec>& dirs) {
    std::vector<Vec> pulled;
    pulled.reserve(dirs.size());
    for (const Vec& d : dirs) pulled.push_back(mat_vec(Ainv, d));
    return mat_vec(A, f.derivative(pull(x), pulled));
  };
  return g;
}

}  // namespace butcher

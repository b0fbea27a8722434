#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "butcher/rational.hpp"
#include "butcher/series.hpp"
#include "butcher/tree.hpp"
#include "butcher/vector_field.hpp"

namespace butcher {

struct ConvergenceError : std::runtime_error {
  double residual;
  explicit ConvergenceError(double res)
      : std::runtime_error("fixed-point iteration did not converge; residual " +
                           std::to_string(res)),
        residual(res) {}
};

// Runge-Kutta coefficients.  Floating entries are always present; the exact
// rational entries are engaged only in exact mode.
struct Tableau {
  int stages = 0;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::optional<std::pair<std::vector<std::vector<Rational>>, std::vector<Rational>>> exact;

  bool exact_mode() const { return exact.has_value(); }
};

inline Tableau make_exact_tableau(std::vector<std::vector<Rational>> a,
                                  std::vector<Rational> b) {
  Tableau t;
  t.stages = static_cast<int>(b.size());
  t.a.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (a[i].size() != b.size()) throw std::invalid_argument("ragged tableau");
    for (const Rational& v : a[i]) t.a[i].push_back(to_double(v));
    t.b.push_back(to_double(b[i]));
  }
  t.exact = {std::move(a), std::move(b)};
  return t;
}

inline Tableau euler_tableau() { return make_exact_tableau({{Rational(0)}}, {Rational(1)}); }

inline Tableau implicit_midpoint_tableau() {
  return make_exact_tableau({{Rational(1, 2)}}, {Rational(1)});
}

inline Tableau rk4_tableau() {
  Rational z(0), h(1, 2);
  return make_exact_tableau(
      {{z, z, z, z}, {h, z, z, z}, {z, h, z, z}, {z, z, Rational(1), z}},
      {Rational(1, 6), Rational(1, 3), Rational(1, 3), Rational(1, 6)});
}

namespace detail {

// Elementary-weight stage recursion: g_i(leaf)=1,
// g_i([t1..tk]) = prod_m sum_j a_ij g_j(t_m).
template <class S>
std::vector<S> stage_weights(const std::vector<std::vector<S>>& a, const Tree& t) {
  std::size_t nu = a.size();
  std::vector<S> g(nu, S(1));
  for (const Tree& c : t.children()) {
    std::vector<S> gc = stage_weights(a, c);
    for (std::size_t i = 0; i < nu; ++i) {
      S s(0);
      for (std::size_t j = 0; j < nu; ++j) s += a[i][j] * gc[j];
      g[i] *= s;
    }
  }
  return g;
}

template <class S>
S weight(const std::vector<std::vector<S>>& a, const std::vector<S>& b, const Tree& t) {
  std::vector<S> g = stage_weights(a, t);
  S phi(0);
  for (std::size_t i = 0; i < b.size(); ++i) phi += b[i] * g[i];
  return phi;
}

}  // namespace detail

inline double elementary_weight(const Tableau& t, const Tree& tree) {
  return detail::weight(t.a, t.b, tree);
}

inline Rational elementary_weight_exact(const Tableau& t, const Tree& tree) {
  if (!t.exact_mode()) throw std::invalid_argument("tableau is not in exact mode");
  return detail::weight(t.exact->first, t.exact->second, tree);
}

// The B-series of one step: c(t) = Phi(t)/sigma(t).
inline BSeries rk_to_bseries(const Tableau& t, int n, int cap = kDefaultOrderCap) {
  if (!t.exact_mode())
    throw std::invalid_argument("rk_to_bseries requires an exact-mode tableau");
  BSeries s = zero_filled_series(n, cap);
  for (auto& [tree, c] : s.coeff) c = elementary_weight_exact(t, tree) / symmetry(tree);
  return s;
}

// One order condition per tree of order <= p: Phi(t) must equal 1/gamma(t).
inline std::vector<std::pair<Tree, Rational>> order_conditions(int p, int cap = kDefaultOrderCap) {
  std::vector<std::pair<Tree, Rational>> out;
  for (const Tree& t : trees_up_to(p, cap)) out.emplace_back(t, Rational(1, density(t)));
  return out;
}

inline constexpr double kFloatingConditionTol = 1e-12;

struct OrderCheckResult {
  int order = 0;                        // largest p with all conditions satisfied
  std::vector<std::string> violations;  // encodings of the first violated conditions
  int conditions_checked = 0;
  int conditions_passed = 0;
};

inline OrderCheckResult check_order(const Tableau& t, int p_max, int cap = kDefaultOrderCap) {
  OrderCheckResult res;
  for (int p = 1; p <= p_max; ++p) {
    std::vector<std::string> bad;
    for (const Tree& tree : enumerate_trees(p, cap)) {
      ++res.conditions_checked;
      bool ok;
      if (t.exact_mode()) {
        ok = elementary_weight_exact(t, tree) * density(tree) == 1;
      } else {
        ok = std::abs(elementary_weight(t, tree) * static_cast<double>(density(tree)) - 1.0) <=
             kFloatingConditionTol;
      }
      if (ok)
        ++res.conditions_passed;
      else
        bad.push_back(tree.encoding());
    }
    if (!bad.empty()) {
      if (res.violations.empty()) res.violations = std::move(bad);
      // keep counting the remaining conditions for reporting
    } else if (res.violations.empty()) {
      res.order = p;
    }
  }
  return res;
}

namespace detail {

// Legendre polynomial P_n and derivative on [-1,1], by recurrence.
inline std::pair<long double, long double> legendre(int n, long double x) {
  long double p0 = 1.0L, p1 = x;
  if (n == 0) return {p0, 0.0L};
  for (int k = 2; k <= n; ++k) {
    long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  long double dp = n * (x * p1 - p0) / (x * x - 1.0L);
  return {p1, dp};
}

// Gauss-Legendre nodes/weights on [0,1].
inline std::pair<std::vector<long double>, std::vector<long double>> gauss_rule(int n) {
  std::vector<long double> nodes(n), weights(n);
  for (int i = 0; i < n; ++i) {
    constexpr long double pi = 3.141592653589793238462643383279502884L;
    long double x = std::cos(pi * (i + 0.75L) / (n + 0.5L));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre(n, x);
      long double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    auto [p, dp] = legendre(n, x);
    (void)p;
    nodes[n - 1 - i] = (1.0L + x) / 2.0L;
    weights[n - 1 - i] = 1.0L / ((1.0L - x * x) * dp * dp);
  }
  return {nodes, weights};
}

// Solves sum_j m[i][j] x[j] = rhs[i] by Gaussian elimination with pivoting.
inline std::vector<long double> solve_dense(std::vector<std::vector<long double>> m,
                                            std::vector<long double> rhs) {
  int n = static_cast<int>(rhs.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      long double f = m[r][col] / m[col][col];
      for (int j = col; j < n; ++j) m[r][j] -= f * m[col][j];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<long double> x(rhs.size());
  for (int i = 0; i < n; ++i) x[i] = rhs[i] / m[i][i];
  return x;
}

}  // namespace detail

// Collocation at the roots of the degree-s shifted Legendre polynomial:
// b from the quadrature conditions, a row-wise from the collocation
// conditions sum_j a_ij c_j^k = c_i^{k+1}/(k+1).  s=1 is the implicit
// midpoint rule and stays exact.
inline Tableau gauss_tableau(int s) {
  if (s < 1 || s > 3) throw std::out_of_range("gauss_tableau supports 1..3 stages");
  if (s == 1) return implicit_midpoint_tableau();

  auto [c, w] = detail::gauss_rule(s);
  (void)w;
  std::vector<std::vector<long double>> vand(s, std::vector<long double>(s));
  for (int k = 0; k < s; ++k)
    for (int j = 0; j < s; ++j) vand[k][j] = std::pow(c[j], static_cast<long double>(k));

  std::vector<long double> rhs(s);
  for (int k = 0; k < s; ++k) rhs[k] = 1.0L / (k + 1);
  std::vector<long double> b = detail::solve_dense(vand, rhs);

  Tableau t;
  t.stages = s;
  t.b.assign(b.begin(), b.end());
  t.a.resize(s);
  for (int i = 0; i < s; ++i) {
    for (int k = 0; k < s; ++k) rhs[k] = std::pow(c[i], static_cast<long double>(k + 1)) / (k + 1);
    std::vector<long double> row = detail::solve_dense(vand, rhs);
    t.a[i].assign(row.begin(), row.end());
  }
  return t;
}

// One RK step; implicit stage equations are solved by (optionally damped)
// fixed-point iteration from the initial guess X_i = x.  Explicit tableaux
// settle within stages+1 sweeps.
inline Vec rk_step(const Tableau& t, const VectorField& f, const Vec& x, double h, double tol,
                   int max_iter, double damping = 1.0) {
  if (h <= 0 || tol <= 0) throw std::invalid_argument("h and tol must be positive");
  std::size_t nu = static_cast<std::size_t>(t.stages);
  std::vector<Vec> stages(nu, x);
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    std::vector<Vec> fs(nu);
    for (std::size_t j = 0; j < nu; ++j) fs[j] = f(stages[j]);
    residual = 0.0;
    for (std::size_t i = 0; i < nu; ++i) {
      Vec target = x;
      for (std::size_t j = 0; j < nu; ++j) target += (h * t.a[i][j]) * fs[j];
      residual = std::max(residual, norm_inf(target - stages[i]));
      for (std::size_t d = 0; d < x.size(); ++d) {
        stages[i][d] += damping * (target[d] - stages[i][d]);
        // inf - inf would poison the residual with a NaN the max-norm drops
        if (!std::isfinite(stages[i][d]))
          throw ConvergenceError(std::numeric_limits<double>::infinity());
      }
    }
    if (residual <= tol) {
      Vec out = x;
      for (std::size_t j = 0; j < nu; ++j) out += (h * t.b[j]) * f(stages[j]);
      return out;
    }
  }
  throw ConvergenceError(residual);
}

// One implicit AVF step, with the xi-integral evaluated by 20-point
// Gauss-Legendre quadrature (exact far beyond the solver tolerance here).
inline Vec avf_step(const VectorField& f, const Vec& x, double h, double tol, int max_iter) {
  if (h <= 0 || tol <= 0) throw std::invalid_argument("h and tol must be positive");
  static const auto rule = detail::gauss_rule(20);
  Vec x1 = x;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    Vec integral(x.size(), 0.0);
    for (std::size_t q = 0; q < rule.first.size(); ++q) {
      double xi = static_cast<double>(rule.first[q]);
      Vec mid(x.size());
      for (std::size_t d = 0; d < x.size(); ++d) mid[d] = xi * x1[d] + (1.0 - xi) * x[d];
      integral += static_cast<double>(rule.second[q]) * f(mid);
    }
    Vec target = x + h * integral;
    residual = norm_inf(target - x1);
    x1 = target;
    for (double v : x1)
      if (!std::isfinite(v)) throw ConvergenceError(std::numeric_limits<double>::infinity());
    if (residual <= tol) return x1;
  }
  throw ConvergenceError(residual);
}

// Least-squares slope of log(error) vs log(h) for fixed-time integrations to
// t_end.  Returns +infinity when the method is exact on the problem.
inline double convergence_order_estimate(
    const std::function<Vec(const Vec&, double)>& stepper, const Vec& x0,
    double t_end, const Vec& exact_endpoint, const std::vector<double>& h_list) {
  if (h_list.size() < 3) throw std::invalid_argument("need at least 3 step sizes");
  std::vector<double> logs_h, logs_e;
  for (double h : h_list) {
    long long n = std::llround(t_end / h);
    double hh = t_end / static_cast<double>(n);
    Vec x = x0;
    for (long long i = 0; i < n; ++i) x = stepper(x, hh);
    double err = norm_inf(x - exact_endpoint);
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    logs_h.push_back(std::log(hh));
    logs_e.push_back(std::log(err));
  }
  double n = static_cast<double>(logs_h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < logs_h.size(); ++i) {
    sx += logs_h[i];
    sy += logs_e[i];
    sxx += logs_h[i] * logs_h[i];
    sxy += logs_h[i] * logs_e[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace butcher

// Acceptance gate: one line per criterion, exit code = number of failures.

#include <cmath>
#include <cstdio>
#include <random>

#include "butcher/butcher.hpp"

using namespace butcher;

namespace {

int failures = 0;

void report(int num, const char* what, bool ok) {
  std::printf("[%s] %2d: %s\n", ok ? "PASS" : "FAIL", num, what);
  if (!ok) ++failures;
}

Rational poly1d_value(const Tree& t) {
  const auto& ch = t.children();
  if (ch.empty()) return 1;
  if (ch.size() == 1) return 2 * poly1d_value(ch[0]);
  if (ch.size() == 2) return 2 * poly1d_value(ch[0]) * poly1d_value(ch[1]);
  return 0;
}

bool criterion_tree_counts() {
  const std::size_t want[] = {1, 1, 2, 4, 9, 20, 48, 115, 286, 719};
  for (int n = 1; n <= 10; ++n)
    if (enumerate_trees(n).size() != want[n - 1]) return false;
  return true;
}

bool criterion_aromatic_counts() {
  const std::size_t want[] = {1, 2, 6, 16, 45, 121, 338, 929};
  for (int n = 1; n <= 8; ++n)
    if (enumerate_aromatic(n).size() != want[n - 1]) return false;
  return true;
}

bool criterion_exact_flow() {
  BSeries s = exact_flow_series(4);
  if (s.empty != 1 || s[Tree::leaf()] != 1) return false;
  if (s[chain(2)] != Rational(1, 2)) return false;
  if (s[chain(3)] != Rational(1, 6) || s[cherry()] != Rational(1, 6)) return false;
  // order 4 against the x'=x^2 expansion: coefficients of 1/(1-h) are all 1
  Rational total = 0;
  for (const Tree& t : enumerate_trees(4)) total += s[t] * poly1d_value(t);
  return total == 1;
}

bool criterion_compose_invert() {
  BSeries ee = compose(euler_series(4), euler_series(4));
  if (ee[Tree::leaf()] != 2 || ee[chain(2)] != 1) return false;
  if (ee[chain(3)] != 0 || ee[cherry()] != Rational(1, 2)) return false;
  BSeries inv = inverse(euler_series(4));
  if (inv[Tree::leaf()] != -1 || inv[chain(2)] != 1) return false;
  if (inv[chain(3)] != -1 || inv[cherry()] != Rational(-1, 2)) return false;
  if (inv[Tree::parse("[[][][]]")] != Rational(1, 6)) return false;
  if (inv[chain(4)] != 1 || inv[Tree::parse("[[][[]]]")] != 1) return false;
  return inv[Tree::parse("[[[][]]]")] == Rational(1, 2);
}

bool criterion_condition_counts() {
  return order_conditions(4).size() == 8 && order_conditions(5).size() == 17 &&
         order_conditions(6).size() == 37;
}

bool criterion_gauss() {
  for (int s = 1; s <= 3; ++s)
    if (check_order(gauss_tableau(s), 2 * s + 1).order != 2 * s) return false;

  VectorField f = pendulum();
  Vec x0{0.7, -0.2};
  Tableau ref_t = rk4_tableau();
  Vec ref = x0;
  int nref = 5000;
  for (int i = 0; i < nref; ++i) ref = rk_step(ref_t, f, ref, 1.0 / nref, 1e-15, 10);
  Tableau g3 = gauss_tableau(3);
  auto stepper = [&](const Vec& x, double h) { return rk_step(g3, f, x, h, 1e-14, 500); };
  return convergence_order_estimate(stepper, x0, 1.0, ref, {0.4, 0.2, 0.1}) >= 5.5;
}

bool criterion_prelie_identity() {
  for (int n1 = 1; n1 <= 4; ++n1)
    for (int n2 = 1; n2 <= 4; ++n2)
      for (int n3 = 1; n1 + n2 + n3 <= 6; ++n3)
        for (const Tree& a : enumerate_trees(n1))
          for (const Tree& b : enumerate_trees(n2))
            for (const Tree& c : enumerate_trees(n3))
              if (!prelie_defect(TreeCombination(a), TreeCombination(b), TreeCombination(c))
                       .zero())
                return false;

  std::mt19937 rng(997);
  std::uniform_int_distribution<int> num(-3, 3), den(1, 4);
  auto pool = trees_up_to(3);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (int rep = 0; rep < 100; ++rep) {
    TreeCombination a, b, c;
    for (TreeCombination* comb : {&a, &b, &c})
      for (int k = 0; k < 3; ++k) comb->add(pool[pick(rng)], Rational(num(rng), den(rng)));
    if (!prelie_defect(a, b, c).zero()) return false;
  }

  TreeCombination leaf(Tree::leaf());
  TreeCombination lhs = graft(leaf, graft(leaf, leaf)) - graft(graft(leaf, leaf), leaf);
  return lhs == TreeCombination(cherry());
}

bool criterion_morphism() {
  std::vector<Vec> pts = {{0.4, -0.8}, {1.1, 0.6}, {-0.3, 0.2}};
  VectorField analytic = pendulum();
  VectorField fd = analytic;
  fd.deriv = nullptr;
  for (int n1 = 1; n1 <= 3; ++n1)
    for (int n2 = 1; n1 + n2 <= 4; ++n2)
      for (const Tree& t1 : enumerate_trees(n1))
        for (const Tree& t2 : enumerate_trees(n2)) {
          if (!morphism_check(t1, t2, analytic, pts, 1e-8)) return false;
          if (!morphism_check(t1, t2, fd, pts, 1e-4)) return false;
        }
  return true;
}

bool criterion_knockout() {
  KnockoutReport rep = relatedness_knockout_demo(1e-10);
  if (std::abs(rep.self_loop_on_f1 - 1.0) > 1e-10) return false;
  if (std::abs(rep.self_loop_on_f2) > 1e-10) return false;
  return rep.pass();
}

bool criterion_equivariance() {
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorField f = lotka();
  BSeries s = avf_series(4);
  Vec x{0.4, -0.6};
  for (int rep = 0; rep < 50; ++rep) {
    Matrix A(2, 2);
    do {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) A(i, j) = dist(rng);
    } while (std::abs(determinant(A)) < 0.2);
    AffineMap phi{A, {dist(rng), dist(rng)}};
    VectorField g = apply_affine_to_field(phi, f);

    Vec lhs = phi(evaluate(s, f, x, 0.2));
    Vec rhs = evaluate(s, g, phi(x), 0.2);
    if (norm_inf(lhs - rhs) > 1e-8) return false;

    Vec lhs2 = phi(aromatic_first_order_step(f, x, 0.2));
    Vec rhs2 = aromatic_first_order_step(g, phi(x), 0.2);
    if (norm_inf(lhs2 - rhs2) > 1e-8) return false;
  }
  return true;
}

bool criterion_avf_energy_and_expint() {
  VectorField f = pendulum();
  ScalarFunction H = pendulum_energy();
  Vec x{1.2, 0.3};
  for (double h : {0.1, 0.2, 0.4}) {
    Vec x1 = avf_step(f, x, h, 1e-12, 1000);
    if (std::abs(H.value(x1) - H.value(x)) > 1e-10) return false;
  }
  BSeries s = exponential_integrator_series(4);
  Rational fact = 1;
  for (int k = 1; k <= 4; ++k) {
    fact *= k;
    if (s[chain(k)] != Rational(1) / fact) return false;
  }
  return s[cherry()] == 0;
}

bool criterion_energy_hamiltonian_facts() {
  VectorField f = pendulum();
  ScalarFunction H = pendulum_energy();
  Matrix J = symplectic_j2();
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  std::vector<Vec> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(Vec{dist(rng), dist(rng)});

  if (!is_energy_preserving_sample(tree_differential_field(chain(3), f), H, pts, 1e-8))
    return false;
  if (!is_hamiltonian_sample(combination_field({{cherry(), 1.0}, {chain(3), -2.0}}, f), J, pts,
                             1e-8))
    return false;
  VectorField c2 = tree_differential_field(chain(2), f);
  if (is_energy_preserving_sample(c2, H, pts, 1e-8)) return false;
  return !is_hamiltonian_sample(c2, J, pts, 1e-8);
}

}  // namespace

int main() {
  report(1, "rooted-tree counts 1..10", criterion_tree_counts());
  report(2, "aromatic-tree counts 1..8", criterion_aromatic_counts());
  report(3, "exact-flow coefficients through order 4", criterion_exact_flow());
  report(4, "Butcher composition and inverse of Euler", criterion_compose_invert());
  report(5, "order-condition counts at p = 4, 5, 6", criterion_condition_counts());
  report(6, "Gauss methods attain order 2s; measured order of s=3", criterion_gauss());
  report(7, "pre-Lie identity, exact and randomized", criterion_prelie_identity());
  report(8, "grafting morphism on the corpus", criterion_morphism());
  report(9, "self-loop relatedness knockout", criterion_knockout());
  report(10, "affine equivariance under 50 random maps", criterion_equivariance());
  report(11, "AVF energy conservation; exponential-integrator ladder",
         criterion_avf_energy_and_expint());
  report(12, "energy-preserving and Hamiltonian order-3 facts",
         criterion_energy_hamiltonian_facts());
  return failures;
}

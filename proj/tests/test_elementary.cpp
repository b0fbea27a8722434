#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "butcher/elementary.hpp"
#include "butcher/linalg.hpp"
#include "butcher/tree.hpp"
#include "butcher/vector_field.hpp"

using namespace butcher;

namespace {

std::vector<Vec> random_points(int dim, int count, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) {
    Vec x(static_cast<std::size_t>(dim));
    for (double& v : x) v = dist(rng);
    pts.push_back(std::move(x));
  }
  return pts;
}

AffineMap random_affine(int dim, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (;;) {
    Matrix A(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) A(i, j) = dist(rng);
    if (std::abs(determinant(A)) < 0.2) continue;
    Vec b(static_cast<std::size_t>(dim));
    for (double& v : b) v = dist(rng);
    return {A, b};
  }
}

}  // namespace

TEST_CASE("leaf differential is the field itself") {
  VectorField f = linear2d();
  Vec x{0.7, -0.3};
  Vec expect = mat_vec(linear2d_matrix(), x);
  CHECK(norm_inf(elementary_differential(Tree::leaf(), f, x) - expect) < 1e-14);
}

TEST_CASE("cherry differential vanishes for linear fields") {
  VectorField f = linear2d();
  CHECK(norm_inf(elementary_differential(cherry(), f, {1.0, 2.0})) == 0.0);
}

TEST_CASE("chain2 on the 1-D quadratic") {
  VectorField f = poly1d();
  Vec v = elementary_differential(chain(2), f, {1.0});  // f'f = 2x * x^2
  CHECK(v[0] == Catch::Approx(2.0).margin(1e-14));
}

TEST_CASE("differentials via finite differences track the analytic ones") {
  VectorField f = pendulum();
  VectorField fd = f;
  fd.deriv = nullptr;  // force nested central differences
  Vec x{0.6, -1.1};
  for (const Tree& t : trees_up_to(4)) {
    double tol = t.order() <= 2 ? 1e-8 : 1e-4;
    CHECK(norm_inf(elementary_differential(t, f, x) - elementary_differential(t, fd, x)) < tol);
  }
}

TEST_CASE("derivative evaluators are symmetric in their directions") {
  VectorField f = lotka();
  Vec x{0.9, 1.4};
  Vec a{0.3, -0.8}, b{1.1, 0.2};
  CHECK(norm_inf(f.derivative(x, {a, b}) - f.derivative(x, {b, a})) < 1e-12);
}

TEST_CASE("affine action: identity map leaves the field unchanged") {
  VectorField f = lotka();
  VectorField g = apply_affine_to_field(affine_identity(2), f);
  Vec x{0.4, 0.9};
  CHECK(norm_inf(f(x) - g(x)) < 1e-14);
}

TEST_CASE("affine action: scaling fixes the identity field") {
  VectorField f = linear_field(Matrix::identity(2));
  Matrix two = Matrix::identity(2);
  two(0, 0) = two(1, 1) = 2.0;
  VectorField g = apply_affine_to_field({two, {0.0, 0.0}}, f);
  Vec x{1.3, -0.5};
  CHECK(norm_inf(g(x) - x) < 1e-14);
}

TEST_CASE("affine action on a constant field") {
  VectorField f = polynomial_field(2, {{{3.0, {0, 0}}}, {{-1.0, {0, 0}}}});
  std::mt19937 rng(5);
  AffineMap phi = random_affine(2, rng);
  VectorField g = apply_affine_to_field(phi, f);
  Vec expect = mat_vec(phi.A, {3.0, -1.0});
  CHECK(norm_inf(g({0.2, 0.7}) - expect) < 1e-12);
}

TEST_CASE("affine action rejects singular maps") {
  Matrix zero(2, 2);
  CHECK_THROWS_AS(apply_affine_to_field({zero, {0.0, 0.0}}, lotka()), std::invalid_argument);
}

TEST_CASE("elementary differentials are natural under affine maps") {
  std::mt19937 rng(17);
  for (const VectorField& f : {lotka(), pendulum(), linear2d()}) {
    AffineMap phi = random_affine(2, rng);
    VectorField g = apply_affine_to_field(phi, f);
    for (const Vec& x : random_points(2, 3, rng))
      for (const Tree& t : trees_up_to(4)) {
        Vec lhs = mat_vec(phi.A, elementary_differential(t, f, x));
        Vec rhs = elementary_differential(t, g, phi(x));
        CHECK(norm_inf(lhs - rhs) < 1e-8);
      }
  }
}

TEST_CASE("energy preservation at order three, and its failure at order two") {
  VectorField f = pendulum();
  ScalarFunction H = pendulum_energy();
  std::mt19937 rng(23);
  auto pts = random_points(2, 10, rng);

  CHECK(is_energy_preserving_sample(f, H, pts, 1e-8));  // f itself
  CHECK(is_energy_preserving_sample(tree_differential_field(chain(3), f), H, pts, 1e-8));
  CHECK_FALSE(is_energy_preserving_sample(tree_differential_field(chain(2), f), H, pts, 1e-8));
}

TEST_CASE("f''(f,f) - 2 f'f'f is Hamiltonian, f'f is not") {
  VectorField f = pendulum();
  Matrix J = symplectic_j2();
  std::mt19937 rng(29);
  auto pts = random_points(2, 10, rng);

  CHECK(is_hamiltonian_sample(f, J, pts, 1e-8));  // J f = grad H
  CHECK(is_hamiltonian_sample(combination_field({{cherry(), 1.0}, {chain(3), -2.0}}, f), J,
                              pts, 1e-8));
  CHECK_FALSE(is_hamiltonian_sample(tree_differential_field(chain(2), f), J, pts, 1e-8));
}

TEST_CASE("hamiltonian check validates J") {
  Matrix notJ = Matrix::identity(2);
  std::vector<Vec> pts = {{0.1, 0.2}};
  CHECK_THROWS_AS(is_hamiltonian_sample(pendulum(), notJ, pts, 1e-8), std::invalid_argument);
}

TEST_CASE("corpus fields are addressable by name") {
  CHECK(field_by_name("poly1d").dim == 1);
  CHECK(field_by_name("linear2d").dim == 2);
  CHECK(field_by_name("pendulum").dim == 2);
  CHECK(field_by_name("lotka").dim == 2);
  CHECK_THROWS_AS(field_by_name("nope"), std::out_of_range);
}

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "relwave/effective_operator.hpp"
#include "relwave/eigensolve.hpp"
#include "relwave/errors.hpp"

using namespace relwave;

namespace {

DiscretizedForm diagonal_form(const std::vector<double>& d) {
  Triplets a, b;
  for (std::size_t i = 0; i < d.size(); ++i) {
    a.emplace_back(i, i, d[i]);
    b.emplace_back(i, i, 1.0);
  }
  DiscretizedForm f;
  f.stiffness = from_triplets(d.size(), a);
  f.mass = from_triplets(d.size(), b);
  return f;
}

// Banded Hermitian pencil with a diagonally dominant mass.
DiscretizedForm random_pencil(int n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  Triplets a, b;
  for (int i = 0; i < n; ++i) {
    a.emplace_back(i, i, 2.0 + g(gen));
    b.emplace_back(i, i, 3.0 + 0.1 * g(gen));
    for (int k = 1; k <= 3 && i + k < n; ++k) {
      Complex z(g(gen), g(gen));
      a.emplace_back(i, i + k, z);
      a.emplace_back(i + k, i, std::conj(z));
      Complex w(0.2 * g(gen), 0.2 * g(gen));
      b.emplace_back(i, i + k, w);
      b.emplace_back(i + k, i, std::conj(w));
    }
  }
  DiscretizedForm f;
  f.stiffness = from_triplets(n, a);
  f.mass = from_triplets(n, b);
  return f;
}

}  // namespace

TEST_CASE("diagonal pencil") {
  auto r = lowest_eigenpairs(diagonal_form({3.0, 1.0, 2.0}), 2);
  REQUIRE(r.eigenvalues.size() == 2);
  CHECK(r.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("Dirichlet Laplacian converges at O(h^2)") {
  double L = 5.0;
  double exact = std::pow(std::numbers::pi / (2 * L), 2);
  auto zero = [](double) { return 0.0; };
  double e1 = lowest_eigenpairs(assemble_schrodinger(zero, Grid1D{L, 399}), 1).eigenvalues[0] - exact;
  double e2 = lowest_eigenpairs(assemble_schrodinger(zero, Grid1D{L, 799}), 1).eigenvalues[0] - exact;
  CHECK(std::abs(e1) < 1e-5);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("random Hermitian pencil against the dense solver") {
  auto form = random_pencil(200, 7);
  auto dense = dense_eigenpairs(form);
  for (int n_ev : {1, 4, 10}) {
    SolverOptions opts;
    opts.shift = dense.eigenvalues[0] - 1.0;
    auto r = lowest_eigenpairs(form, n_ev, opts);
    for (int j = 0; j < n_ev; ++j) {
      CHECK(std::abs(r.eigenvalues[j] - dense.eigenvalues[j]) <= 1e-10 * std::max(1.0, std::abs(dense.eigenvalues[j])));
      CHECK(r.residuals[j] <= 1e-10 * std::max(1.0, std::abs(r.eigenvalues[j])));
    }
    for (int j = 1; j < n_ev; ++j) CHECK(r.eigenvalues[j] >= r.eigenvalues[j - 1]);
  }
}

TEST_CASE("B-orthonormal eigenvectors, deterministic under the seed") {
  auto form = assemble_qe(gaussian_bump(2.0), Grid1D{20.0, 1500});
  auto a = lowest_eigenpairs(form, 4);
  auto b = lowest_eigenpairs(form, 4);
  Eigen::MatrixXcd X = a.eigenvectors;
  Eigen::MatrixXcd G = X.adjoint() * (form.mass * X);
  CHECK((G - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);
  for (int j = 0; j < 4; ++j) CHECK(a.eigenvalues[j] == b.eigenvalues[j]);
  CHECK(a.solver == b.solver);
}

TEST_CASE("Rayleigh quotient") {
  auto form = assemble_schrodinger([](double) { return 0.0; }, Grid1D{5.0, 400});
  auto r = lowest_eigenpairs(form, 1);
  Vector v = r.eigenvectors.col(0);
  CHECK(std::abs(rayleigh_quotient(form, v) - r.eigenvalues[0]) <= 1e-10);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    Vector w(form.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = Complex(g(gen), g(gen));
    CHECK(rayleigh_quotient(form, w) >= r.eigenvalues[0] * (1 - 1e-12));
  }
  CHECK_THROWS_AS(rayleigh_quotient(form, Vector::Zero(form.size())), PreconditionError);
}

TEST_CASE("indefinite mass is rejected") {
  auto form = diagonal_form({1.0, 2.0, 3.0, 4.0});
  Triplets b{{0, 0, 1.0}, {1, 1, -1.0}, {2, 2, 1.0}, {3, 3, 1.0}};
  form.mass = from_triplets(4, b);
  CHECK_THROWS(lowest_eigenpairs(form, 1));
}

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "relwave/effective_operator.hpp"
#include "relwave/errors.hpp"
#include "relwave/strip_form.hpp"
#include "relwave/transverse_spectrum.hpp"

using namespace relwave;

namespace {

StripDiscretization small(double eps, double m = 0.0) {
  StripDiscretization d;
  d.s_grid = Grid1D{10.0, 300};
  d.epsilon = eps;
  d.m = m;
  return d;
}

}  // namespace

TEST_CASE("free strip with one mode: threshold plus the Dirichlet box") {
  for (double m : {0.0, 1.0}) {
    auto d = small(0.1, m);
    d.modes = 1;
    auto form = assemble_fqunit(zero_profile(), d);
    double box = lowest_eigenpairs(assemble_qe(zero_profile(), d.s_grid), 1).eigenvalues[0];
    double e1 = transverse_energy(1, m * 0.1);
    double mu = lowest_eigenpairs(form, 1).eigenvalues[0];
    CHECK(mu == doctest::Approx(e1 * e1 / 0.01 + box).epsilon(1e-11));
  }
}

TEST_CASE("Galerkin transverse block is diag(E_p^2)") {
  for (double mass : {0.0, 0.1, 1.0}) {
    auto basis = galerkin_basis(6, mass, 64);
    for (int a = 0; a < 6; ++a) {
      double E = transverse_energy(a / 2 + 1, mass);
      CHECK(std::abs(basis.form(a, a) - E * E) <= 1e-12 * E * E);
      CHECK(std::abs(basis.gram(a, a) - 1.0) <= 1e-12);
      for (int b = 0; b < 6; ++b)
        if (b != a) CHECK(std::abs(basis.gram(a, b)) <= 1e-12);
    }
  }
}

TEST_CASE("tensor basis reproduces the lowest transverse pair") {
  auto basis = tensor_basis(64, 0.5, 6);
  // the lowest pair of the discrete transverse operator approximates E_1²;
  // each boundary node carries one function
  CHECK(basis.dim == 2 * 64);
  CHECK((basis.form - basis.form.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> s(basis.form, basis.gram);
  double E1 = transverse_energy(1, 0.5);
  CHECK(s.eigenvalues()(0) == doctest::Approx(E1 * E1).epsilon(1e-7));
  CHECK(s.eigenvalues()(1) == doctest::Approx(E1 * E1).epsilon(1e-7));
}

TEST_CASE("straight strip: weights vanish and a_- = a_+ = fqunit for c = 0") {
  for (auto backend : {TransverseBackend::galerkin, TransverseBackend::tensor}) {
    auto d = small(0.1, 0.7);
    d.backend = backend;
    d.n_t = 16;
    auto fq = assemble_fqunit(zero_profile(), d);
    auto am = assemble_a_pm(zero_profile(), d, 0.0, SandwichSign::minus);
    auto ap = assemble_a_pm(zero_profile(), d, 0.0, SandwichSign::plus);
    CHECK(identical(fq.stiffness, am.stiffness));
    CHECK(identical(fq.stiffness, ap.stiffness));
    CHECK(identical(fq.mass, am.mass));
    CHECK(fq.kind == FormKind::fqunit);
    CHECK(am.kind == FormKind::a_minus);
  }
}

TEST_CASE("preconditions") {
  auto d = small(0.6);
  CHECK_THROWS_AS(assemble_fqunit(gaussian_bump(2.0), d), DomainError);
  auto p = small(0.1);
  p.modes = StripDiscretization::max_modes + 1;
  CHECK_THROWS_AS(assemble_fqunit(gaussian_bump(2.0), p), DomainError);
  CHECK_THROWS_AS(estimate_sandwich_constant(gaussian_bump(2.0), 0.3), DomainError);
}

TEST_CASE("assembled forms are Hermitian") {
  auto p = gaussian_bump(2.0);
  for (auto backend : {TransverseBackend::galerkin, TransverseBackend::tensor}) {
    auto d = small(0.1, 1.0);
    d.backend = backend;
    d.n_t = 16;
    for (const auto& f : {assemble_fqunit(p, d), assemble_a_pm(p, d, 3.0, SandwichSign::minus),
                          assemble_a_pm(p, d, 3.0, SandwichSign::plus)}) {
      CHECK(hermiticity_residual(f.stiffness) <= 1e-14);
      CHECK(hermiticity_residual(f.mass) <= 1e-14);
    }
  }
}

TEST_CASE("sandwich constant") {
  CHECK(estimate_sandwich_constant(zero_profile(), 0.1).c <= 1e-14);
  auto c1 = estimate_sandwich_constant(gaussian_bump(1.0), 0.05);
  CHECK(c1.c > 0.0);
  CHECK(std::isfinite(c1.c));
  CHECK_FALSE(c1.derivation.empty());
  double ratio = estimate_sandwich_constant(gaussian_bump(1.0), 0.05).c /
                 estimate_sandwich_constant(gaussian_bump(0.5), 0.05).c;
  CHECK(ratio / 2.0 >= 0.25);
  CHECK(ratio / 2.0 <= 4.0);
}

TEST_CASE("Rayleigh quotients are sandwiched") {
  auto p = gaussian_bump(2.0);
  for (double m : {0.0, 1.0}) {
    auto d = small(0.1, m);
    double c = estimate_sandwich_constant(p, d).c;
    auto fq = assemble_fqunit(p, d);
    auto am = assemble_a_pm(p, d, c, SandwichSign::minus);
    auto ap = assemble_a_pm(p, d, c, SandwichSign::plus);
    std::mt19937_64 gen(17);
    std::normal_distribution<double> g;
    for (int k = 0; k < 50; ++k) {
      Vector v(fq.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(g(gen), g(gen));
      double qm = rayleigh_quotient(am, v), qf = rayleigh_quotient(fq, v), qp = rayleigh_quotient(ap, v);
      CHECK(qm <= qf + 1e-12 * std::abs(qf));
      CHECK(qf <= qp + 1e-12 * std::abs(qf));
    }
    auto lm = lowest_eigenpairs(am, 4), lf = lowest_eigenpairs(fq, 4), lp = lowest_eigenpairs(ap, 4);
    for (int j = 0; j < 4; ++j) {
      CHECK(lm.eigenvalues[j] <= lf.eigenvalues[j] * (1 + 1e-12));
      CHECK(lf.eigenvalues[j] <= lp.eigenvalues[j] * (1 + 1e-12));
    }
  }
}

TEST_CASE("spectrum sits above the shift floor") {
  auto p = gaussian_bump(2.0);
  auto d = small(0.1, 1.0);
  auto form = assemble_fqunit(p, d);
  auto r = lowest_eigenpairs(form, 2);
  CHECK(r.eigenvalues[0] > strip_shift(p, d));
  double th = essential_threshold(1.0, 0.1);
  CHECK(r.eigenvalues[0] < th * th);
}

TEST_CASE("backends agree on a coarse grid") {
  auto p = gaussian_bump(2.0);
  auto d = small(0.1);
  d.s_grid = Grid1D{10.0, 250};
  double gal = lowest_eigenpairs(assemble_fqunit(p, d), 1).eigenvalues[0];
  d.backend = TransverseBackend::tensor;
  d.n_t = 32;
  double ten = lowest_eigenpairs(assemble_fqunit(p, d), 1).eigenvalues[0];
  CHECK(std::abs(ten - gal) <= 1e-4 * std::abs(gal));
}

TEST_CASE("coordinate export") {
  auto d = small(0.1);
  d.s_grid = Grid1D{2.0, 5};
  d.modes = 2;
  auto form = assemble_fqunit(gaussian_bump(1.0), d);
  std::ostringstream out;
  export_coordinate(form.stiffness, out);
  std::istringstream in(out.str());
  Triplets read;
  int r, c;
  double re, im;
  while (in >> r >> c >> re >> im) read.emplace_back(r, c, Complex(re, im));
  CHECK(static_cast<Eigen::Index>(read.size()) == form.stiffness.nonZeros());
  CHECK(identical(from_triplets(form.size(), read), form.stiffness));
}

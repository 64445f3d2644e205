#include <cmath>
#include <numbers>

#include "doctest.h"
#include "json.hpp"
#include "relwave/errors.hpp"
#include "relwave/quadrature.hpp"
#include "relwave/transverse_spectrum.hpp"

using namespace relwave;
using std::numbers::pi;

TEST_CASE("Pauli algebra") {
  const auto& P = pauli();
  const Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();
  const std::complex<double> i(0.0, 1.0);
  for (const auto& s : {P.sigma1, P.sigma2, P.sigma3}) {
    CHECK((s * s - I).norm() == 0.0);
    CHECK((s - s.adjoint()).norm() == 0.0);
  }
  CHECK((P.sigma1 * P.sigma2 - i * P.sigma3).norm() == 0.0);
  CHECK((P.sigma2 * P.sigma3 - i * P.sigma1).norm() == 0.0);
  CHECK((P.sigma3 * P.sigma1 - i * P.sigma2).norm() == 0.0);
}

TEST_CASE("transverse roots") {
  CHECK(transverse_root(1, 0.0) == doctest::Approx(pi / 4).epsilon(1e-15));
  CHECK(transverse_root(2, 0.0) == doctest::Approx(3 * pi / 4).epsilon(1e-15));
  CHECK(std::abs(transverse_root(1, 0.1) - 0.8439) < 1e-3);
  for (double m : {0.0, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0})
    for (int p = 1; p <= 8; ++p) {
      double k = transverse_root(p, m);
      CHECK(k >= (2 * p - 1) * pi / 4);
      CHECK(k < p * pi / 2);
      CHECK(std::abs(dispersion(k, m)) <= 1e-12);
    }
  for (double m = 0.0; m <= 1.0; m += 0.05)
    for (int p = 1; p <= 5; ++p) CHECK(transverse_root(p, m) < transverse_root(p + 1, m));
}

TEST_CASE("k1 series") {
  CHECK(k1_series(0.0) == pi / 4);
  CHECK(k1_series(0.01) == doctest::Approx(pi / 4 + 0.02 / pi - 0.0016 / std::pow(pi, 3)).epsilon(1e-15));
  std::vector<double> ratios;
  for (double m : {1e-1, 1e-2, 1e-3}) ratios.push_back(std::abs(transverse_root(1, m) - k1_series(m)) / (m * m * m));
  double lo = *std::min_element(ratios.begin(), ratios.end());
  double hi = *std::max_element(ratios.begin(), ratios.end());
  CHECK(hi / lo <= 3.0);
}

TEST_CASE("energies and threshold") {
  CHECK(transverse_energy(1, 0.0) == doctest::Approx(pi / 4));
  CHECK(transverse_energy(2, 0.0) == doctest::Approx(3 * pi / 4));
  double k = transverse_root(1, 0.1);
  CHECK(transverse_energy(1, 0.1) == doctest::Approx(std::sqrt(0.01 + k * k)).epsilon(1e-15));
  for (double m : {0.0, 0.2, 1.0, 4.0}) {
    for (int p = 1; p < 8; ++p) CHECK(transverse_energy(p, m) < transverse_energy(p + 1, m));
    double E = transverse_energy(1, m);
    double kk = transverse_root(1, m);
    CHECK(std::abs(E * E - m * m - kk * kk) <= 1e-13 * E * E);
    CHECK(E > m);
  }
  CHECK(essential_threshold(0.0, 0.1) == doctest::Approx(2.5 * pi).epsilon(1e-14));
  CHECK(essential_threshold(1.0, 0.1) == doctest::Approx(transverse_energy(1, 0.1) / 0.1).epsilon(1e-15));
  double prev = 0.0;
  for (double eps : {0.4, 0.2, 0.1, 0.05, 0.01}) {
    double th = essential_threshold(1.0, eps);
    CHECK(th > prev);
    prev = th;
  }
}

TEST_CASE("eigenfunctions: closed form at m = 0 and boundary condition") {
  TransverseMode mode(1, 0.0);
  for (double t = -1.0; t <= 1.0; t += 0.125) {
    double c = 0.5 * std::cos(pi / 4 * (t + 1)), s = 0.5 * std::sin(pi / 4 * (t + 1));
    auto u = eigenfunction_eval(mode, t);
    CHECK(std::abs(u(0) - (c + s)) < 1e-12);
    CHECK(std::abs(u(1) - (c - s)) < 1e-12);
  }
  for (double m : {0.0, 0.3, 2.0})
    for (int p = 1; p <= 4; ++p)
      for (Branch b : {Branch::plus, Branch::minus}) {
        TransverseMode md(p, m, b);
        auto r = eigenfunction_eval(md, 1.0), l = eigenfunction_eval(md, -1.0);
        CHECK(std::abs(r(1) + r(0)) < 1e-12);
        CHECK(std::abs(l(1) - l(0)) < 1e-12);
      }
  CHECK_THROWS_AS(eigenfunction_eval(mode, 1.0001), DomainError);
}

TEST_CASE("orthonormality and eigen-residuals") {
  for (double m : {0.0, 0.1, 1.0}) {
    std::vector<TransverseMode> modes;
    for (int p = 1; p <= 3; ++p)
      for (Branch b : {Branch::plus, Branch::minus}) modes.emplace_back(p, m, b);
    for (std::size_t a = 0; a < modes.size(); ++a) {
      CHECK(eigen_residual(modes[a]) <= 1e-9);
      for (std::size_t b = 0; b < modes.size(); ++b) {
        auto ip = inner_product(as_function(modes[a]).value, as_function(modes[b]).value);
        CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("normalization approaches 1/(2k) linearly in m") {
  std::vector<double> dev;
  for (double m : {0.1, 0.05, 0.025}) {
    TransverseMode mode(1, m);
    dev.push_back(std::abs(mode.normalization() - 1.0 / (2.0 * mode.k())));
  }
  CHECK(dev[0] / dev[1] == doctest::Approx(2.0).epsilon(0.2));
  CHECK(dev[1] / dev[2] == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("sigma3 matrix elements") {
  auto M = sigma3_matrix_elements(0.0);
  CHECK(std::abs(M(0, 0) - 2.0 / pi) <= 1e-10);
  CHECK(std::abs(M(1, 1) + 2.0 / pi) <= 1e-10);
  CHECK(std::abs(M(0, 1)) <= 1e-10);
  CHECK(std::abs(M(1, 0)) <= 1e-10);
  double d1 = std::abs(sigma3_matrix_elements(0.05)(0, 0) - 2.0 / pi);
  double d2 = std::abs(sigma3_matrix_elements(0.025)(0, 0) - 2.0 / pi);
  CHECK(d1 > 0.0);
  CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("transverse form identity") {
  for (double m : {0.0, 0.4, 1.5}) {
    TransverseMode p1(1, m), p2(2, m), p2m(2, m, Branch::minus);
    CHECK(transverse_form_identity_check(as_function(p1), m) <= 1e-9);
    CHECK(transverse_form_identity_check(as_function(p2), m) <= 1e-9);
    auto f1 = as_function(p1), f2 = as_function(p2m);
    SpinorFunction mix{[=](double t) -> Spinor { return (f1.value(t) + f2.value(t)) / std::sqrt(2.0); },
                       [=](double t) -> Spinor { return (f1.derivative(t) + f2.derivative(t)) / std::sqrt(2.0); }};
    CHECK(transverse_form_identity_check(mix, m) <= 1e-9);
  }
  SpinorFunction bad{[](double) -> Spinor { return Spinor(1.0, 1.0); },
                     [](double) -> Spinor { return Spinor(0.0, 0.0); }};
  CHECK_THROWS_AS(transverse_form_identity_check(bad, 0.5), PreconditionError);
}

TEST_CASE("projection onto the lowest pair") {
  double delta = 0.2;
  auto c = project_pi_delta(as_function(TransverseMode(1, delta)).value, delta);
  CHECK(std::abs(c.plus - 1.0) <= 1e-10);
  CHECK(std::abs(c.minus) <= 1e-10);
  auto z = project_pi_delta(as_function(TransverseMode(2, delta)).value, delta);
  CHECK(std::abs(z.plus) <= 1e-10);
  CHECK(std::abs(z.minus) <= 1e-10);

  auto u = [](double t) -> Spinor { return Spinor(std::exp(t), std::complex<double>(t * t, 0.3 * t)); };
  auto coeffs = project_pi_delta(u, delta);
  auto pu = reconstruct(coeffs, delta);
  double norm_u = std::sqrt(inner_product(u, u).real());
  double norm_pu = std::sqrt(inner_product(pu, pu).real());
  CHECK(norm_pu <= norm_u);
  auto again = project_pi_delta(pu, delta);
  CHECK(std::abs(again.plus - coeffs.plus) <= 1e-12);
  CHECK(std::abs(again.minus - coeffs.minus) <= 1e-12);

  // ‖Π^δ - Π^0‖ = O(δ): the difference on a fixed function halves with δ
  auto diff = [&](double d) {
    auto a = reconstruct(project_pi_delta(u, d), d);
    auto b = reconstruct(project_pi_delta(u, 0.0), 0.0);
    auto r = [&](double t) -> Spinor { return a(t) - b(t); };
    return std::sqrt(inner_product(r, r).real());
  };
  CHECK(diff(0.1) / diff(0.05) == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("mode JSON record") {
  auto j = nlohmann::json::parse(to_json(TransverseMode(2, 0.5)));
  CHECK(j.at("p").get<int>() == 2);
  CHECK(j.at("m").get<double>() == 0.5);
  CHECK(j.at("k").get<double>() == transverse_root(2, 0.5));
  CHECK(j.contains("E"));
  CHECK(j.contains("N"));
}

TEST_CASE("Gauss-Legendre quadrature") {
  for (int n : {2, 8, 64}) {
    const auto& r = gauss_legendre(n);
    double sum = 0.0;
    for (double w : r.weights) sum += w;
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
    // exact for degree 2n - 1
    double mono = integrate_fixed([&](double x) { return std::pow(x, 2 * n - 2); }, -1.0, 1.0, n);
    CHECK(mono == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-13));
  }
  CHECK(integrate_composite([](double x) { return std::cos(x); }, 0.0, pi / 2, 4) ==
        doctest::Approx(1.0).epsilon(1e-15));
  auto a = integrate_adaptive([](double x) { return std::exp(-x * x); }, -10.0, 10.0);
  CHECK(a.converged);
  CHECK(std::abs(a.value - std::sqrt(pi)) < 1e-12);
}

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "relwave/curve_geometry.hpp"
#include "relwave/errors.hpp"

using namespace relwave;

namespace {

std::vector<CurveSample> line_samples(int n, double h) {
  std::vector<CurveSample> out;
  for (int i = 0; i < n; ++i) out.push_back({-0.5 * (n - 1) * h + i * h, {-0.5 * (n - 1) * h + i * h, 0.0}});
  return out;
}

std::vector<CurveSample> circle_samples(double R, int n, double h) {
  std::vector<CurveSample> out;
  for (int i = 0; i < n; ++i) {
    double s = i * h;
    out.push_back({s, {R * std::sin(s / R), R - R * std::cos(s / R)}});
  }
  return out;
}

}  // namespace

TEST_CASE("straight line samples have zero curvature") {
  auto p = curvature_from_parametrization(line_samples(41, 0.05));
  for (double s : {-0.8, 0.0, 0.33, 0.9}) CHECK(std::abs(p.kappa(s)) < 1e-12);
  CHECK(p.is_straight());
}

TEST_CASE("circle arc curvature is 1/R up to O(h^2)") {
  double R = 2.0;
  double err_h = 0.0, err_h2 = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    double h = pass == 0 ? 0.1 : 0.05;
    int n = static_cast<int>(std::round(3.0 / h)) + 1;
    auto p = curvature_from_parametrization(circle_samples(R, n, h));
    double err = 0.0;
    for (int i = 3; i < n - 3; ++i) err = std::max(err, std::abs(p.kappa(i * h) - 1.0 / R));
    (pass == 0 ? err_h : err_h2) = err;
  }
  CHECK(err_h < 1e-4);
  CHECK(err_h2 <= err_h / 3.0 + 1e-13);
}

TEST_CASE("integrate then differentiate recovers kappa = exp(-s^2)") {
  auto base = gaussian_bump(1.0);
  auto curve = PlanarCurve::from_profile(base, -3.0, 3.0, 1e-3);
  std::vector<CurveSample> samples;
  for (int i = 0; i <= 6000; ++i) {
    double s = -3.0 + i * 1e-3;
    samples.push_back({s, curve.point(s)});
  }
  auto p = curvature_from_parametrization(samples);
  double err = 0.0;
  for (double s = -2.5; s <= 2.5; s += 0.01) err = std::max(err, std::abs(p.kappa(s) - std::exp(-s * s)));
  CHECK(err < 1e-4);
}

TEST_CASE("parametrization preconditions") {
  auto samples = line_samples(20, 0.1);
  samples[7].s += 0.01;
  CHECK_THROWS_AS(curvature_from_parametrization(samples), PreconditionError);
  CHECK_THROWS_AS(curvature_from_parametrization(line_samples(5, 0.1)), PreconditionError);
  std::vector<CurveSample> fast;
  for (int i = 0; i < 20; ++i) fast.push_back({i * 0.1, {i * 0.2, 0.0}});
  CHECK_THROWS_WITH_AS(curvature_from_parametrization(fast), doctest::Contains("not arc-length"),
                       PreconditionError);
}

TEST_CASE("epsilon0") {
  CHECK(std::isinf(epsilon0(zero_profile())));
  CHECK(epsilon0(constant_profile(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(epsilon0(gaussian_bump(1.2)) == doctest::Approx(1.0 / 1.2).epsilon(1e-15));
  for (auto p : {gaussian_bump(0.7), compact_bump(1.5, 2.0), constant_profile(3.0)})
    CHECK(epsilon0(p) * p.sup_kappa() == 1.0);
}

TEST_CASE("sup norms dominate samples and the tail bound holds") {
  for (const auto& p : {gaussian_bump(2.0), gaussian_bump(1.0, 0.5), compact_bump(1.0, 1.5)}) {
    for (double s = -6.0; s <= 6.0; s += 0.001) {
      CHECK(std::abs(p.kappa(s)) <= p.sup_kappa() + 1e-14);
      CHECK(std::abs(p.kappa_prime(s)) <= p.sup_kappa_prime() + 1e-12);
      CHECK(std::abs(p.kappa_double_prime(s)) <= p.sup_kappa_double_prime() + 1e-12);
    }
    for (double s = p.decay_window() + 1e-9; s < p.decay_window() + 20.0; s += 0.1) {
      CHECK(std::abs(p.kappa(s)) <= p.tail_bound());
      CHECK(std::abs(p.kappa(-s)) <= p.tail_bound());
    }
  }
}

TEST_CASE("analytic derivatives match central differences to O(h^2)") {
  for (const auto& p : {gaussian_bump(2.0), gaussian_bump(1.0, 0.7), compact_bump(1.0, 1.5)}) {
    double e1 = 0.0, e2 = 0.0, f1 = 0.0, f2 = 0.0;
    for (double s = -1.3; s <= 1.3; s += 0.1) {
      double h = 1e-2;
      e1 = std::max(e1, std::abs((p.kappa(s + h) - p.kappa(s - h)) / (2 * h) - p.kappa_prime(s)));
      f1 = std::max(f1, std::abs((p.kappa_prime(s + h) - p.kappa_prime(s - h)) / (2 * h) - p.kappa_double_prime(s)));
      h = 5e-3;
      e2 = std::max(e2, std::abs((p.kappa(s + h) - p.kappa(s - h)) / (2 * h) - p.kappa_prime(s)));
      f2 = std::max(f2, std::abs((p.kappa_prime(s + h) - p.kappa_prime(s - h)) / (2 * h) - p.kappa_double_prime(s)));
    }
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(f1 / f2 == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("curvature primitive") {
  CHECK(curvature_primitive(zero_profile(), 3.0) == 0.0);
  CHECK(curvature_primitive(constant_profile(0.3), 2.5) == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(curvature_primitive(constant_profile(0.3), -2.0) == doctest::Approx(-0.6).epsilon(1e-13));
  auto g = gaussian_bump(1.0);
  CHECK(std::abs(curvature_primitive(g, 10.0) - std::sqrt(std::numbers::pi) / 2.0) < 1e-8);
  CHECK(curvature_primitive(g, 0.0) == 0.0);
  double a = -0.7, b = 1.9;
  double direct = 0.5 * std::sqrt(std::numbers::pi) * (std::erf(b) - std::erf(a));
  CHECK(std::abs(curvature_primitive(g, b) - curvature_primitive(g, a) - direct) < 1e-10);
}

TEST_CASE("curvature primitive is monotone where kappa keeps its sign") {
  auto p = compact_bump(1.3, 2.0);
  std::vector<double> nodes;
  for (double s = -3.0; s <= 3.0; s += 0.05) nodes.push_back(s);
  auto rho = curvature_primitive_on_grid(p, nodes);
  for (std::size_t i = 1; i < rho.size(); ++i) CHECK(rho[i] >= rho[i - 1]);
  for (std::size_t i = 0; i < rho.size(); ++i)
    CHECK(std::abs(rho[i] - curvature_primitive(p, nodes[i])) < 1e-10);
}

TEST_CASE("tubular map") {
  auto line = PlanarCurve::from_profile(zero_profile(), -5.0, 5.0);
  auto p = tubular_map(line, 0.2, 1.5, -0.5);
  CHECK(p[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK_THROWS_AS(tubular_map(line, 0.2, 0.0, 1.01), DomainError);

  double R = 2.0, eps = 0.3;
  auto circle = PlanarCurve::from_profile(constant_profile(1.0 / R), -3.0, 3.0);
  Point2 centre{0.0, R};  // γ(0) = 0, γ′(0) = (1, 0), ν(0) = (0, 1)
  for (double s : {-2.0, 0.0, 1.3}) {
    auto on = tubular_map(circle, eps, s, 0.0);
    CHECK(std::hypot(on[0] - centre[0], on[1] - centre[1]) == doctest::Approx(R).epsilon(1e-9));
    auto in = tubular_map(circle, eps, s, 1.0);
    CHECK(std::hypot(in[0] - centre[0], in[1] - centre[1]) == doctest::Approx(R - eps).epsilon(1e-9));
  }
  CHECK_THROWS_AS(tubular_map(circle, 2.5, 0.0, 0.0), DomainError);
}

TEST_CASE("validate assumptions") {
  auto z = validate_assumptions(zero_profile(), 0.7);
  CHECK(z.all_ok());
  auto g = validate_assumptions(gaussian_bump(1.0), 0.1);
  CHECK(g.decay_ok);
  CHECK(g.derivatives_ok);
  CHECK(g.injective_ok);
  auto fold = validate_assumptions(gaussian_bump(2.0), 0.6);
  CHECK_FALSE(fold.injective_ok);
  CHECK(fold.reason.find("fold-over") != std::string::npos);
  auto circle = validate_assumptions(constant_profile(0.5), 0.1);
  CHECK_FALSE(circle.decay_ok);
  // total turning 2 sqrt(pi) > pi: the arms of the a = 2 bump cross each other
  auto crossing = validate_assumptions(gaussian_bump(2.0), 0.1);
  CHECK_FALSE(crossing.injective_ok);
  CHECK(crossing.reason.find("self-intersection") != std::string::npos);
}

TEST_CASE("U-shaped curve: opposite walls overlap once eps exceeds half the gap") {
  // straight leg, half circle of radius 1, straight leg back: legs are 2 apart
  std::vector<CurveSample> samples;
  double h = 0.01;
  double leg = 3.0, arc = std::numbers::pi;
  int n = static_cast<int>(std::round((2 * leg + arc) / h)) + 1;
  for (int i = 0; i < n; ++i) {
    double s = i * h;
    Point2 p;
    if (s <= leg) {
      p = {s, 0.0};
    } else if (s <= leg + arc) {
      double phi = s - leg;
      p = {leg + std::sin(phi), 1.0 - std::cos(phi)};
    } else {
      p = {leg - (s - leg - arc), 2.0};
    }
    samples.push_back({s - leg - 0.5 * arc, p});
  }
  auto curve = PlanarCurve::from_samples(samples);
  auto profile = constant_profile(0.0);
  ValidationOptions opts;
  opts.window = 1.0;
  auto narrow = validate_assumptions(profile, curve, 0.5, opts);
  CHECK(narrow.injective_ok);
  auto wide = validate_assumptions(profile, curve, 1.2, opts);
  CHECK_FALSE(wide.injective_ok);
}

TEST_CASE("segments intersect") {
  CHECK(segments_intersect({0, 0}, {1, 1}, {0, 1}, {1, 0}));
  CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
  CHECK(segments_intersect({0, 0}, {1, 0}, {1, 0}, {2, 1}));
}

TEST_CASE("plain-text inputs") {
  auto dir = std::filesystem::temp_directory_path();
  auto path = (dir / "relwave_profile_test.txt").string();
  {
    std::ofstream out(path);
    out.precision(17);
    out << "# s kappa\n";
    for (int i = -50; i <= 50; ++i) out << i * 0.1 << ' ' << std::exp(-(i * 0.1) * (i * 0.1)) << "  # row\n";
  }
  auto p = read_profile_file(path);
  CHECK(p.kappa(0.0) == doctest::Approx(1.0));
  CHECK(p.kappa(0.05) == doctest::Approx(0.5 * (1.0 + std::exp(-0.01))).epsilon(1e-12));
  CHECK(p.kappa(9.0) == 0.0);
  std::filesystem::remove(path);
  CHECK_THROWS(read_profile_file((dir / "relwave_missing_file.txt").string()));
}

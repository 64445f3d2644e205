#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "relwave/asymptotics.hpp"
#include "relwave/errors.hpp"
#include "relwave/transverse_spectrum.hpp"

using namespace relwave;

namespace {

StripDiscretization small_disc() {
  StripDiscretization d;
  d.s_grid = Grid1D{10.0, 300};
  return d;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char ch : text) n += ch == '\n';
  return n;
}

}  // namespace

TEST_CASE("Dirac eigenvalues from pairs of squared values") {
  auto d = dirac_eigenvalues_from_square(std::vector<double>{4, 4, 9, 9}, 2);
  REQUIRE(d.lambda.size() == 2);
  CHECK(d.lambda[0] == 2.0);
  CHECK(d.lambda[1] == 3.0);
  CHECK(d.warnings.empty());
  auto w = dirac_eigenvalues_from_square(std::vector<double>{4, 4.1}, 1);
  CHECK(w.warnings.size() == 1);
  CHECK(w.lambda[0] == doctest::Approx(std::sqrt(4.1)));
  CHECK_THROWS_AS(dirac_eigenvalues_from_square(std::vector<double>{-2, -1}, 1), OrderingError);
  CHECK_THROWS_AS(dirac_eigenvalues_from_square(std::vector<double>{1, 1, 2}, 2), PreconditionError);
}

TEST_CASE("least-squares line") {
  auto [a, b] = fit_line({0.1, 0.2, 0.4}, {1.3, 1.6, 2.2});
  CHECK(a == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b == doctest::Approx(3.0).epsilon(1e-14));
  CHECK_THROWS_AS(fit_line({1.0}, {2.0}), PreconditionError);
}

TEST_CASE("free strip sweep: nothing below the threshold") {
  auto r = run_epsilon_sweep(zero_profile(), 1.0, {0.1, 0.05}, 2, small_disc());
  CHECK(r.J == 0);
  CHECK(r.entries.size() == 4);
  for (const auto& e : r.entries) {
    CHECK(e.lambda >= e.threshold);
    CHECK(e.absorbed);
    CHECK(e.threshold == essential_threshold(1.0, e.epsilon));
  }
}

TEST_CASE("curved sweep: bound states below threshold, slope near (2/pi) mu(q_e)") {
  auto r = run_epsilon_sweep(gaussian_bump(2.0), 0.0, {0.1, 0.05, 0.025, 0.0125}, 2, small_disc());
  REQUIRE(r.J >= 1);
  for (const auto& e : r.entries) {
    if (e.j > r.J) continue;
    CHECK(e.lambda < e.threshold);
    CHECK(e.splitting < 0.0);
    // coarse grid: the discrete splitting of the pair is O(1e-6) here
    CHECK(e.pair_gap <= 1e-5);
  }
  CHECK(r.entries[0].pair_gap > r.entries[2].pair_gap);
  CHECK(r.epsilon1 == 0.1);
  const auto& fit = r.fits[0];
  CHECK(fit.points == 4);
  CHECK(fit.rel_error <= 0.05);
  CHECK(std::abs(fit.mu_hat - fit.mu_hat_without_largest) < fit.residual_norm);
  CHECK(r.provenance.at("P") == "6");
  CHECK(r.provenance.count("seed") == 1);

  auto sub = restrict_sweep(r, {0.05, 0.025});
  CHECK(sub.epsilon1 == 0.05);
  CHECK(sub.entries.size() == 4);
  CHECK(sub.fits[0].points == 2);
  CHECK(sub.fits[0].max_residual <= 1e-12);
  CHECK_THROWS_AS(restrict_sweep(r, {0.3}), PreconditionError);
}

TEST_CASE("sweep preconditions") {
  CHECK_THROWS_AS(run_epsilon_sweep(gaussian_bump(2.0), 0.0, {0.3}, 1, small_disc()), DomainError);
  CHECK_THROWS_AS(run_epsilon_sweep(gaussian_bump(2.0), 0.0, {0.05, 0.1}, 1, small_disc()), DomainError);
  CHECK_THROWS_AS(run_epsilon_sweep(gaussian_bump(2.0), -1.0, {0.1}, 1, small_disc()), DomainError);
}

TEST_CASE("sandwich report") {
  auto z = sandwich_report(zero_profile(), 0.5, 0.1, small_disc(), 4);
  CHECK(z.c <= 1e-14);
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(z.mu_minus[j] - z.mu_fq[j]) <= 1e-10 * z.mu_fq[j]);
    CHECK(std::abs(z.mu_plus[j] - z.mu_fq[j]) <= 1e-10 * z.mu_fq[j]);
  }
  auto g = sandwich_report(gaussian_bump(2.0), 0.0, 0.1, small_disc(), 2);
  CHECK(g.ordering_ok);
  CHECK(g.mu_minus[0] < g.mu_fq[0]);
  CHECK(g.mu_fq[0] < g.mu_plus[0]);
  CHECK(g.deviation.size() == 2);
  // c = 0 drops the curvature corrections: a_- = a_+ cannot bracket fqunit
  CHECK_THROWS_AS(sandwich_report(gaussian_bump(2.0), 0.0, 0.1, small_disc(), 2, 0.0), OrderingError);
  CHECK_THROWS_AS(sandwich_report(gaussian_bump(2.0), 0.0, 0.1, small_disc(), 2, -5.0), DomainError);
}

TEST_CASE("reports") {
  auto empty = run_epsilon_sweep(zero_profile(), 0.0, {}, 1, small_disc());
  CHECK(format_report(empty, ReportFormat::csv) == "j,epsilon,lambda,threshold,splitting,mu_hat,reference,rel_error\n");

  auto r = run_epsilon_sweep(gaussian_bump(2.0), 0.0, {0.1, 0.05}, 2, small_disc());
  r.sandwich.push_back(sandwich_report(gaussian_bump(2.0), 0.0, 0.1, small_disc(), 2));
  auto csv = format_report(r, ReportFormat::csv);
  CHECK(count_lines(csv) == 1 + 2 * 2);
  auto back = parse_report_json(format_report(r, ReportFormat::json));
  // absorbed fits carry NaN, which never compares equal
  CHECK(format_report(back, ReportFormat::json) == format_report(r, ReportFormat::json));
  CHECK(back.entries == r.entries);
  CHECK(back.sandwich == r.sandwich);
  CHECK(back.provenance == r.provenance);

  auto dir = std::filesystem::temp_directory_path() / "relwave_report_test";
  std::filesystem::create_directories(dir);
  auto path = (dir / report_filename(r.profile_id, r.m, 0.1)).string();
  emit_report(r, ReportFormat::csv, path);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == csv);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(emit_report(r, ReportFormat::csv, (dir / "missing" / "x.csv").string()), std::runtime_error);
  CHECK(report_filename("gaussian_a2", 0, 0.1) == "gaussian_a2_0_0.1.csv");
  CHECK_THROWS_AS(parse_report_json("{"), PreconditionError);
  CHECK_THROWS_AS(parse_format("xml"), PreconditionError);
}

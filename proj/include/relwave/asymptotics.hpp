#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relwave/curve_geometry.hpp"
#include "relwave/eigensolve.hpp"
#include "relwave/strip_form.hpp"

namespace relwave {

struct DiracEigenvalues {
  std::vector<double> lambda;    ///< λ_j = sqrt(μ_{2j})
  std::vector<double> pair_gap;  ///< (μ_{2j} - μ_{2j-1}) / |μ_{2j}|
  std::vector<std::string> warnings;
};

/// Positive Dirac eigenvalues from the min-max values of the square, which
/// come in pairs by the symmetry of the spectrum. A pair further apart than
/// `degeneracy_tol` (relative) is reported as a warning.
/// Throws PreconditionError with fewer than 2·j_max values and OrderingError
/// if μ_{2j} is negative beyond `slack`.
DiracEigenvalues dirac_eigenvalues_from_square(const std::vector<double>& square, int j_max,
                                               double degeneracy_tol = 1e-6, double slack = 1e-10);
DiracEigenvalues dirac_eigenvalues_from_square(const SpectralResult& square, int j_max,
                                               double degeneracy_tol = 1e-6, double slack = 1e-10);

struct SweepEntry {
  int j = 0;
  double epsilon = 0.0;
  double lambda = 0.0;
  double threshold = 0.0;  ///< E₁(mε)/ε
  double splitting = 0.0;  ///< r_j(ε) = (λ_j - threshold)/ε
  bool absorbed = false;   ///< λ_j >= threshold: excluded from the fit
  double pair_gap = 0.0;
  double fit_residual = 0.0;  ///< r_j - μ̂_j - b_j ε (0 when absorbed)

  bool operator==(const SweepEntry&) const = default;
};

struct SlopeFit {
  int j = 0;
  int points = 0;
  double mu_hat = 0.0;  ///< intercept of r_j(ε) = μ̂ + bε
  double slope = 0.0;   ///< b
  double max_residual = 0.0;   ///< largest |r_j - μ̂ - bε| over the fitted points
  double residual_norm = 0.0;  ///< Euclidean norm of the fit residuals
  double reference = 0.0;  ///< (2/π)μ_j(q_e) on the same s-grid
  double rel_error = 0.0;
  /// μ̂ refitted without the largest ε (NaN with fewer than 3 points)
  double mu_hat_without_largest = 0.0;

  bool operator==(const SlopeFit&) const = default;
};

struct SandwichRecord {
  double epsilon = 0.0;
  double m = 0.0;
  double c = 0.0;
  double square_threshold = 0.0;  ///< E₁(mε)²/ε²
  std::vector<double> mu_minus, mu_fq, mu_plus;
  std::vector<double> mu_effective_pair;  ///< μ_j(q_e ⊕ q_e)
  std::vector<double> deviation;  ///< μ_j(fq) - E₁²/ε² - μ_j(q_e ⊕ q_e)
  bool ordering_ok = true;

  bool operator==(const SandwichRecord&) const = default;
};

struct AsymptoticReport {
  std::string profile_id;
  double m = 0.0;
  int j_max = 0;
  std::vector<double> epsilons;  ///< decreasing
  std::vector<double> mu_effective;  ///< μ_j(q_e), j = 1..j_max
  int J = 0;
  std::vector<SweepEntry> entries;  ///< ordered by ε (as given), then j
  std::vector<SlopeFit> fits;
  std::vector<SandwichRecord> sandwich;
  /// Largest ε of the sweep from which on every λ_j with μ_j(q_e) < 0 sits
  /// below the threshold; 0 if none.
  double epsilon1 = 0.0;
  std::vector<std::string> warnings;
  std::map<std::string, std::string> provenance;

  bool operator==(const AsymptoticReport&) const = default;
};

struct SweepOptions {
  SolverOptions solver;
  double degeneracy_tol = 1e-6;
  bool parallel = true;  ///< run ε-points concurrently (RELWAVE_THREADS caps workers)
};

/// For each ε: assembles fqunit on `disc` (ε, m replaced), takes λ_j from the
/// lowest 2·j_max min-max values, and fits r_j(ε) = μ̂_j + b_j ε by least
/// squares over the entries below the threshold. The reference (2/π)μ_j(q_e)
/// comes from the finite-difference q_e on the same s-grid.
/// Throws DomainError if an ε is not below ε₀/2 or the list is not decreasing.
AsymptoticReport run_epsilon_sweep(const CurveProfile& profile, double m,
                                   const std::vector<double>& epsilons, int j_max,
                                   const StripDiscretization& disc, const SweepOptions& options = {});

/// The report on a subset of its ε (in the given order), refitted.
/// Throws PreconditionError for an ε that was not computed.
AsymptoticReport restrict_sweep(const AsymptoticReport& report, const std::vector<double>& epsilons);

/// μ_j(a_-) <= μ_j(fq) <= μ_j(a_+) for j <= n_ev and the deviation from
/// E₁²/ε² + μ_j(q_e ⊕ q_e). c defaults to the estimated sandwich constant.
/// Throws OrderingError on an ordering violation beyond `slack` (relative).
SandwichRecord sandwich_report(const CurveProfile& profile, double m, double eps,
                               const StripDiscretization& disc, int n_ev = 4,
                               std::optional<double> c = std::nullopt,
                               const SolverOptions& solver = {}, double slack = 1e-12);

enum class ReportFormat { csv, json };

ReportFormat parse_format(const std::string& name);

/// CSV columns j, epsilon, lambda, threshold, splitting, mu_hat, reference,
/// rel_error (numbers with 17 significant digits); JSON carries every field
/// plus the provenance block.
std::string format_report(const AsymptoticReport& report, ReportFormat format);
/// Writes format_report to `path`; I/O failures are thrown as runtime_error.
void emit_report(const AsymptoticReport& report, ReportFormat format, const std::string& path);
AsymptoticReport parse_report_json(const std::string& text);

/// "{profile}_{m}_{epsilon}.csv"
std::string report_filename(const std::string& profile_id, double m, double epsilon);

/// Least-squares line through (x, y): returns (intercept, slope).
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace relwave

#pragma once

#include <string>
#include <vector>

#include "relwave/asymptotics.hpp"
#include "relwave/curve_geometry.hpp"
#include "relwave/strip_form.hpp"

namespace relwave {

/// Built-in profile name with its parameters, or a file.
struct ProfileSpec {
  std::string name = "gaussian";  ///< gaussian | compact | zero | constant | profile-file | curve-file
  double a = 2.0;
  double sigma = 1.0;
  double w = 1.0;
  double c = 0.0;
  std::string path;  ///< "s kappa" table (profile-file) or "s x y" samples (curve-file)
};

/// Throws PreconditionError for an unknown name and runtime_error if a file is unreadable.
CurveProfile make_profile(const ProfileSpec& spec);

struct VerifyThresholds {
  double slope_tol = 0.05;         ///< |μ̂_j - (2/π)μ_j(q_e)| / |(2/π)μ_j(q_e)| for j <= J
  bool residual_scaling = true;    ///< compare fit residuals of the sweep and the halved sweep
  double residual_ratio = 4.0;
  double residual_ratio_tol = 0.5;
  double degeneracy_tol = 1e-6;
  double threshold_tol = 1e-9;     ///< relative slack of λ_j >= E₁/ε for j > J
  double sandwich_ratio_tol = 0.25;  ///< μ₁(a_+) - μ₁(a_-) halves with ε within this
};

/// Sections [profile], [sweep], [grid], [solver], [verify], [output] with
/// flat "key = value" lines; '#' starts a comment, lists are comma separated.
struct RunConfig {
  ProfileSpec profile;
  std::vector<double> m{0.0};
  std::vector<double> epsilons{0.1, 0.05, 0.025, 0.0125};
  int j_max = 2;
  std::vector<double> sandwich_epsilons;
  int sandwich_n_ev = 4;
  StripDiscretization disc;
  SolverOptions solver;
  VerifyThresholds verify;
  std::string out_dir = ".";
  ReportFormat format = ReportFormat::csv;

  /// Fail-fast checks of every module precondition (grid sizes, m >= 0,
  /// decreasing ε < ε₀/2, ...). Throws PreconditionError or DomainError.
  void validate() const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

}  // namespace relwave

#pragma once

#include <functional>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "relwave/curve_geometry.hpp"
#include "relwave/discretized_form.hpp"
#include "relwave/eigensolve.hpp"
#include "relwave/transverse_spectrum.hpp"

namespace relwave {

/// n interior nodes s_i = -L + (i + 1)h of [-L, L], h = 2L/(n + 1), Dirichlet at ±L.
struct Grid1D {
  double half_length = 40.0;
  int n = 4000;

  double h() const { return 2.0 * half_length / (n + 1); }
  double node(int i) const { return -half_length + (i + 1) * h(); }
  std::vector<double> nodes() const;
  /// Throws DomainError unless L > 0 and n >= 3.
  void validate() const;
};

struct EffectiveSpectrum {
  std::vector<double> mu;  ///< ascending
  std::vector<double> residuals;
  int J = 0;               ///< number of mu below -tol_zero
  bool J_complete = true;  ///< false if every computed value was negative
  double tol_zero = 1e-10;
  double gap_below = 0.0;  ///< mu_J (0 when J = 0)
  double gap_above = 0.0;  ///< mu_{J+1}
  std::map<std::string, std::string> provenance;
};

/// ∫ |f′|² + V|f|² on the Dirichlet grid: stiffness 2/h + hV_i on the
/// diagonal and -1/h off it, mass h·I.
DiscretizedForm assemble_schrodinger(const std::function<double(double)>& potential,
                                     const Grid1D& grid);

/// q_e[f] = ∫ |f′|² - (κ²/π²)|f|². A κ tail above the profile's tail bound at
/// ±L is recorded in provenance["warning"].
DiscretizedForm assemble_qe(const CurveProfile& profile, const Grid1D& grid);

/// The lowest n_ev values with J counting. If all are negative, n_ev is
/// doubled (up to the grid size) so that J is not undercounted.
EffectiveSpectrum effective_spectrum(const DiscretizedForm& form, int n_ev,
                                     double tol_zero = 1e-10, const SolverOptions& options = {});

/// Data the shooting integration starts from at ±L.
enum class ShootingBoundary {
  dirichlet,  ///< f(±L) = 0: the same truncated problem as the grid forms
  decaying,   ///< f′ = ±sqrt(-μ) f: the free-space tail, approximating the whole line
};

struct ShootingOptions {
  double mu_lo = std::numeric_limits<double>::quiet_NaN();  ///< default: -sup V
  double mu_hi = -1e-9;
  int scan_points = 200;
  double half_length = 40.0;
  double step = 2e-3;
  ShootingBoundary boundary = ShootingBoundary::dirichlet;
};

struct ShootingResult {
  double mu = 0.0;
  /// f′(0)/|(f(0), f′(0))| of the left solution; 0 for an even state.
  double matching_derivative = 0.0;
  int evaluations = 0;
};

/// Lowest eigenvalue of -f″ - (κ²/π²)f by RK4 integration from ±L,
/// matching the normalized Wronskian at s = 0.
/// Throws ConvergenceError("no bound state in bracket") without a sign change.
ShootingResult shooting_mu1(const CurveProfile& profile, const ShootingOptions& options = {});
ShootingResult shooting_mu1(const std::function<double(double)>& potential, double sup_potential,
                            const ShootingOptions& options = {});

/// Gauge phase θ(s) = ρ(s)/π.
std::vector<double> gauge_phase(const CurveProfile& profile, const std::vector<double>& nodes);

/// q̃_e[f] = ∫ |f′ - i(κ/π)σ₃f|² - (κ²/π²)|f|² on 2-vector grid functions
/// (dof 2i + c). Each cell carries the link phase e^{∓iα_iσ₃} with
/// 2α_i = θ(s_{i+1}) - θ(s_i), so the discrete form is exactly gauge
/// covariant.
DiscretizedForm assemble_qe_tilde(const CurveProfile& profile, const Grid1D& grid);

/// q_e ⊕ q_e on the same dof layout as assemble_qe_tilde.
DiscretizedForm assemble_qe_pair(const CurveProfile& profile, const Grid1D& grid);

/// (Uf)_i = e^{iθ(s_i)σ₃} f_i for a grid function with dof 2i + c.
Vector gauge_transform(const CurveProfile& profile, const Grid1D& grid, const Vector& f);

/// A smooth 2-vector function of s with its derivative, supported in [a, b].
struct SpinorField {
  std::function<Spinor(double)> value;
  std::function<Spinor(double)> derivative;
  double a = -1.0;
  double b = 1.0;
};

/// Uf = e^{iθσ₃}f with θ = ρ/π, derivative by the product rule.
SpinorField gauge_transform(const CurveProfile& profile, const SpinorField& f);

/// (q_e ⊕ q_e)[f] by composite Gauss–Legendre over the support.
double qe_pair_value(const CurveProfile& profile, const SpinorField& f, int panels = 200);
/// q̃_e[g] by composite Gauss–Legendre over the support.
double qe_tilde_value(const CurveProfile& profile, const SpinorField& g, int panels = 200);

struct WitnessResult {
  double value = 0.0;  ///< q_e[ψ_θ]
  double bound = 0.0;  ///< 2/θ - (1/π²)∫_{-θ}^{θ} κ²
  bool bound_holds = false;
};

/// q_e on the trapezoid ψ_θ (1 on [-θ, θ], linear to 0 at ±2θ).
/// Throws DomainError unless 0 < θ < grid.half_length/2.
WitnessResult psi_theta_witness(const CurveProfile& profile, double theta, const Grid1D& grid);

}  // namespace relwave

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "relwave/curve_geometry.hpp"
#include "relwave/discretized_form.hpp"
#include "relwave/effective_operator.hpp"

namespace relwave {

enum class TransverseBackend { galerkin, tensor };

std::string to_string(TransverseBackend backend);

/// Discretization of the strip R × (-1, 1): a Dirichlet s-grid times a
/// transverse trial space, either the first P eigenmode pairs of T(mε)
/// (galerkin) or continuous quadratic finite elements on n_t intervals with
/// the boundary condition built into the basis (tensor).
struct StripDiscretization {
  Grid1D s_grid{40.0, 4000};
  TransverseBackend backend = TransverseBackend::galerkin;
  int modes = 6;                ///< P (galerkin)
  int n_t = 48;                 ///< intervals in t, even (tensor)
  int quadrature_points = 64;   ///< Gauss–Legendre points in t (galerkin)
  int element_points = 6;       ///< Gauss–Legendre points per element (tensor)
  double epsilon = 0.1;
  double m = 0.0;

  static constexpr int max_modes = 8;

  /// Throws DomainError on invalid sizes or ε >= ε₀.
  void validate(const CurveProfile& profile) const;
};

/// Real trial functions ψ_a(t) = (ψ_a¹, ψ_a²) sampled at t-quadrature points,
/// each satisfying ψ²(±1) = ∓ψ¹(±1).
struct TransverseBasis {
  int dim = 0;
  std::vector<double> t;
  std::vector<double> weight;
  /// Per quadrature point: indices of the nonzero functions and their values.
  std::vector<std::vector<int>> support;
  std::vector<std::vector<Eigen::Vector2d>> values;
  /// ‖T(mε)u‖² on the span, and the Gram matrix ∫⟨ψ_a, ψ_b⟩ by the same quadrature.
  Eigen::MatrixXd form;
  Eigen::MatrixXd gram;
  /// Index pairs (a, b) that may couple; Gram entries outside vanish.
  std::vector<std::pair<int, int>> pattern;

  /// ∫ w(t) ⟨ψ_a, ψ_b⟩ dt (or ⟨ψ_a, σ₃ψ_b⟩), w given at the quadrature points.
  Eigen::MatrixXd weighted_gram(const std::vector<double>& w, bool sigma3 = false) const;
};

/// φ_p^{mass,±} for p = 1..P, ordered (1,+), (1,-), (2,+), ...; form = diag(E_p²).
TransverseBasis galerkin_basis(int modes, double mass, int quadrature_points);
/// Quadratic Lagrange elements; form = ∫|u′|² + mass²∫|u|² + mass(|u(1)|² + |u(-1)|²).
TransverseBasis tensor_basis(int n_t, double mass, int element_points);
TransverseBasis make_basis(const StripDiscretization& disc);

/// ‖E_Γ(ε)u‖² on the discrete space: the weighted covariant s-derivative
/// (link phases from ρ/2), the transverse form (1/ε²)‖T(mε)u‖² (which carries
/// the boundary trace and m² terms), and the curvature potentials
/// -κ²/(4(1-εtκ)²) - (5/4)(εtκ′)²/(1-εtκ)⁴ - (1/2)εtκ″/(1-εtκ)³.
/// Throws DomainError("1 - eps*t*kappa <= 0 on grid") on metric degeneracy.
DiscretizedForm assemble_fqunit(const CurveProfile& profile, const StripDiscretization& disc);

enum class SandwichSign { minus, plus };

/// a_±[u] = (1 ± cε)∫(|∂_s u - i(κ/2)σ₃u|² - (κ²/4)|u|²) + (1/ε²)∫‖T(mε)u‖² ± cε‖u‖²
/// on the dof layout of assemble_fqunit.
DiscretizedForm assemble_a_pm(const CurveProfile& profile, const StripDiscretization& disc,
                              double c, SandwichSign sign);

struct SandwichConstant {
  double c = 0.0;
  double c_minus = 0.0;  ///< smallest c making a_- <= fqunit
  double c_plus = 0.0;   ///< smallest c making fqunit <= a_+
  double beta = 0.0;     ///< -min(0, lowest value of -d² - κ²/4 on the s-grid)
  std::string derivation;
};

/// A constant c with a_-[u] <= ‖E_Γ(ε)u‖² <= a_+[u] for every u of the
/// discrete space of `disc`. For each t-quadrature point the weight
/// deviations W = (1-εtκ)^{-2} - 1 are bounded by their extremes over the
/// s-cells, part of the covariant kinetic term absorbs the κ² deviation
/// through the lower bound -β of the discrete -d² - κ²/4, and the remaining
/// node-wise inequalities fix cε.
/// Throws DomainError if ε > ε₀/2 or β >= 1.
SandwichConstant estimate_sandwich_constant(const CurveProfile& profile,
                                            const StripDiscretization& disc);
/// Same on the default discretization (L = 40, n = 4000, 64-point rule in t).
SandwichConstant estimate_sandwich_constant(const CurveProfile& profile, double eps);

/// E₁(mε)²/ε² minus 1.1 times the bound on the curvature potentials, minus 1.
double strip_shift(const CurveProfile& profile, const StripDiscretization& disc);

}  // namespace relwave

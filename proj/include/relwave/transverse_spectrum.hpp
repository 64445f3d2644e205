#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace relwave {

using Spinor = Eigen::Vector2cd;

struct PauliConstants {
  Eigen::Matrix2cd sigma1;
  Eigen::Matrix2cd sigma2;
  Eigen::Matrix2cd sigma3;
};

const PauliConstants& pauli();

/// m sin(2k) + k cos(2k); its p-th positive root is k_p(m).
double dispersion(double k, double m);

/// k_p(m) in [(2p-1)π/4, pπ/2): bisection to width 1e-10, then Newton polish.
/// Throws DomainError for p < 1, m < 0 or non-finite m.
double transverse_root(int p, double m);

/// π/4 + 2m/π - 16m²/π³, the small-m expansion of k_1(m) (meant for m <= 0.3).
double k1_series(double m);

/// E_p(m) = sqrt(m² + k_p(m)²).
double transverse_energy(int p, double m);

/// E_1(mε)/ε, the bottom of the positive essential spectrum.
double essential_threshold(double m, double eps);

enum class Branch { plus, minus };

/// Eigenfunction φ_p^{m,±} of T(m) = -iσ₂ d/dt + mσ₃ on (-1, 1) with
/// u₂(±1) = ∓u₁(±1). The + branch has eigenvalue +E_p(m), the - branch
/// (σ₁ applied to +) has -E_p(m). All eigenfunctions are real.
class TransverseMode {
 public:
  TransverseMode(int p, double m, Branch sign = Branch::plus);

  int p() const { return p_; }
  double m() const { return m_; }
  double k() const { return k_; }
  double energy() const { return energy_; }
  double normalization() const { return normalization_; }
  Branch sign() const { return sign_; }
  /// +E or -E depending on the branch.
  double eigenvalue() const { return sign_ == Branch::plus ? energy_ : -energy_; }

  /// Unchecked evaluation; callers guarantee |t| <= 1.
  Eigen::Vector2d value(double t) const;
  Eigen::Vector2d derivative(double t) const;

 private:
  int p_;
  double m_;
  double k_;
  double energy_;
  double normalization_;
  Branch sign_;
};

/// φ_p^{m,±}(t); throws DomainError for |t| > 1.
Spinor eigenfunction_eval(const TransverseMode& mode, double t);
Spinor eigenfunction_derivative(const TransverseMode& mode, double t);

/// (T(m)u)(t) = (-u₂′ + m u₁, u₁′ - m u₂).
Spinor apply_transverse(const Spinor& u, const Spinor& du, double m);

/// A spinor-valued function on [-1, 1] with its derivative.
struct SpinorFunction {
  std::function<Spinor(double)> value;
  std::function<Spinor(double)> derivative;
};

SpinorFunction as_function(const TransverseMode& mode);

/// ∫_{-1}^{1} ⟨f, g⟩ dt (conjugate-linear in f) by adaptive Gauss–Legendre.
std::complex<double> inner_product(const std::function<Spinor(double)>& f,
                                   const std::function<Spinor(double)>& g, double tol = 1e-12);

/// M_ab = ∫⟨φ_1^{m,a}, σ₃ φ_1^{m,b}⟩ dt with a, b in (+, -) order.
Eigen::Matrix2cd sigma3_matrix_elements(double m);

/// |‖T(m)u‖² - (‖u′‖² + m²‖u‖² + m(|u(1)|² + |u(-1)|²))|.
/// Throws PreconditionError if u violates u₂(±1) = ∓u₁(±1) by more than bc_tol.
double transverse_form_identity_check(const SpinorFunction& u, double m, double bc_tol = 1e-10);

/// ‖T(m)u - λu‖ for an eigenpair candidate, by quadrature.
double eigen_residual(const TransverseMode& mode);

struct Projection {
  std::complex<double> plus;
  std::complex<double> minus;
};

/// Coefficients of Π^δ u = ⟨φ_1^{δ,+}, u⟩φ_1^{δ,+} + ⟨φ_1^{δ,-}, u⟩φ_1^{δ,-}.
Projection project_pi_delta(const std::function<Spinor(double)>& u, double delta);

/// Π^δ u evaluated from its coefficients.
std::function<Spinor(double)> reconstruct(const Projection& c, double delta);

/// JSON record {"p", "m", "k", "E", "N", "sign"}.
std::string to_json(const TransverseMode& mode);

}  // namespace relwave

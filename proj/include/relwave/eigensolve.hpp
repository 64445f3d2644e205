#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relwave/discretized_form.hpp"

namespace relwave {

struct SpectralResult {
  std::vector<double> eigenvalues;  ///< ascending
  Eigen::MatrixXcd eigenvectors;    ///< B-orthonormal columns
  std::vector<double> residuals;    ///< ‖Ax - λBx‖ / ‖Bx‖
  int iterations = 0;
  double shift = 0.0;  ///< final shift σ (A - σB was positive definite there)
  std::string solver;
};

struct SolverOptions {
  double tol = 1e-10;  ///< residual bound, relative to max(1, |λ|)
  int max_cycles = 400;
  int block_size = 0;  ///< 0: n_ev + 2
  int krylov_depth = 0;  ///< block steps per cycle, 0: automatic
  std::optional<double> shift;  ///< overrides DiscretizedForm::shift_hint
  std::uint64_t seed = 20240607;
  bool verbose = false;  ///< "iter k: ritz values ..." on std::clog
};

/// The n_ev smallest eigenvalues of the pencil (A, B) by restarted block
/// shift-invert Krylov iteration with full B-reorthogonalization and
/// Rayleigh–Ritz on A. The shift is lowered until A - σB factors (which
/// certifies that no eigenvalue lies below σ), and moved up next to the
/// wanted cluster once the lowest Ritz value settles.
SpectralResult lowest_eigenpairs(const DiscretizedForm& form, int n_ev,
                                 const SolverOptions& options = {});

/// Full dense generalized eigensolve; the reference for small pencils.
SpectralResult dense_eigenpairs(const DiscretizedForm& form);

/// v*Av / v*Bv. Throws PreconditionError if v*Bv <= 0 or the quotient has a
/// non-negligible imaginary part.
double rayleigh_quotient(const DiscretizedForm& form, const Vector& v);

}  // namespace relwave

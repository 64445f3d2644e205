#include "relwave/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "relwave/errors.hpp"

namespace relwave {

namespace {

using Dense = Eigen::MatrixXcd;
using Factor = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

void check_pencil(const DiscretizedForm& form) {
  if (form.stiffness.rows() != form.stiffness.cols() || form.mass.rows() != form.mass.cols() ||
      form.stiffness.rows() != form.mass.rows())
    throw PreconditionError("eigensolve: stiffness and mass must be square of equal size");
  if (form.stiffness.rows() == 0) throw PreconditionError("eigensolve: empty pencil");
  // a positive diagonal is necessary for a positive definite mass
  for (int k = 0; k < form.mass.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(form.mass, k); it; ++it)
      if (it.row() == it.col() && !(it.value().real() > 0.0))
        throw PreconditionError("eigensolve: mass matrix is not positive definite");
}

// Factors A - σB, lowering σ by step, 2·step, 4·step, ... until the
// factorization succeeds. The symbolic analysis is done once per factor.
double factor_shifted(const DiscretizedForm& form, double sigma, double step, Factor& factor,
                      bool& analyzed, bool verbose) {
  for (int attempt = 0; attempt < 60; ++attempt) {
    const SparseMatrix shifted = form.stiffness - Complex(sigma) * form.mass;
    if (!analyzed) {
      factor.analyzePattern(shifted);
      analyzed = true;
    }
    factor.factorize(shifted);
    if (factor.info() == Eigen::Success) return sigma;
    if (verbose) std::clog << "shift " << sigma << " not below the spectrum, lowering\n";
    sigma -= step;
    step *= 2.0;
  }
  throw ConvergenceError("eigensolve: no shift found below the spectrum after 60 attempts");
}

double gershgorin_floor(const DiscretizedForm& form) {
  // valid lower bound when B is diagonal; otherwise only a starting guess
  Eigen::VectorXd radius = Eigen::VectorXd::Zero(form.size());
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(form.size());
  for (int k = 0; k < form.stiffness.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(form.stiffness, k); it; ++it) {
      if (it.row() == it.col())
        diag(it.row()) = it.value().real();
      else
        radius(it.row()) += std::abs(it.value());
    }
  Eigen::VectorXd bdiag = Eigen::VectorXd::Ones(form.size());
  for (int k = 0; k < form.mass.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(form.mass, k); it; ++it)
      if (it.row() == it.col()) bdiag(it.row()) = it.value().real();
  double floor = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < form.size(); ++i)
    floor = std::min(floor, (diag(i) - radius(i)) / std::max(bdiag(i), 1e-300));
  return floor;
}

// Orthonormalizes the columns of W against V and among themselves in the B
// inner product: block classical Gram–Schmidt against V applied twice, then
// column by column within the block. Returns the kept columns.
Dense b_orthonormalize(const Eigen::Ref<const Dense>& V, Dense W, const SparseMatrix& B) {
  Eigen::VectorXd before(W.cols());
  for (Eigen::Index j = 0; j < W.cols(); ++j)
    before(j) = std::sqrt(std::max(0.0, W.col(j).dot(B * W.col(j)).real()));
  if (V.cols() > 0) {
    for (int pass = 0; pass < 2; ++pass) {
      const Dense BW = B * W;
      W.noalias() -= V * (V.adjoint() * BW);
    }
  }
  Dense kept(W.rows(), 0);
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    if (!(before(j) > 0.0)) continue;
    Vector w = W.col(j);
    if (kept.cols() > 0) {
      for (int pass = 0; pass < 2; ++pass) w -= kept * (kept.adjoint() * (B * w));
    }
    const double after = std::sqrt(std::max(0.0, w.dot(B * w).real()));
    if (after <= 1e-13 * before(j)) continue;
    kept.conservativeResize(Eigen::NoChange, kept.cols() + 1);
    kept.col(kept.cols() - 1) = w / after;
  }
  return kept;
}

}  // namespace

SpectralResult lowest_eigenpairs(const DiscretizedForm& form, int n_ev,
                                 const SolverOptions& options) {
  check_pencil(form);
  if (n_ev < 1) throw PreconditionError("eigensolve: n_ev must be >= 1");
  const Eigen::Index n = form.size();
  if (n <= 2 * (n_ev + 8)) {
    SpectralResult dense = dense_eigenpairs(form);
    dense.eigenvalues.resize(std::min<std::size_t>(n_ev, dense.eigenvalues.size()));
    dense.residuals.resize(dense.eigenvalues.size());
    dense.eigenvectors.conservativeResize(Eigen::NoChange, dense.eigenvalues.size());
    return dense;
  }
  const SparseMatrix& A = form.stiffness;
  const SparseMatrix& B = form.mass;
  const int b = options.block_size > 0 ? options.block_size : n_ev + 2;
  const int keep = std::min<Eigen::Index>(2 * b, n / 2);
  const int depth = options.krylov_depth > 0 ? options.krylov_depth : std::max(4, 48 / b);

  double sigma = options.shift ? *options.shift
                               : (form.shift_hint ? *form.shift_hint : gershgorin_floor(form));
  Factor factor;
  bool analyzed = false;
  sigma = factor_shifted(form, sigma, std::max(1.0, std::abs(sigma)) * 0.05, factor, analyzed,
                         options.verbose);
  int reshifts = 0;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Dense X(n, b);
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = Complex(normal(rng), normal(rng));
  // Krylov basis in preallocated storage; the first `used` columns are live.
  const Eigen::Index capacity = std::min<Eigen::Index>(n, keep + static_cast<Eigen::Index>(depth) * b);
  Dense V(n, capacity), AV(n, capacity);
  Eigen::Index used = 0;
  {
    Dense start = b_orthonormalize(Dense(n, 0), X, B);
    used = start.cols();
    V.leftCols(used) = start;
    AV.leftCols(used) = A * start;
  }
  Dense front = V.leftCols(used);

  std::vector<std::vector<double>> history;
  for (int cycle = 1; cycle <= options.max_cycles; ++cycle) {
    for (int step = 0; step < depth && front.cols() > 0; ++step) {
      Dense W(n, front.cols());
      for (Eigen::Index j = 0; j < front.cols(); ++j) {
        W.col(j) = step == 0 && cycle > 1 ? factor.solve(Vector(front.col(j)))
                                          : factor.solve(Vector(B * front.col(j)));
      }
      Dense fresh = b_orthonormalize(V.leftCols(used), W, B);
      const Eigen::Index add = std::min<Eigen::Index>(fresh.cols(), capacity - used);
      if (add == 0) break;
      V.middleCols(used, add) = fresh.leftCols(add);
      AV.middleCols(used, add).noalias() = A * fresh.leftCols(add);
      used += add;
      front = fresh.leftCols(add);
    }

    Dense H = V.leftCols(used).adjoint() * AV.leftCols(used);
    H = 0.5 * (H + H.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Dense> small(H);
    const Eigen::Index k = std::min<Eigen::Index>(keep, used);
    const Dense Q = small.eigenvectors().leftCols(k);
    Dense Y = V.leftCols(used) * Q;
    Dense AY = AV.leftCols(used) * Q;
    const Eigen::VectorXd theta = small.eigenvalues().head(k);

    const int wanted = static_cast<int>(std::min<Eigen::Index>(n_ev, k));
    std::vector<double> res(wanted);
    bool converged = wanted == n_ev;
    for (int j = 0; j < wanted; ++j) {
      const Vector by = B * Y.col(j);
      res[j] = (AY.col(j) - theta(j) * by).norm() / by.norm();
      if (res[j] > options.tol * std::max(1.0, std::abs(theta(j)))) converged = false;
    }
    history.emplace_back(theta.data(), theta.data() + wanted);
    if (options.verbose) {
      std::clog << "iter " << cycle << ": ritz values";
      for (int j = 0; j < wanted; ++j) std::clog << ' ' << theta(j);
      std::clog << "  (max residual " << *std::max_element(res.begin(), res.end()) << ", shift "
                << sigma << ")\n";
    }
    if (converged) {
      SpectralResult out;
      out.eigenvalues.assign(theta.data(), theta.data() + n_ev);
      out.eigenvectors = Y.leftCols(n_ev);
      out.residuals = res;
      out.iterations = cycle;
      out.shift = sigma;
      out.solver = "block shift-invert Krylov";
      return out;
    }

    // Move the shift next to the wanted cluster. Ritz values bound the
    // eigenvalues from above, so a failed factorization only costs a retry.
    if (reshifts < 4 && wanted == n_ev) {
      const double spread = std::max(theta(n_ev - 1) - theta(0), 1e-8 * std::max(1.0, std::abs(theta(0))));
      const double target = theta(0) - 0.5 * spread;
      if (theta(0) - sigma > 4.0 * spread) {
        sigma = factor_shifted(form, target, spread, factor, analyzed, options.verbose);
        ++reshifts;
      }
    }

    // Restart from the kept Ritz vectors; the next block is the shift-inverted
    // residual of the lowest ones, which spans the same Krylov direction as
    // OP·y without losing it to cancellation against y.
    const Eigen::Index nb = std::min<Eigen::Index>(b, Y.cols());
    front = AY.leftCols(nb) - B * Y.leftCols(nb) * theta.head(nb).asDiagonal();
    V.leftCols(k) = Y;
    AV.leftCols(k) = AY;
    used = k;
  }
  std::ostringstream msg;
  msg << "eigensolve: no convergence in " << options.max_cycles << " cycles; last ritz values";
  const std::size_t from = history.size() > 3 ? history.size() - 3 : 0;
  for (std::size_t h = from; h < history.size(); ++h) {
    msg << " [";
    for (double v : history[h]) msg << ' ' << v;
    msg << " ]";
  }
  throw ConvergenceError(msg.str());
}

SpectralResult dense_eigenpairs(const DiscretizedForm& form) {
  check_pencil(form);
  Dense A = Dense(form.stiffness);
  Dense B = Dense(form.mass);
  A = 0.5 * (A + A.adjoint()).eval();
  B = 0.5 * (B + B.adjoint()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Dense> solver(A, B);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("dense eigensolve failed (mass not positive definite?)");
  SpectralResult out;
  const Eigen::VectorXd& values = solver.eigenvalues();
  out.eigenvalues.assign(values.data(), values.data() + values.size());
  out.eigenvectors = solver.eigenvectors();
  out.residuals.resize(values.size());
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    const Vector x = out.eigenvectors.col(j);
    const Vector bx = B * x;
    out.residuals[j] = (A * x - values(j) * bx).norm() / bx.norm();
  }
  out.iterations = 1;
  out.solver = "dense";
  return out;
}

double rayleigh_quotient(const DiscretizedForm& form, const Vector& v) {
  check_pencil(form);
  if (v.size() != form.size()) throw PreconditionError("rayleigh_quotient: vector size mismatch");
  const Complex num = v.dot(form.stiffness * v);
  const Complex den = v.dot(form.mass * v);
  if (!(den.real() > 0.0)) throw PreconditionError("rayleigh_quotient: v*Bv <= 0");
  // scale of the roundoff in the imaginary part
  const Eigen::VectorXd av = v.cwiseAbs();
  double scale = 0.0;
  for (int k = 0; k < form.stiffness.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(form.stiffness, k); it; ++it)
      scale += av(it.row()) * std::abs(it.value()) * av(it.col());
  if (std::abs(num.imag()) > 1e-12 * std::max(scale, 1e-300) ||
      std::abs(den.imag()) > 1e-12 * den.real())
    throw PreconditionError("rayleigh_quotient: form is not Hermitian on v");
  return num.real() / den.real();
}

}  // namespace relwave

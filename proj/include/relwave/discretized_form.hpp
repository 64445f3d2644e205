#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace relwave {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Vector = Eigen::VectorXcd;
using Triplets = std::vector<Eigen::Triplet<Complex>>;

enum class FormKind { qe, qe_tilde, schrodinger, fqunit, a_minus, a_plus, generic };

std::string to_string(FormKind kind);

/// Quadratic form Q[v] = v*Av on a finite-dimensional trial space, with the
/// L² Gram matrix B of that space. Eigenvalues of the pencil (A, B) are the
/// Rayleigh–Ritz approximations of the min-max values of the form.
struct DiscretizedForm {
  SparseMatrix stiffness;
  SparseMatrix mass;
  FormKind kind = FormKind::generic;
  /// Degrees of freedom per s-node; dof index = node * block + local.
  int block = 1;
  std::vector<double> s_nodes;
  /// A value known to lie below the spectrum, used as the first solver shift.
  std::optional<double> shift_hint;
  std::map<std::string, std::string> provenance;

  Eigen::Index size() const { return stiffness.rows(); }
};

/// max |A_ij - conj(A_ji)| over stored entries.
double hermiticity_residual(const SparseMatrix& a);

/// Entry-for-entry equality of two sparse matrices (same pattern, same values).
bool identical(const SparseMatrix& a, const SparseMatrix& b);

/// Coordinate text, one "row col real imag" line per stored entry, 0-based.
void export_coordinate(const SparseMatrix& a, std::ostream& out);
void export_coordinate(const SparseMatrix& a, const std::string& path);

SparseMatrix from_triplets(Eigen::Index n, const Triplets& entries);

}  // namespace relwave

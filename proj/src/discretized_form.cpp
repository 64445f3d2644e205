#include "relwave/discretized_form.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace relwave {

std::string to_string(FormKind kind) {
  switch (kind) {
    case FormKind::qe: return "qe";
    case FormKind::qe_tilde: return "qe_tilde";
    case FormKind::schrodinger: return "schrodinger";
    case FormKind::fqunit: return "fqunit";
    case FormKind::a_minus: return "a_minus";
    case FormKind::a_plus: return "a_plus";
    case FormKind::generic: return "generic";
  }
  return "generic";
}

double hermiticity_residual(const SparseMatrix& a) {
  const SparseMatrix adjoint = a.adjoint();
  const SparseMatrix diff = a - adjoint;
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

bool identical(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) return false;
  SparseMatrix ca = a;
  SparseMatrix cb = b;
  ca.makeCompressed();
  cb.makeCompressed();
  for (int k = 0; k < ca.outerSize(); ++k) {
    SparseMatrix::InnerIterator ia(ca, k);
    SparseMatrix::InnerIterator ib(cb, k);
    for (; ia && ib; ++ia, ++ib) {
      if (ia.index() != ib.index() || ia.value() != ib.value()) return false;
    }
    if (ia || ib) return false;
  }
  return true;
}

void export_coordinate(const SparseMatrix& a, std::ostream& out) {
  out << std::setprecision(17);
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag()
          << '\n';
  if (!out) throw std::runtime_error("matrix export: write failed");
}

void export_coordinate(const SparseMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  export_coordinate(a, out);
}

SparseMatrix from_triplets(Eigen::Index n, const Triplets& entries) {
  SparseMatrix m(n, n);
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

}  // namespace relwave

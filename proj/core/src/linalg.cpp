#include "shufflebn/linalg.hpp"

#include <algorithm>

namespace shufflebn {

Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector();
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues();
}

double spectral_norm(const Matrix& a) {
  Vector s = singular_values(a);
  return s.size() ? s(0) : 0.0;
}

Index numerical_rank(const Matrix& a, double rel_tol) {
  Vector s = singular_values(a);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  double cut = rel_tol * s(0);
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return r;
}

double sigma_min_gram(const Matrix& a, double rel_tol) {
  if (a.rows() == 0) return 0.0;
  if (a.cols() < a.rows()) return 0.0;
  Vector s = singular_values(a);
  if (s(0) == 0.0 || s(s.size() - 1) <= rel_tol * s(0)) return 0.0;
  double smin = s(s.size() - 1);
  return smin * smin;
}

Matrix column_span_basis(const Matrix& a, double rel_tol) {
  if (a.cols() == 0) return Matrix(a.rows(), 0);
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  Index r = 0;
  if (s.size() && s(0) > 0.0)
    for (Index i = 0; i < s.size(); ++i)
      if (s(i) > rel_tol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

Matrix min_norm_solve(const Matrix& a, const Matrix& b, double rel_tol, bool* rank_deficient) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(rel_tol);
  cod.compute(a);
  if (rank_deficient) *rank_deficient = cod.rank() < std::min(a.rows(), a.cols());
  return cod.solve(b);
}

}  // namespace shufflebn

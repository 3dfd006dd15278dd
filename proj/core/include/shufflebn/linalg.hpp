#pragma once

#include "shufflebn/types.hpp"

namespace shufflebn {

inline constexpr double kRankTolerance = 1e-8;

Vector singular_values(const Matrix& a);
double spectral_norm(const Matrix& a);

// Number of singular values above rel_tol * sigma_max.
Index numerical_rank(const Matrix& a, double rel_tol = kRankTolerance);

// Smallest eigenvalue of a * a^T, clamped at zero when a is rank deficient.
double sigma_min_gram(const Matrix& a, double rel_tol = kRankTolerance);

// Orthonormal basis (columns) of the column span of a.
Matrix column_span_basis(const Matrix& a, double rel_tol = kRankTolerance);

// Minimum-norm least squares solution of a x = b; pivots below
// rel_tol * max pivot are treated as zero.
Matrix min_norm_solve(const Matrix& a, const Matrix& b, double rel_tol = 1e-12,
                      bool* rank_deficient = nullptr);

}  // namespace shufflebn

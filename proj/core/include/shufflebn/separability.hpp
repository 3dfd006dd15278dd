#pragma once

#include <vector>

#include "shufflebn/dataset.hpp"

namespace shufflebn {

inline constexpr double kSeparabilityTol = 1e-7;

enum class SepKind { LS, PLS, SC };
const char* sep_kind_name(SepKind kind);

struct SeparabilityDecomposition {
  std::vector<Index> ls_indices;
  std::vector<Index> sc_indices;
  SepKind kind = SepKind::SC;
  Vector witness;              // y_i u^T x_i > 0 on LS, = 0 on SC
  std::vector<double> margins;  // y_i u^T x_i for every point
};

// Point i is linearly separable (LS) iff
//   max t  s.t.  y_j u^T x_j >= 0 for all j,  y_i u^T x_i >= t,  |u|_inf <= 1
// exceeds tol (on features rescaled to unit max-abs entry).
SeparabilityDecomposition decompose(const Matrix& features, const RowVector& labels,
                                    double tol = kSeparabilityTol);

enum class Intercept { none, fitted };

struct MaxMargin {
  Vector u;           // unit normal
  double bias = 0.0;  // zero unless Intercept::fitted
  double margin = 0.0;
};

// Hard-margin classifier: min |u|^2 s.t. y_i (u^T x_i + b) >= 1.
MaxMargin max_margin(const Matrix& features, const RowVector& labels,
                     Intercept intercept = Intercept::none, double kkt_tol = 1e-8);

struct OptimalDirection {
  Vector v;     // unit vector, zero when the dataset is SC
  Vector v_sc;  // minimizer of the logistic risk of the SC points within their span
  bool exists = false;
};

OptimalDirection optimal_direction(const SeparabilityDecomposition& decomp, const Matrix& features,
                                   const RowVector& labels);

enum class Prediction { diverges, safe };

// diverges iff kind is LS or PLS and min_i y_i v^T x_i < -tol on the GD points.
Prediction divergence_predicate(const OptimalDirection& v_star, SepKind kind,
                                const Matrix& gd_features, const RowVector& gd_labels,
                                double tol = kSeparabilityTol);

struct RankReport {
  Index rank = 0;
  Index predicted = 0;
  bool below_predicted = false;
};

RankReport rank_report(const NormalizedDataset& nds);

}  // namespace shufflebn

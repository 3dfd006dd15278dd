#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shufflebn/dataset.hpp"
#include "shufflebn/separability.hpp"

namespace shufflebn {

// 16n points in d = p = 1: four clusters A, -A, -A + 1/2, A - 1/2 of 4n points
// each with targets +1, +1, -1, -1, where A = {3/4 + i / (4(4n + 1)) : i = 1..4n}.
Dataset gen_toy_regression(Index n);

enum class ToyGroup { cor, err, bdr };

struct ToyClassification {
  Dataset data;                   // 2n + 6 points in d = 2
  std::vector<ToyGroup> groups;  // per column
};

// Positives: n points on the diagonal segment from (2 - 1/(2n)) (1, 1) to
// (2 + 1/(2n)) (1, 1), one point at (3, 2.5), two points (-3, 1.5), (1, -0.5).
// Negatives are the negations, in the same order.
ToyClassification gen_toy_classification(Index n);

struct SyntheticOptions {
  Index n = 100;
  Index d = 10;
  Index B = 10;
  double noise_std = 1.0;
};

// x_i ~ N(0, I_d), M_true ~ U[-1, 1]^{1 x d}, y_i = M_true x_i + N(0, noise_std^2).
Dataset gen_synthetic_regression(const SyntheticOptions& opt, std::uint64_t seed);

// Two elongated Gaussian clusters centred at +-(center_x, center_y) with one
// crossing outlier per class placed on the opposite side at (-+outlier_x, -outlier_y).
// Not linearly separable through the origin, so the full-batch normalized set is SC.
struct CrossingClustersOptions {
  Index per_class = 32;
  double center_x = 1.0;
  double center_y = -0.671;
  double spread_x = 0.040;
  double spread_y = 0.082;
  Index outliers = 1;  // per class
  double outlier_x = 1.263;
  double outlier_y = 2.735;
};

Dataset gen_crossing_clusters(const CrossingClustersOptions& opt, std::uint64_t seed);

struct ToyRegressionMC {
  double frac_nonzero = 0.0;
  double median_abs = 0.0;
  double rr_estimate = 0.0;
  std::vector<double> optima;  // M_pi^* per permutation
  std::vector<Index> k_counts;  // points normalized to (+1, +1) per permutation
};

ToyRegressionMC mc_toy_regression(Index n, Index num_perms, std::uint64_t seed);

inline constexpr double kToyClassificationEpsilon = 1e-12;

struct ToyClassificationMC {
  double frac_pls_good = 0.0;
  double frac_divergent = 0.0;
  SepKind rr_kind = SepKind::SC;
  Index rr_rank = 0;
  bool rr_full = true;  // false when RR-full was too large and sampling was used
  std::vector<char> good;        // per permutation
  std::vector<char> divergent;   // per permutation
};

// B = 2. SS normalization uses a tiny epsilon so pairs that share a coordinate
// map to 0 instead of failing.
ToyClassificationMC mc_toy_classification(Index n, Index num_perms, std::uint64_t seed,
                                          double epsilon = kToyClassificationEpsilon);

// True when v is parallel to (1, -1) up to sign, within angular tolerance.
bool aligned_with_anti_diagonal(const Vector& v, double tol = 1e-6);

}  // namespace shufflebn

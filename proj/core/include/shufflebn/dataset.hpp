#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "shufflebn/types.hpp"

namespace shufflebn {

enum class TargetKind { regression, classification };

// Columns are examples: X is d x n, Y is p x n (p == 1 and entries in
// {-1, +1} for classification).
struct Dataset {
  Matrix X;
  Matrix Y;
  TargetKind kind = TargetKind::regression;

  static Dataset regression(Matrix X, Matrix Y);
  static Dataset classification(Matrix X, const RowVector& labels);

  Index n() const { return X.cols(); }
  Index d() const { return X.rows(); }
  Index p() const { return Y.rows(); }
  RowVector labels() const { return Y.row(0); }

  Dataset select(const std::vector<Index>& columns) const;
};

struct BatchPlan {
  std::vector<Index> perm;  // shuffled position c holds original column perm[c]
  Index batch_size = 0;

  static BatchPlan make(std::vector<Index> perm, Index batch_size);
  static BatchPlan identity(Index n, Index batch_size);
  static BatchPlan random(Index n, Index batch_size, std::uint64_t seed);

  Index n() const { return static_cast<Index>(perm.size()); }
  Index num_batches() const { return n() / batch_size; }
};

struct BatchRange {
  Index begin = 0;
  Index size = 0;
};

enum class NormKind { ss, gd, rr_full, rr_sampled };
const char* norm_kind_name(NormKind kind);

struct NormalizedDataset {
  Matrix Xbar;
  Matrix Y;
  TargetKind target_kind = TargetKind::regression;
  NormKind kind = NormKind::ss;
  double epsilon = 0.0;
  Index batch_size = 0;
  Index n_original = 0;
  std::vector<BatchRange> batches;
  std::vector<Index> source;               // original column of each normalized column
  std::vector<std::vector<Index>> perms;   // ss: one; rr_sampled: all drawn

  Index cols() const { return Xbar.cols(); }
  Index d() const { return Xbar.rows(); }
  RowVector labels() const { return Y.row(0); }

  // Multiplier that turns the sum of per-column losses into the risk:
  // 1 for ss/gd, m / C(n, B) for rr_full, 1 / #perms for rr_sampled.
  double risk_weight() const;
};

inline constexpr double kDefaultAnalysisEpsilon = 0.0;
inline constexpr double kDefaultTrainingEpsilon = 1e-5;
inline constexpr Index kDefaultRRFullCap = 1'000'000;

// Normalizes each row of a d x B block with biased batch statistics.
Matrix bn_batch(const Eigen::Ref<const Matrix>& X, double epsilon, Index batch_index = 0);

// Batch statistics used by bn_batch (mean and biased variance per row).
void batch_moments(const Eigen::Ref<const Matrix>& X, Vector& mean, Vector& var);

NormalizedDataset normalize_ss(const Dataset& ds, const BatchPlan& plan,
                               double epsilon = kDefaultAnalysisEpsilon);
NormalizedDataset normalize_gd(const Dataset& ds, double epsilon = kDefaultAnalysisEpsilon);
NormalizedDataset normalize_rr_full(const Dataset& ds, Index batch_size,
                                    double epsilon = kDefaultAnalysisEpsilon,
                                    Index column_cap = kDefaultRRFullCap);
NormalizedDataset normalize_rr_sampled(const Dataset& ds, Index batch_size, Index num_perms,
                                       std::uint64_t seed,
                                       double epsilon = kDefaultAnalysisEpsilon);

// Permutation drawn for index i of normalize_rr_sampled(seed).
std::vector<Index> sampled_permutation(Index n, std::uint64_t seed, Index i);

// C(n, k) or nullopt when it does not fit in 63 bits.
std::optional<std::uint64_t> binomial(Index n, Index k);

// Calls visit(indices) for every k-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_combination(Index n, Index k, F&& visit) {
  if (k < 0 || k > n) return;
  std::vector<Index> c(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = i;
  for (;;) {
    visit(static_cast<const std::vector<Index>&>(c));
    Index i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++c[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j)
      c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace shufflebn

#pragma once

#include <vector>

#include "shufflebn/dataset.hpp"
#include "shufflebn/model.hpp"

namespace shufflebn {

struct RiskReport {
  double value = 0.0;
  std::vector<double> per_batch;  // unweighted per-batch losses
  NormKind kind = NormKind::ss;
  Loss loss = Loss::squared;
};

RiskReport risk(const ModelParams& params, const NormalizedDataset& nds, Loss loss);
double risk_value(const Matrix& M, const NormalizedDataset& nds, Loss loss);

// Gradient of the weighted risk with respect to M.
Matrix risk_gradient_M(const Matrix& M, const NormalizedDataset& nds, Loss loss);

// Weighted squared spectral norm of Xbar (the smoothness of the squared risk
// in M up to the factor of the square).
double smoothness_constant(const NormalizedDataset& nds);

// sigma_min(Xbar Xbar^T); for rr_sampled the mean over the drawn
// permutations, for rr_full the weighted Gram matrix.
double strong_convexity_constant(const NormalizedDataset& nds);

// Sufficient statistics for fast squared-loss evaluation:
// L(M) = w * (tr(YY^T) - 2 <M, Y Xbar^T> + <M, M Xbar Xbar^T>).
class SquaredRiskCache {
 public:
  explicit SquaredRiskCache(const NormalizedDataset& nds);
  double value(const Matrix& M) const;
  Matrix gradient(const Matrix& M) const;
  const Matrix& gram() const { return gram_; }
  const Matrix& cross() const { return cross_; }
  double weight() const { return weight_; }

 private:
  Matrix gram_;   // Xbar Xbar^T
  Matrix cross_;  // Y Xbar^T
  double yy_ = 0.0;
  double weight_ = 1.0;
};

}  // namespace shufflebn

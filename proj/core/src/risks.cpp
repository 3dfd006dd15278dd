#include "shufflebn/risks.hpp"

#include <algorithm>

#include "shufflebn/error.hpp"
#include "shufflebn/linalg.hpp"

namespace shufflebn {

RiskReport risk(const ModelParams& params, const NormalizedDataset& nds, Loss loss) {
  if (nds.d() != params.d() || nds.Y.rows() != params.p())
    fail(Errc::dimension_mismatch, "model shape does not match the normalized dataset");
  RiskReport report;
  report.kind = nds.kind;
  report.loss = loss;
  Matrix M = params.M();
  double total = 0.0;
  for (const auto& b : nds.batches) {
    double v = loss_value(loss, M, nds.Xbar.middleCols(b.begin, b.size),
                          nds.Y.middleCols(b.begin, b.size));
    report.per_batch.push_back(v);
    total += v;
  }
  report.value = nds.risk_weight() * total;
  return report;
}

double risk_value(const Matrix& M, const NormalizedDataset& nds, Loss loss) {
  return nds.risk_weight() * loss_value(loss, M, nds.Xbar, nds.Y);
}

Matrix risk_gradient_M(const Matrix& M, const NormalizedDataset& nds, Loss loss) {
  Matrix g = output_gradient(loss, M * nds.Xbar, nds.Y) * nds.Xbar.transpose();
  return nds.risk_weight() * g;
}

double smoothness_constant(const NormalizedDataset& nds) {
  double s = spectral_norm(nds.Xbar);
  return nds.risk_weight() * s * s;
}

double strong_convexity_constant(const NormalizedDataset& nds) {
  if (nds.kind == NormKind::rr_sampled) {
    Index n = nds.n_original;
    double total = 0.0;
    for (std::size_t i = 0; i < nds.perms.size(); ++i)
      total += sigma_min_gram(nds.Xbar.middleCols(static_cast<Index>(i) * n, n));
    return total / static_cast<double>(nds.perms.size());
  }
  return nds.risk_weight() * sigma_min_gram(nds.Xbar);
}

SquaredRiskCache::SquaredRiskCache(const NormalizedDataset& nds)
    : gram_(nds.Xbar * nds.Xbar.transpose()),
      cross_(nds.Y * nds.Xbar.transpose()),
      yy_(nds.Y.squaredNorm()),
      weight_(nds.risk_weight()) {}

double SquaredRiskCache::value(const Matrix& M) const {
  double v = yy_ - 2.0 * (M.array() * cross_.array()).sum() +
             ((M * gram_).array() * M.array()).sum();
  return weight_ * std::max(v, 0.0);
}

Matrix SquaredRiskCache::gradient(const Matrix& M) const {
  return weight_ * 2.0 * (M * gram_ - cross_);
}

}  // namespace shufflebn

#include "shufflebn/toygen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "shufflebn/error.hpp"
#include "shufflebn/linalg.hpp"
#include "shufflebn/optima.hpp"
#include "shufflebn/random.hpp"

namespace shufflebn {

Dataset gen_toy_regression(Index n) {
  if (n < 1) fail(Errc::config_error, "toy regression needs n >= 1");
  const Index c = 4 * n;
  Matrix X(1, 4 * c);
  Matrix Y(1, 4 * c);
  for (Index i = 1; i <= c; ++i) {
    double a = 0.75 + (static_cast<double>(i) / static_cast<double>(c + 1)) * 0.25;
    X(0, i - 1) = a;
    X(0, c + i - 1) = -a;
    X(0, 2 * c + i - 1) = -a + 0.5;
    X(0, 3 * c + i - 1) = a - 0.5;
  }
  Y.leftCols(2 * c).setConstant(1.0);
  Y.rightCols(2 * c).setConstant(-1.0);
  return Dataset::regression(std::move(X), std::move(Y));
}

ToyClassification gen_toy_classification(Index n) {
  if (n < 1) fail(Errc::config_error, "toy classification needs n >= 1");
  const Index half = n + 3;
  Matrix X(2, 2 * half);
  RowVector y(2 * half);
  std::vector<ToyGroup> groups;
  for (Index i = 0; i < n; ++i) {
    double off = n == 1 ? 0.0
                        : -0.5 / static_cast<double>(n) +
                              static_cast<double>(i) / (static_cast<double>(n) * static_cast<double>(n - 1));
    X.col(i) << 2.0 + off, 2.0 + off;
    groups.push_back(ToyGroup::cor);
  }
  X.col(n) << 3.0, 2.5;
  groups.push_back(ToyGroup::err);
  X.col(n + 1) << -3.0, 1.5;
  X.col(n + 2) << 1.0, -0.5;
  groups.push_back(ToyGroup::bdr);
  groups.push_back(ToyGroup::bdr);
  X.rightCols(half) = -X.leftCols(half);
  y.head(half).setConstant(1.0);
  y.tail(half).setConstant(-1.0);
  for (Index i = 0; i < half; ++i) groups.push_back(groups[static_cast<std::size_t>(i)]);
  return {Dataset::classification(std::move(X), y), std::move(groups)};
}

Dataset gen_synthetic_regression(const SyntheticOptions& opt, std::uint64_t seed) {
  if (opt.n < 2 || opt.d < 1) fail(Errc::config_error, "synthetic regression needs n >= 2, d >= 1");
  if (opt.B < 2 || opt.n % opt.B != 0) fail(Errc::config_error, "B must divide n");
  Rng rng(seed);
  std::normal_distribution<double> N01(0.0, 1.0);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Matrix X(opt.d, opt.n);
  for (Index j = 0; j < opt.n; ++j)
    for (Index k = 0; k < opt.d; ++k) X(k, j) = N01(rng);
  Matrix Mtrue(1, opt.d);
  for (Index k = 0; k < opt.d; ++k) Mtrue(0, k) = U(rng);
  Matrix Y = Mtrue * X;
  for (Index j = 0; j < opt.n; ++j) Y(0, j) += opt.noise_std * N01(rng);
  return Dataset::regression(std::move(X), std::move(Y));
}

Dataset gen_crossing_clusters(const CrossingClustersOptions& opt, std::uint64_t seed) {
  if (opt.per_class < 1 || opt.outliers < 0 || opt.outliers > opt.per_class)
    fail(Errc::config_error, "crossing clusters need 0 <= outliers <= per_class, per_class >= 1");
  Rng rng(seed);
  std::normal_distribution<double> N01(0.0, 1.0);
  const Index n = 2 * opt.per_class;
  Matrix X(2, n);
  RowVector y(n);
  for (Index i = 0; i < n; ++i) {
    double label = i < opt.per_class ? 1.0 : -1.0;
    double a = N01(rng), b = N01(rng);
    y(i) = label;
    if (i % opt.per_class < opt.outliers) {
      X(0, i) = -label * opt.outlier_x + opt.spread_x * a;
      X(1, i) = -opt.outlier_y + opt.spread_x * b;
    } else {
      X(0, i) = label * opt.center_x + opt.spread_x * a;
      X(1, i) = label * opt.center_y + opt.spread_y * b;
    }
  }
  return Dataset::classification(std::move(X), y);
}

ToyRegressionMC mc_toy_regression(Index n, Index num_perms, std::uint64_t seed) {
  if (num_perms < 1) fail(Errc::config_error, "num_perms must be >= 1");
  Dataset ds = gen_toy_regression(n);
  ToyRegressionMC out;
  out.optima.resize(static_cast<std::size_t>(num_perms));
  out.k_counts.resize(static_cast<std::size_t>(num_perms));
  std::vector<double> gram(out.optima.size()), cross(out.optima.size());
  parallel_for(out.optima.size(), [&](std::size_t i) {
    auto plan = BatchPlan::make(sampled_permutation(ds.n(), seed, static_cast<Index>(i)), 2);
    auto nds = normalize_ss(ds, plan);
    out.optima[i] = optimum(nds).M(0, 0);
    Index k = 0;
    for (Index c = 0; c < nds.cols(); ++c) k += nds.Xbar(0, c) == 1.0 && nds.Y(0, c) == 1.0;
    out.k_counts[i] = k;
    gram[i] = nds.Xbar.squaredNorm();
    cross[i] = (nds.Y.array() * nds.Xbar.array()).sum();
  });
  Index nonzero = 0;
  std::vector<double> abs_vals;
  for (double m : out.optima) {
    nonzero += std::abs(m) > 1e-12;
    abs_vals.push_back(std::abs(m));
  }
  out.frac_nonzero = static_cast<double>(nonzero) / static_cast<double>(num_perms);
  out.median_abs = median(abs_vals);
  // Sampled-RR optimum: normal equations of the concatenated SS datasets.
  out.rr_estimate = std::accumulate(cross.begin(), cross.end(), 0.0) /
                    std::accumulate(gram.begin(), gram.end(), 0.0);
  return out;
}

bool aligned_with_anti_diagonal(const Vector& v, double tol) {
  if (v.size() != 2 || v.norm() == 0.0) return false;
  double cosine = std::abs(v(0) - v(1)) / (std::sqrt(2.0) * v.norm());
  return cosine >= 1.0 - tol;
}

ToyClassificationMC mc_toy_classification(Index n, Index num_perms, std::uint64_t seed,
                                          double epsilon) {
  if (num_perms < 1) fail(Errc::config_error, "num_perms must be >= 1");
  auto toy = gen_toy_classification(n);
  const Dataset& ds = toy.data;
  auto gd = normalize_gd(ds);
  RowVector gd_y = ds.labels();
  ToyClassificationMC out;
  out.good.assign(static_cast<std::size_t>(num_perms), 0);
  out.divergent.assign(static_cast<std::size_t>(num_perms), 0);
  parallel_for(out.good.size(), [&](std::size_t i) {
    auto plan = BatchPlan::make(sampled_permutation(ds.n(), seed, static_cast<Index>(i)), 2);
    auto nds = normalize_ss(ds, plan, epsilon);
    RowVector y = nds.labels();
    auto dec = decompose(nds.Xbar, y);
    if (dec.kind == SepKind::SC) return;
    auto dir = optimal_direction(dec, nds.Xbar, y);
    bool diverges = divergence_predicate(dir, dec.kind, gd.Xbar, gd_y) == Prediction::diverges;
    out.divergent[i] = diverges;
    out.good[i] = dec.kind == SepKind::PLS && aligned_with_anti_diagonal(dir.v) && diverges;
  });
  double total = static_cast<double>(num_perms);
  out.frac_pls_good = std::accumulate(out.good.begin(), out.good.end(), 0.0) / total;
  out.frac_divergent = std::accumulate(out.divergent.begin(), out.divergent.end(), 0.0) / total;

  NormalizedDataset rr;
  try {
    rr = normalize_rr_full(ds, 2, epsilon);
  } catch (const Error& e) {
    if (e.code() != Errc::combinatorial_blowup) throw;
    rr = normalize_rr_sampled(ds, 2, 1000, split_seed(seed, 0x5252), epsilon);
    out.rr_full = false;
  }
  out.rr_kind = decompose(rr.Xbar, rr.labels()).kind;
  out.rr_rank = numerical_rank(rr.Xbar);
  return out;
}

}  // namespace shufflebn

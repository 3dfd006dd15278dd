#include "shufflebn/dataset.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "shufflebn/error.hpp"
#include "shufflebn/random.hpp"

namespace shufflebn {

namespace {

void check_shapes(const Matrix& X, const Matrix& Y) {
  if (X.rows() < 1) fail(Errc::dimension_mismatch, "dataset needs d >= 1");
  if (X.cols() < 2) fail(Errc::dimension_mismatch, "dataset needs n >= 2");
  if (Y.cols() != X.cols())
    fail(Errc::dimension_mismatch, "X has " + std::to_string(X.cols()) +
                                       " columns but targets have " +
                                       std::to_string(Y.cols()));
  if (Y.rows() < 1) fail(Errc::dimension_mismatch, "targets need p >= 1");
}

void check_plan(const BatchPlan& plan, Index n) {
  if (plan.n() != n)
    fail(Errc::dimension_mismatch, "plan covers " + std::to_string(plan.n()) +
                                       " columns, dataset has " + std::to_string(n));
}

}  // namespace

Dataset Dataset::regression(Matrix X, Matrix Y) {
  check_shapes(X, Y);
  Dataset ds;
  ds.X = std::move(X);
  ds.Y = std::move(Y);
  ds.kind = TargetKind::regression;
  return ds;
}

Dataset Dataset::classification(Matrix X, const RowVector& labels) {
  Matrix Y = labels;
  check_shapes(X, Y);
  for (Index i = 0; i < labels.size(); ++i)
    if (labels(i) != 1.0 && labels(i) != -1.0)
      fail(Errc::non_binary_label, "label at column " + std::to_string(i) + " is not +-1");
  Dataset ds;
  ds.X = std::move(X);
  ds.Y = std::move(Y);
  ds.kind = TargetKind::classification;
  return ds;
}

Dataset Dataset::select(const std::vector<Index>& columns) const {
  Dataset out;
  out.kind = kind;
  out.X.resize(d(), static_cast<Index>(columns.size()));
  out.Y.resize(p(), static_cast<Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.X.col(static_cast<Index>(c)) = X.col(columns[c]);
    out.Y.col(static_cast<Index>(c)) = Y.col(columns[c]);
  }
  return out;
}

BatchPlan BatchPlan::make(std::vector<Index> perm, Index batch_size) {
  Index n = static_cast<Index>(perm.size());
  if (batch_size < 2) fail(Errc::batch_too_small, "batch size must be >= 2");
  if (batch_size > n || n % batch_size != 0)
    fail(Errc::config_error, "batch size " + std::to_string(batch_size) +
                                 " does not divide n = " + std::to_string(n));
  if (!is_permutation_of(perm, n)) fail(Errc::config_error, "perm is not a bijection on [n]");
  BatchPlan plan;
  plan.perm = std::move(perm);
  plan.batch_size = batch_size;
  return plan;
}

BatchPlan BatchPlan::identity(Index n, Index batch_size) {
  return make(identity_permutation(n), batch_size);
}

BatchPlan BatchPlan::random(Index n, Index batch_size, std::uint64_t seed) {
  return make(random_permutation(n, seed), batch_size);
}

const char* norm_kind_name(NormKind kind) {
  switch (kind) {
    case NormKind::ss: return "SS";
    case NormKind::gd: return "GD";
    case NormKind::rr_full: return "RR-full";
    case NormKind::rr_sampled: return "RR-sampled";
  }
  return "?";
}

double NormalizedDataset::risk_weight() const {
  switch (kind) {
    case NormKind::ss:
    case NormKind::gd:
      return 1.0;
    case NormKind::rr_full: {
      // Every B-subset fills each of the m batch slots in B!(n-B)! of the n!
      // permutations, so the average SS risk weights each unique batch by
      // m * B!(n-B)!/n! = m / C(n, B).
      double m = static_cast<double>(n_original / batch_size);
      return m / static_cast<double>(batches.size());
    }
    case NormKind::rr_sampled:
      return 1.0 / static_cast<double>(perms.size());
  }
  return 1.0;
}

void batch_moments(const Eigen::Ref<const Matrix>& X, Vector& mean, Vector& var) {
  const double B = static_cast<double>(X.cols());
  mean = X.rowwise().sum() / B;
  var = (X.colwise() - mean).array().square().rowwise().sum() / B;
}

Matrix bn_batch(const Eigen::Ref<const Matrix>& X, double epsilon, Index batch_index) {
  if (X.cols() < 2) fail(Errc::batch_too_small, "batch of size " + std::to_string(X.cols()));
  if (!(epsilon >= 0.0)) fail(Errc::config_error, "epsilon must be nonnegative");
  Matrix out(X.rows(), X.cols());
  Vector mean, var;
  batch_moments(X, mean, var);
  for (Index k = 0; k < X.rows(); ++k) {
    bool constant = (X.row(k).array() == X(k, 0)).all();
    if (constant) {
      if (epsilon == 0.0) throw ConstantCoordinate(static_cast<long>(k), static_cast<long>(batch_index));
      out.row(k).setZero();
      continue;
    }
    if (X.cols() == 2) {
      // Closed form keeps the two outputs exact negatives of each other
      // (exactly +-1 when epsilon is zero).
      double half = 0.5 * (X(k, 0) - X(k, 1));
      double v = epsilon == 0.0 ? (half > 0 ? 1.0 : -1.0)
                                 : half / std::sqrt(half * half + epsilon);
      out(k, 0) = v;
      out(k, 1) = -v;
      continue;
    }
    double scale = 1.0 / std::sqrt(var(k) + epsilon);
    out.row(k) = (X.row(k).array() - mean(k)) * scale;
  }
  return out;
}

namespace {

NormalizedDataset empty_like(const Dataset& ds, NormKind kind, double epsilon, Index batch_size,
                             Index cols) {
  NormalizedDataset nds;
  nds.Xbar.resize(ds.d(), cols);
  nds.Y.resize(ds.p(), cols);
  nds.target_kind = ds.kind;
  nds.kind = kind;
  nds.epsilon = epsilon;
  nds.batch_size = batch_size;
  nds.n_original = ds.n();
  nds.source.reserve(static_cast<std::size_t>(cols));
  return nds;
}

void append_batch(NormalizedDataset& nds, const Dataset& ds, const Index* idx, Index B,
                  Index& col) {
  Matrix block(ds.d(), B);
  for (Index c = 0; c < B; ++c) block.col(c) = ds.X.col(idx[c]);
  Index batch_index = static_cast<Index>(nds.batches.size());
  nds.Xbar.middleCols(col, B) = bn_batch(block, nds.epsilon, batch_index);
  for (Index c = 0; c < B; ++c) {
    nds.Y.col(col + c) = ds.Y.col(idx[c]);
    nds.source.push_back(idx[c]);
  }
  nds.batches.push_back({col, B});
  col += B;
}

void append_permutation(NormalizedDataset& nds, const Dataset& ds, const std::vector<Index>& perm,
                        Index B, Index& col) {
  for (Index j = 0; j < ds.n() / B; ++j) append_batch(nds, ds, perm.data() + j * B, B, col);
}

}  // namespace

NormalizedDataset normalize_ss(const Dataset& ds, const BatchPlan& plan, double epsilon) {
  check_plan(plan, ds.n());
  auto nds = empty_like(ds, NormKind::ss, epsilon, plan.batch_size, ds.n());
  Index col = 0;
  append_permutation(nds, ds, plan.perm, plan.batch_size, col);
  nds.perms.push_back(plan.perm);
  return nds;
}

NormalizedDataset normalize_gd(const Dataset& ds, double epsilon) {
  auto nds = empty_like(ds, NormKind::gd, epsilon, ds.n(), ds.n());
  Index col = 0;
  auto id = identity_permutation(ds.n());
  append_batch(nds, ds, id.data(), ds.n(), col);
  return nds;
}

__extension__ typedef unsigned __int128 u128;

std::optional<std::uint64_t> binomial(Index n, Index k) {
  if (k < 0 || k > n) return std::uint64_t{0};
  k = std::min(k, n - k);
  u128 r = 1;
  for (Index i = 1; i <= k; ++i) {
    r = r * static_cast<u128>(n - k + i) / static_cast<u128>(i);
    if (r > static_cast<u128>(std::numeric_limits<std::int64_t>::max()))
      return std::nullopt;
  }
  return static_cast<std::uint64_t>(r);
}

NormalizedDataset normalize_rr_full(const Dataset& ds, Index batch_size, double epsilon,
                                    Index column_cap) {
  if (batch_size < 2) fail(Errc::batch_too_small, "batch size must be >= 2");
  if (batch_size > ds.n()) fail(Errc::config_error, "batch size exceeds n");
  auto count = binomial(ds.n(), batch_size);
  if (!count || *count > static_cast<std::uint64_t>(column_cap / batch_size))
    fail(Errc::combinatorial_blowup,
         "C(" + std::to_string(ds.n()) + ", " + std::to_string(batch_size) +
             ") batches exceed the column cap " + std::to_string(column_cap));
  Index cols = static_cast<Index>(*count) * batch_size;
  auto nds = empty_like(ds, NormKind::rr_full, epsilon, batch_size, cols);
  nds.batches.reserve(static_cast<std::size_t>(*count));
  Index col = 0;
  for_each_combination(ds.n(), batch_size, [&](const std::vector<Index>& c) {
    append_batch(nds, ds, c.data(), batch_size, col);
  });
  return nds;
}

std::vector<Index> sampled_permutation(Index n, std::uint64_t seed, Index i) {
  return random_permutation(n, split_seed(seed, static_cast<std::uint64_t>(i)));
}

NormalizedDataset normalize_rr_sampled(const Dataset& ds, Index batch_size, Index num_perms,
                                       std::uint64_t seed, double epsilon) {
  if (num_perms < 1) fail(Errc::config_error, "num_perms must be >= 1");
  auto nds = empty_like(ds, NormKind::rr_sampled, epsilon, batch_size, ds.n() * num_perms);
  Index col = 0;
  for (Index i = 0; i < num_perms; ++i) {
    auto plan = BatchPlan::make(sampled_permutation(ds.n(), seed, i), batch_size);
    append_permutation(nds, ds, plan.perm, batch_size, col);
    nds.perms.push_back(std::move(plan.perm));
  }
  return nds;
}

}  // namespace shufflebn

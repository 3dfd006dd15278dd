#include "shufflebn/optima.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "shufflebn/error.hpp"
#include "shufflebn/linalg.hpp"
#include "shufflebn/random.hpp"

namespace shufflebn {

Optimum optimum(const NormalizedDataset& nds) {
  Matrix gram = nds.Xbar * nds.Xbar.transpose();
  Matrix cross = nds.Y * nds.Xbar.transpose();
  Optimum out;
  Eigen::LDLT<Matrix> ldlt(gram);
  bool ok = ldlt.info() == Eigen::Success && ldlt.isPositive();
  if (ok) {
    Vector dg = ldlt.vectorD();
    double hi = dg.cwiseAbs().maxCoeff();
    ok = hi > 0 && dg.minCoeff() > 1e-12 * hi;
  }
  if (ok) {
    out.M = ldlt.solve(cross.transpose()).transpose();
  } else {
    out.M = min_norm_solve(gram, cross.transpose(), 1e-12, &out.rank_deficient).transpose();
    out.rank_deficient = true;
  }
  return out;
}

double normal_equation_residual(const Matrix& M, const NormalizedDataset& nds) {
  return ((nds.Y - M * nds.Xbar) * nds.Xbar.transpose()).norm();
}

RRAverage rr_average_check(const Dataset& ds, Index batch_size) {
  if (ds.d() != 1) fail(Errc::dimension_not_one, "RR averaging identity needs d = 1");
  if (ds.p() != 1) fail(Errc::dimension_mismatch, "RR averaging identity needs p = 1");
  if (ds.n() > 6) fail(Errc::too_many_permutations, "n! enumeration limited to n <= 6");
  RRAverage out;
  out.lhs = optimum(normalize_rr_full(ds, batch_size)).M(0, 0);
  auto perm = identity_permutation(ds.n());
  double total = 0.0;
  long count = 0;
  do {
    total += optimum(normalize_ss(ds, BatchPlan::make(perm, batch_size))).M(0, 0);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  out.rhs = total / static_cast<double>(count);
  return out;
}

double normalized_distance(const Matrix& M, const Matrix& M_ref) {
  double ref = M_ref.norm();
  if (!(ref > 0.0)) fail(Errc::zero_reference, "reference optimum has zero norm");
  if (M.rows() != M_ref.rows() || M.cols() != M_ref.cols())
    fail(Errc::dimension_mismatch, "matrices differ in shape");
  return (M - M_ref).norm() / ref;
}

std::vector<double> distortion_histogram(const Dataset& ds, Index batch_size, Index num_perms,
                                         std::uint64_t seed) {
  if (num_perms < 1) fail(Errc::config_error, "num_perms must be >= 1");
  Matrix ref = optimum(normalize_gd(ds)).M;
  std::vector<double> out(static_cast<std::size_t>(num_perms));
  parallel_for(out.size(), [&](std::size_t i) {
    auto plan = BatchPlan::make(sampled_permutation(ds.n(), seed, static_cast<Index>(i)), batch_size);
    out[i] = normalized_distance(optimum(normalize_ss(ds, plan)).M, ref);
  });
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  std::size_t mid = values.size() / 2;
  if (values.size() % 2) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

DistortionSummary distortion_summary(const Dataset& ds, Index batch_size, Index num_perms,
                                     std::uint64_t seed, Index rr_perms) {
  DistortionSummary s;
  s.distances = distortion_histogram(ds, batch_size, num_perms, seed);
  s.mean = std::accumulate(s.distances.begin(), s.distances.end(), 0.0) /
           static_cast<double>(s.distances.size());
  s.median = median(s.distances);
  s.rr_perms = rr_perms;
  Matrix ref = optimum(normalize_gd(ds)).M;
  s.rr_distance = normalized_distance(
      optimum(normalize_rr_sampled(ds, batch_size, rr_perms, split_seed(seed, 0x5252))).M, ref);
  return s;
}

}  // namespace shufflebn

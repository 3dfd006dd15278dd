#include "shufflebn/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shufflebn/error.hpp"
#include "shufflebn/linalg.hpp"

namespace shufflebn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix difference_points(const Matrix& P, const Matrix& N) {
  Matrix D(P.rows(), P.cols() * N.cols());
  Index c = 0;
  for (Index j = 0; j < N.cols(); ++j)
    for (Index i = 0; i < P.cols(); ++i) D.col(c++) = N.col(j) - P.col(i);
  return D;
}

double depth_1d(const Matrix& D) {
  double lo = D.row(0).minCoeff(), hi = D.row(0).maxCoeff();
  return std::max(0.0, std::min(-lo, hi));
}

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

double depth_2d(const Matrix& D) {
  std::vector<Eigen::Vector2d> pts;
  for (Index c = 0; c < D.cols(); ++c) pts.emplace_back(D(0, c), D(1, c));
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return 0.0;
  // Andrew's monotone chain, counter-clockwise.
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) return 0.0;
  double best = kInf;
  Eigen::Vector2d origin(0, 0);
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    double dist = cross(a, b, origin) / (b - a).norm();
    best = std::min(best, dist);
  }
  return std::max(best, 0.0);
}

// Facet enumeration over d-subsets of the difference points.
double depth_general(const Matrix& D) {
  const Index d = D.rows(), q = D.cols();
  if (numerical_rank(D) < d) return 0.0;
  double scale = D.cwiseAbs().maxCoeff();
  double tol = 1e-10 * std::max(scale, 1.0);
  auto count = binomial(q, d);
  if (!count || *count > 5'000'000)
    fail(Errc::numerically_ill_conditioned, "too many hull facets to enumerate");
  double best = kInf;
  for_each_combination(q, d, [&](const std::vector<Index>& idx) {
    Matrix E(d - 1, d);
    for (Index r = 1; r < d; ++r) E.row(r - 1) = (D.col(idx[static_cast<std::size_t>(r)]) - D.col(idx[0])).transpose();
    Eigen::FullPivLU<Matrix> lu(E);
    Matrix ker = lu.kernel();
    if (ker.cols() != 1) return;
    Vector nrm = ker.col(0).normalized();
    double off = nrm.dot(D.col(idx[0]));
    Vector s = D.transpose() * nrm;
    double mx = s.maxCoeff(), mn = s.minCoeff();
    if (mx <= off + tol) best = std::min(best, off);       // all points below: facet with outward nrm
    else if (mn >= off - tol) best = std::min(best, -off);  // all points above: outward is -nrm
  });
  if (!std::isfinite(best)) return 0.0;
  return std::max(best, 0.0);
}

}  // namespace

double penetration_depth(const Matrix& P, const Matrix& N) {
  if (P.rows() != N.rows()) fail(Errc::dimension_mismatch, "point sets differ in dimension");
  if (P.cols() == 0 || N.cols() == 0) return 0.0;
  Matrix D = difference_points(P, N);
  if (D.rows() == 1) return depth_1d(D);
  if (D.rows() == 2) return depth_2d(D);
  return depth_general(D);
}

RobustnessReport gamma_robustness_report(const Dataset& ds, double gamma,
                                         const RobustnessThresholds& thresholds) {
  if (ds.kind != TargetKind::classification)
    fail(Errc::config_error, "robustness report needs a classification dataset");
  RobustnessReport rep;
  rep.gamma = gamma;
  auto gd = normalize_gd(ds);
  RowVector y = ds.labels();
  auto dec = decompose(gd.Xbar, y);
  rep.gd_kind = dec.kind;
  if (dec.kind == SepKind::LS) {
    rep.margin = max_margin(gd.Xbar, y).margin;
    rep.condition1 = *rep.margin >= gamma;
  } else if (dec.kind == SepKind::SC) {
    std::vector<Index> pos, neg;
    for (Index i = 0; i < y.size(); ++i) (y(i) > 0 ? pos : neg).push_back(i);
    Matrix P(gd.d(), static_cast<Index>(pos.size())), N(gd.d(), static_cast<Index>(neg.size()));
    for (std::size_t i = 0; i < pos.size(); ++i) P.col(static_cast<Index>(i)) = gd.Xbar.col(pos[i]);
    for (std::size_t i = 0; i < neg.size(); ++i) N.col(static_cast<Index>(i)) = gd.Xbar.col(neg[i]);
    rep.penetration_depth = penetration_depth(P, N);
    rep.condition1 = *rep.penetration_depth >= gamma;
  }
  rep.min_scale_ratio = kInf;
  for (Index k = 0; k < ds.d(); ++k) {
    auto row = ds.X.row(k).array();
    double range = row.maxCoeff() - row.minCoeff();
    double mean = row.mean();
    double sd = std::sqrt((row - mean).square().mean());
    rep.min_scale_ratio = std::min(rep.min_scale_ratio, range > 0 ? sd / range : 0.0);
  }
  rep.condition2 = rep.min_scale_ratio >= thresholds.min_scale_ratio;
  rep.norm_ratio = gd.Xbar.colwise().norm().maxCoeff() / std::sqrt(static_cast<double>(ds.d()));
  rep.condition3 = rep.norm_ratio <= thresholds.max_norm_ratio;
  rep.robust = rep.condition1 && rep.condition2 && rep.condition3;
  return rep;
}

OverparamCheck overparam_direction_check(const NormalizedDataset& nds, const RowVector& labels) {
  const Index d = nds.d();
  const Index B = nds.batch_size;
  const Index m = static_cast<Index>(nds.batches.size());
  if (labels.size() != nds.cols()) fail(Errc::dimension_mismatch, "labels do not match columns");
  if (d <= (B - 1) * m)
    fail(Errc::not_overparameterized, "need d > (B-1) m = " + std::to_string((B - 1) * m));
  Matrix A((B - 1) * m, d);
  Vector c((B - 1) * m);
  Index row = 0;
  OverparamCheck out;
  std::vector<char> mono(static_cast<std::size_t>(m), 0);
  for (Index j = 0; j < m; ++j) {
    const auto& br = nds.batches[static_cast<std::size_t>(j)];
    RowVector y = labels.segment(br.begin, br.size);
    bool is_mono = (y.array() == y(0)).all();
    mono[static_cast<std::size_t>(j)] = is_mono;
    out.monochromatic_batches += is_mono;
    // Targets for the first B-1 outputs; the last one is forced by the zero
    // batch mean to be minus their sum.
    Vector t = Vector::Zero(B);
    if (!is_mono) {
      double last = y(B - 1);
      for (Index i = 0; i + 1 < B; ++i) t(i) = y(i);
      Index pivot = -1;
      for (Index i = 0; i + 1 < B && pivot < 0; ++i)
        if (y(i) == -last) pivot = i;
      if (pivot >= 0) t(pivot) = -last * static_cast<double>(B);
    }
    for (Index i = 0; i + 1 < B; ++i) {
      A.row(row) = nds.Xbar.col(br.begin + i).transpose();
      c(row) = t(i);
      ++row;
    }
  }
  out.v = min_norm_solve(A, c, 1e-12);
  out.max_mono_abs = 0.0;
  out.min_mixed_margin = kInf;
  for (Index j = 0; j < m; ++j) {
    const auto& br = nds.batches[static_cast<std::size_t>(j)];
    for (Index i = 0; i < br.size; ++i) {
      double s = out.v.dot(nds.Xbar.col(br.begin + i));
      if (mono[static_cast<std::size_t>(j)]) out.max_mono_abs = std::max(out.max_mono_abs, std::abs(s));
      else out.min_mixed_margin = std::min(out.min_mixed_margin, labels(br.begin + i) * s);
    }
  }
  return out;
}

}  // namespace shufflebn

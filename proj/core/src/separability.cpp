#include "shufflebn/separability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shufflebn/error.hpp"
#include "shufflebn/linalg.hpp"
#include "shufflebn/simplex.hpp"

namespace shufflebn {

const char* sep_kind_name(SepKind kind) {
  switch (kind) {
    case SepKind::LS: return "LS";
    case SepKind::PLS: return "PLS";
    case SepKind::SC: return "SC";
  }
  return "?";
}

namespace {

void check_inputs(const Matrix& X, const RowVector& y) {
  if (X.cols() != y.size()) fail(Errc::dimension_mismatch, "labels do not match feature columns");
  if (X.cols() < 1) fail(Errc::dimension_mismatch, "need at least one point");
  if (!X.allFinite()) fail(Errc::numerically_ill_conditioned, "non-finite features");
  for (Index i = 0; i < y.size(); ++i)
    if (y(i) != 1.0 && y(i) != -1.0) fail(Errc::non_binary_label, "labels must be +-1");
}

// Rows a_j = y_j x_j^T of the sign-adjusted data.
Matrix signed_rows(const Matrix& X, const RowVector& y) {
  return (X * y.asDiagonal()).transpose();
}

// LP over variables (u+, u-, t) >= 0 with u = u+ - u-, 0 <= u+-, <= 1:
//   max t  s.t.  -a_j u <= 0 (j in nonneg),  t - a_i u <= 0 (i in lower),
//               a_j u <= 0 (j in zero) so that with nonneg it is an equality.
LPResult margin_lp(const Matrix& a, const std::vector<Index>& nonneg, const std::vector<Index>& lower,
                   const std::vector<Index>& zero) {
  const Index d = a.cols();
  const Index nv = 2 * d + 1;
  Index rows = static_cast<Index>(nonneg.size() + lower.size() + zero.size()) + 2 * d;
  Matrix A = Matrix::Zero(rows, nv);
  Vector b = Vector::Zero(rows);
  Index r = 0;
  auto put = [&](Index j, double sign) {
    A.block(r, 0, 1, d) = sign * a.row(j);
    A.block(r, d, 1, d) = -sign * a.row(j);
  };
  for (Index j : nonneg) put(j, -1.0), ++r;
  for (Index i : lower) {
    put(i, -1.0);
    A(r, 2 * d) = 1.0;
    ++r;
  }
  for (Index j : zero) put(j, 1.0), ++r;
  for (Index k = 0; k < 2 * d; ++k) {
    A(r, k) = 1.0;
    b(r) = 1.0;
    ++r;
  }
  Vector c = Vector::Zero(nv);
  c(2 * d) = 1.0;
  LPResult res = simplex_solve(A, b, c);
  if (res.status == LPStatus::infeasible)
    fail(Errc::lp_infeasible, "separability LP reported infeasible (u = 0 is feasible)");
  if (res.status == LPStatus::unbounded)
    fail(Errc::numerically_ill_conditioned, "separability LP reported unbounded");
  return res;
}

Vector lp_direction(const LPResult& res, Index d) {
  return res.x.head(d) - res.x.segment(d, d);
}

}  // namespace

SeparabilityDecomposition decompose(const Matrix& features, const RowVector& labels, double tol) {
  check_inputs(features, labels);
  const Index q = features.cols();
  const Index d = features.rows();
  SeparabilityDecomposition out;
  double scale = features.cwiseAbs().maxCoeff();
  Matrix a = signed_rows(features, labels);
  if (scale > 0) a /= scale;

  std::vector<Index> all(static_cast<std::size_t>(q));
  for (Index j = 0; j < q; ++j) all[static_cast<std::size_t>(j)] = j;
  std::vector<int> status(static_cast<std::size_t>(q), 0);  // 0 unknown, 1 LS, -1 SC
  if (scale > 0) {
    for (Index i = 0; i < q; ++i) {
      if (status[static_cast<std::size_t>(i)] != 0) continue;
      LPResult res = margin_lp(a, all, {i}, {});
      if (res.value > tol) {
        Vector u = lp_direction(res, d);
        Vector m = a * u;
        for (Index j = 0; j < q; ++j)
          if (m(j) > tol) status[static_cast<std::size_t>(j)] = 1;
        status[static_cast<std::size_t>(i)] = 1;
      } else {
        status[static_cast<std::size_t>(i)] = -1;
      }
    }
  }
  for (Index j = 0; j < q; ++j)
    (status[static_cast<std::size_t>(j)] == 1 ? out.ls_indices : out.sc_indices).push_back(j);

  if (out.sc_indices.empty()) out.kind = SepKind::LS;
  else if (out.ls_indices.empty()) out.kind = SepKind::SC;
  else out.kind = SepKind::PLS;

  out.witness = Vector::Zero(d);
  if (!out.ls_indices.empty()) {
    LPResult res = margin_lp(a, {}, out.ls_indices, out.sc_indices);
    out.witness = lp_direction(res, d);
  }
  Vector m = features.transpose() * out.witness;
  for (Index j = 0; j < q; ++j) out.margins.push_back(labels(j) * m(j));
  return out;
}

namespace {

MaxMargin homogeneous_margin(const Matrix& X, const RowVector& y, double kkt_tol) {
  const Index q = X.cols();
  Vector alpha = Vector::Zero(q);
  Vector u = Vector::Zero(X.rows());
  Vector sq = X.colwise().squaredNorm().transpose();
  const long max_sweeps = 2'000'000;
  for (long sweep = 0; sweep < max_sweeps; ++sweep) {
    double worst = 0.0;
    for (Index i = 0; i < q; ++i) {
      double gap = 1.0 - y(i) * u.dot(X.col(i));
      double viol = alpha(i) > 0 ? std::abs(gap) : std::max(gap, 0.0);
      worst = std::max(worst, viol);
      double next = std::max(0.0, alpha(i) + gap / sq(i));
      double delta = next - alpha(i);
      if (delta != 0.0) {
        u += delta * y(i) * X.col(i);
        alpha(i) = next;
      }
    }
    if (worst <= kkt_tol) {
      MaxMargin mm;
      double norm = u.norm();
      mm.u = u / norm;
      mm.margin = (y.transpose().array() * (X.transpose() * mm.u).array()).minCoeff();
      return mm;
    }
  }
  fail(Errc::numerically_ill_conditioned, "max-margin coordinate ascent did not converge");
}

// SMO with maximal violating pairs on the hard-margin dual with bias.
MaxMargin affine_margin(const Matrix& X, const RowVector& y, double kkt_tol) {
  const Index q = X.cols();
  Matrix K = X.transpose() * X;
  Vector alpha = Vector::Zero(q);
  Vector G = -Vector::Ones(q);
  const long max_iter = 50'000'000;
  for (long it = 0; it < max_iter; ++it) {
    Index i = -1, j = -1;
    double m = -std::numeric_limits<double>::infinity();
    double M = std::numeric_limits<double>::infinity();
    for (Index t = 0; t < q; ++t) {
      double v = -y(t) * G(t);
      bool up = y(t) > 0 || alpha(t) > 0;
      bool low = y(t) < 0 || alpha(t) > 0;
      if (up && v > m) m = v, i = t;
      if (low && v < M) M = v, j = t;
    }
    if (m - M <= kkt_tol) {
      Vector u = X * (alpha.cwiseProduct(y.transpose()));
      double norm = u.norm();
      MaxMargin mm;
      mm.u = u / norm;
      double pos_min = std::numeric_limits<double>::infinity();
      double neg_max = -std::numeric_limits<double>::infinity();
      for (Index t = 0; t < q; ++t) {
        double s = mm.u.dot(X.col(t));
        if (y(t) > 0) pos_min = std::min(pos_min, s);
        else neg_max = std::max(neg_max, s);
      }
      mm.bias = -0.5 * (pos_min + neg_max);
      mm.margin = 0.5 * (pos_min - neg_max);
      return mm;
    }
    double a = std::max(K(i, i) + K(j, j) - 2.0 * K(i, j), 1e-12);
    double delta = (m - M) / a;
    if (y(i) < 0) delta = std::min(delta, alpha(i));
    if (y(j) > 0) delta = std::min(delta, alpha(j));
    alpha(i) += y(i) * delta;
    alpha(j) -= y(j) * delta;
    for (Index t = 0; t < q; ++t) G(t) += y(t) * delta * (K(t, i) - K(t, j));
  }
  fail(Errc::numerically_ill_conditioned, "SMO did not converge");
}

}  // namespace

MaxMargin max_margin(const Matrix& features, const RowVector& labels, Intercept intercept,
                     double kkt_tol) {
  check_inputs(features, labels);
  if (intercept == Intercept::none) {
    if (decompose(features, labels).kind != SepKind::LS)
      fail(Errc::not_separable, "data is not linearly separable through the origin");
    return homogeneous_margin(features, labels, kkt_tol);
  }
  bool pos = (labels.array() > 0).any(), neg = (labels.array() < 0).any();
  if (!pos || !neg) fail(Errc::not_separable, "an affine margin needs both classes");
  Matrix lifted(features.rows() + 1, features.cols());
  lifted << features, RowVector::Ones(features.cols());
  if (decompose(lifted, labels).kind != SepKind::LS)
    fail(Errc::not_separable, "data is not affinely separable");
  return affine_margin(features, labels, kkt_tol);
}

namespace {

// Damped Newton on sum_j log(1 + exp(-y_j a^T z_j)).
Vector restricted_logistic_minimizer(const Matrix& Z, const RowVector& y) {
  const Index r = Z.rows();
  Vector a = Vector::Zero(r);
  auto value = [&](const Vector& w) {
    double s = 0.0;
    for (Index j = 0; j < Z.cols(); ++j) {
      double m = y(j) * w.dot(Z.col(j));
      s += m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
    }
    return s;
  };
  for (int it = 0; it < 500; ++it) {
    Vector g = Vector::Zero(r);
    Matrix H = Matrix::Zero(r, r);
    for (Index j = 0; j < Z.cols(); ++j) {
      double m = y(j) * a.dot(Z.col(j));
      double s = 1.0 / (1.0 + std::exp(m));  // sigma(-m)
      g -= y(j) * s * Z.col(j);
      H += s * (1.0 - s) * Z.col(j) * Z.col(j).transpose();
    }
    if (g.norm() <= 1e-10) break;
    H.diagonal().array() += 1e-14 * std::max(1.0, H.diagonal().maxCoeff());
    Vector step = -H.ldlt().solve(g);
    double f0 = value(a), t = 1.0;
    double slope = g.dot(step);
    while (t > 1e-20 && value(a + t * step) > f0 + 1e-4 * t * slope) t *= 0.5;
    a += t * step;
  }
  return a;
}

}  // namespace

OptimalDirection optimal_direction(const SeparabilityDecomposition& decomp, const Matrix& features,
                                   const RowVector& labels) {
  check_inputs(features, labels);
  const Index d = features.rows();
  OptimalDirection out;
  out.v = Vector::Zero(d);
  out.v_sc = Vector::Zero(d);

  Matrix Xsc(d, static_cast<Index>(decomp.sc_indices.size()));
  RowVector ysc(Xsc.cols());
  for (Index c = 0; c < Xsc.cols(); ++c) {
    Xsc.col(c) = features.col(decomp.sc_indices[static_cast<std::size_t>(c)]);
    ysc(c) = labels(decomp.sc_indices[static_cast<std::size_t>(c)]);
  }
  Matrix Q = column_span_basis(Xsc);
  if (Q.cols() > 0) out.v_sc = Q * restricted_logistic_minimizer(Q.transpose() * Xsc, ysc);
  if (decomp.kind == SepKind::SC) return out;

  Matrix P = Matrix::Identity(d, d) - Q * Q.transpose();
  Matrix Xls(d, static_cast<Index>(decomp.ls_indices.size()));
  RowVector yls(Xls.cols());
  for (Index c = 0; c < Xls.cols(); ++c) {
    Xls.col(c) = P * features.col(decomp.ls_indices[static_cast<std::size_t>(c)]);
    yls(c) = labels(decomp.ls_indices[static_cast<std::size_t>(c)]);
  }
  MaxMargin mm = max_margin(Xls, yls, Intercept::none);
  out.v = P * mm.u;
  out.v.normalize();
  out.exists = true;
  return out;
}

Prediction divergence_predicate(const OptimalDirection& v_star, SepKind kind,
                                const Matrix& gd_features, const RowVector& gd_labels, double tol) {
  if (kind == SepKind::SC || !v_star.exists) return Prediction::safe;
  double worst = (gd_labels.transpose().array() * (gd_features.transpose() * v_star.v).array()).minCoeff();
  return worst < -tol ? Prediction::diverges : Prediction::safe;
}

RankReport rank_report(const NormalizedDataset& nds) {
  RankReport r;
  r.rank = numerical_rank(nds.Xbar);
  const Index d = nds.d();
  const Index B = nds.batch_size;
  const Index slices = static_cast<Index>(nds.batches.size());
  switch (nds.kind) {
    case NormKind::ss:
    case NormKind::rr_sampled:
      r.predicted = std::min(d, (B - 1) * slices);
      break;
    case NormKind::gd:
      r.predicted = std::min(d, nds.n_original - 1);
      break;
    case NormKind::rr_full:
      r.predicted = std::min(d, (B - 1) * slices);
      break;
  }
  r.below_predicted = r.rank < r.predicted;
  return r;
}

}  // namespace shufflebn

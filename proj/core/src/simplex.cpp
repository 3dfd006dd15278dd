#include "shufflebn/simplex.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "shufflebn/error.hpp"

namespace shufflebn {

namespace {

class Tableau {
 public:
  Tableau(const Matrix& A, const Vector& b, const Vector& c, double eps)
      : m_(A.rows()), n_(A.cols()), eps_(eps), D_(m_ + 2, n_ + 2), basic_(m_), nonbasic_(n_ + 1) {
    D_.setZero();
    D_.topLeftCorner(m_, n_) = A;
    for (Index i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      D_(i, n_) = -1.0;
      D_(i, n_ + 1) = b(i);
    }
    for (Index j = 0; j < n_; ++j) {
      nonbasic_[j] = j;
      D_(m_, j) = -c(j);
    }
    nonbasic_[n_] = -1;  // artificial variable of phase one
    D_(m_ + 1, n_) = 1.0;
  }

  LPResult solve() {
    LPResult res;
    Index r = 0;
    for (Index i = 1; i < m_; ++i)
      if (D_(i, n_ + 1) < D_(r, n_ + 1)) r = i;
    if (m_ > 0 && D_(r, n_ + 1) < -eps_) {
      pivot(r, n_);
      if (!run(2) || D_(m_ + 1, n_ + 1) < -eps_) {
        res.status = LPStatus::infeasible;
        return res;
      }
      for (Index i = 0; i < m_; ++i) {
        if (basic_[i] != -1) continue;
        Index s = -1;
        for (Index j = 0; j <= n_; ++j)
          if (nonbasic_[j] != -1 && (s == -1 || std::abs(D_(i, j)) > std::abs(D_(i, s)))) s = j;
        pivot(i, s);
      }
    }
    bool bounded = run(1);
    res.x = Vector::Zero(n_);
    for (Index i = 0; i < m_; ++i)
      if (basic_[i] >= 0 && basic_[i] < n_) res.x(basic_[i]) = D_(i, n_ + 1);
    res.status = bounded ? LPStatus::optimal : LPStatus::unbounded;
    res.value = bounded ? D_(m_, n_ + 1) : std::numeric_limits<double>::infinity();
    return res;
  }

 private:
  void pivot(Index r, Index s) {
    double inv = 1.0 / D_(r, s);
    for (Index i = 0; i < m_ + 2; ++i) {
      if (i == r || std::abs(D_(i, s)) <= eps_ * 1e-3) continue;
      double f = D_(i, s) * inv;
      for (Index j = 0; j < n_ + 2; ++j) D_(i, j) -= D_(r, j) * f;
      D_(i, s) = D_(r, s) * f;
    }
    for (Index j = 0; j < n_ + 2; ++j)
      if (j != s) D_(r, j) *= inv;
    for (Index i = 0; i < m_ + 2; ++i)
      if (i != r) D_(i, s) *= -inv;
    D_(r, s) = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  // Returns false when the objective is unbounded.
  bool run(int phase) {
    Index x = m_ + phase - 1;
    for (;;) {
      // Bland: entering variable with the smallest label among improving ones.
      Index s = -1;
      for (Index j = 0; j <= n_; ++j) {
        if (nonbasic_[j] == -phase) continue;
        if (D_(x, j) < -eps_ && (s == -1 || nonbasic_[j] < nonbasic_[s])) s = j;
      }
      if (s == -1) return true;
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m_; ++i)
        if (D_(i, s) > eps_) best = std::min(best, D_(i, n_ + 1) / D_(i, s));
      // Among (near-)minimal ratios, the leaving variable has the smallest label.
      Index r = -1;
      for (Index i = 0; i < m_; ++i) {
        if (D_(i, s) <= eps_ || D_(i, n_ + 1) / D_(i, s) > best + eps_) continue;
        if (r == -1 || basic_[i] < basic_[r]) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  Index m_, n_;
  double eps_;
  Matrix D_;
  std::vector<Index> basic_, nonbasic_;
};

}  // namespace

LPResult simplex_solve(const Matrix& A, const Vector& b, const Vector& c, double eps) {
  if (A.rows() != b.size() || A.cols() != c.size())
    fail(Errc::dimension_mismatch, "LP dimensions are inconsistent");
  if (!A.allFinite() || !b.allFinite() || !c.allFinite())
    fail(Errc::numerically_ill_conditioned, "LP data contains non-finite values");
  Tableau t(A, b, c, eps);
  return t.solve();
}

}  // namespace shufflebn

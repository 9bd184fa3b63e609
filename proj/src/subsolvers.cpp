// Copyright 2026 The snbr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "snbr/subsolvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "snbr/error.hpp"

namespace snbr {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

// Dense simplex tableau with the objective row kept separately.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b)
      : m_(static_cast<int>(a.rows())), n_(static_cast<int>(a.cols())) {
    t_ = Eigen::MatrixXd::Zero(m_, n_ + m_ + 1);
    flipped_.assign(m_, false);
    for (int r = 0; r < m_; ++r) {
      const double sign = b(r) < 0.0 ? -1.0 : 1.0;
      flipped_[r] = sign < 0.0;
      t_.row(r).head(n_) = sign * a.row(r);
      t_(r, n_ + r) = 1.0;
      t_(r, rhs()) = sign * b(r);
    }
    basis_.resize(m_);
    for (int r = 0; r < m_; ++r) basis_[r] = n_ + r;
  }

  int rhs() const { return n_ + m_; }
  int rows() const { return m_; }
  int structural() const { return n_; }
  const std::vector<int>& basis() const { return basis_; }
  bool flipped(int r) const { return flipped_[r]; }
  double value(int r) const { return t_(r, rhs()); }
  double at(int r, int j) const { return t_(r, j); }

  void price(const Eigen::VectorXd& cost) {
    obj_ = Eigen::VectorXd::Zero(n_ + m_ + 1);
    obj_.head(n_ + m_) = cost;
    for (int r = 0; r < m_; ++r) obj_ -= cost(basis_[r]) * t_.row(r).transpose();
  }

  double objective() const { return -obj_(rhs()); }

  void pivot(int r, int j) {
    t_.row(r) /= t_(r, j);
    for (int s = 0; s < m_; ++s) {
      if (s == r) continue;
      const double f = t_(s, j);
      if (f != 0.0) t_.row(s) -= f * t_.row(r);
    }
    const double f = obj_(j);
    if (f != 0.0) obj_ -= f * t_.row(r).transpose();
    basis_[r] = j;
  }

  // Bland's rule over `allowed` columns. Returns kOptimal, kUnbounded or
  // kIterLimit.
  SolveStatus run(int allowed, int& pivots_left, std::vector<std::pair<int, int>>& log) {
    while (true) {
      int enter = -1;
      for (int j = 0; j < allowed; ++j) {
        if (obj_(j) < -kCostTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return SolveStatus::kOptimal;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m_; ++r) {
        const double a = t_(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = t_(r, rhs()) / a;
        if (leave < 0) {
          best = ratio;
          leave = r;
          continue;
        }
        const double tie = 1e-12 * std::max(1.0, std::abs(best));
        if (ratio < best - tie || (std::abs(ratio - best) <= tie && basis_[r] < basis_[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave < 0) return SolveStatus::kUnbounded;
      if (pivots_left-- <= 0) return SolveStatus::kIterLimit;
      log.emplace_back(leave, enter);
      pivot(leave, enter);
    }
  }

 private:
  int m_;
  int n_;
  Eigen::MatrixXd t_;
  Eigen::VectorXd obj_;
  std::vector<int> basis_;
  std::vector<bool> flipped_;
};

// Rows of `a` that are linearly independent, chosen greedily in order.
std::vector<int> independent_rows(const Eigen::MatrixXd& a, const std::vector<int>& rows) {
  std::vector<int> keep;
  Eigen::MatrixXd acc(0, a.cols());
  for (int r : rows) {
    Eigen::MatrixXd trial(acc.rows() + 1, a.cols());
    trial << acc, a.row(r);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(trial.transpose());
    qr.setThreshold(1e-10);
    if (qr.rank() == trial.rows()) {
      acc = trial;
      keep.push_back(r);
    }
  }
  return keep;
}

}  // namespace

const char* solve_status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kIterLimit: return "iteration-limit";
  }
  return "unknown";
}

SolveOutcome simplex_solve(const LinearProgram& lp, int max_pivots) {
  const int m = static_cast<int>(lp.A.rows());
  const int n = static_cast<int>(lp.A.cols());
  if (lp.c.size() != n || lp.b.size() != m) throw_invalid("simplex: inconsistent dimensions");
  if (!all_finite(lp.A) || !lp.b.allFinite() || !lp.c.allFinite())
    throw_invalid("simplex: non-finite data");

  SolveOutcome out;
  Tableau tab(lp.A, lp.b);
  int budget = max_pivots;

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
  phase1.tail(m).setOnes();
  tab.price(phase1);
  SolveStatus st = tab.run(n + m, budget, out.pivots);
  if (st == SolveStatus::kIterLimit) {
    out.status = st;
    out.iterations = static_cast<int>(out.pivots.size());
    return out;
  }
  const double feas_tol = kLpTolerance * std::max(1.0, lp.b.cwiseAbs().maxCoeff());
  if (tab.objective() > feas_tol) {
    out.status = SolveStatus::kInfeasible;
    out.iterations = static_cast<int>(out.pivots.size());
    return out;
  }
  // Drive remaining artificial variables out of the basis where possible;
  // rows where that fails are redundant.
  for (int r = 0; r < m; ++r) {
    if (tab.basis()[r] < n) continue;
    for (int j = 0; j < n; ++j) {
      if (std::abs(tab.at(r, j)) > 1e-9) {
        out.pivots.emplace_back(r, j);
        tab.pivot(r, j);
        break;
      }
    }
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
  phase2.head(n) = lp.c;
  tab.price(phase2);
  st = tab.run(n, budget, out.pivots);
  out.iterations = static_cast<int>(out.pivots.size());
  if (st != SolveStatus::kOptimal) {
    out.status = st;
    return out;
  }

  out.primal = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < m; ++r)
    if (tab.basis()[r] < n) out.primal(tab.basis()[r]) = std::max(0.0, tab.value(r));

  // Duals from B^T y = c_B on the (sign-adjusted) original columns.
  Eigen::MatrixXd basis_mat = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd cb = Eigen::VectorXd::Zero(m);
  for (int r = 0; r < m; ++r) {
    const int j = tab.basis()[r];
    if (j < n) {
      for (int s = 0; s < m; ++s)
        basis_mat(s, r) = (tab.flipped(s) ? -1.0 : 1.0) * lp.A(s, j);
      cb(r) = lp.c(j);
    } else {
      basis_mat(j - n, r) = 1.0;
    }
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  if (m > 0) y = basis_mat.transpose().fullPivLu().solve(cb);
  for (int s = 0; s < m; ++s)
    if (tab.flipped(s)) y(s) = -y(s);
  out.dual = y;
  out.objective = lp.c.dot(out.primal);
  out.status = SolveStatus::kOptimal;
  return out;
}

SolveOutcome qp_active_set(const QuadraticProgram& qp, int max_changes) {
  const int n = static_cast<int>(qp.H.rows());
  if (qp.H.cols() != n || qp.d.size() != n) throw_invalid("qp: inconsistent objective dimensions");
  const int mi = static_cast<int>(qp.G.rows());
  const int me = static_cast<int>(qp.A_eq.rows());
  if ((mi > 0 && qp.G.cols() != n) || qp.g.size() != mi)
    throw_invalid("qp: inconsistent inequality dimensions");
  if ((me > 0 && qp.A_eq.cols() != n) || qp.b_eq.size() != me)
    throw_invalid("qp: inconsistent equality dimensions");
  if (!all_finite(qp.H) || !qp.d.allFinite() || (mi > 0 && !all_finite(qp.G)) ||
      !qp.g.allFinite() || (me > 0 && !all_finite(qp.A_eq)) || !qp.b_eq.allFinite())
    throw_invalid("qp: non-finite data");
  const double hscale = std::max(1.0, qp.H.cwiseAbs().maxCoeff());
  if ((qp.H - qp.H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * hscale)
    throw_invalid("qp: H is not symmetric");
  {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(qp.H);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < -1e-10 * hscale)
      throw_invalid("qp: H is not positive semidefinite");
  }

  const Eigen::VectorXd lin = qp.sense == Sense::kMax ? Eigen::VectorXd(-qp.d) : qp.d;
  SolveOutcome out;

  // Phase 1: any feasible point via the simplex on z = z+ - z-, slacks s.
  Eigen::VectorXd z;
  {
    LinearProgram lp;
    lp.A = Eigen::MatrixXd::Zero(me + mi, 2 * n + mi);
    lp.b = Eigen::VectorXd::Zero(me + mi);
    if (me > 0) {
      lp.A.block(0, 0, me, n) = qp.A_eq;
      lp.A.block(0, n, me, n) = -qp.A_eq;
      lp.b.head(me) = qp.b_eq;
    }
    if (mi > 0) {
      lp.A.block(me, 0, mi, n) = qp.G;
      lp.A.block(me, n, mi, n) = -qp.G;
      lp.A.block(me, 2 * n, mi, mi) = Eigen::MatrixXd::Identity(mi, mi);
      lp.b.tail(mi) = qp.g;
    }
    lp.c = Eigen::VectorXd::Zero(2 * n + mi);
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    bool zero_ok = (me == 0 || (qp.A_eq * zero - qp.b_eq).cwiseAbs().maxCoeff() <= 1e-12) &&
                   (mi == 0 || (qp.G * zero - qp.g).maxCoeff() <= 0.0);
    if (zero_ok) {
      z = zero;
    } else {
      SolveOutcome p1 = simplex_solve(lp);
      if (p1.status == SolveStatus::kInfeasible) {
        out.status = SolveStatus::kInfeasible;
        return out;
      }
      if (p1.status != SolveStatus::kOptimal) {
        out.status = p1.status;
        return out;
      }
      z = p1.primal.head(n) - p1.primal.segment(n, n);
    }
  }

  Eigen::MatrixXd rows_all(me + mi, n);
  if (me > 0) rows_all.topRows(me) = qp.A_eq;
  if (mi > 0) rows_all.bottomRows(mi) = qp.G;

  std::vector<int> eq_rows;
  for (int r = 0; r < me; ++r) eq_rows.push_back(r);
  eq_rows = independent_rows(rows_all, eq_rows);

  // Working set entries index rows_all; inequality k is row me + k.
  std::vector<int> working = eq_rows;
  {
    std::vector<int> cand = working;
    for (int k = 0; k < mi; ++k)
      if (std::abs(qp.G.row(k).dot(z) - qp.g(k)) <= 1e-9) cand.push_back(me + k);
    working = independent_rows(rows_all, cand);
  }

  auto in_working = [&](int row) {
    return std::find(working.begin(), working.end(), row) != working.end();
  };

  Eigen::VectorXd lambda_w;
  int changes = 0;
  while (true) {
    if (++out.iterations > max_changes + 1000 || changes > max_changes) {
      out.status = SolveStatus::kIterLimit;
      out.primal = z;
      return out;
    }
    const int w = static_cast<int>(working.size());
    Eigen::MatrixXd aw(w, n);
    for (int r = 0; r < w; ++r) aw.row(r) = rows_all.row(working[r]);
    const Eigen::VectorXd grad = qp.H * z + lin;

    Eigen::MatrixXd zbasis;
    if (w == 0) {
      zbasis = Eigen::MatrixXd::Identity(n, n);
    } else {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(aw.transpose());
      Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
      zbasis = q.rightCols(n - w);
    }

    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    bool newton = true;
    if (zbasis.cols() > 0) {
      const Eigen::MatrixXd hr = zbasis.transpose() * qp.H * zbasis;
      const Eigen::VectorXd gr = zbasis.transpose() * grad;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (hr + hr.transpose()));
      const Eigen::VectorXd& ev = es.eigenvalues();
      const Eigen::MatrixXd& vecs = es.eigenvectors();
      const double lam_tol = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
      Eigen::VectorXd gnull = Eigen::VectorXd::Zero(gr.size());
      Eigen::VectorXd step = Eigen::VectorXd::Zero(gr.size());
      for (int k = 0; k < ev.size(); ++k) {
        const double c = vecs.col(k).dot(gr);
        if (ev(k) <= lam_tol)
          gnull += c * vecs.col(k);
        else
          step -= (c / ev(k)) * vecs.col(k);
      }
      if (gnull.norm() > 1e-12 * std::max(1.0, grad.norm())) {
        p = -zbasis * gnull;
        newton = false;
      } else {
        p = zbasis * step;
      }
    }

    if (p.cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, z.cwiseAbs().maxCoeff())) {
      // Subspace minimizer: check multiplier signs.
      if (w > 0)
        lambda_w = aw.transpose().colPivHouseholderQr().solve(-grad);
      else
        lambda_w = Eigen::VectorXd();
      int drop = -1;
      for (int r = 0; r < w; ++r) {
        if (working[r] < me) continue;
        if (lambda_w(r) < -1e-10 && (drop < 0 || working[r] < working[drop])) drop = r;
      }
      if (drop < 0) break;
      working.erase(working.begin() + drop);
      ++changes;
      continue;
    }

    double alpha = newton ? 1.0 : std::numeric_limits<double>::infinity();
    int blocking = -1;
    for (int k = 0; k < mi; ++k) {
      if (in_working(me + k)) continue;
      const double gp = qp.G.row(k).dot(p);
      if (gp <= 1e-12 * qp.G.row(k).norm() * p.norm()) continue;
      const double ak = std::max(0.0, (qp.g(k) - qp.G.row(k).dot(z)) / gp);
      if (ak < alpha) {
        alpha = ak;
        blocking = me + k;
      }
    }
    if (!std::isfinite(alpha)) {
      out.status = SolveStatus::kUnbounded;
      out.primal = z;
      return out;
    }
    z += alpha * p;
    if (blocking >= 0) {
      working.push_back(blocking);
      ++changes;
    }
  }

  out.primal = z;
  out.dual = Eigen::VectorXd::Zero(mi);
  out.dual_eq = Eigen::VectorXd::Zero(me);
  for (std::size_t r = 0; r < working.size(); ++r) {
    const int row = working[r];
    if (row < me)
      out.dual_eq(row) = lambda_w(static_cast<int>(r));
    else
      out.dual(row - me) = std::max(0.0, lambda_w(static_cast<int>(r)));
  }
  const double quad = 0.5 * z.dot(qp.H * z);
  out.objective = qp.sense == Sense::kMax ? qp.d.dot(z) - quad : qp.d.dot(z) + quad;
  out.status = SolveStatus::kOptimal;
  return out;
}

ScalarQpResult scalar_box_qp(double d, double h, double x) {
  if (!(h > 0.0)) throw_invalid("scalar_box_qp: h must be positive");
  if (!(x >= 0.0)) throw_invalid("scalar_box_qp: x must be nonnegative");
  const double q = std::clamp(d / h, 0.0, x);
  return {q, d * q - 0.5 * h * q * q};
}

}  // namespace snbr

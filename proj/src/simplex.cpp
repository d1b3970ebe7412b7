#include "banmod/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "banmod/error.hpp"

namespace banmod {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr int kMaxPivots = 50000;
constexpr int kRefactorEvery = 40;
constexpr int kStallLimit = 50;
constexpr double kFeasTol = 1e-9;

struct Tableau {
  // Rows 0..m-1 are constraints, row m is the reduced-cost row; the last
  // column is the right-hand side.
  Mat t;
  std::vector<Index> basis;
  Index m = 0;
  Index n = 0;
  // Original data, used to rebuild the tableau from the current basis so
  // rounding does not accumulate over long pivot sequences.
  Mat a0;
  Vec b0;
  Vec c0;

  void pivot(Index r, Index j) {
    t.row(r) /= t(r, j);
    for (Index i = 0; i <= m; ++i) {
      if (i == r) continue;
      const double f = t(i, j);
      if (f != 0.0) t.row(i) -= f * t.row(r);
    }
    basis[static_cast<std::size_t>(r)] = j;
  }

  void refactor() {
    Mat bm(m, m);
    Vec cb(m);
    for (Index l = 0; l < m; ++l) {
      bm.col(l) = a0.col(basis[static_cast<std::size_t>(l)]);
      cb(l) = c0(basis[static_cast<std::size_t>(l)]);
    }
    Eigen::PartialPivLU<Mat> lu(bm);
    if (lu.rcond() < 1e-12) return;
    const Mat body = lu.solve(a0);
    Vec rhs = lu.solve(b0);
    if (!body.allFinite() || !rhs.allFinite()) return;
    for (Index i = 0; i < m; ++i) {
      if (rhs(i) < 0.0 && rhs(i) > -1e-9) rhs(i) = 0.0;
    }
    t.block(0, 0, m, n) = body;
    t.block(0, n, m, 1) = rhs;
    t.block(m, 0, 1, n) = c0.transpose() - cb.transpose() * body;
    t(m, n) = -cb.dot(rhs);
    for (Index l = 0; l < m; ++l) t(m, basis[static_cast<std::size_t>(l)]) = 0.0;
  }

  bool has_pivot(Index j) const {
    for (Index i = 0; i < m; ++i) {
      if (t(i, j) > kPivotTol) return true;
    }
    return false;
  }

  // Dantzig pricing, or Bland's rule once the objective stalls.
  Index entering(Index ncols, bool bounded, bool bland) const {
    Index best = -1;
    for (Index j = 0; j < ncols; ++j) {
      if (t(m, j) >= -kPivotTol || (bounded && !has_pivot(j))) continue;
      if (bland) return j;
      if (best < 0 || t(m, j) < t(m, best)) best = j;
    }
    return best;
  }

  // Harris two-pass ratio test: among rows whose ratio is within the
  // feasibility slack of the minimum, take the largest pivot.
  Index leaving(Index enter) const {
    double colmax = 0.0;
    for (Index i = 0; i < m; ++i) colmax = std::max(colmax, t(i, enter));
    const double ptol = std::max(kPivotTol, 1e-9 * colmax);
    double theta = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m; ++i) {
      const double a = t(i, enter);
      if (a > ptol) theta = std::min(theta, (std::max(0.0, t(i, n)) + kFeasTol) / a);
    }
    Index leave = -1;
    for (Index i = 0; i < m; ++i) {
      const double a = t(i, enter);
      if (a <= ptol || std::max(0.0, t(i, n)) / a > theta) continue;
      if (leave < 0 || a > t(leave, enter)) leave = i;
    }
    return leave;
  }

  // Returns false if unbounded. With `bounded` set (phase 1) a negative
  // reduced cost over a column without a usable pivot is rounding noise and
  // the column is passed over.
  bool run(Index ncols, bool bounded = false) {
    int rechecks = 0;
    int stalled = 0;
    double last = t(m, n);
    for (int iter = 0; iter < kMaxPivots; ++iter) {
      if (iter > 0 && iter % kRefactorEvery == 0) refactor();
      const bool bland = stalled > kStallLimit;
      Index enter = entering(ncols, bounded, bland);
      if (enter < 0 && rechecks < 4) {
        ++rechecks;
        refactor();
        enter = entering(ncols, bounded, bland);
      }
      if (enter < 0) return true;
      const Index leave = leaving(enter);
      if (leave < 0) {
        // Confirm the ray on a fresh factorization before reporting it.
        if (rechecks >= 4) return false;
        ++rechecks;
        refactor();
        continue;
      }
      pivot(leave, enter);
      for (Index i = 0; i < m; ++i) {
        if (t(i, n) < 0.0) t(i, n) = 0.0;
      }
      // The rhs entry of the cost row is minus the objective.
      if (t(m, n) > last + 1e-12 * std::max(1.0, std::abs(last))) {
        stalled = 0;
      } else {
        ++stalled;
      }
      last = t(m, n);
    }
    fail(Errc::solver_failure, "simplex pivot limit reached");
  }
};

}  // namespace

LpResult simplex_solve(const Mat& a, const Vec& b, const Vec& c) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (b.size() != m || c.size() != n) fail(Errc::dimension_mismatch, "simplex_solve");

  LpResult out;
  if (m == 0) {
    if ((c.array() < 0).any()) {
      out.status = LpStatus::unbounded;
      return out;
    }
    out.status = LpStatus::optimal;
    out.x = Vec::Zero(n);
    return out;
  }

  // Rows are equilibrated to unit max entry; the feasible set is unchanged.
  Mat as = a;
  Vec bs = b;
  for (Index i = 0; i < m; ++i) {
    double r = as.row(i).cwiseAbs().maxCoeff();
    if (r == 0.0) r = 1.0;
    if (bs(i) < 0) r = -r;
    as.row(i) /= r;
    bs(i) /= r;
  }
  as = as.unaryExpr([](double v) { return std::abs(v) < 1e-14 ? 0.0 : v; });

  // Phase 1 with one artificial per row.
  Tableau tab;
  tab.m = m;
  tab.n = n + m;
  tab.t = Mat::Zero(m + 1, n + m + 1);
  tab.t.block(0, 0, m, n) = as;
  tab.t.block(0, n, m, m) = Mat::Identity(m, m);
  tab.t.block(0, n + m, m, 1) = bs;
  tab.basis.resize(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) tab.basis[static_cast<std::size_t>(i)] = n + i;
  tab.t.block(m, n, 1, m).setOnes();
  for (Index i = 0; i < m; ++i) tab.t.row(m) -= tab.t.row(i);
  tab.a0 = tab.t.block(0, 0, m, n + m);
  tab.b0 = bs;
  tab.c0 = Vec::Zero(n + m);
  tab.c0.tail(m).setOnes();
  tab.run(n + m, true);

  const double scale = std::max(1.0, bs.cwiseAbs().maxCoeff());
  if (-tab.t(m, n + m) > 1e-9 * scale) {
    out.status = LpStatus::infeasible;
    return out;
  }

  // Drive artificials out of the basis; rows where that is impossible are
  // redundant and dropped.
  std::vector<bool> keep(static_cast<std::size_t>(m), true);
  for (Index i = 0; i < m; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] < n) continue;
    Index j = 0;
    Index best_j = -1;
    double best_abs = kPivotTol;
    for (; j < n; ++j) {
      if (std::abs(tab.t(i, j)) > best_abs) {
        best_abs = std::abs(tab.t(i, j));
        best_j = j;
      }
    }
    if (best_j >= 0) {
      tab.pivot(i, best_j);
    } else {
      keep[static_cast<std::size_t>(i)] = false;
    }
  }

  // Phase 2 on the kept rows without artificial columns.
  std::vector<Index> rows;
  for (Index i = 0; i < m; ++i) {
    if (keep[static_cast<std::size_t>(i)]) rows.push_back(i);
  }
  const Index m2 = static_cast<Index>(rows.size());
  Tableau ph;
  ph.m = m2;
  ph.n = n;
  ph.t = Mat::Zero(m2 + 1, n + 1);
  ph.basis.resize(static_cast<std::size_t>(m2));
  for (Index k = 0; k < m2; ++k) {
    const Index i = rows[static_cast<std::size_t>(k)];
    ph.t.block(k, 0, 1, n) = tab.t.block(i, 0, 1, n);
    ph.t(k, n) = tab.t(i, n + m);
    ph.basis[static_cast<std::size_t>(k)] = tab.basis[static_cast<std::size_t>(i)];
  }
  ph.t.block(m2, 0, 1, n) = c.transpose();
  ph.a0.resize(m2, n);
  ph.b0.resize(m2);
  for (Index k = 0; k < m2; ++k) {
    ph.a0.row(k) = as.row(rows[static_cast<std::size_t>(k)]);
    ph.b0(k) = bs(rows[static_cast<std::size_t>(k)]);
  }
  ph.c0 = c;
  for (Index k = 0; k < m2; ++k) {
    const double cb = c(ph.basis[static_cast<std::size_t>(k)]);
    if (cb != 0.0) ph.t.row(m2) -= cb * ph.t.row(k);
  }
  if (!ph.run(n)) {
    out.status = LpStatus::unbounded;
    return out;
  }

  // Re-solve the final basis against the original data.
  out.x = Vec::Zero(n);
  if (m2 > 0) {
    Mat bmat(m2, m2);
    Vec rhs(m2);
    for (Index k = 0; k < m2; ++k) {
      const Index i = rows[static_cast<std::size_t>(k)];
      rhs(k) = bs(i);
      for (Index l = 0; l < m2; ++l) bmat(k, l) = as(i, ph.basis[static_cast<std::size_t>(l)]);
    }
    Eigen::FullPivLU<Mat> lu(bmat);
    Vec xb = lu.isInvertible() ? Vec(lu.solve(rhs)) : Vec(ph.t.block(0, n, m2, 1));
    for (Index l = 0; l < m2; ++l) {
      out.x(ph.basis[static_cast<std::size_t>(l)]) = std::max(0.0, xb(l));
    }
  }
  out.status = LpStatus::optimal;
  out.value = c.dot(out.x);
  return out;
}

Index LpBuilder::add_var(bool free_var) {
  free_.push_back(free_var);
  return static_cast<Index>(free_.size()) - 1;
}

void LpBuilder::add_row(std::vector<std::pair<Index, double>> coeffs, Sense sense, double rhs) {
  rows_.push_back(Row{std::move(coeffs), sense, rhs});
}

void LpBuilder::set_objective(std::vector<std::pair<Index, double>> coeffs) {
  objective_ = std::move(coeffs);
}

LpResult LpBuilder::minimize() const {
  // Column layout: one column per nonnegative variable, two per free
  // variable (x = x+ - x-), then one slack per inequality row.
  const Index nv = num_vars();
  std::vector<Index> col(static_cast<std::size_t>(nv));
  Index ncols = 0;
  for (Index v = 0; v < nv; ++v) {
    col[static_cast<std::size_t>(v)] = ncols;
    ncols += free_[static_cast<std::size_t>(v)] ? 2 : 1;
  }
  const Index nstruct = ncols;
  for (const Row& r : rows_) {
    if (r.sense != Sense::eq) ++ncols;
  }
  const Index m = static_cast<Index>(rows_.size());
  Mat a = Mat::Zero(m, ncols);
  Vec b(m);
  Index slack = nstruct;
  for (Index i = 0; i < m; ++i) {
    const Row& r = rows_[static_cast<std::size_t>(i)];
    for (const auto& [v, coef] : r.coeffs) {
      const Index j = col[static_cast<std::size_t>(v)];
      a(i, j) += coef;
      if (free_[static_cast<std::size_t>(v)]) a(i, j + 1) -= coef;
    }
    if (r.sense == Sense::le) a(i, slack++) = 1.0;
    if (r.sense == Sense::ge) a(i, slack++) = -1.0;
    b(i) = r.rhs;
  }
  Vec c = Vec::Zero(ncols);
  for (const auto& [v, coef] : objective_) {
    const Index j = col[static_cast<std::size_t>(v)];
    c(j) += coef;
    if (free_[static_cast<std::size_t>(v)]) c(j + 1) -= coef;
  }
  LpResult std_res = simplex_solve(a, b, c);
  LpResult out;
  out.status = std_res.status;
  if (std_res.status != LpStatus::optimal) return out;
  out.value = std_res.value;
  out.x.resize(nv);
  for (Index v = 0; v < nv; ++v) {
    const Index j = col[static_cast<std::size_t>(v)];
    out.x(v) = free_[static_cast<std::size_t>(v)] ? std_res.x(j) - std_res.x(j + 1) : std_res.x(j);
  }
  return out;
}

}  // namespace banmod

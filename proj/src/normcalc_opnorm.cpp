#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "banmod/error.hpp"
#include "banmod/normcalc.hpp"

namespace banmod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kCandidateCap = std::size_t{1} << 16;

struct Partial {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool exact = true;
  std::string route;
  Vec x;  // maximizing direction in source coordinates (may be unnormalized)
};

Partial exact_result(double value, std::string route, Vec x, bool exact = true) {
  Partial p;
  p.value = value;
  p.lower = value;
  p.upper = value;
  p.exact = exact;
  p.route = std::move(route);
  p.x = std::move(x);
  return p;
}

bool rows_confined(const Mat& a, Index off, Index len) {
  for (Index i = 0; i < a.rows(); ++i) {
    if (i >= off && i < off + len) continue;
    if (a.row(i).cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

bool cols_confined(const Mat& a, Index off, Index len) {
  for (Index j = 0; j < a.cols(); ++j) {
    if (j >= off && j < off + len) continue;
    if (a.col(j).cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

bool square_invertible(const Mat& e) { return e.rows() == e.cols() && has_full_column_rank(e); }

double unit_value(const NormExpr& n) { return eval_norm(n, Vec::Ones(1)); }

// Largest singular value by power iteration on the smaller Gram matrix.
double power_sigma_max(const Mat& m, Vec* right) {
  if (m.size() == 0) {
    if (right) *right = Vec::Zero(m.cols());
    return 0.0;
  }
  const bool use_cols = m.rows() >= m.cols();
  const Mat g = use_cols ? Mat(m.transpose() * m) : Mat(m * m.transpose());
  Index start = 0;
  g.colwise().norm().maxCoeff(&start);
  Vec v = g.col(start);
  if (v.norm() == 0.0) {
    if (right) *right = Vec::Zero(m.cols());
    return 0.0;
  }
  v.normalize();
  double lambda = v.dot(g * v);
  int stable = 0;
  for (int it = 0; it < 100000 && stable < 3; ++it) {
    Vec w = g * v;
    const double nw = w.norm();
    if (nw == 0.0) break;
    v = w / nw;
    const double next = v.dot(g * v);
    if (std::abs(next - lambda) <= 1e-16 * std::abs(next)) {
      ++stable;
    } else {
      stable = 0;
    }
    lambda = next;
  }
  if (right) {
    if (use_cols) {
      *right = v;
    } else {
      Vec r = m.transpose() * v;
      const double nr = r.norm();
      *right = nr > 0 ? Vec(r / nr) : Vec(Vec::Zero(m.cols()));
    }
  }
  return std::sqrt(std::max(0.0, lambda));
}

struct Ctx {
  OpNormOptions opts;
};

Partial op_impl(const Mat& a, const NormExpr& s, const NormExpr& t, const Ctx& ctx);

Partial ascent(const Mat& a, const NormExpr& s, const NormExpr& t, const Ctx& ctx) {
  const double tol = ctx.opts.tol;
  const NormExpr ds = dual_of(s);
  const Index d = a.cols();
  std::vector<Vec> starts;
  for (Index j = 0; j < d; ++j) starts.push_back(Vec::Unit(d, j));
  {
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinV);
    for (Index j = 0; j < std::min<Index>(2, svd.matrixV().cols()); ++j) starts.push_back(svd.matrixV().col(j));
  }
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 8; ++k) {
    Vec r(d);
    for (Index j = 0; j < d; ++j) r(j) = gauss(rng);
    starts.push_back(r);
  }
  Partial best;
  best.route = "ascent";
  best.exact = false;
  best.lower = 0.0;
  for (Vec x : starts) {
    double ratio = 0.0;
    for (int it = 0; it < 200; ++it) {
      const double sx = eval_norm(s, x, tol);
      if (!(sx > 0)) break;
      x /= sx;
      const double val = eval_norm(t, a * x, tol);
      if (val > best.lower) {
        best.lower = val;
        best.x = x;
      }
      if (it > 0 && val <= ratio * (1.0 + 1e-13)) break;
      ratio = val;
      const Vec y = subgradient(t, a * x, tol);
      const Vec u = a.transpose() * y;
      if (u.norm() == 0.0) break;
      x = subgradient(ds, u, tol);
    }
  }
  const Equivalence es = equivalence_constants(s);
  const Equivalence et = equivalence_constants(t);
  Vec dummy;
  const double smax = power_sigma_max(a, &dummy);
  best.upper = es.lower > 0 ? et.upper * smax / es.lower : kInf;
  best.upper = std::max(best.upper, best.lower);
  best.value = best.lower;
  return best;
}

Partial combine_max(std::vector<Partial> parts, std::string route) {
  Partial out;
  out.route = std::move(route);
  double best = -1.0;
  for (Partial& p : parts) {
    out.exact = out.exact && p.exact;
    out.lower = std::max(out.lower, p.lower);
    out.upper = std::max(out.upper, p.upper);
    if (p.value > best) {
      best = p.value;
      out.value = p.value;
      out.x = std::move(p.x);
      if (!p.route.empty()) out.route += "/" + p.route;
    }
  }
  return out;
}

Partial op_impl(const Mat& a, const NormExpr& s, const NormExpr& t, const Ctx& ctx) {
  const double tol = ctx.opts.tol;
  const Index d = s.dim();
  const Index e = t.dim();
  if (d == 0 || e == 0 || a.cwiseAbs().maxCoeff() == 0.0) {
    return exact_result(0.0, "zero", Vec::Zero(d));
  }

  // Target-side decompositions.
  if (const SupOfNode* sup = t.as_sup()) {
    std::vector<Partial> parts;
    for (const NormPart& p : sup->parts) {
      if (p.norm.dim() == 0) continue;
      parts.push_back(op_impl(a.middleRows(p.offset, p.norm.dim()), s, p.norm, ctx));
    }
    return combine_max(std::move(parts), "tgt-sup");
  }
  if (const SumOfNode* sum = t.as_sum()) {
    for (const NormPart& p : sum->parts) {
      if (p.norm.dim() > 0 && rows_confined(a, p.offset, p.norm.dim())) {
        return op_impl(a.middleRows(p.offset, p.norm.dim()), s, p.norm, ctx);
      }
    }
  }
  if (const ComposeNode* c = t.as_compose()) {
    return op_impl(c->embed * a, s, c->inner, ctx);
  }

  // Source-side decompositions.
  if (const SumOfNode* sum = s.as_sum()) {
    std::vector<Partial> parts;
    for (const NormPart& p : sum->parts) {
      if (p.norm.dim() == 0) continue;
      Partial r = op_impl(a.middleCols(p.offset, p.norm.dim()), p.norm, t, ctx);
      Vec x = Vec::Zero(d);
      if (r.x.size()) x.segment(p.offset, p.norm.dim()) = r.x;
      r.x = x;
      parts.push_back(std::move(r));
    }
    return combine_max(std::move(parts), "src-sum");
  }
  if (const SupOfNode* sup = s.as_sup()) {
    for (const NormPart& p : sup->parts) {
      if (p.norm.dim() > 0 && cols_confined(a, p.offset, p.norm.dim())) {
        Partial r = op_impl(a.middleCols(p.offset, p.norm.dim()), p.norm, t, ctx);
        Vec x = Vec::Zero(d);
        if (r.x.size()) x.segment(p.offset, p.norm.dim()) = r.x;
        r.x = x;
        return r;
      }
    }
  }
  if (const ComposeNode* c = s.as_compose()) {
    if (square_invertible(c->embed)) {
      Eigen::PartialPivLU<Mat> lu(c->embed);
      Partial r = op_impl(a * lu.inverse(), c->inner, t, ctx);
      if (r.x.size()) r.x = lu.solve(r.x);
      return r;
    }
    if (const QuotientNode* q = c->inner.as_quotient()) {
      Mat full(c->embed.rows(), d + q->basis.cols());
      full << c->embed, q->basis;
      if (square_invertible(full)) {
        const Mat proj = full.partialPivLu().inverse().topRows(d);
        Partial r = op_impl(a * proj, q->ambient, t, ctx);
        if (r.x.size()) r.x = proj * r.x;
        return r;
      }
    }
  }
  if (const QuotientNode* q = s.as_quotient()) {
    const Mat ab = a * q->basis;
    if (ab.size() && ab.cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
      return exact_result(kInf, "unbounded", Vec());
    }
    return op_impl(a, q->ambient, t, ctx);
  }

  // One-dimensional sides.
  if (e == 1) {
    const double w = unit_value(t);
    const NormExpr ds = dual_of(s);
    const Vec row = a.row(0).transpose();
    Evaluation ev = evaluate(ds, row, tol);
    return exact_result(w * ev.value, "row-dual", subgradient(ds, row, tol), ev.exact);
  }
  if (d == 1) {
    const double w = unit_value(s);
    Evaluation ev = evaluate(t, a.col(0), tol);
    return exact_result(ev.value / w, "column", Vec::Constant(1, 1.0 / w), ev.exact);
  }

  // Weighted leaf shortcuts.
  if (const LpNode* lt = t.as_lp(); lt && lt->p == PNorm::inf) {
    const NormExpr ds = dual_of(s);
    Partial out = exact_result(0.0, "rows", Vec());
    double best = -1.0;
    for (Index i = 0; i < e; ++i) {
      const Vec row = a.row(i).transpose();
      Evaluation ev = evaluate(ds, row, tol);
      out.exact = out.exact && ev.exact;
      const double val = lt->weights(i) * ev.value;
      if (val > best) {
        best = val;
        out.x = row;
      }
    }
    out.value = out.lower = out.upper = best;
    out.x = subgradient(ds, out.x, tol);
    return out;
  }

  // Extreme points of the source ball.
  const std::size_t cap = std::min<std::size_t>(kCandidateCap, std::size_t{1} << std::min(ctx.opts.enumeration_dim_cap, 30));
  if (auto cand = extreme_candidates(s, cap)) {
    Partial out = exact_result(0.0, "extreme-points", Vec());
    double best = -1.0;
    const bool leaf = s.as_lp() != nullptr;
    for (const Vec& x : *cand) {
      Evaluation sv = leaf ? Evaluation{1.0, true} : evaluate(s, x, tol);
      if (!(sv.value > 0)) continue;
      Evaluation tv = evaluate(t, a * x, tol);
      out.exact = out.exact && sv.exact && tv.exact;
      const double ratio = tv.value / sv.value;
      if (ratio > best) {
        best = ratio;
        out.x = x / sv.value;
      }
    }
    out.value = out.lower = out.upper = std::max(0.0, best);
    return out;
  }

  // Euclidean norms on both sides.
  if (auto gs = euclidean_factor(s)) {
    if (auto gt = euclidean_factor(t)) {
      if (has_full_column_rank(*gs)) {
        const Mat gs_pinv = pseudo_inverse(*gs);
        Vec right;
        const double sigma = power_sigma_max(*gt * a * gs_pinv, &right);
        return exact_result(sigma, "power-iteration", gs_pinv * right);
      }
    }
  }

  // Extreme points of the dual target ball: ||A|| = sup s*(A^T y) / t*(y).
  if (auto dt = dual_expr(t)) {
    if (auto cand = extreme_candidates(*dt, cap)) {
      const NormExpr ds = dual_of(s);
      Partial out = exact_result(0.0, "dual-extreme-points", Vec());
      double best = -1.0;
      Vec best_u;
      for (const Vec& y : *cand) {
        Evaluation yv = evaluate(*dt, y, tol);
        if (!(yv.value > 0)) continue;
        const Vec u = a.transpose() * y;
        Evaluation uv = evaluate(ds, u, tol);
        out.exact = out.exact && yv.exact && uv.exact;
        const double ratio = uv.value / yv.value;
        if (ratio > best) {
          best = ratio;
          best_u = u;
        }
      }
      out.value = out.lower = out.upper = std::max(0.0, best);
      if (best_u.size()) out.x = subgradient(ds, best_u, tol);
      return out;
    }
  }

  if (ctx.opts.strict) {
    fail(Errc::enumeration_cap, "no exact operator-norm route for " + describe(s) + " -> " + describe(t));
  }
  return ascent(a, s, t, ctx);
}

}  // namespace

OpNormResult op_norm(const Mat& a, const NormExpr& src, const NormExpr& tgt, const OpNormOptions& opts) {
  if (a.rows() != tgt.dim() || a.cols() != src.dim()) {
    fail(Errc::dimension_mismatch, "op_norm: matrix is " + std::to_string(a.rows()) + "x" +
                                       std::to_string(a.cols()) + ", norms need " +
                                       std::to_string(tgt.dim()) + "x" + std::to_string(src.dim()));
  }
  if (!a.allFinite()) fail(Errc::invalid_argument, "op_norm: matrix has non-finite entries");
  Ctx ctx{opts};
  const NormExpr s = canonical(src);
  const NormExpr t = canonical(tgt);
  Partial p = op_impl(a, s, t, ctx);

  OpNormResult out;
  out.value = p.value;
  out.lower = p.lower;
  out.upper = p.upper;
  out.exact = p.exact;
  out.route = p.route;
  if (p.x.size() == a.cols() && std::isfinite(p.value)) {
    const double sx = eval_norm(s, p.x, opts.tol);
    if (sx > 0) {
      out.x = p.x / sx;
      const Vec ax = a * out.x;
      out.y = subgradient(t, ax, opts.tol);
      // The certificate pair is a feasible point, so it also bounds from below.
      const double achieved = eval_norm(t, ax, opts.tol);
      out.lower = std::max(out.lower, std::min(achieved, out.value));
    }
  }
  return out;
}

}  // namespace banmod

#include <algorithm>
#include <cmath>
#include <limits>

#include "banmod/detail/norm_impl.hpp"
#include "banmod/error.hpp"
#include "banmod/normcalc.hpp"

namespace banmod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_square_invertible(const Mat& e) {
  return e.rows() == e.cols() && (e.rows() == 0 || has_full_column_rank(e));
}

NormExpr rebuild_parts(const NormExpr& n, const std::vector<NormPart>& parts, bool sup,
                       NormExpr (*map)(const NormExpr&)) {
  std::vector<NormExpr> out;
  bool changed = false;
  for (const NormPart& p : parts) {
    out.push_back(map(p.norm));
    changed = changed || !out.back().same_node(p.norm);
  }
  if (!changed) return n;
  return sup ? sup_of(std::move(out)) : sum_of(std::move(out));
}

double unit_value(const NormExpr& n) {
  Vec e = Vec::Ones(1);
  return eval_norm(n, e);
}

NormExpr compute_canonical(const NormExpr& n) {
  switch (n.kind()) {
    case NormKind::lp: return n;
    case NormKind::sup_of: return rebuild_parts(n, n.as_sup()->parts, true, canonical);
    case NormKind::sum_of: return rebuild_parts(n, n.as_sum()->parts, false, canonical);
    case NormKind::quotient: {
      NormExpr amb = canonical(n.as_quotient()->ambient);
      if (amb.same_node(n.as_quotient()->ambient)) return n;
      return quotient_of(amb, n.as_quotient()->basis);
    }
    case NormKind::compose: {
      NormExpr inner = canonical(n.as_compose()->inner);
      if (inner.same_node(n.as_compose()->inner)) return n;
      return compose_linear(n.as_compose()->embed, inner, true);
    }
    case NormKind::dual: {
      NormExpr inner = canonical(n.as_dual()->inner);
      if (auto d = dual_expr(inner)) return *d;
      if (inner.same_node(n.as_dual()->inner)) return n;
      return dual_of(inner);
    }
    case NormKind::op_norm: {
      NormExpr s = canonical(n.as_op_norm()->src);
      NormExpr t = canonical(n.as_op_norm()->tgt);
      if (s.dim() == 0 || t.dim() == 0) return zero_norm();
      if (t.dim() == 1) {
        const double w = unit_value(t);
        auto ds = dual_expr(s);
        if (ds && w > 0) return compose_linear(w * Mat::Identity(s.dim(), s.dim()), *ds);
      }
      if (s.dim() == 1) {
        const double w = unit_value(s);
        if (w > 0) return compose_linear(Mat::Identity(t.dim(), t.dim()) / w, t);
      }
      if (s.same_node(n.as_op_norm()->src) && t.same_node(n.as_op_norm()->tgt)) return n;
      return op_norm_of(s, t);
    }
  }
  return n;
}

std::optional<NormExpr> compute_dual(const NormExpr& c) {
  switch (c.kind()) {
    case NormKind::lp: {
      const LpNode& l = *c.as_lp();
      return lp(dual_index(l.p), l.weights.cwiseInverse());
    }
    case NormKind::sup_of:
    case NormKind::sum_of: {
      const bool sup = c.kind() == NormKind::sup_of;
      const auto& parts = sup ? c.as_sup()->parts : c.as_sum()->parts;
      std::vector<NormExpr> out;
      for (const NormPart& p : parts) {
        auto d = dual_expr(p.norm);
        if (!d) return std::nullopt;
        out.push_back(*d);
      }
      return sup ? sum_of(std::move(out)) : sup_of(std::move(out));
    }
    case NormKind::dual: return canonical(c.as_dual()->inner);
    case NormKind::compose: {
      const ComposeNode& node = *c.as_compose();
      const Mat& e = node.embed;
      const Index k = e.cols();
      if (k == 0) return zero_norm();
      // n(x) = min_z amb(E x + B z) with C = [E B]; the dual is the
      // restriction-quotient formula below.
      NormExpr amb = node.inner;
      Mat cmat = e;
      if (const QuotientNode* q = node.inner.as_quotient()) {
        amb = q->ambient;
        cmat.resize(e.rows(), k + q->basis.cols());
        cmat << e, q->basis;
      }
      if (!has_full_column_rank(cmat)) return std::nullopt;
      auto da = dual_expr(amb);
      if (!da) return std::nullopt;
      if (cmat.rows() == cmat.cols()) {
        Mat inv_t = cmat.partialPivLu().inverse().transpose();
        return compose_linear(inv_t.leftCols(k), *da);
      }
      Mat gram = cmat.transpose() * cmat;
      Mat pinv_t = cmat * gram.ldlt().solve(Mat::Identity(gram.rows(), gram.cols()));
      return compose_linear(pinv_t.leftCols(k), quotient_of(*da, null_space(cmat.transpose())));
    }
    case NormKind::quotient:
    case NormKind::op_norm: return std::nullopt;
  }
  return std::nullopt;
}

double lp_value(const LpNode& l, const Vec& v) {
  if (v.size() == 0) return 0.0;
  const Vec wv = l.weights.cwiseProduct(v);
  switch (l.p) {
    case PNorm::one: return wv.cwiseAbs().sum();
    case PNorm::two: return wv.norm();
    case PNorm::inf: return wv.cwiseAbs().maxCoeff();
  }
  return 0.0;
}

Vec lp_subgradient(const LpNode& l, const Vec& v) {
  const Index d = v.size();
  Vec g = Vec::Zero(d);
  if (d == 0) return g;
  const Vec wv = l.weights.cwiseProduct(v);
  switch (l.p) {
    case PNorm::one:
      for (Index i = 0; i < d; ++i) g(i) = wv(i) > 0 ? 1.0 : (wv(i) < 0 ? -1.0 : 0.0);
      break;
    case PNorm::two: {
      const double nv = wv.norm();
      if (nv > 0) g = wv / nv;
      break;
    }
    case PNorm::inf: {
      Index arg = 0;
      const double m = wv.cwiseAbs().maxCoeff(&arg);
      if (m > 0) g(arg) = wv(arg) > 0 ? 1.0 : -1.0;
      break;
    }
  }
  return l.weights.cwiseProduct(g);
}

Evaluation eval_dual_by_distance(const NormExpr& inner, const Vec& v, double tol, DistResult* sol,
                                 Mat* null_basis) {
  const double nv2 = v.squaredNorm();
  if (nv2 == 0.0) return Evaluation{0.0, true};
  // n*(v) = 1 / min{ inner(u) : <v, u> = 1 }.
  Mat vt = v.transpose();
  Mat nb = null_space(vt);
  Vec u0 = v / nv2;
  DistOptions opts;
  opts.tol = tol;
  DistResult r = dist_to_subspace(inner, nb, u0, opts);
  if (sol) *sol = r;
  if (null_basis) *null_basis = nb;
  if (!(r.value > 0)) return Evaluation{kInf, r.route != DistRoute::subgradient};
  return Evaluation{1.0 / r.value, r.route != DistRoute::subgradient};
}

}  // namespace

NormExpr canonical(const NormExpr& n) {
  const detail::NormImpl& impl = n.impl();
  {
    std::lock_guard<std::mutex> lock(impl.lazy_mu);
    if (impl.canon_done) return impl.canon_self ? n : *impl.canon;
  }
  NormExpr c = compute_canonical(n);
  std::lock_guard<std::mutex> lock(impl.lazy_mu);
  if (!impl.canon_done) {
    impl.canon_done = true;
    impl.canon_self = c.same_node(n);
    if (!impl.canon_self) impl.canon = c;
  }
  return impl.canon_self ? n : *impl.canon;
}

std::optional<NormExpr> dual_expr(const NormExpr& n) {
  const detail::NormImpl& impl = n.impl();
  {
    std::lock_guard<std::mutex> lock(impl.lazy_mu);
    if (impl.dual_done) return impl.dual;
  }
  std::optional<NormExpr> d = compute_dual(canonical(n));
  std::lock_guard<std::mutex> lock(impl.lazy_mu);
  if (!impl.dual_done) {
    impl.dual_done = true;
    impl.dual = d;
  }
  return impl.dual;
}

Evaluation evaluate(const NormExpr& n, const Vec& v, double tol) {
  if (v.size() != n.dim()) {
    fail(Errc::dimension_mismatch, "evaluate: vector of size " + std::to_string(v.size()) +
                                       " for a norm of dimension " + std::to_string(n.dim()));
  }
  switch (n.kind()) {
    case NormKind::lp: return Evaluation{lp_value(*n.as_lp(), v), true};
    case NormKind::sup_of:
    case NormKind::sum_of: {
      const bool sup = n.kind() == NormKind::sup_of;
      const auto& parts = sup ? n.as_sup()->parts : n.as_sum()->parts;
      Evaluation out{0.0, true};
      for (const NormPart& p : parts) {
        Evaluation e = evaluate(p.norm, v.segment(p.offset, p.norm.dim()), tol);
        out.value = sup ? std::max(out.value, e.value) : out.value + e.value;
        out.exact = out.exact && e.exact;
      }
      return out;
    }
    case NormKind::compose: {
      const ComposeNode& c = *n.as_compose();
      return evaluate(c.inner, c.embed * v, tol);
    }
    default: break;
  }

  const std::string key = detail::memo_key(v, tol);
  double cached = 0.0;
  // Inexact results live under a separate key so they never masquerade as
  // exact ones.
  if (n.impl().memo.lookup(key, cached)) return Evaluation{cached, true};
  if (n.impl().memo.lookup(key + "~", cached)) return Evaluation{cached, false};

  Evaluation out;
  switch (n.kind()) {
    case NormKind::quotient: {
      const QuotientNode& q = *n.as_quotient();
      DistOptions opts;
      opts.tol = tol;
      DistResult r = dist_to_subspace(q.ambient, q.basis, v, opts);
      out = Evaluation{r.value, r.route != DistRoute::subgradient};
      break;
    }
    case NormKind::dual: {
      NormExpr c = canonical(n);
      if (c.kind() != NormKind::dual) {
        out = evaluate(c, v, tol);
      } else {
        out = eval_dual_by_distance(c.as_dual()->inner, v, tol, nullptr, nullptr);
      }
      break;
    }
    case NormKind::op_norm: {
      NormExpr c = canonical(n);
      if (c.kind() != NormKind::op_norm) {
        out = evaluate(c, v, tol);
      } else {
        const OpNormNode& o = *c.as_op_norm();
        OpNormOptions opts;
        opts.tol = tol;
        Mat a = unflatten_rowmajor(v, o.tgt.dim(), o.src.dim());
        OpNormResult r = op_norm(a, o.src, o.tgt, opts);
        out = Evaluation{r.value, r.exact};
      }
      break;
    }
    default: break;
  }
  n.impl().memo.store(out.exact ? key : key + "~", out.value);
  return out;
}

double eval_norm(const NormExpr& n, const Vec& v, double tol) { return evaluate(n, v, tol).value; }

Vec subgradient(const NormExpr& n, const Vec& v, double tol) {
  if (v.size() != n.dim()) fail(Errc::dimension_mismatch, "subgradient");
  switch (n.kind()) {
    case NormKind::lp: return lp_subgradient(*n.as_lp(), v);
    case NormKind::sup_of: {
      Vec g = Vec::Zero(v.size());
      const auto& parts = n.as_sup()->parts;
      double best = -1.0;
      const NormPart* arg = nullptr;
      for (const NormPart& p : parts) {
        const double val = eval_norm(p.norm, v.segment(p.offset, p.norm.dim()), tol);
        if (val > best) {
          best = val;
          arg = &p;
        }
      }
      if (arg && best > 0) {
        g.segment(arg->offset, arg->norm.dim()) =
            subgradient(arg->norm, v.segment(arg->offset, arg->norm.dim()), tol);
      }
      return g;
    }
    case NormKind::sum_of: {
      Vec g = Vec::Zero(v.size());
      for (const NormPart& p : n.as_sum()->parts) {
        g.segment(p.offset, p.norm.dim()) = subgradient(p.norm, v.segment(p.offset, p.norm.dim()), tol);
      }
      return g;
    }
    case NormKind::compose: {
      const ComposeNode& c = *n.as_compose();
      return c.embed.transpose() * subgradient(c.inner, c.embed * v, tol);
    }
    case NormKind::quotient: {
      const QuotientNode& q = *n.as_quotient();
      DistOptions opts;
      opts.tol = tol;
      DistResult r = dist_to_subspace(q.ambient, q.basis, v, opts);
      Vec y = v;
      if (q.basis.cols() > 0) y += q.basis * r.coeffs;
      return subgradient(q.ambient, y, tol);
    }
    case NormKind::dual: {
      NormExpr c = canonical(n);
      if (c.kind() != NormKind::dual) return subgradient(c, v, tol);
      DistResult r;
      Mat nb;
      Evaluation e = eval_dual_by_distance(c.as_dual()->inner, v, tol, &r, &nb);
      if (e.value == 0.0 || !std::isfinite(e.value)) return Vec::Zero(v.size());
      Vec u = v / v.squaredNorm();
      if (nb.cols() > 0) u += nb * r.coeffs;
      return u / r.value;
    }
    case NormKind::op_norm: {
      NormExpr c = canonical(n);
      if (c.kind() != NormKind::op_norm) return subgradient(c, v, tol);
      const OpNormNode& o = *c.as_op_norm();
      OpNormOptions opts;
      opts.tol = tol;
      Mat a = unflatten_rowmajor(v, o.tgt.dim(), o.src.dim());
      OpNormResult r = op_norm(a, o.src, o.tgt, opts);
      if (r.x.size() == 0 || r.y.size() == 0) return Vec::Zero(v.size());
      return flatten_rowmajor(r.y * r.x.transpose());
    }
  }
  return Vec::Zero(v.size());
}

Equivalence equivalence_constants(const NormExpr& n) {
  if (n.dim() == 0) return Equivalence{1.0, 1.0};
  switch (n.kind()) {
    case NormKind::lp: {
      const LpNode& l = *n.as_lp();
      const double lo = l.weights.minCoeff();
      const double hi = l.weights.maxCoeff();
      const double root = std::sqrt(static_cast<double>(l.weights.size()));
      switch (l.p) {
        case PNorm::one: return Equivalence{lo, hi * root};
        case PNorm::two: return Equivalence{lo, hi};
        case PNorm::inf: return Equivalence{lo / root, hi};
      }
      break;
    }
    case NormKind::sup_of:
    case NormKind::sum_of: {
      const bool sup = n.kind() == NormKind::sup_of;
      const auto& parts = sup ? n.as_sup()->parts : n.as_sum()->parts;
      double lo = kInf;
      double hi = 0.0;
      int k = 0;
      for (const NormPart& p : parts) {
        if (p.norm.dim() == 0) continue;
        Equivalence e = equivalence_constants(p.norm);
        lo = std::min(lo, e.lower);
        hi = std::max(hi, e.upper);
        ++k;
      }
      const double root = std::sqrt(static_cast<double>(std::max(k, 1)));
      return sup ? Equivalence{lo / root, hi} : Equivalence{lo, hi * root};
    }
    case NormKind::compose: {
      const ComposeNode& c = *n.as_compose();
      Equivalence e = equivalence_constants(c.inner);
      Eigen::JacobiSVD<Mat> svd(c.embed);
      const auto& sv = svd.singularValues();
      const double smax = sv.size() ? sv(0) : 0.0;
      double smin = 0.0;
      if (c.embed.rows() >= c.embed.cols() && sv.size() == c.embed.cols()) smin = sv(sv.size() - 1);
      if (smin <= rank_threshold(c.embed)) smin = 0.0;
      return Equivalence{e.lower * smin, e.upper * smax};
    }
    case NormKind::quotient: return Equivalence{0.0, equivalence_constants(n.as_quotient()->ambient).upper};
    case NormKind::dual: {
      Equivalence e = equivalence_constants(n.as_dual()->inner);
      return Equivalence{e.upper > 0 ? 1.0 / e.upper : kInf, e.lower > 0 ? 1.0 / e.lower : kInf};
    }
    case NormKind::op_norm: {
      const OpNormNode& o = *n.as_op_norm();
      Equivalence s = equivalence_constants(o.src);
      Equivalence t = equivalence_constants(o.tgt);
      const double root = std::sqrt(static_cast<double>(std::min(o.src.dim(), o.tgt.dim())));
      const double lo = s.upper > 0 ? t.lower / (s.upper * root) : 0.0;
      const double hi = s.lower > 0 ? t.upper / s.lower : kInf;
      return Equivalence{lo, hi};
    }
  }
  return Equivalence{0.0, kInf};
}

std::optional<Mat> euclidean_factor(const NormExpr& n0) {
  NormExpr n = canonical(n0);
  switch (n.kind()) {
    case NormKind::lp: {
      const LpNode& l = *n.as_lp();
      if (l.p == PNorm::two || l.weights.size() <= 1) return Mat(l.weights.asDiagonal());
      return std::nullopt;
    }
    case NormKind::sup_of:
    case NormKind::sum_of: {
      const auto& parts = n.kind() == NormKind::sup_of ? n.as_sup()->parts : n.as_sum()->parts;
      const NormPart* only = nullptr;
      for (const NormPart& p : parts) {
        if (p.norm.dim() == 0) continue;
        if (only) return std::nullopt;
        only = &p;
      }
      if (!only) return Mat(0, n.dim());
      auto g = euclidean_factor(only->norm);
      if (!g) return std::nullopt;
      Mat out = Mat::Zero(g->rows(), n.dim());
      out.middleCols(only->offset, only->norm.dim()) = *g;
      return out;
    }
    case NormKind::compose: {
      auto g = euclidean_factor(n.as_compose()->inner);
      if (!g) return std::nullopt;
      return Mat(*g * n.as_compose()->embed);
    }
    case NormKind::quotient: {
      auto g = euclidean_factor(n.as_quotient()->ambient);
      if (!g) return std::nullopt;
      Mat q = column_space(*g * n.as_quotient()->basis);
      Mat proj = Mat::Identity(g->rows(), g->rows()) - q * q.transpose();
      return Mat(proj * *g);
    }
    case NormKind::dual:
    case NormKind::op_norm: return std::nullopt;
  }
  return std::nullopt;
}

std::optional<std::vector<Vec>> extreme_candidates(const NormExpr& n0, std::size_t cap) {
  NormExpr n = canonical(n0);
  const Index d = n.dim();
  if (d == 0) return std::vector<Vec>{};
  switch (n.kind()) {
    case NormKind::lp: {
      const LpNode& l = *n.as_lp();
      const Vec inv = l.weights.cwiseInverse();
      std::vector<Vec> out;
      if (d == 1 || l.p == PNorm::one) {
        for (Index j = 0; j < d; ++j) {
          Vec e = Vec::Zero(d);
          e(j) = inv(j);
          out.push_back(e);
        }
        return out;
      }
      if (l.p == PNorm::inf) {
        if (d > 20 || (std::size_t{1} << (d - 1)) > cap) return std::nullopt;
        const std::size_t count = std::size_t{1} << (d - 1);
        for (std::size_t mask = 0; mask < count; ++mask) {
          Vec s = inv;
          for (Index j = 1; j < d; ++j) {
            if (mask & (std::size_t{1} << (j - 1))) s(j) = -s(j);
          }
          out.push_back(s);
        }
        return out;
      }
      return std::nullopt;
    }
    case NormKind::sum_of: {
      std::vector<Vec> out;
      for (const NormPart& p : n.as_sum()->parts) {
        auto c = extreme_candidates(p.norm, cap);
        if (!c) return std::nullopt;
        for (const Vec& x : *c) {
          Vec e = Vec::Zero(d);
          e.segment(p.offset, p.norm.dim()) = x;
          out.push_back(e);
          if (out.size() > cap) return std::nullopt;
        }
      }
      return out;
    }
    case NormKind::sup_of: {
      std::vector<Vec> out{Vec::Zero(d)};
      bool first = true;
      for (const NormPart& p : n.as_sup()->parts) {
        if (p.norm.dim() == 0) continue;
        auto c = extreme_candidates(p.norm, cap);
        if (!c) return std::nullopt;
        const std::size_t factor = c->size() * (first ? 1 : 2);
        if (factor == 0 || out.size() * factor > cap) return std::nullopt;
        std::vector<Vec> next;
        next.reserve(out.size() * factor);
        for (const Vec& base : out) {
          for (const Vec& x : *c) {
            for (int sgn = 0; sgn < (first ? 1 : 2); ++sgn) {
              Vec e = base;
              e.segment(p.offset, p.norm.dim()) = sgn ? Vec(-x) : x;
              next.push_back(std::move(e));
            }
          }
        }
        out = std::move(next);
        first = false;
      }
      return out;
    }
    case NormKind::compose: {
      const ComposeNode& node = *n.as_compose();
      if (is_square_invertible(node.embed)) {
        auto c = extreme_candidates(node.inner, cap);
        if (!c) return std::nullopt;
        Eigen::PartialPivLU<Mat> lu(node.embed);
        for (Vec& x : *c) x = lu.solve(x);
        return c;
      }
      if (const QuotientNode* q = node.inner.as_quotient()) {
        Mat full(node.embed.rows(), node.embed.cols() + q->basis.cols());
        full << node.embed, q->basis;
        if (!is_square_invertible(full)) return std::nullopt;
        auto c = extreme_candidates(q->ambient, cap);
        if (!c) return std::nullopt;
        Mat proj = full.partialPivLu().inverse().topRows(node.embed.cols());
        std::vector<Vec> out;
        for (const Vec& x : *c) {
          Vec px = proj * x;
          if (px.cwiseAbs().maxCoeff() > 0) out.push_back(px);
        }
        return out;
      }
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

}  // namespace banmod

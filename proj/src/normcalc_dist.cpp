#include <algorithm>
#include <cmath>
#include <limits>

#include "banmod/error.hpp"
#include "banmod/normcalc.hpp"
#include "banmod/simplex.hpp"

namespace banmod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The objective z -> n(M z + c) unrolled into a tree of convex terms over the
// optimization variables. Quotient nodes contribute fresh variables.
struct Term {
  enum class Kind { l1, l2, linf, max, sum, opaque } kind = Kind::sum;
  Mat a;
  Vec b;
  NormExpr norm;  // opaque only
  std::vector<Term> kids;
};

Index count_vars(const NormExpr& n) {
  switch (n.kind()) {
    case NormKind::sup_of:
    case NormKind::sum_of: {
      const auto& parts = n.kind() == NormKind::sup_of ? n.as_sup()->parts : n.as_sum()->parts;
      Index total = 0;
      for (const NormPart& p : parts) total += count_vars(p.norm);
      return total;
    }
    case NormKind::quotient:
      return n.as_quotient()->basis.cols() + count_vars(n.as_quotient()->ambient);
    case NormKind::compose: return count_vars(n.as_compose()->inner);
    default: return 0;
  }
}

Term flatten(const NormExpr& n, const Mat& m, const Vec& c, Index& next) {
  Term t;
  switch (n.kind()) {
    case NormKind::lp: {
      const LpNode& l = *n.as_lp();
      if (l.weights.size() == 0) return t;
      t.a = l.weights.asDiagonal() * m;
      t.b = l.weights.cwiseProduct(c);
      if (l.weights.size() == 1 || l.p == PNorm::one) {
        t.kind = Term::Kind::l1;
      } else {
        t.kind = l.p == PNorm::two ? Term::Kind::l2 : Term::Kind::linf;
      }
      return t;
    }
    case NormKind::sup_of:
    case NormKind::sum_of: {
      const bool sup = n.kind() == NormKind::sup_of;
      const auto& parts = sup ? n.as_sup()->parts : n.as_sum()->parts;
      t.kind = sup ? Term::Kind::max : Term::Kind::sum;
      for (const NormPart& p : parts) {
        if (p.norm.dim() == 0) continue;
        t.kids.push_back(flatten(p.norm, m.middleRows(p.offset, p.norm.dim()),
                                 c.segment(p.offset, p.norm.dim()), next));
      }
      if (t.kids.size() == 1) return std::move(t.kids.front());
      return t;
    }
    case NormKind::compose: {
      const ComposeNode& node = *n.as_compose();
      return flatten(node.inner, node.embed * m, node.embed * c, next);
    }
    case NormKind::quotient: {
      const QuotientNode& q = *n.as_quotient();
      Mat m2 = m;
      m2.middleCols(next, q.basis.cols()) += q.basis;
      next += q.basis.cols();
      return flatten(q.ambient, m2, c, next);
    }
    case NormKind::dual:
    case NormKind::op_norm: {
      t.kind = Term::Kind::opaque;
      t.a = m;
      t.b = c;
      t.norm = n;
      return t;
    }
  }
  return t;
}

template <typename F>
void for_each_leaf(Term& t, F&& f) {
  if (t.kind == Term::Kind::max || t.kind == Term::Kind::sum) {
    for (Term& k : t.kids) for_each_leaf(k, f);
  } else {
    f(t);
  }
}

template <typename F>
void for_each_leaf(const Term& t, F&& f) {
  if (t.kind == Term::Kind::max || t.kind == Term::Kind::sum) {
    for (const Term& k : t.kids) for_each_leaf(k, f);
  } else {
    f(t);
  }
}

struct Features {
  bool opaque = false;
  bool l2 = false;
  int leaves = 0;
};

Features features(const Term& t) {
  Features f;
  for_each_leaf(t, [&](const Term& l) {
    ++f.leaves;
    if (l.kind == Term::Kind::opaque) f.opaque = true;
    if (l.kind == Term::Kind::l2) f.l2 = true;
  });
  return f;
}

double term_value(const Term& t, const Vec& z, double tol, bool* exact) {
  switch (t.kind) {
    case Term::Kind::l1: return (t.a * z + t.b).cwiseAbs().sum();
    case Term::Kind::l2: return (t.a * z + t.b).norm();
    case Term::Kind::linf: {
      Vec r = t.a * z + t.b;
      return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
    }
    case Term::Kind::max: {
      double v = 0.0;
      for (const Term& k : t.kids) v = std::max(v, term_value(k, z, tol, exact));
      return v;
    }
    case Term::Kind::sum: {
      double v = 0.0;
      for (const Term& k : t.kids) v += term_value(k, z, tol, exact);
      return v;
    }
    case Term::Kind::opaque: {
      Evaluation e = evaluate(t.norm, t.a * z + t.b, tol);
      if (exact && !e.exact) *exact = false;
      return e.value;
    }
  }
  return 0.0;
}

Vec term_subgradient(const Term& t, const Vec& z, double tol) {
  const Index n = z.size();
  switch (t.kind) {
    case Term::Kind::l1: {
      Vec r = t.a * z + t.b;
      Vec s(r.size());
      for (Index i = 0; i < r.size(); ++i) s(i) = r(i) > 0 ? 1.0 : (r(i) < 0 ? -1.0 : 0.0);
      return t.a.transpose() * s;
    }
    case Term::Kind::l2: {
      Vec r = t.a * z + t.b;
      const double nr = r.norm();
      if (nr == 0.0) return Vec::Zero(n);
      return t.a.transpose() * (r / nr);
    }
    case Term::Kind::linf: {
      Vec r = t.a * z + t.b;
      Index arg = 0;
      if (r.size() == 0 || r.cwiseAbs().maxCoeff(&arg) == 0.0) return Vec::Zero(n);
      return t.a.row(arg).transpose() * (r(arg) > 0 ? 1.0 : -1.0);
    }
    case Term::Kind::max: {
      double best = -1.0;
      const Term* arg = nullptr;
      for (const Term& k : t.kids) {
        const double v = term_value(k, z, tol, nullptr);
        if (v > best) {
          best = v;
          arg = &k;
        }
      }
      return arg ? term_subgradient(*arg, z, tol) : Vec(Vec::Zero(n));
    }
    case Term::Kind::sum: {
      Vec g = Vec::Zero(n);
      for (const Term& k : t.kids) g += term_subgradient(k, z, tol);
      return g;
    }
    case Term::Kind::opaque:
      return t.a.transpose() * subgradient(t.norm, t.a * z + t.b, tol);
  }
  return Vec::Zero(n);
}

// ---------------------------------------------------------------- LP route

struct LpForm {
  std::vector<std::pair<Index, double>> coeffs;
};

LpForm build_lp(const Term& t, LpBuilder& lp, Index nz) {
  LpForm form;
  auto affine_row = [&](Index i, double sign, Index extra, double extra_coef) {
    std::vector<std::pair<Index, double>> row;
    row.emplace_back(extra, extra_coef);
    for (Index j = 0; j < nz; ++j) {
      if (t.a(i, j) != 0.0) row.emplace_back(j, sign * t.a(i, j));
    }
    return row;
  };
  switch (t.kind) {
    case Term::Kind::l1:
      for (Index i = 0; i < t.a.rows(); ++i) {
        const Index s = lp.add_var(false);
        // s >= +(a z + b) and s >= -(a z + b).
        lp.add_row(affine_row(i, -1.0, s, 1.0), Sense::ge, t.b(i));
        lp.add_row(affine_row(i, 1.0, s, 1.0), Sense::ge, -t.b(i));
        form.coeffs.emplace_back(s, 1.0);
      }
      return form;
    case Term::Kind::linf: {
      const Index s = lp.add_var(false);
      for (Index i = 0; i < t.a.rows(); ++i) {
        lp.add_row(affine_row(i, -1.0, s, 1.0), Sense::ge, t.b(i));
        lp.add_row(affine_row(i, 1.0, s, 1.0), Sense::ge, -t.b(i));
      }
      form.coeffs.emplace_back(s, 1.0);
      return form;
    }
    case Term::Kind::max: {
      const Index s = lp.add_var(false);
      for (const Term& k : t.kids) {
        LpForm kf = build_lp(k, lp, nz);
        std::vector<std::pair<Index, double>> row{{s, 1.0}};
        for (const auto& [v, coef] : kf.coeffs) row.emplace_back(v, -coef);
        lp.add_row(std::move(row), Sense::ge, 0.0);
      }
      form.coeffs.emplace_back(s, 1.0);
      return form;
    }
    case Term::Kind::sum:
      for (const Term& k : t.kids) {
        LpForm kf = build_lp(k, lp, nz);
        form.coeffs.insert(form.coeffs.end(), kf.coeffs.begin(), kf.coeffs.end());
      }
      return form;
    default: fail(Errc::solver_failure, "LP route reached a non-polyhedral term");
  }
}

Vec solve_lp(const Term& root, Index nz) {
  LpBuilder lp;
  for (Index j = 0; j < nz; ++j) lp.add_var(true);
  LpForm obj = build_lp(root, lp, nz);
  lp.set_objective(obj.coeffs);
  LpResult r = lp.minimize();
  if (r.status != LpStatus::optimal) fail(Errc::solver_failure, "distance LP did not reach optimality");
  return r.x.head(nz);
}

// ----------------------------------------------------------- barrier route

struct LinCon {
  Vec g;
  double h;  // g.x + h >= 0
};

struct SocCon {
  Index t;  // epigraph variable
  Mat f;    // ||F x + f0|| <= x_t
  Vec f0;
};

struct BarrierProblem {
  Index nvar = 0;
  std::vector<std::pair<Index, double>> objective;
  std::vector<std::pair<std::vector<std::pair<Index, double>>, double>> lin;
  struct RawSoc {
    Index t;
    Mat a;  // over the first nz variables
    Vec b;
  };
  std::vector<RawSoc> soc;
  std::vector<double> x0;
};

// Returns the value form of the term and its value at the initial point.
std::pair<std::vector<std::pair<Index, double>>, double> build_barrier(const Term& t, BarrierProblem& p,
                                                                       Index nz) {
  auto new_var = [&](double init) {
    p.x0.push_back(init);
    return p.nvar++;
  };
  auto affine_row = [&](Index i, double sign, Index extra) {
    std::vector<std::pair<Index, double>> row{{extra, 1.0}};
    for (Index j = 0; j < nz; ++j) {
      if (t.a(i, j) != 0.0) row.emplace_back(j, sign * t.a(i, j));
    }
    return row;
  };
  switch (t.kind) {
    case Term::Kind::l1: {
      std::vector<std::pair<Index, double>> form;
      double val = 0.0;
      for (Index i = 0; i < t.a.rows(); ++i) {
        const double init = std::abs(t.b(i)) + 1.0;
        const Index s = new_var(init);
        p.lin.emplace_back(affine_row(i, -1.0, s), -t.b(i));
        p.lin.emplace_back(affine_row(i, 1.0, s), t.b(i));
        form.emplace_back(s, 1.0);
        val += init;
      }
      return {form, val};
    }
    case Term::Kind::linf: {
      const double init = (t.b.size() ? t.b.cwiseAbs().maxCoeff() : 0.0) + 1.0;
      const Index s = new_var(init);
      for (Index i = 0; i < t.a.rows(); ++i) {
        p.lin.emplace_back(affine_row(i, -1.0, s), -t.b(i));
        p.lin.emplace_back(affine_row(i, 1.0, s), t.b(i));
      }
      return {{{s, 1.0}}, init};
    }
    case Term::Kind::l2: {
      const double init = t.b.norm() + 1.0;
      const Index s = new_var(init);
      p.soc.push_back(BarrierProblem::RawSoc{s, t.a, t.b});
      return {{{s, 1.0}}, init};
    }
    case Term::Kind::max: {
      std::vector<std::pair<std::vector<std::pair<Index, double>>, double>> kids;
      double top = 0.0;
      for (const Term& k : t.kids) {
        kids.push_back(build_barrier(k, p, nz));
        top = std::max(top, kids.back().second);
      }
      const double init = top + 1.0;
      const Index s = new_var(init);
      for (auto& [form, val] : kids) {
        std::vector<std::pair<Index, double>> row{{s, 1.0}};
        for (const auto& [v, coef] : form) row.emplace_back(v, -coef);
        p.lin.emplace_back(std::move(row), 0.0);
      }
      return {{{s, 1.0}}, init};
    }
    case Term::Kind::sum: {
      std::vector<std::pair<Index, double>> form;
      double val = 0.0;
      for (const Term& k : t.kids) {
        auto kf = build_barrier(k, p, nz);
        form.insert(form.end(), kf.first.begin(), kf.first.end());
        val += kf.second;
      }
      return {form, val};
    }
    default: fail(Errc::solver_failure, "barrier route reached an opaque term");
  }
}

Vec solve_barrier(const Term& root, Index nz, double scale) {
  BarrierProblem p;
  p.nvar = nz;
  p.x0.assign(static_cast<std::size_t>(nz), 0.0);
  auto obj = build_barrier(root, p, nz);
  const Index n = p.nvar;

  Vec c = Vec::Zero(n);
  for (const auto& [v, coef] : obj.first) c(v) += coef;
  std::vector<LinCon> lin;
  for (const auto& [row, h] : p.lin) {
    Vec g = Vec::Zero(n);
    for (const auto& [v, coef] : row) g(v) += coef;
    lin.push_back(LinCon{g, h});
  }
  std::vector<SocCon> soc;
  for (const auto& raw : p.soc) {
    Mat f = Mat::Zero(raw.a.rows(), n);
    f.leftCols(nz) = raw.a;
    soc.push_back(SocCon{raw.t, f, raw.b});
  }
  const double nu = static_cast<double>(lin.size()) + 2.0 * static_cast<double>(soc.size());

  Vec x = Eigen::Map<const Vec>(p.x0.data(), n);

  auto feasible = [&](const Vec& y) {
    for (const LinCon& l : lin) {
      if (!(l.g.dot(y) + l.h > 0)) return false;
    }
    for (const SocCon& s : soc) {
      const double t = y(s.t);
      const Vec u = s.f * y + s.f0;
      if (!(t > 0) || !(t * t - u.squaredNorm() > 0)) return false;
    }
    return true;
  };

  const double target = 1e-13 * std::max(scale, 1e-300);
  double tau = nu / std::max(obj.second, 1e-12);
  for (int outer = 0; outer < 80; ++outer) {
    for (int inner = 0; inner < 100; ++inner) {
      Vec grad = tau * c;
      Mat hess = Mat::Zero(n, n);
      for (const LinCon& l : lin) {
        const double s = l.g.dot(x) + l.h;
        grad -= l.g / s;
        hess.noalias() += (l.g / s) * (l.g / s).transpose();
      }
      for (const SocCon& s : soc) {
        const double t = x(s.t);
        const Vec u = s.f * x + s.f0;
        const double d = t * t - u.squaredNorm();
        Vec dd = -2.0 * s.f.transpose() * u;
        dd(s.t) += 2.0 * t;
        Mat d2 = -2.0 * s.f.transpose() * s.f;
        d2(s.t, s.t) += 2.0;
        grad -= dd / d;
        hess.noalias() += (dd / d) * (dd / d).transpose() - d2 / d;
      }
      Eigen::LDLT<Mat> ldlt(hess);
      Vec dx = ldlt.solve(-grad);
      if (!dx.allFinite()) break;
      const double lam2 = -grad.dot(dx);
      if (!(lam2 > 0) || lam2 < 1e-20) break;
      const double lam = std::sqrt(lam2);
      double step = lam > 0.25 ? 1.0 / (1.0 + lam) : 1.0;
      Vec trial = x + step * dx;
      int halvings = 0;
      while (!feasible(trial) && halvings < 60) {
        step *= 0.5;
        trial = x + step * dx;
        ++halvings;
      }
      if (halvings == 60) break;
      x = trial;
      if (lam2 < 1e-14) break;
    }
    if (nu / tau < target) break;
    tau *= 8.0;
  }
  return x.head(nz);
}

// ------------------------------------------------------- subgradient route

struct EllipsoidResult {
  Vec z;
  double value;
  double gap;
};

EllipsoidResult solve_ellipsoid(const Term& root, Index nz, double radius, double tol) {
  bool dummy = true;
  Vec x = Vec::Zero(nz);
  EllipsoidResult best{x, term_value(root, x, tol, &dummy), kInf};
  double lower = 0.0;
  const double scale = std::max(1.0, best.value);
  const int max_iter = 4000 + 400 * static_cast<int>(nz * nz) * 10;

  if (nz == 1) {
    double lo = -radius;
    double hi = radius;
    for (int it = 0; it < max_iter; ++it) {
      Vec m = Vec::Constant(1, 0.5 * (lo + hi));
      const double f = term_value(root, m, tol, &dummy);
      const double g = term_subgradient(root, m, tol)(0);
      if (f < best.value) {
        best.value = f;
        best.z = m;
      }
      lower = std::max(lower, f - std::abs(g) * 0.5 * (hi - lo));
      if (g == 0.0) lower = std::max(lower, f);
      if (best.value - lower <= tol * scale) break;
      if (g > 0) {
        hi = m(0);
      } else {
        lo = m(0);
      }
    }
    best.gap = std::max(0.0, best.value - lower);
    return best;
  }

  Mat p = radius * radius * Mat::Identity(nz, nz);
  const double dn = static_cast<double>(nz);
  for (int it = 0; it < max_iter; ++it) {
    const double f = term_value(root, x, tol, &dummy);
    const Vec g = term_subgradient(root, x, tol);
    if (f < best.value) {
      best.value = f;
      best.z = x;
    }
    const double gpg = g.dot(p * g);
    if (!(gpg > 0)) {
      lower = std::max(lower, f);
      break;
    }
    lower = std::max(lower, f - std::sqrt(gpg));
    if (best.value - lower <= tol * scale) break;
    const Vec gt = p * g / std::sqrt(gpg);
    x -= gt / (dn + 1.0);
    p = (dn * dn / (dn * dn - 1.0)) * (p - (2.0 / (dn + 1.0)) * gt * gt.transpose());
    p = 0.5 * (p + p.transpose());
  }
  best.gap = std::max(0.0, best.value - lower);
  return best;
}

double leaf_lower_constant(const Term& t) {
  switch (t.kind) {
    case Term::Kind::l1:
    case Term::Kind::l2: return 1.0;
    case Term::Kind::linf: return 1.0 / std::sqrt(static_cast<double>(std::max<Index>(1, t.a.rows())));
    case Term::Kind::opaque: return equivalence_constants(t.norm).lower;
    default: return 0.0;
  }
}

double ellipsoid_radius(const Term& root, Index nz, double f0) {
  // Every leaf value is bounded by the objective, so at a minimizer each
  // leaf argument a z + b has 2-norm at most f0 / c_leaf.
  std::vector<const Term*> leaves;
  for_each_leaf(root, [&](const Term& l) {
    if (leaf_lower_constant(l) > 0) leaves.push_back(&l);
  });
  Index rows = 0;
  for (const Term* l : leaves) rows += l->a.rows();
  Mat s(rows, nz);
  Vec b(rows);
  double k2 = 0.0;
  Index r = 0;
  for (const Term* l : leaves) {
    s.middleRows(r, l->a.rows()) = l->a;
    b.segment(r, l->a.rows()) = l->b;
    r += l->a.rows();
    const double cl = leaf_lower_constant(*l);
    k2 += 1.0 / (cl * cl);
  }
  Eigen::JacobiSVD<Mat> svd(s);
  const auto& sv = svd.singularValues();
  const double smin = sv.size() == nz && nz > 0 ? sv(nz - 1) : 0.0;
  if (!(smin > rank_threshold(s))) return 1e6 * (1.0 + f0);
  return 1.01 * (f0 * std::sqrt(k2) + b.norm()) / smin + 1e-12;
}

}  // namespace

const char* to_string(DistRoute r) {
  switch (r) {
    case DistRoute::direct: return "direct";
    case DistRoute::least_squares: return "least-squares";
    case DistRoute::simplex: return "simplex";
    case DistRoute::barrier: return "barrier";
    case DistRoute::subgradient: return "subgradient";
  }
  return "?";
}

DistResult dist_to_subspace(const NormExpr& n0, const Mat& basis, const Vec& v, const DistOptions& opts) {
  if (v.size() != n0.dim() || basis.rows() != n0.dim()) {
    fail(Errc::dimension_mismatch, "dist_to_subspace");
  }
  if (opts.force && *opts.force != DistRoute::subgradient && *opts.force != DistRoute::barrier) {
    fail(Errc::invalid_argument, "only the subgradient and barrier routes can be forced");
  }
  const NormExpr n = canonical(n0);
  const Index k = basis.cols();
  DistResult out;
  out.coeffs = Vec::Zero(k);

  const Index nz = k + count_vars(n);
  Mat m = Mat::Zero(n.dim(), nz);
  m.leftCols(k) = basis;
  Index next = k;
  Term root = flatten(n, m, v, next);

  // Reduce to variables on which the objective actually depends.
  Index rows = 0;
  for_each_leaf(root, [&](const Term& l) { rows += l.a.rows(); });
  Mat stacked(rows, nz);
  Index r = 0;
  for_each_leaf(root, [&](const Term& l) {
    stacked.middleRows(r, l.a.rows()) = l.a;
    r += l.a.rows();
  });
  Mat zbasis = nz > 0 ? column_space(stacked.transpose()) : Mat(0, 0);
  const Index ny = zbasis.cols();
  for_each_leaf(root, [&](Term& l) { l.a = l.a * zbasis; });

  bool exact = true;
  const Vec y0 = Vec::Zero(ny);
  const double f0 = term_value(root, y0, opts.tol, &exact);
  Vec y = y0;

  const Features feat = features(root);
  if (ny == 0 || f0 == 0.0) {
    out.route = DistRoute::direct;
  } else if (feat.opaque || (opts.force && *opts.force == DistRoute::subgradient)) {
    out.route = DistRoute::subgradient;
    EllipsoidResult e = solve_ellipsoid(root, ny, ellipsoid_radius(root, ny, f0), opts.tol);
    y = e.z;
    out.gap = e.gap;
  } else if (opts.force && *opts.force == DistRoute::barrier) {
    out.route = DistRoute::barrier;
    y = solve_barrier(root, ny, f0);
  } else if (!feat.l2) {
    out.route = DistRoute::simplex;
    y = solve_lp(root, ny);
  } else if (feat.leaves == 1) {
    out.route = DistRoute::least_squares;
    y = least_squares(root.a, -root.b);
  } else {
    out.route = DistRoute::barrier;
    y = solve_barrier(root, ny, f0);
  }
  out.value = term_value(root, y, opts.tol, &exact);
  if (out.value > f0) {
    out.value = f0;
    y = y0;
  }
  const Vec z = zbasis * y;
  out.coeffs = z.head(k);
  return out;
}

}  // namespace banmod

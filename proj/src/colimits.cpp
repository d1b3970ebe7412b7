#include "banmod/colimits.hpp"

#include <algorithm>
#include <limits>

#include "banmod/error.hpp"

namespace banmod {

namespace {

struct QuotientFiber {
  NormExpr norm;
  Mat proj;  // ambient -> complement coordinates
  Mat lift;  // complement coordinates -> ambient
};

// ambient / span(b) on complement coordinates; b may be any spanning set.
QuotientFiber quotient_fiber(const NormExpr& ambient, const Mat& spanning) {
  const Index n = ambient.dim();
  const Mat b = spanning.cols() == 0 || n == 0 ? Mat(n, 0) : column_space(spanning);
  if (b.cols() == 0) return QuotientFiber{ambient, Mat::Identity(n, n), Mat::Identity(n, n)};
  if (b.cols() == n) return QuotientFiber{zero_norm(), Mat(0, n), Mat(n, 0)};
  Complement c = complement_coordinates(b, n);
  return QuotientFiber{compose_linear(c.lift, quotient_of(ambient, b)), c.proj, c.lift};
}

Cocone summands(const std::vector<ModuleObj>& ms) {
  const MeasureSpace& x = ms.front().space();
  std::vector<NormExpr> fibers;
  std::vector<std::vector<Mat>> inj(ms.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    std::vector<NormExpr> parts;
    Index total = 0;
    for (const ModuleObj& m : ms) {
      parts.push_back(m.fiber(a));
      total += m.dim(a);
    }
    fibers.push_back(sum_of(parts));
    Index off = 0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      Mat e = Mat::Zero(total, ms[i].dim(a));
      e.middleRows(off, ms[i].dim(a)).setIdentity();
      inj[i].push_back(std::move(e));
      off += ms[i].dim(a);
    }
  }
  ModuleObj nadir(x, std::move(fibers));
  Cocone out{nadir, {}};
  for (std::size_t i = 0; i < ms.size(); ++i) out.legs.push_back(structural(ms[i], nadir, std::move(inj[i])));
  return out;
}

Mat orthonormal_or_empty(const Mat& m, Index rows) {
  if (m.cols() == 0 || rows == 0) return Mat(rows, 0);
  return column_space(m);
}

}  // namespace

Universal cokernel(const Morphism& phi) {
  const ModuleObj& n = phi.target();
  std::vector<NormExpr> fibers;
  std::vector<Mat> proj;
  for (std::size_t a = 0; a < n.size(); ++a) {
    QuotientFiber q = quotient_fiber(n.fiber(a), phi.mat(a));
    fibers.push_back(q.norm);
    proj.push_back(q.proj);
  }
  ModuleObj c(n.space(), std::move(fibers));
  return Universal{c, structural(n, c, std::move(proj))};
}

Universal coequalizer(const Morphism& phi, const Morphism& psi) {
  if (phi.source() != psi.source() || phi.target() != psi.target()) {
    fail(Errc::module_mismatch, "coequalizer needs a parallel pair");
  }
  std::vector<Mat> half;
  for (std::size_t a = 0; a < phi.mats().size(); ++a) half.push_back(0.5 * (phi.mat(a) - psi.mat(a)));
  return cokernel(structural(phi.source(), phi.target(), std::move(half)));
}

Cocone coproduct(const std::vector<ModuleObj>& ms) {
  if (ms.empty()) fail(Errc::invalid_argument, "coproduct of an empty family");
  for (const ModuleObj& m : ms) {
    if (!(m.space() == ms.front().space())) fail(Errc::space_mismatch, "coproduct summands over different spaces");
  }
  return summands(ms);
}

Pushout pushout(const Morphism& phi, const Morphism& psi) {
  if (phi.source() != psi.source()) fail(Errc::module_mismatch, "pushout needs a common domain");
  const ModuleObj& m = phi.target();
  const ModuleObj& n = psi.target();
  std::vector<NormExpr> fibers;
  std::vector<Mat> im, in;
  for (std::size_t a = 0; a < m.size(); ++a) {
    Mat rel(m.dim(a) + n.dim(a), phi.mat(a).cols());
    rel << -phi.mat(a), psi.mat(a);
    QuotientFiber q = quotient_fiber(sum_of({m.fiber(a), n.fiber(a)}), rel);
    fibers.push_back(q.norm);
    im.push_back(q.proj.leftCols(m.dim(a)));
    in.push_back(q.proj.rightCols(n.dim(a)));
  }
  ModuleObj p(m.space(), std::move(fibers));
  return Pushout{p, structural(m, p, std::move(im)), structural(n, p, std::move(in))};
}

Cocone direct_limit(const Diagram& system) {
  const FiniteCategory& cat = system.index();
  if (!cat.is_thin() || !is_directed(cat)) {
    fail(Errc::invalid_diagram, "direct limit needs a system over a directed poset");
  }
  std::size_t top = cat.num_objects();
  for (std::size_t m = 0; m < cat.num_objects() && top == cat.num_objects(); ++m) {
    bool all = true;
    for (std::size_t i = 0; i < cat.num_objects() && all; ++i) all = !cat.hom(i, m).empty();
    if (all) top = m;
  }
  if (top == cat.num_objects()) fail(Errc::invalid_diagram, "directed system without a top element");
  Cocone out{system.object(top), {}};
  for (std::size_t i = 0; i < cat.num_objects(); ++i) {
    const Morphism& leg = system.map(cat.hom(i, top).front());
    out.legs.push_back(Morphism::trusted(leg.source(), leg.target(), leg.mats(), leg.bounds()));
  }
  return out;
}

double direct_limit_seminorm(const Diagram& system, const Cocone& limit, std::size_t atom, const Vec& w) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < system.objects().size(); ++i) {
    const Mat& a = limit.legs[i].mat(atom);
    if (a.cols() == 0) {
      if (w.size() == 0 || w.isZero(0.0)) best = std::min(best, 0.0);
      continue;
    }
    const Vec v0 = least_squares(a, w);
    if ((a * v0 - w).norm() > 1e-10 * std::max(1.0, w.norm())) continue;
    const Mat k = null_space(a);
    const NormExpr& n = system.object(i).fiber(atom);
    const double val = k.cols() == 0 ? eval_norm(n, v0) : dist_to_subspace(n, k, v0).value;
    best = std::min(best, val);
  }
  return best;
}

Image image(const Morphism& phi) {
  const ModuleObj& m = phi.source();
  std::vector<NormExpr> fibers;
  std::vector<Mat> factor, proj;
  for (std::size_t a = 0; a < m.size(); ++a) {
    const Mat k = m.dim(a) == 0 ? Mat(0, 0) : null_space(phi.mat(a));
    QuotientFiber q = quotient_fiber(m.fiber(a), k);
    fibers.push_back(q.norm);
    factor.push_back(phi.mat(a) * q.lift);
    proj.push_back(q.proj);
  }
  ModuleObj obj(m.space(), std::move(fibers));
  return Image{obj, structural(obj, phi.target(), std::move(factor)), structural(m, obj, std::move(proj))};
}

Coimage coimage(const Morphism& phi) {
  const ModuleObj& n = phi.target();
  std::vector<NormExpr> fibers;
  std::vector<Mat> incl, core;
  for (std::size_t a = 0; a < n.size(); ++a) {
    const Mat c = orthonormal_or_empty(phi.mat(a), n.dim(a));
    fibers.push_back(c.cols() == 0 ? zero_norm() : compose_linear(c, n.fiber(a)));
    incl.push_back(c);
    core.push_back(c.transpose() * phi.mat(a));
  }
  ModuleObj obj(n.space(), std::move(fibers));
  return Coimage{obj, structural(obj, n, std::move(incl)), structural(phi.source(), obj, std::move(core))};
}

Morphism image_comparison(const Image& im, const Coimage& co) {
  std::vector<Mat> mats;
  for (std::size_t a = 0; a < im.object.size(); ++a) {
    mats.push_back(co.inclusion.mat(a).transpose() * im.factor.mat(a));
  }
  return structural(im.object, co.object, std::move(mats));
}

Cocone colimit_of_diagram(const Diagram& d) {
  const FiniteCategory& cat = d.index();
  const Cocone y = coproduct(d.objects());
  std::vector<ModuleObj> zs;
  for (const IndexArrow& f : cat.arrows()) zs.push_back(d.object(f.dom));
  const Cocone z = coproduct(zs);
  // On the summand of f, a includes at dom f and b pushes along f to cod f.
  std::vector<Mat> a_mats, b_mats;
  for (std::size_t x = 0; x < d.space().size(); ++x) {
    Index rows = 0, cols = 0;
    std::vector<Index> off(d.objects().size());
    for (std::size_t i = 0; i < d.objects().size(); ++i) {
      off[i] = rows;
      rows += d.object(i).dim(x);
    }
    for (const IndexArrow& f : cat.arrows()) cols += d.object(f.dom).dim(x);
    Mat a = Mat::Zero(rows, cols), b = Mat::Zero(rows, cols);
    Index c = 0;
    for (std::size_t k = 0; k < cat.num_arrows(); ++k) {
      const IndexArrow& f = cat.arrow(k);
      const Index dd = d.object(f.dom).dim(x);
      a.block(off[f.dom], c, dd, dd) = Mat::Identity(dd, dd);
      b.block(off[f.cod], c, d.object(f.cod).dim(x), dd) = d.map(k).mat(x);
      c += dd;
    }
    a_mats.push_back(std::move(a));
    b_mats.push_back(std::move(b));
  }
  const Morphism a = structural(z.nadir, y.nadir, std::move(a_mats));
  const Morphism b = structural(z.nadir, y.nadir, std::move(b_mats));
  const Universal q = coequalizer(a, b);
  Cocone out{q.object, {}};
  for (const Morphism& iota : y.legs) out.legs.push_back(compose(q.map, iota));
  return out;
}

Mat seminorm_null_space(const NormExpr& n) {
  const Index d = n.dim();
  switch (n.kind()) {
    case NormKind::lp:
    case NormKind::dual:
      return Mat(d, 0);
    case NormKind::sup_of:
    case NormKind::sum_of: {
      const auto& parts = n.kind() == NormKind::sup_of ? n.as_sup()->parts : n.as_sum()->parts;
      std::vector<Mat> blocks;
      Index cols = 0;
      for (const NormPart& p : parts) {
        blocks.push_back(seminorm_null_space(p.norm));
        cols += blocks.back().cols();
      }
      Mat out = Mat::Zero(d, cols);
      Index c = 0;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        out.block(parts[k].offset, c, blocks[k].rows(), blocks[k].cols()) = blocks[k];
        c += blocks[k].cols();
      }
      return out;
    }
    case NormKind::quotient: {
      const QuotientNode* q = n.as_quotient();
      const Mat inner = seminorm_null_space(q->ambient);
      Mat both(d, q->basis.cols() + inner.cols());
      both << q->basis, inner;
      return orthonormal_or_empty(both, d);
    }
    case NormKind::compose: {
      const ComposeNode* c = n.as_compose();
      const Mat k = orthonormal_or_empty(seminorm_null_space(c->inner), c->inner.dim());
      const Index r = c->inner.dim();
      const Mat off = (Mat::Identity(r, r) - k * k.transpose()) * c->embed;
      if (d == 0) return Mat(0, 0);
      return off.rows() == 0 ? Mat(Mat::Identity(d, d)) : null_space(off);
    }
    case NormKind::op_norm: {
      const OpNormNode* o = n.as_op_norm();
      const Mat k = seminorm_null_space(o->tgt);
      return orthonormal_or_empty(kron(k, Mat::Identity(o->src.dim(), o->src.dim())), d);
    }
  }
  return Mat(d, 0);
}

Universal metric_identification(const ModuleObj& m) {
  std::vector<NormExpr> fibers;
  std::vector<Mat> proj;
  for (std::size_t a = 0; a < m.size(); ++a) {
    const NormExpr& f = m.fiber(a);
    const Index d = f.dim();
    const Mat k = orthonormal_or_empty(seminorm_null_space(f), d);
    if (k.cols() == 0) {
      fibers.push_back(f);
      proj.push_back(Mat::Identity(d, d));
    } else if (k.cols() == d) {
      fibers.push_back(zero_norm());
      proj.push_back(Mat(0, d));
    } else {
      Complement c = complement_coordinates(k, d);
      // The seminorm is constant on cosets, so restricting it to complement
      // coordinates gives the quotient norm.
      fibers.push_back(compose_linear(c.lift, f));
      proj.push_back(c.proj);
    }
  }
  ModuleObj obj(m.space(), std::move(fibers));
  return Universal{obj, structural(m, obj, std::move(proj))};
}

Cocone cokernel_cocone(const Universal& c, const Morphism& phi) {
  return Cocone{c.object, {compose(c.map, phi), c.map}};
}

Cocone coequalizer_cocone(const Universal& c, const Morphism& phi) {
  return Cocone{c.object, {compose(c.map, phi), c.map}};
}

Cocone pushout_cocone(const Pushout& p, const Morphism& phi) {
  return Cocone{p.object, {compose(p.i_m, phi), p.i_m, p.i_n}};
}

}  // namespace banmod

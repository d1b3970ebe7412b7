#include "banmod/modcat.hpp"

#include <cmath>
#include <sstream>

#include "banmod/error.hpp"

namespace banmod {

namespace {

void require_same_space(const MeasureSpace& a, const MeasureSpace& b, const char* what) {
  if (!(a == b)) fail(Errc::space_mismatch, what);
}

void check_shapes(const ModuleObj& s, const ModuleObj& t, const std::vector<Mat>& mats) {
  require_same_space(s.space(), t.space(), "morphism source and target live over different spaces");
  if (mats.size() != s.size()) fail(Errc::dimension_mismatch, "one matrix per atom expected");
  for (std::size_t k = 0; k < mats.size(); ++k) {
    if (mats[k].rows() != t.dim(k) || mats[k].cols() != s.dim(k)) {
      fail(Errc::dimension_mismatch, "matrix shape mismatch at atom " + s.space().atom(k).id);
    }
  }
}

NormBound to_bound(const OpNormResult& r) {
  return NormBound{r.lower, r.upper, r.exact};
}

}  // namespace

ModuleObj::ModuleObj(MeasureSpace space, std::vector<NormExpr> fibers)
    : space_(std::move(space)), fibers_(std::make_shared<const std::vector<NormExpr>>(std::move(fibers))) {
  if (fibers_->size() != space_.size()) fail(Errc::dimension_mismatch, "one fiber per atom expected");
}

Index ModuleObj::total_dim() const {
  Index d = 0;
  for (const NormExpr& f : *fibers_) d += f.dim();
  return d;
}

bool operator==(const ModuleObj& a, const ModuleObj& b) {
  if (!(a.space_ == b.space_)) return false;
  if (a.fibers_ == b.fibers_) return true;
  return *a.fibers_ == *b.fibers_;
}

Element::Element(ModuleObj m, std::vector<Vec> v) : module(std::move(m)), vecs(std::move(v)) {
  if (vecs.size() != module.size()) fail(Errc::dimension_mismatch, "one vector per atom expected");
  for (std::size_t k = 0; k < vecs.size(); ++k) {
    if (vecs[k].size() != module.dim(k)) fail(Errc::dimension_mismatch, "element vector has the wrong fiber dim");
  }
}

Element Element::zero(const ModuleObj& m) {
  std::vector<Vec> v;
  v.reserve(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) v.push_back(Vec::Zero(m.dim(k)));
  return Element(m, std::move(v));
}

Morphism::Morphism(ModuleObj source, ModuleObj target, std::vector<Mat> mats, std::vector<NormBound> bounds)
    : source_(std::move(source)), target_(std::move(target)), mats_(std::move(mats)), bounds_(std::move(bounds)) {}

Morphism Morphism::checked(ModuleObj source, ModuleObj target, std::vector<Mat> mats, double tol) {
  MorphismReport rep = is_morphism(source, target, mats, tol);
  if (!rep.ok) fail(Errc::invalid_argument, "not a morphism: " + rep.detail);
  std::vector<NormBound> b;
  b.reserve(rep.norms.size());
  for (const OpNormResult& r : rep.norms) b.push_back(to_bound(r));
  return Morphism(std::move(source), std::move(target), std::move(mats), std::move(b));
}

Morphism Morphism::unchecked(ModuleObj source, ModuleObj target, std::vector<Mat> mats) {
  MorphismReport rep = is_morphism(source, target, mats, kMorphismTol);
  std::vector<NormBound> b;
  b.reserve(rep.norms.size());
  for (const OpNormResult& r : rep.norms) b.push_back(to_bound(r));
  return Morphism(std::move(source), std::move(target), std::move(mats), std::move(b));
}

Morphism Morphism::trusted(ModuleObj source, ModuleObj target, std::vector<Mat> mats, std::vector<NormBound> bounds) {
  check_shapes(source, target, mats);
  if (bounds.size() != mats.size()) fail(Errc::dimension_mismatch, "one bound per atom expected");
  return Morphism(std::move(source), std::move(target), std::move(mats), std::move(bounds));
}

Morphism Morphism::identity(const ModuleObj& m) {
  std::vector<Mat> mats;
  std::vector<NormBound> b;
  for (std::size_t k = 0; k < m.size(); ++k) {
    mats.push_back(Mat::Identity(m.dim(k), m.dim(k)));
    const double n = m.dim(k) > 0 ? 1.0 : 0.0;
    b.push_back(NormBound{n, n, true});
  }
  return Morphism(m, m, std::move(mats), std::move(b));
}

Morphism Morphism::zero(const ModuleObj& source, const ModuleObj& target) {
  require_same_space(source.space(), target.space(), "zero morphism");
  std::vector<Mat> mats;
  for (std::size_t k = 0; k < source.size(); ++k) mats.push_back(Mat::Zero(target.dim(k), source.dim(k)));
  return Morphism(source, target, std::move(mats), std::vector<NormBound>(source.size()));
}

bool Morphism::violates(double tol) const {
  for (const NormBound& b : bounds_) {
    if (b.lower > 1.0 + tol) return true;
  }
  return false;
}

bool Morphism::certified(double tol) const {
  for (const NormBound& b : bounds_) {
    if (b.upper > 1.0 + tol) return false;
  }
  return true;
}

Element Morphism::operator()(const Element& v) const {
  if (v.module != source_) fail(Errc::module_mismatch, "element is not in the morphism's source");
  std::vector<Vec> out;
  out.reserve(mats_.size());
  for (std::size_t k = 0; k < mats_.size(); ++k) out.push_back(mats_[k] * v.vecs[k]);
  return Element(target_, std::move(out));
}

L0Fun pointwise_norm(const Element& v, double tol) {
  std::vector<double> vals;
  vals.reserve(v.vecs.size());
  for (std::size_t k = 0; k < v.vecs.size(); ++k) vals.push_back(eval_norm(v.module.fiber(k), v.vecs[k], tol));
  return L0Fun(v.module.space(), std::move(vals));
}

double module_distance(const Element& v, const Element& w, double tol) {
  const L0Fun n = pointwise_norm(subtract(v, w), tol);
  return l0_distance(n, L0Fun::constant(n.space, 0.0));
}

Element scalar_action(const L0Fun& f, const Element& v) {
  require_same_space(f.space, v.module.space(), "scalar action");
  std::vector<Vec> out = v.vecs;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= f[k];
  return Element(v.module, std::move(out));
}

Element add(const Element& v, const Element& w) {
  if (v.module != w.module) fail(Errc::module_mismatch, "add");
  std::vector<Vec> out = v.vecs;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += w.vecs[k];
  return Element(v.module, std::move(out));
}

Element negate(const Element& v) {
  std::vector<Vec> out = v.vecs;
  for (Vec& x : out) x = -x;
  return Element(v.module, std::move(out));
}

Element subtract(const Element& v, const Element& w) { return add(v, negate(w)); }

Morphism compose(const Morphism& phi, const Morphism& psi) {
  if (psi.target() != phi.source()) fail(Errc::not_composable, "codomain of psi differs from domain of phi");
  std::vector<Mat> mats;
  std::vector<NormBound> b;
  for (std::size_t k = 0; k < phi.mats().size(); ++k) {
    mats.push_back(phi.mat(k) * psi.mat(k));
    const NormBound& x = phi.bound(k);
    const NormBound& y = psi.bound(k);
    b.push_back(NormBound{0.0, x.upper * y.upper, false});
  }
  return Morphism::trusted(psi.source(), phi.target(), std::move(mats), std::move(b));
}

Morphism identity(const ModuleObj& m) { return Morphism::identity(m); }

MorphismReport is_morphism(const ModuleObj& source, const ModuleObj& target, const std::vector<Mat>& mats,
                           double tol) {
  check_shapes(source, target, mats);
  MorphismReport rep;
  for (std::size_t k = 0; k < mats.size(); ++k) {
    OpNormResult r = op_norm(mats[k], source.fiber(k), target.fiber(k));
    if (r.lower > 1.0 + tol && rep.ok) {
      rep.ok = false;
      std::ostringstream os;
      os.precision(12);
      os << "atom " << source.space().atom(k).id << " has operator norm " << r.value;
      rep.detail = os.str();
    }
    rep.norms.push_back(std::move(r));
  }
  return rep;
}

bool is_mono(const Morphism& phi) {
  for (const Mat& m : phi.mats()) {
    if (!has_full_column_rank(m)) return false;
  }
  return true;
}

bool is_epi(const Morphism& phi) {
  for (const Mat& m : phi.mats()) {
    if (!has_full_row_rank(m)) return false;
  }
  return true;
}

Element glue(const std::vector<std::vector<std::size_t>>& partition, const std::vector<Element>& elems) {
  if (elems.empty() || partition.size() != elems.size()) {
    fail(Errc::invalid_argument, "glue needs one element per partition block");
  }
  const ModuleObj& m = elems.front().module;
  for (const Element& e : elems) {
    if (e.module != m) fail(Errc::module_mismatch, "glue: elements from different modules");
  }
  std::vector<int> owner(m.size(), -1);
  for (std::size_t n = 0; n < partition.size(); ++n) {
    for (std::size_t a : partition[n]) {
      if (a >= m.size() || owner[a] >= 0) fail(Errc::not_a_partition, "glue: blocks overlap or leave the space");
      owner[a] = static_cast<int>(n);
    }
  }
  std::vector<Vec> out;
  for (std::size_t a = 0; a < m.size(); ++a) {
    if (owner[a] < 0) fail(Errc::not_a_partition, "glue: blocks do not cover the space");
    out.push_back(elems[static_cast<std::size_t>(owner[a])].vecs[a]);
  }
  return Element(m, std::move(out));
}

ModuleObj hilbert_module(const MeasureSpace& x, std::size_t s) {
  const NormExpr f = s == 0 ? NormExpr() : lp(PNorm::two, static_cast<Index>(s));
  return ModuleObj(x, std::vector<NormExpr>(x.size(), f));
}

Element hilbert_basis_element(const ModuleObj& h, std::size_t s) {
  Element e = Element::zero(h);
  for (Vec& v : e.vecs) {
    if (static_cast<Index>(s) >= v.size()) fail(Errc::invalid_argument, "basis index out of range");
    v(static_cast<Index>(s)) = 1.0;
  }
  return e;
}

ModuleObj lb_module(const MeasureSpace& x, const ModuleObj& m) {
  std::vector<NormExpr> fibers;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) fibers.push_back(m.fiber(j));
  }
  return ModuleObj(product_space(x, m.space()), std::move(fibers));
}

Element lb_simple(const ModuleObj& lb, const MeasureSpace& x, const std::vector<std::size_t>& e, const Element& v) {
  const std::size_t ny = v.module.size();
  if (lb.size() != x.size() * ny) fail(Errc::module_mismatch, "lb_simple: module is not L0(X; M)");
  std::vector<bool> in(x.size(), false);
  for (std::size_t a : e) {
    if (a >= x.size()) fail(Errc::invalid_argument, "lb_simple: atom out of range");
    in[a] = true;
  }
  std::vector<Vec> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < ny; ++j) out.push_back(in[i] ? v.vecs[j] : Vec(Vec::Zero(v.vecs[j].size())));
  }
  return Element(lb, std::move(out));
}

ModuleObj free_module(const MeasureSpace& x) {
  return ModuleObj(x, std::vector<NormExpr>(x.size(), lp(PNorm::inf, 1)));
}

ModuleObj zero_module(const MeasureSpace& x) {
  return ModuleObj(x, std::vector<NormExpr>(x.size(), NormExpr()));
}

std::vector<Index> fiber_dims(const ModuleObj& m) {
  std::vector<Index> d;
  for (std::size_t k = 0; k < m.size(); ++k) d.push_back(m.dim(k));
  return d;
}

}  // namespace banmod

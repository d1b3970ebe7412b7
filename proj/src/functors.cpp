#include "banmod/functors.hpp"

#include <algorithm>
#include <sstream>

#include "banmod/colimits.hpp"
#include "banmod/error.hpp"
#include "banmod/random.hpp"

namespace banmod {

namespace {

constexpr double kSolveTol = 1e-9;

void require_same_space(const ModuleObj& a, const ModuleObj& b, const char* what) {
  if (!(a.space() == b.space())) fail(Errc::space_mismatch, what);
}

NormExpr hom_fiber(const NormExpr& src, const NormExpr& tgt) {
  if (src.dim() == 0 || tgt.dim() == 0) return NormExpr();
  return op_norm_of(src, tgt);
}

// Hom-functor images of phi carry at most phi's own bound.
Morphism hom_map(const ModuleObj& s, const ModuleObj& t, std::vector<Mat> mats, const Morphism& phi) {
  std::vector<NormBound> b;
  for (std::size_t a = 0; a < mats.size(); ++a) b.push_back(NormBound{0.0, phi.bound(a).upper, false});
  return Morphism::trusted(s, t, std::move(mats), std::move(b));
}

Mat solve_consistent(const Mat& a, const Mat& rhs, const char* what) {
  if (a.cols() == 0) return Mat::Zero(0, rhs.cols());
  const Mat x = least_squares(a, rhs);
  const double r = max_entry_diff(a * x, rhs);
  if (r > kSolveTol * std::max(1.0, max_abs(rhs))) {
    fail(Errc::inconsistent_system, std::string(what) + ": residual " + std::to_string(r));
  }
  return x;
}

}  // namespace

ModuleObj hom_module(const ModuleObj& m, const ModuleObj& n) {
  require_same_space(m, n, "hom_module: modules over different spaces");
  std::vector<NormExpr> fibers;
  for (std::size_t a = 0; a < m.size(); ++a) fibers.push_back(hom_fiber(m.fiber(a), n.fiber(a)));
  return ModuleObj(m.space(), std::move(fibers));
}

ModuleObj dual(const ModuleObj& m) { return hom_module(m, free_module(m.space())); }

Morphism hom_post(const ModuleObj& m, const Morphism& phi) {
  require_same_space(m, phi.source(), "hom_post: modules over different spaces");
  std::vector<Mat> mats;
  for (std::size_t a = 0; a < m.size(); ++a) {
    const Index d = m.dim(a);
    mats.push_back(kron(phi.mat(a), Mat::Identity(d, d)));
  }
  return hom_map(hom_module(m, phi.source()), hom_module(m, phi.target()), std::move(mats), phi);
}

Morphism hom_pre(const ModuleObj& n, const Morphism& phi) {
  require_same_space(n, phi.source(), "hom_pre: modules over different spaces");
  std::vector<Mat> mats;
  for (std::size_t a = 0; a < n.size(); ++a) {
    const Index e = n.dim(a);
    mats.push_back(kron(Mat::Identity(e, e), phi.mat(a).transpose()));
  }
  return hom_map(hom_module(phi.target(), n), hom_module(phi.source(), n), std::move(mats), phi);
}

Morphism dual_map(const Morphism& phi) { return hom_pre(free_module(phi.source().space()), phi); }

Element InvImResult::lift(const Element& v) const {
  if (v.module != base) fail(Errc::module_mismatch, "lift: element is not in the base module");
  std::vector<Vec> out;
  for (std::size_t x = 0; x < tau.source().size(); ++x) out.push_back(v.vecs[tau(x)]);
  return Element(module, std::move(out));
}

InvImResult inverse_image(const MeasMorphism& tau, const ModuleObj& m) {
  if (!(tau.target() == m.space())) fail(Errc::space_mismatch, "inverse_image: module is not over the target of tau");
  std::vector<NormExpr> fibers;
  for (std::size_t x = 0; x < tau.source().size(); ++x) fibers.push_back(m.fiber(tau(x)));
  return InvImResult{ModuleObj(tau.source(), std::move(fibers)), tau, m};
}

Morphism inverse_image_morphism(const MeasMorphism& tau, const Morphism& phi) {
  const ModuleObj s = inverse_image(tau, phi.source()).module;
  const ModuleObj t = inverse_image(tau, phi.target()).module;
  std::vector<Mat> mats;
  std::vector<NormBound> b;
  for (std::size_t x = 0; x < tau.source().size(); ++x) {
    mats.push_back(phi.mat(tau(x)));
    b.push_back(phi.bound(tau(x)));
  }
  return Morphism::trusted(s, t, std::move(mats), std::move(b));
}

Diagram inverse_image_diagram(const MeasMorphism& tau, const Diagram& d) {
  std::vector<ModuleObj> objs;
  for (const ModuleObj& m : d.objects()) objs.push_back(inverse_image(tau, m).module);
  std::vector<Morphism> arrows;
  for (std::size_t k = d.index().num_objects(); k < d.index().num_arrows(); ++k) {
    arrows.push_back(inverse_image_morphism(tau, d.map(k)));
  }
  return Diagram(d.index(), std::move(objs), std::move(arrows));
}

SquareReport invim_pullback_square(const MeasMorphism& tau, const ModuleObj& m, int trials,
                                   unsigned long long seed, double tol) {
  const InvImResult inv = inverse_image(tau, m);
  SquareReport rep;
  const MeasureSpace& x = tau.source();
  RandomConfig cfg;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    // A test object over Z with sigma: Z -> X and a fiberwise-contractive
    // alpha_z : M_{tau sigma z} -> N_z; the mediator must be alpha read
    // through the copies tau* M_{sigma z} = M_{tau sigma z}.
    const MeasureSpace z = random_space(rng, cfg);
    std::vector<std::size_t> sig;
    for (std::size_t k = 0; k < z.size(); ++k) sig.push_back(static_cast<std::size_t>(rng.integer(0, static_cast<int>(x.size()) - 1)));
    const MeasMorphism sigma(z, x, sig);
    const MeasMorphism ts = compose(tau, sigma);
    const ModuleObj n = random_module(rng, z, cfg);
    const ModuleObj pulled = inverse_image(ts, m).module;
    const Morphism alpha = random_morphism(rng, pulled, n);
    const ModuleObj via_x = inverse_image(sigma, inv.module).module;
    std::vector<Mat> phi;
    for (std::size_t k = 0; k < z.size(); ++k) {
      const Index d = via_x.dim(k);
      // The canonical comparison sigma* tau* M -> (tau sigma)* M is the identity.
      const Mat c = Mat::Identity(d, d);
      Mat p = solve_consistent(c.transpose(), alpha.mat(k).transpose(), "pullback square").transpose();
      rep.max_residual = std::max(rep.max_residual, max_entry_diff(p * c, alpha.mat(k)));
      phi.push_back(std::move(p));
    }
    const MorphismReport mr = is_morphism(via_x, n, phi, tol);
    if (!mr.ok && rep.ok) {
      rep.ok = false;
      rep.detail = "trial " + std::to_string(t) + ": mediator is not a morphism: " + mr.detail;
    }
    if (via_x != pulled && rep.ok) {
      rep.ok = false;
      rep.detail = "trial " + std::to_string(t) + ": fibers of sigma* tau* M differ from (tau sigma)* M";
    }
    ++rep.trials;
  }
  if (rep.max_residual > tol && rep.ok) {
    rep.ok = false;
    rep.detail = "commutation residual " + std::to_string(rep.max_residual);
  }
  return rep;
}

Morphism lb_pullback_comparison(const MeasureSpace& x, const ModuleObj& m) {
  const MeasureSpace xy = product_space(x, m.space());
  std::vector<std::size_t> proj;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) proj.push_back(j);
  }
  const ModuleObj pulled = inverse_image(MeasMorphism(xy, m.space(), proj), m).module;
  const ModuleObj lb = lb_module(x, m);
  if (pulled != lb) fail(Errc::module_mismatch, "L0(X; M) and the inverse image along pi_Y differ");
  std::vector<Mat> mats;
  std::vector<NormBound> b;
  for (std::size_t k = 0; k < lb.size(); ++k) {
    mats.push_back(Mat::Identity(lb.dim(k), lb.dim(k)));
    const double one = lb.dim(k) > 0 ? 1.0 : 0.0;
    b.push_back(NormBound{one, one, true});
  }
  return Morphism::trusted(pulled, lb, std::move(mats), std::move(b));
}

NatTrans::NatTrans(Diagram s, Diagram t, std::vector<Morphism> c)
    : source(std::move(s)), target(std::move(t)), components(std::move(c)) {
  const std::size_t n = source.index().num_objects();
  if (target.index().num_objects() != n || target.index().num_arrows() != source.index().num_arrows()) {
    fail(Errc::invalid_diagram, "natural transformation between diagrams of different shapes");
  }
  if (components.size() != n) fail(Errc::invalid_diagram, "one component per index object expected");
  for (std::size_t i = 0; i < n; ++i) {
    if (components[i].source() != source.object(i) || components[i].target() != target.object(i)) {
      fail(Errc::invalid_diagram, "component " + std::to_string(i) + " has the wrong endpoints");
    }
  }
  const double r = naturality_residual();
  if (r > 1e-10) {
    std::ostringstream os;
    os << "naturality squares do not commute (residual " << r << ")";
    fail(Errc::invalid_diagram, os.str());
  }
}

double NatTrans::naturality_residual() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < source.index().num_arrows(); ++k) {
    const IndexArrow& f = source.index().arrow(k);
    for (std::size_t a = 0; a < source.space().size(); ++a) {
      const Mat lhs = target.map(k).mat(a) * components[f.dom].mat(a);
      const Mat rhs = components[f.cod].mat(a) * source.map(k).mat(a);
      worst = std::max(worst, max_entry_diff(lhs, rhs));
    }
  }
  return worst;
}

NatKernel nat_kernel(const NatTrans& eta) {
  const Diagram& d1 = eta.source;
  const std::size_t n = d1.index().num_objects();
  std::vector<Universal> ks;
  for (const Morphism& c : eta.components) ks.push_back(kernel(c));
  std::vector<ModuleObj> objs;
  for (const Universal& k : ks) objs.push_back(k.object);
  std::vector<Morphism> arrows;
  for (std::size_t k = n; k < d1.index().num_arrows(); ++k) {
    const IndexArrow& f = d1.index().arrow(k);
    // ker(eta_j) o Phi = D1(f) o ker(eta_i).
    std::vector<Mat> mats;
    for (std::size_t a = 0; a < d1.space().size(); ++a) {
      mats.push_back(solve_consistent(ks[f.cod].map.mat(a), d1.map(k).mat(a) * ks[f.dom].map.mat(a), "nat_kernel"));
    }
    arrows.push_back(Morphism::trusted(objs[f.dom], objs[f.cod], std::move(mats),
                                       std::vector<NormBound>(d1.space().size(), NormBound{0.0, 1.0, false})));
  }
  Diagram kd(d1.index(), objs, std::move(arrows));
  std::vector<Morphism> incl;
  for (const Universal& k : ks) incl.push_back(k.map);
  return NatKernel{kd, NatTrans(kd, d1, std::move(incl))};
}

NatCokernel nat_cokernel(const NatTrans& eta) {
  const Diagram& d2 = eta.target;
  const std::size_t n = d2.index().num_objects();
  std::vector<Universal> cs;
  for (const Morphism& c : eta.components) cs.push_back(cokernel(c));
  std::vector<ModuleObj> objs;
  for (const Universal& c : cs) objs.push_back(c.object);
  std::vector<Morphism> arrows;
  for (std::size_t k = n; k < d2.index().num_arrows(); ++k) {
    const IndexArrow& f = d2.index().arrow(k);
    // Phi o coker(eta_i) = coker(eta_j) o D2(f).
    std::vector<Mat> mats;
    for (std::size_t a = 0; a < d2.space().size(); ++a) {
      const Mat& qi = cs[f.dom].map.mat(a);
      const Mat rhs = cs[f.cod].map.mat(a) * d2.map(k).mat(a);
      mats.push_back(solve_consistent(qi.transpose(), rhs.transpose(), "nat_cokernel").transpose());
    }
    arrows.push_back(Morphism::trusted(objs[f.dom], objs[f.cod], std::move(mats),
                                       std::vector<NormBound>(d2.space().size(), NormBound{0.0, 1.0, false})));
  }
  Diagram cd(d2.index(), objs, std::move(arrows));
  std::vector<Morphism> proj;
  for (const Universal& c : cs) proj.push_back(c.map);
  return NatCokernel{cd, NatTrans(d2, cd, std::move(proj))};
}

}  // namespace banmod

#include "banmod/limits.hpp"

#include "banmod/error.hpp"

namespace banmod {

namespace {

// Restriction of `ambient` to span(basis); the zero norm on a trivial span.
NormExpr restrict_to(const Mat& basis, const NormExpr& ambient) {
  if (basis.cols() == 0) return zero_norm();
  return compose_linear(basis, ambient);
}

Mat sup_index_rows(const std::vector<Index>& dims, std::size_t i, const Mat& basis) {
  Index off = 0;
  for (std::size_t k = 0; k < i; ++k) off += dims[k];
  return basis.middleRows(off, dims[i]);
}

// Subspace of the l-infinity sum of `objs` cut out by D(f) v_dom = v_cod for
// every listed arrow; legs are the coordinate blocks.
Cone compatible_threads(const std::vector<ModuleObj>& objs, const std::vector<const Morphism*>& maps,
                        const std::vector<std::pair<std::size_t, std::size_t>>& ends) {
  const MeasureSpace& x = objs.front().space();
  std::vector<NormExpr> fibers;
  std::vector<std::vector<Mat>> leg_mats(objs.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    std::vector<Index> dims;
    std::vector<NormExpr> parts;
    Index total = 0;
    for (const ModuleObj& m : objs) {
      dims.push_back(m.dim(a));
      parts.push_back(m.fiber(a));
      total += m.dim(a);
    }
    Index rows = 0;
    for (std::size_t f = 0; f < maps.size(); ++f) rows += objs[ends[f].second].dim(a);
    Mat c = Mat::Zero(rows, total);
    Index r = 0;
    for (std::size_t f = 0; f < maps.size(); ++f) {
      const auto [dom, cod] = ends[f];
      Index off_dom = 0, off_cod = 0;
      for (std::size_t k = 0; k < dom; ++k) off_dom += dims[k];
      for (std::size_t k = 0; k < cod; ++k) off_cod += dims[k];
      const Mat& m = maps[f]->mat(a);
      c.block(r, off_dom, m.rows(), m.cols()) += m;
      c.block(r, off_cod, dims[cod], dims[cod]) -= Mat::Identity(dims[cod], dims[cod]);
      r += dims[cod];
    }
    const Mat basis = rows == 0 || total == 0 ? Mat(Mat::Identity(total, total)) : null_space(c);
    fibers.push_back(restrict_to(basis, sup_of(parts)));
    for (std::size_t i = 0; i < objs.size(); ++i) leg_mats[i].push_back(sup_index_rows(dims, i, basis));
  }
  ModuleObj apex(x, std::move(fibers));
  Cone out{apex, {}};
  for (std::size_t i = 0; i < objs.size(); ++i) out.legs.push_back(structural(apex, objs[i], std::move(leg_mats[i])));
  return out;
}

std::vector<std::vector<bool>> transpose(const std::vector<std::vector<bool>>& leq) {
  std::vector<std::vector<bool>> t(leq.size(), std::vector<bool>(leq.size()));
  for (std::size_t i = 0; i < leq.size(); ++i) {
    for (std::size_t j = 0; j < leq.size(); ++j) t[j][i] = leq[i][j];
  }
  return t;
}

Diagram system_diagram(const std::vector<std::vector<bool>>& order, std::vector<ModuleObj> ms,
                       const std::map<std::pair<std::size_t, std::size_t>, Morphism>& maps) {
  FiniteCategory cat = FiniteCategory::poset(order);
  std::vector<Morphism> arrows;
  for (std::size_t k = cat.num_objects(); k < cat.num_arrows(); ++k) {
    const IndexArrow& a = cat.arrow(k);
    auto it = maps.find({a.dom, a.cod});
    if (it == maps.end()) {
      fail(Errc::invalid_diagram, "system map " + std::to_string(a.dom) + " -> " + std::to_string(a.cod) + " missing");
    }
    arrows.push_back(it->second);
  }
  return Diagram(std::move(cat), std::move(ms), std::move(arrows));
}

}  // namespace

Morphism structural(const ModuleObj& source, const ModuleObj& target, std::vector<Mat> mats) {
  std::vector<NormBound> b(mats.size(), NormBound{0.0, 1.0, false});
  return Morphism::trusted(source, target, std::move(mats), std::move(b));
}

Universal kernel(const Morphism& phi) {
  const ModuleObj& m = phi.source();
  std::vector<NormExpr> fibers;
  std::vector<Mat> incl;
  for (std::size_t a = 0; a < m.size(); ++a) {
    const Mat n = m.dim(a) == 0 ? Mat(0, 0) : null_space(phi.mat(a));
    fibers.push_back(restrict_to(n, m.fiber(a)));
    incl.push_back(n);
  }
  ModuleObj k(m.space(), std::move(fibers));
  return Universal{k, structural(k, m, std::move(incl))};
}

Universal equalizer(const Morphism& phi, const Morphism& psi) {
  if (phi.source() != psi.source() || phi.target() != psi.target()) {
    fail(Errc::module_mismatch, "equalizer needs a parallel pair");
  }
  std::vector<Mat> half;
  for (std::size_t a = 0; a < phi.mats().size(); ++a) half.push_back(0.5 * (phi.mat(a) - psi.mat(a)));
  return kernel(structural(phi.source(), phi.target(), std::move(half)));
}

Cone product(const std::vector<ModuleObj>& ms) {
  if (ms.empty()) fail(Errc::invalid_argument, "product of an empty family");
  for (const ModuleObj& m : ms) {
    if (!(m.space() == ms.front().space())) fail(Errc::space_mismatch, "product factors over different spaces");
  }
  return compatible_threads(ms, {}, {});
}

Pullback pullback(const Morphism& phi, const Morphism& psi) {
  if (phi.target() != psi.target()) fail(Errc::module_mismatch, "pullback needs a common codomain");
  const ModuleObj& m = phi.source();
  const ModuleObj& n = psi.source();
  std::vector<NormExpr> fibers;
  std::vector<Mat> pm, pn;
  for (std::size_t a = 0; a < m.size(); ++a) {
    Mat c(phi.mat(a).rows(), m.dim(a) + n.dim(a));
    c << phi.mat(a), -psi.mat(a);
    const Index total = m.dim(a) + n.dim(a);
    const Mat basis = c.rows() == 0 || total == 0 ? Mat(Mat::Identity(total, total)) : null_space(c);
    fibers.push_back(restrict_to(basis, sup_of({m.fiber(a), n.fiber(a)})));
    pm.push_back(basis.topRows(m.dim(a)));
    pn.push_back(basis.bottomRows(n.dim(a)));
  }
  ModuleObj p(m.space(), std::move(fibers));
  return Pullback{p, structural(p, m, std::move(pm)), structural(p, n, std::move(pn))};
}

Diagram inverse_system(const std::vector<std::vector<bool>>& leq, std::vector<ModuleObj> ms,
                       const std::map<std::pair<std::size_t, std::size_t>, Morphism>& p) {
  // P_ij : M_j -> M_i for i <= j is the arrow j -> i.
  std::map<std::pair<std::size_t, std::size_t>, Morphism> flipped;
  for (const auto& [key, val] : p) flipped.emplace(std::make_pair(key.second, key.first), val);
  return system_diagram(transpose(leq), std::move(ms), flipped);
}

Diagram direct_system(const std::vector<std::vector<bool>>& leq, std::vector<ModuleObj> ms,
                      const std::map<std::pair<std::size_t, std::size_t>, Morphism>& phi) {
  return system_diagram(leq, std::move(ms), phi);
}

bool is_codirected(const FiniteCategory& c) {
  for (std::size_t a = 0; a < c.num_objects(); ++a) {
    for (std::size_t b = 0; b < c.num_objects(); ++b) {
      bool found = false;
      for (std::size_t k = 0; k < c.num_objects() && !found; ++k) {
        found = !c.hom(k, a).empty() && !c.hom(k, b).empty();
      }
      if (!found) return false;
    }
  }
  return true;
}

bool is_directed(const FiniteCategory& c) {
  for (std::size_t a = 0; a < c.num_objects(); ++a) {
    for (std::size_t b = 0; b < c.num_objects(); ++b) {
      bool found = false;
      for (std::size_t k = 0; k < c.num_objects() && !found; ++k) {
        found = !c.hom(a, k).empty() && !c.hom(b, k).empty();
      }
      if (!found) return false;
    }
  }
  return true;
}

Cone inverse_limit(const Diagram& system) {
  const FiniteCategory& cat = system.index();
  if (!cat.is_thin() || !is_codirected(cat)) {
    fail(Errc::invalid_diagram, "inverse limit needs a system over a directed poset");
  }
  std::vector<const Morphism*> maps;
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  for (std::size_t k = cat.num_objects(); k < cat.num_arrows(); ++k) {
    maps.push_back(&system.map(k));
    ends.emplace_back(cat.arrow(k).dom, cat.arrow(k).cod);
  }
  return compatible_threads(system.objects(), maps, ends);
}

Cone limit_of_diagram(const Diagram& d) {
  const FiniteCategory& cat = d.index();
  const Cone y = product(d.objects());
  std::vector<ModuleObj> zs;
  for (const IndexArrow& f : cat.arrows()) zs.push_back(d.object(f.cod));
  const Cone z = product(zs);
  // a picks the codomain component, b pushes the domain component along f.
  std::vector<Mat> a_mats, b_mats;
  for (std::size_t x = 0; x < d.space().size(); ++x) {
    Index rows = 0, cols = 0;
    std::vector<Index> off(d.objects().size());
    for (std::size_t i = 0; i < d.objects().size(); ++i) {
      off[i] = cols;
      cols += d.object(i).dim(x);
    }
    for (const IndexArrow& f : cat.arrows()) rows += d.object(f.cod).dim(x);
    Mat a = Mat::Zero(rows, cols), b = Mat::Zero(rows, cols);
    Index r = 0;
    for (std::size_t k = 0; k < cat.num_arrows(); ++k) {
      const IndexArrow& f = cat.arrow(k);
      const Index dc = d.object(f.cod).dim(x);
      a.block(r, off[f.cod], dc, dc) = Mat::Identity(dc, dc);
      b.block(r, off[f.dom], dc, d.object(f.dom).dim(x)) = d.map(k).mat(x);
      r += dc;
    }
    a_mats.push_back(std::move(a));
    b_mats.push_back(std::move(b));
  }
  const Morphism a = structural(y.apex, z.apex, std::move(a_mats));
  const Morphism b = structural(y.apex, z.apex, std::move(b_mats));
  const Universal eq = equalizer(a, b);
  Cone out{eq.object, {}};
  for (const Morphism& pi : y.legs) out.legs.push_back(compose(pi, eq.map));
  return out;
}

Diagram parallel_pair_diagram(const Morphism& phi, const Morphism& psi) {
  return Diagram(FiniteCategory::parallel_pair(), {phi.source(), phi.target()}, {phi, psi});
}

Diagram discrete_diagram(const std::vector<ModuleObj>& ms) {
  return Diagram(FiniteCategory::discrete(ms.size()), ms, {});
}

Diagram cospan_diagram(const Morphism& phi, const Morphism& psi) {
  return Diagram(FiniteCategory::cospan(), {phi.source(), psi.source(), phi.target()}, {phi, psi});
}

Diagram span_diagram(const Morphism& phi, const Morphism& psi) {
  return Diagram(FiniteCategory::span(), {phi.source(), phi.target(), psi.target()}, {phi, psi});
}

Cone kernel_cone(const Universal& k, const Morphism& phi) {
  return Cone{k.object, {k.map, compose(phi, k.map)}};
}

Cone equalizer_cone(const Universal& e, const Morphism& phi) {
  return Cone{e.object, {e.map, compose(phi, e.map)}};
}

Cone pullback_cone(const Pullback& p, const Morphism& phi) {
  return Cone{p.object, {p.p_m, p.p_n, compose(phi, p.p_m)}};
}

}  // namespace banmod

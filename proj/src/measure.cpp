#include "banmod/measure.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "banmod/error.hpp"

namespace banmod {

MeasureSpace::MeasureSpace(std::vector<Atom> atoms) {
  std::set<std::string> seen;
  for (const Atom& a : atoms) {
    if (!(a.mass > 0.0) || !std::isfinite(a.mass)) {
      fail(Errc::invalid_argument, "atom '" + a.id + "' must have positive finite mass");
    }
    if (!seen.insert(a.id).second) {
      fail(Errc::invalid_argument, "duplicate atom id '" + a.id + "'");
    }
  }
  atoms_ = std::make_shared<const std::vector<Atom>>(std::move(atoms));
}

double MeasureSpace::total_mass() const {
  double total = 0.0;
  for (const Atom& a : *atoms_) total += a.mass;
  return total;
}

std::size_t MeasureSpace::index_of(const std::string& id) const {
  for (std::size_t k = 0; k < atoms_->size(); ++k) {
    if ((*atoms_)[k].id == id) return k;
  }
  fail(Errc::invalid_argument, "unknown atom id '" + id + "'");
}

double MeasureSpace::reference_weight(std::size_t k) {
  return std::ldexp(1.0, -static_cast<int>(k + 1));
}

bool operator==(const MeasureSpace& a, const MeasureSpace& b) {
  if (a.atoms_ == b.atoms_) return true;
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.atom(k).id != b.atom(k).id || a.atom(k).mass != b.atom(k).mass) return false;
  }
  return true;
}

MeasureSpace dirac_point() { return MeasureSpace({Atom{"p", 1.0}}); }

MeasureSpace product_space(const MeasureSpace& x, const MeasureSpace& y) {
  std::vector<Atom> atoms;
  atoms.reserve(x.size() * y.size());
  for (const Atom& a : x.atoms()) {
    for (const Atom& b : y.atoms()) {
      atoms.push_back(Atom{"(" + a.id + "," + b.id + ")", a.mass * b.mass});
    }
  }
  return MeasureSpace(std::move(atoms));
}

L0Fun::L0Fun(MeasureSpace s, std::vector<double> v) : space(std::move(s)), values(std::move(v)) {
  if (values.size() != space.size()) {
    fail(Errc::dimension_mismatch, "L0Fun needs one value per atom");
  }
  for (double x : values) {
    if (!std::isfinite(x)) fail(Errc::invalid_argument, "L0Fun values must be finite");
  }
}

L0Fun L0Fun::constant(const MeasureSpace& s, double c) {
  return L0Fun(s, std::vector<double>(s.size(), c));
}

L0Fun L0Fun::indicator(const MeasureSpace& s, const std::vector<std::size_t>& atoms) {
  std::vector<double> v(s.size(), 0.0);
  for (std::size_t k : atoms) {
    if (k >= s.size()) fail(Errc::invalid_argument, "indicator atom out of range");
    v[k] = 1.0;
  }
  return L0Fun(s, std::move(v));
}

L0ExtFun::L0ExtFun(MeasureSpace s, std::vector<double> v) : space(std::move(s)), values(std::move(v)) {
  if (values.size() != space.size()) {
    fail(Errc::dimension_mismatch, "L0ExtFun needs one value per atom");
  }
  for (double x : values) {
    if (std::isnan(x)) fail(Errc::invalid_argument, "L0ExtFun values must not be NaN");
  }
}

double l0_distance(const L0Fun& f, const L0Fun& g) {
  if (!(f.space == g.space)) fail(Errc::space_mismatch, "l0_distance");
  double d = 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    d += MeasureSpace::reference_weight(k) * std::min(std::abs(f.values[k] - g.values[k]), 1.0);
  }
  return d;
}

namespace {

template <typename Pick>
L0ExtFun lattice_fold(const std::vector<L0ExtFun>& fs, Pick pick, const char* name) {
  if (fs.empty()) fail(Errc::invalid_argument, std::string(name) + " of an empty family");
  L0ExtFun out = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) {
    if (!(fs[i].space == out.space)) fail(Errc::space_mismatch, name);
    for (std::size_t k = 0; k < out.values.size(); ++k) {
      out.values[k] = pick(out.values[k], fs[i].values[k]);
    }
  }
  return out;
}

}  // namespace

L0ExtFun lattice_sup(const std::vector<L0ExtFun>& fs) {
  return lattice_fold(fs, [](double a, double b) { return std::max(a, b); }, "lattice_sup");
}

L0ExtFun lattice_inf(const std::vector<L0ExtFun>& fs) {
  return lattice_fold(fs, [](double a, double b) { return std::min(a, b); }, "lattice_inf");
}

MeasMorphism::MeasMorphism(MeasureSpace source, MeasureSpace target, std::vector<std::size_t> atom_map)
    : source_(std::move(source)), target_(std::move(target)), map_(std::move(atom_map)) {
  if (map_.size() != source_.size()) {
    fail(Errc::invalid_argument, "measure morphism must map every source atom");
  }
  for (std::size_t y : map_) {
    if (y >= target_.size()) fail(Errc::invalid_argument, "measure morphism maps outside the target");
  }
  if (!pushforward(*this).absolutely_continuous) {
    fail(Errc::invalid_argument, "pushforward is not absolutely continuous");
  }
}

MeasMorphism::MeasMorphism(MeasureSpace source, MeasureSpace target,
                           const std::map<std::string, std::string>& by_id)
    : MeasMorphism(source, target, [&] {
        std::vector<std::size_t> m(source.size());
        for (std::size_t k = 0; k < source.size(); ++k) {
          auto it = by_id.find(source.atom(k).id);
          if (it == by_id.end()) {
            fail(Errc::invalid_argument, "atom '" + source.atom(k).id + "' is not mapped");
          }
          m[k] = target.index_of(it->second);
        }
        return m;
      }()) {}

MeasMorphism MeasMorphism::identity(const MeasureSpace& x) {
  std::vector<std::size_t> m(x.size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = k;
  return MeasMorphism(x, x, std::move(m));
}

MeasMorphism compose(const MeasMorphism& sigma, const MeasMorphism& tau) {
  if (!(tau.target() == sigma.source())) fail(Errc::not_composable, "measure morphisms");
  std::vector<std::size_t> m(tau.source().size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = sigma(tau(k));
  return MeasMorphism(tau.source(), sigma.target(), std::move(m));
}

Pushforward pushforward(const MeasMorphism& tau) {
  Pushforward out;
  out.masses.assign(tau.target().size(), 0.0);
  for (std::size_t k = 0; k < tau.source().size(); ++k) {
    out.masses[tau(k)] += tau.source().mass(k);
  }
  for (std::size_t y = 0; y < out.masses.size(); ++y) {
    if (out.masses[y] > 0.0 && !(tau.target().mass(y) > 0.0)) out.absolutely_continuous = false;
  }
  return out;
}

}  // namespace banmod

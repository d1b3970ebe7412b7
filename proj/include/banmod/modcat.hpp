#ifndef BANMOD_MODCAT_HPP_
#define BANMOD_MODCAT_HPP_

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "banmod/linalg.hpp"
#include "banmod/measure.hpp"
#include "banmod/norm_expr.hpp"
#include "banmod/normcalc.hpp"

namespace banmod {

// Slack allowed on the morphism condition |phi(v)| <= |v|.
inline constexpr double kMorphismTol = 1e-9;

// A Banach L0(X)-module with finite-dimensional fibers, one per atom.
class ModuleObj {
 public:
  ModuleObj(MeasureSpace space, std::vector<NormExpr> fibers);

  const MeasureSpace& space() const { return space_; }
  std::size_t size() const { return fibers_->size(); }
  const NormExpr& fiber(std::size_t k) const { return (*fibers_)[k]; }
  const std::vector<NormExpr>& fibers() const { return *fibers_; }
  Index dim(std::size_t k) const { return (*fibers_)[k].dim(); }
  Index total_dim() const;
  bool is_zero() const { return total_dim() == 0; }

  friend bool operator==(const ModuleObj& a, const ModuleObj& b);
  friend bool operator!=(const ModuleObj& a, const ModuleObj& b) { return !(a == b); }

 private:
  MeasureSpace space_;
  std::shared_ptr<const std::vector<NormExpr>> fibers_;
};

struct Element {
  ModuleObj module;
  std::vector<Vec> vecs;

  Element(ModuleObj m, std::vector<Vec> v);
  static Element zero(const ModuleObj& m);
};

struct NormBound {
  double lower = 0.0;
  double upper = 0.0;
  bool exact = true;
};

class Morphism {
 public:
  // Computes per-atom operator norms and throws unless every atom satisfies
  // the morphism condition within `tol`.
  static Morphism checked(ModuleObj source, ModuleObj target, std::vector<Mat> mats,
                          double tol = kMorphismTol);
  // Computes per-atom operator norms but never throws; validity can be read
  // off afterwards. Used to represent deliberately broken maps.
  static Morphism unchecked(ModuleObj source, ModuleObj target, std::vector<Mat> mats);
  // Takes the caller's bounds, for maps whose norm is known by construction.
  static Morphism trusted(ModuleObj source, ModuleObj target, std::vector<Mat> mats,
                          std::vector<NormBound> bounds);
  static Morphism identity(const ModuleObj& m);
  static Morphism zero(const ModuleObj& source, const ModuleObj& target);

  const ModuleObj& source() const { return source_; }
  const ModuleObj& target() const { return target_; }
  const Mat& mat(std::size_t k) const { return mats_[k]; }
  const std::vector<Mat>& mats() const { return mats_; }
  const NormBound& bound(std::size_t k) const { return bounds_[k]; }
  const std::vector<NormBound>& bounds() const { return bounds_; }

  // Some atom provably violates |phi(v)| <= |v| beyond tol.
  bool violates(double tol = kMorphismTol) const;
  // Every atom is certified to satisfy the condition within tol.
  bool certified(double tol = kMorphismTol) const;

  Element operator()(const Element& v) const;

 private:
  Morphism(ModuleObj source, ModuleObj target, std::vector<Mat> mats, std::vector<NormBound> bounds);

  ModuleObj source_;
  ModuleObj target_;
  std::vector<Mat> mats_;
  std::vector<NormBound> bounds_;
};

L0Fun pointwise_norm(const Element& v, double tol = kExactTol);
double module_distance(const Element& v, const Element& w, double tol = kExactTol);

Element scalar_action(const L0Fun& f, const Element& v);
Element add(const Element& v, const Element& w);
Element negate(const Element& v);
Element subtract(const Element& v, const Element& w);

// phi o psi.
Morphism compose(const Morphism& phi, const Morphism& psi);
Morphism identity(const ModuleObj& m);

struct MorphismReport {
  bool ok = true;
  std::vector<OpNormResult> norms;
  std::string detail;  // first violating atom, if any
};
MorphismReport is_morphism(const ModuleObj& source, const ModuleObj& target, const std::vector<Mat>& mats,
                           double tol = kMorphismTol);

bool is_mono(const Morphism& phi);
bool is_epi(const Morphism& phi);

// Sum of chi_{E_n} v_n over a partition of the atoms.
Element glue(const std::vector<std::vector<std::size_t>>& partition, const std::vector<Element>& elems);

// Fibers (R^|S|, l2) on every atom.
ModuleObj hilbert_module(const MeasureSpace& x, std::size_t s);
Element hilbert_basis_element(const ModuleObj& h, std::size_t s);

// L0(X; M) for a module M over Y, as a module over X x Y.
ModuleObj lb_module(const MeasureSpace& x, const ModuleObj& m);
// The simple element chi_E v: at atom (x, y) it is [x in E] v(y).
Element lb_simple(const ModuleObj& lb, const MeasureSpace& x, const std::vector<std::size_t>& e,
                  const Element& v);

// L0(X) itself: one-dimensional fibers with |t|.
ModuleObj free_module(const MeasureSpace& x);
ModuleObj zero_module(const MeasureSpace& x);

std::vector<Index> fiber_dims(const ModuleObj& m);

}  // namespace banmod

#endif  // BANMOD_MODCAT_HPP_

#ifndef BANMOD_FUNCTORS_HPP_
#define BANMOD_FUNCTORS_HPP_

#include <string>
#include <vector>

#include "banmod/category.hpp"
#include "banmod/limits.hpp"
#include "banmod/measure.hpp"
#include "banmod/modcat.hpp"

namespace banmod {

// Fiber at each atom: e x d matrices, row-major, with the operator norm.
ModuleObj hom_module(const ModuleObj& m, const ModuleObj& n);
// Hom(M, L0(X)).
ModuleObj dual(const ModuleObj& m);

// Hom(M, -)(phi) : T -> phi T.
Morphism hom_post(const ModuleObj& m, const Morphism& phi);
// Hom(-, N)(phi) : T -> T phi, from Hom(cod phi, N) to Hom(dom phi, N).
Morphism hom_pre(const ModuleObj& n, const Morphism& phi);
// The transpose of phi as a map between duals.
Morphism dual_map(const Morphism& phi);

struct InvImResult {
  ModuleObj module;  // over the source of tau
  MeasMorphism tau;
  ModuleObj base;    // over the target of tau

  Element lift(const Element& v) const;
};

InvImResult inverse_image(const MeasMorphism& tau, const ModuleObj& m);
Morphism inverse_image_morphism(const MeasMorphism& tau, const Morphism& phi);
Diagram inverse_image_diagram(const MeasMorphism& tau, const Diagram& d);

struct SquareReport {
  bool ok = true;
  int trials = 0;
  double max_residual = 0.0;
  std::string detail;
};

// Universal property of (X, tau* M) as the pullback of (Y, M) -> (Y, 0) <-
// (X, 0) in the category of pairs (space, module), tested on random cones.
SquareReport invim_pullback_square(const MeasMorphism& tau, const ModuleObj& m, int trials,
                                   unsigned long long seed, double tol = 1e-9);

// L0(X; M) and pi_Y^* M agree fiber for fiber; the identity between them.
Morphism lb_pullback_comparison(const MeasureSpace& x, const ModuleObj& m);

struct NatTrans {
  Diagram source;
  Diagram target;
  std::vector<Morphism> components;

  NatTrans(Diagram s, Diagram t, std::vector<Morphism> c);
  double naturality_residual() const;
};

struct NatKernel {
  Diagram kernels;
  NatTrans inclusion;
};
struct NatCokernel {
  Diagram cokernels;
  NatTrans projection;
};

NatKernel nat_kernel(const NatTrans& eta);
NatCokernel nat_cokernel(const NatTrans& eta);

}  // namespace banmod

#endif  // BANMOD_FUNCTORS_HPP_

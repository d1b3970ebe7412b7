#ifndef BANMOD_LIMITS_HPP_
#define BANMOD_LIMITS_HPP_

#include <map>
#include <utility>
#include <vector>

#include "banmod/category.hpp"
#include "banmod/modcat.hpp"

namespace banmod {

// An object with one distinguished morphism (kernel inclusion, cokernel
// projection, ...).
struct Universal {
  ModuleObj object;
  Morphism map;
};

struct Pullback {
  ModuleObj object;
  Morphism p_m;
  Morphism p_n;
};

// Morphism whose norm bound is known by construction (projections,
// inclusions of subspaces with the restricted norm, quotient maps).
Morphism structural(const ModuleObj& source, const ModuleObj& target, std::vector<Mat> mats);

Universal kernel(const Morphism& phi);
// Ker((phi - psi) / 2).
Universal equalizer(const Morphism& phi, const Morphism& psi);
// l-infinity sum with the coordinate projections as legs.
Cone product(const std::vector<ModuleObj>& ms);
Pullback pullback(const Morphism& phi, const Morphism& psi);

// Systems over finite posets are diagrams over FiniteCategory::poset. For an
// inverse system the arrow i -> j carries P: M_i -> M_j and the relation is
// read reversed (i >= j); for a direct system it carries phi_ij for i <= j.
Diagram inverse_system(const std::vector<std::vector<bool>>& leq, std::vector<ModuleObj> ms,
                       const std::map<std::pair<std::size_t, std::size_t>, Morphism>& p);
Diagram direct_system(const std::vector<std::vector<bool>>& leq, std::vector<ModuleObj> ms,
                      const std::map<std::pair<std::size_t, std::size_t>, Morphism>& phi);

// Threads of the l-infinity product compatible with every map.
Cone inverse_limit(const Diagram& system);

// Eq(a, b) inside the product over objects, as in the standard existence
// proof; legs are the projections restricted to the equalizer.
Cone limit_of_diagram(const Diagram& d);

// The standard diagrams of the specialized constructions and their cones.
Diagram parallel_pair_diagram(const Morphism& phi, const Morphism& psi);
Diagram discrete_diagram(const std::vector<ModuleObj>& ms);
Diagram cospan_diagram(const Morphism& phi, const Morphism& psi);
Diagram span_diagram(const Morphism& phi, const Morphism& psi);

Cone kernel_cone(const Universal& k, const Morphism& phi);
Cone equalizer_cone(const Universal& e, const Morphism& phi);
Cone pullback_cone(const Pullback& p, const Morphism& phi);

// Directed in the sense needed for inverse systems: any two objects receive
// arrows from a common object.
bool is_codirected(const FiniteCategory& c);
// Any two objects map to a common object.
bool is_directed(const FiniteCategory& c);

}  // namespace banmod

#endif  // BANMOD_LIMITS_HPP_

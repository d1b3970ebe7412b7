#ifndef BANMOD_COLIMITS_HPP_
#define BANMOD_COLIMITS_HPP_

#include <vector>

#include "banmod/category.hpp"
#include "banmod/limits.hpp"
#include "banmod/modcat.hpp"

namespace banmod {

struct Pushout {
  ModuleObj object;
  Morphism i_m;
  Morphism i_n;
};

// N / phi(M) on complement coordinates with the quotient norm.
Universal cokernel(const Morphism& phi);
// Coker((phi - psi) / 2).
Universal coequalizer(const Morphism& phi, const Morphism& psi);
// l1 sum with the coordinate injections as legs.
Cocone coproduct(const std::vector<ModuleObj>& ms);
Pushout pushout(const Morphism& phi, const Morphism& psi);

// Colimit of a direct system over a finite directed poset: the module at the
// top element with the system maps into it as legs.
Cocone direct_limit(const Diagram& system);
// inf { |v|_i : phi_i(v) = w } at one atom, over every index i.
double direct_limit_seminorm(const Diagram& system, const Cocone& limit, std::size_t atom, const Vec& w);

// M / Ker(phi) with the induced map into N, and the quotient projection.
struct Image {
  ModuleObj object;
  Morphism factor;      // M / Ker(phi) -> N
  Morphism projection;  // M -> M / Ker(phi)
};
Image image(const Morphism& phi);

// The range of phi with the restricted norm, the inclusion into N and phi
// corestricted.
struct Coimage {
  ModuleObj object;
  Morphism inclusion;    // range -> N
  Morphism corestrict;   // M -> range
};
Coimage coimage(const Morphism& phi);
// The canonical map M / Ker(phi) -> range(phi).
Morphism image_comparison(const Image& im, const Coimage& co);

// Coeq(a, b) out of the coproduct over objects, dual to limit_of_diagram.
Cocone colimit_of_diagram(const Diagram& d);

// Per atom, the subspace on which the fiber seminorm vanishes.
Mat seminorm_null_space(const NormExpr& n);
// Quotient by the null vectors of every fiber seminorm.
Universal metric_identification(const ModuleObj& m);

Cocone cokernel_cocone(const Universal& c, const Morphism& phi);
Cocone coequalizer_cocone(const Universal& c, const Morphism& phi);
Cocone pushout_cocone(const Pushout& p, const Morphism& phi);

}  // namespace banmod

#endif  // BANMOD_COLIMITS_HPP_

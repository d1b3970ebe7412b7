#ifndef BANMOD_RANDOM_HPP_
#define BANMOD_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "banmod/category.hpp"
#include "banmod/measure.hpp"
#include "banmod/modcat.hpp"

namespace banmod {

struct RandomConfig {
  int max_atoms = 4;
  int max_dim = 4;
  int min_dim = 0;
  std::vector<PNorm> ps = {PNorm::one, PNorm::two, PNorm::inf};
  bool unit_weights = false;
};

// Deterministic per-trial seed derived from (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi);
  int integer(int lo, int hi);
  bool coin(double p = 0.5);
  Mat mat(Index rows, Index cols);
  Vec vec(Index n);
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

MeasureSpace random_space(Rng& rng, const RandomConfig& cfg);
NormExpr random_leaf(Rng& rng, Index dim, const RandomConfig& cfg);
ModuleObj random_module(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg);
// Random matrices divided per atom by their operator norm, times a factor in
// [0.5, 1]. `rank_cap` < 0 means full random rank.
Morphism random_morphism(Rng& rng, const ModuleObj& source, const ModuleObj& target, int rank_cap = -1);
Element random_element(Rng& rng, const ModuleObj& m);
MeasMorphism random_meas_morphism(Rng& rng, const MeasureSpace& x, const MeasureSpace& y);

Diagram random_parallel_pair(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg);
Diagram random_discrete(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg, int max_objects = 4);
Diagram random_cospan(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg);
Diagram random_span(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg);
// Directed posets with at most four elements: chains, trees below a top
// element, and a diamond whose upper edge is an identity.
Diagram random_direct_system(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg);
Diagram random_inverse_system(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg);
// One of the shapes above, chosen uniformly.
Diagram random_diagram(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg);

}  // namespace banmod

#endif  // BANMOD_RANDOM_HPP_

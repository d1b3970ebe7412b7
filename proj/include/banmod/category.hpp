#ifndef BANMOD_CATEGORY_HPP_
#define BANMOD_CATEGORY_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "banmod/modcat.hpp"

namespace banmod {

struct IndexArrow {
  std::string id;
  std::size_t dom = 0;
  std::size_t cod = 0;
};

// A finite category given by objects, non-identity arrows and the composition
// table for every composable pair of non-identity arrows. Identity arrows are
// added automatically and occupy indices 0..n-1 (arrow k is id of object k).
class FiniteCategory {
 public:
  static constexpr std::size_t kIdentity = static_cast<std::size_t>(-1);

  // compose maps (g, f) with cod f = dom g to the index of g o f, where
  // indices refer to `arrows` (0-based, identities excluded); kIdentity marks
  // a composite that is an identity.
  FiniteCategory(std::vector<std::string> objects, std::vector<IndexArrow> arrows,
                 const std::map<std::pair<std::size_t, std::size_t>, std::size_t>& compose);

  static FiniteCategory discrete(std::size_t n);
  // a, b : 0 -> 1
  static FiniteCategory parallel_pair();
  // f : 0 -> 2, g : 1 -> 2
  static FiniteCategory cospan();
  // f : 0 -> 1, g : 0 -> 2
  static FiniteCategory span();
  // One arrow i -> j for each i < j with leq[i][j]; leq must be a partial order.
  static FiniteCategory poset(const std::vector<std::vector<bool>>& leq);

  std::size_t num_objects() const { return objects_.size(); }
  std::size_t num_arrows() const { return arrows_.size(); }
  const std::string& object(std::size_t k) const { return objects_[k]; }
  const std::vector<std::string>& objects() const { return objects_; }
  const IndexArrow& arrow(std::size_t k) const { return arrows_[k]; }
  const std::vector<IndexArrow>& arrows() const { return arrows_; }
  bool is_identity(std::size_t k) const { return k < objects_.size(); }
  std::size_t identity(std::size_t obj) const { return obj; }
  // g o f, or nullopt if not composable.
  std::optional<std::size_t> compose(std::size_t g, std::size_t f) const;
  std::vector<std::size_t> hom(std::size_t a, std::size_t b) const;
  // Every hom-set has at most one arrow.
  bool is_thin() const;

 private:
  std::vector<std::string> objects_;
  std::vector<IndexArrow> arrows_;
  std::vector<std::vector<long>> table_;  // table_[g][f], -1 when not composable
};

// A functor from a finite category to BanMod_X. Morphisms are given for the
// non-identity arrows; identities are filled in.
class Diagram {
 public:
  Diagram(FiniteCategory index, std::vector<ModuleObj> objects, std::vector<Morphism> arrows);

  const FiniteCategory& index() const { return index_; }
  const ModuleObj& object(std::size_t k) const { return objects_[k]; }
  const std::vector<ModuleObj>& objects() const { return objects_; }
  // Image of arrow k (identities included).
  const Morphism& map(std::size_t k) const { return maps_[k]; }
  const MeasureSpace& space() const { return objects_.front().space(); }

  // Largest per-atom entry deviation from functoriality.
  double functoriality_residual() const;

 private:
  FiniteCategory index_;
  std::vector<ModuleObj> objects_;
  std::vector<Morphism> maps_;
};

struct Cone {
  ModuleObj apex;
  std::vector<Morphism> legs;  // one per index object, apex -> D(i)
};

struct Cocone {
  ModuleObj nadir;
  std::vector<Morphism> legs;  // one per index object, D(i) -> nadir
};

// max over arrows f : i -> j and atoms of |D(f) leg_i - leg_j|.
double cone_residual(const Diagram& d, const Cone& c);
double cocone_residual(const Diagram& d, const Cocone& c);

double max_entry_diff(const Mat& a, const Mat& b);

}  // namespace banmod

#endif  // BANMOD_CATEGORY_HPP_

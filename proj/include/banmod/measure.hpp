#ifndef BANMOD_MEASURE_HPP_
#define BANMOD_MEASURE_HPP_

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace banmod {

struct Atom {
  std::string id;
  double mass = 1.0;
};

// A finite atomic measure space. Atom order is canonical and fixed; every
// mass is strictly positive and finite, so a.e.-equality is per-atom equality.
class MeasureSpace {
 public:
  explicit MeasureSpace(std::vector<Atom> atoms);

  std::size_t size() const { return atoms_->size(); }
  const Atom& atom(std::size_t k) const { return (*atoms_)[k]; }
  const std::vector<Atom>& atoms() const { return *atoms_; }
  double mass(std::size_t k) const { return (*atoms_)[k].mass; }
  double total_mass() const;
  std::size_t index_of(const std::string& id) const;

  // Weight of atom k in the finite reference measure used by the L0 metric.
  static double reference_weight(std::size_t k);

  friend bool operator==(const MeasureSpace& a, const MeasureSpace& b);

 private:
  std::shared_ptr<const std::vector<Atom>> atoms_;
};

MeasureSpace dirac_point();
MeasureSpace product_space(const MeasureSpace& x, const MeasureSpace& y);

// Real-valued function on the atoms: an element of the ring L0(X).
struct L0Fun {
  MeasureSpace space;
  std::vector<double> values;

  L0Fun(MeasureSpace s, std::vector<double> v);
  static L0Fun constant(const MeasureSpace& s, double c);
  static L0Fun indicator(const MeasureSpace& s, const std::vector<std::size_t>& atoms);
  double operator[](std::size_t k) const { return values[k]; }
};

// Extended-real valued function: an element of the lattice L0_ext(X).
struct L0ExtFun {
  MeasureSpace space;
  std::vector<double> values;

  L0ExtFun(MeasureSpace s, std::vector<double> v);
};

// d(f, g) = sum_k w_k min(|f_k - g_k|, 1), w_k = 2^-(k+1).
double l0_distance(const L0Fun& f, const L0Fun& g);

L0ExtFun lattice_sup(const std::vector<L0ExtFun>& fs);
L0ExtFun lattice_inf(const std::vector<L0ExtFun>& fs);

class MeasMorphism {
 public:
  MeasMorphism(MeasureSpace source, MeasureSpace target, std::vector<std::size_t> atom_map);
  MeasMorphism(MeasureSpace source, MeasureSpace target,
               const std::map<std::string, std::string>& by_id);

  static MeasMorphism identity(const MeasureSpace& x);

  const MeasureSpace& source() const { return source_; }
  const MeasureSpace& target() const { return target_; }
  std::size_t operator()(std::size_t x) const { return map_[x]; }
  const std::vector<std::size_t>& atom_map() const { return map_; }

 private:
  MeasureSpace source_;
  MeasureSpace target_;
  std::vector<std::size_t> map_;
};

// sigma o tau.
MeasMorphism compose(const MeasMorphism& sigma, const MeasMorphism& tau);

struct Pushforward {
  std::vector<double> masses;
  bool absolutely_continuous = true;
};
Pushforward pushforward(const MeasMorphism& tau);

}  // namespace banmod

#endif  // BANMOD_MEASURE_HPP_

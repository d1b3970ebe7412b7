#include "doctest.h"

#include "banmod/error.hpp"
#include "banmod/measure.hpp"
#include "support.hpp"

using namespace banmod;

namespace {

MeasureSpace ab() { return MeasureSpace({Atom{"a", 1.0}, Atom{"b", 2.0}}); }

}  // namespace

TEST_CASE("l0 distance examples") {
  const MeasureSpace x = ab();
  CHECK(l0_distance(L0Fun(x, {3.0, 0.5}), L0Fun(x, {0.0, 0.0})) == doctest::Approx(0.625).epsilon(1e-15));
  L0Fun f(x, {1.5, -2.0});
  CHECK(l0_distance(f, f) == 0.0);
  const MeasureSpace a({Atom{"a", 1.0}});
  CHECK(l0_distance(L0Fun(a, {10.0}), L0Fun(a, {0.0})) == 0.5);
  const MeasureSpace p = dirac_point();
  CHECK(l0_distance(L0Fun(p, {0.3}), L0Fun(p, {0.1})) == doctest::Approx(0.1));
}

TEST_CASE("l0 distance is a metric on random triples") {
  testing_support::Rng rng(11);
  std::vector<Atom> atoms;
  for (int k = 0; k < 5; ++k) atoms.push_back(Atom{"x" + std::to_string(k), rng.uniform(0.1, 3.0)});
  const MeasureSpace x(atoms);
  for (int trial = 0; trial < 300; ++trial) {
    auto draw = [&] {
      std::vector<double> v(5);
      for (double& e : v) e = rng.uniform(-2.0, 2.0);
      return L0Fun(x, v);
    };
    L0Fun f = draw(), g = draw(), h = draw();
    CHECK(l0_distance(f, g) == doctest::Approx(l0_distance(g, f)).epsilon(1e-15));
    CHECK(l0_distance(f, h) <= l0_distance(f, g) + l0_distance(g, h) + 1e-15);
    CHECK(l0_distance(f, g) > 0.0);
  }
}

TEST_CASE("l0 distance rejects mismatched spaces") {
  CHECK_THROWS_AS(l0_distance(L0Fun(ab(), {0, 0}), L0Fun(dirac_point(), {0})), Error);
}

TEST_CASE("lattice operations") {
  const MeasureSpace x = ab();
  const double inf = std::numeric_limits<double>::infinity();
  L0ExtFun s = lattice_sup({L0ExtFun(x, {1, 5}), L0ExtFun(x, {2, 3})});
  CHECK(s.values == std::vector<double>{2, 5});
  L0ExtFun i = lattice_inf({L0ExtFun(x, {inf, 0}), L0ExtFun(x, {1, -inf})});
  CHECK(i.values == std::vector<double>{1, -inf});
  L0ExtFun f(x, {0.5, -1});
  CHECK(lattice_sup({f}).values == f.values);
  CHECK(lattice_sup({f, f}).values == f.values);
  CHECK_THROWS_AS(lattice_sup({}), Error);
  CHECK_THROWS_AS(lattice_inf({f, L0ExtFun(dirac_point(), {0})}), Error);
}

TEST_CASE("lattice laws on random families") {
  testing_support::Rng rng(3);
  const MeasureSpace x = ab();
  for (int trial = 0; trial < 100; ++trial) {
    L0ExtFun f(x, {rng.uniform(-3, 3), rng.uniform(-3, 3)});
    L0ExtFun g(x, {rng.uniform(-3, 3), rng.uniform(-3, 3)});
    L0ExtFun h(x, {rng.uniform(-3, 3), rng.uniform(-3, 3)});
    CHECK(lattice_sup({f, g}).values == lattice_sup({g, f}).values);
    CHECK(lattice_sup({lattice_sup({f, g}), h}).values == lattice_sup({f, lattice_sup({g, h})}).values);
    CHECK(lattice_inf({lattice_inf({f, g}), h}).values == lattice_inf({f, lattice_inf({g, h})}).values);
    L0ExtFun s = lattice_sup({f, g, h});
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(s.values[k] >= f.values[k]);
      CHECK(s.values[k] >= g.values[k]);
      CHECK(s.values[k] >= h.values[k]);
    }
  }
}

TEST_CASE("pushforward examples") {
  const MeasureSpace x = ab();
  const MeasureSpace y({Atom{"c", 5.0}});
  Pushforward p = pushforward(MeasMorphism(x, y, {{"a", "c"}, {"b", "c"}}));
  CHECK(p.masses == std::vector<double>{3.0});
  CHECK(p.absolutely_continuous);
  CHECK(pushforward(MeasMorphism::identity(x)).masses == std::vector<double>{1.0, 2.0});
  const MeasureSpace one({Atom{"a", 1.0}});
  const MeasureSpace cd({Atom{"c", 1.0}, Atom{"d", 1.0}});
  CHECK(pushforward(MeasMorphism(one, cd, {{"a", "c"}})).masses == std::vector<double>{1.0, 0.0});
}

TEST_CASE("pushforward composes") {
  const MeasureSpace x({Atom{"a", 1}, Atom{"b", 2}, Atom{"c", 0.5}});
  const MeasureSpace y({Atom{"p", 1}, Atom{"q", 1}});
  const MeasureSpace z({Atom{"r", 4}});
  MeasMorphism tau(x, y, std::vector<std::size_t>{0, 1, 1});
  MeasMorphism sigma(y, z, std::vector<std::size_t>{0, 0});
  Pushforward direct = pushforward(compose(sigma, tau));
  Pushforward inner = pushforward(tau);
  std::vector<double> staged(z.size(), 0.0);
  for (std::size_t k = 0; k < y.size(); ++k) staged[sigma(k)] += inner.masses[k];
  CHECK(direct.masses == staged);
}

TEST_CASE("measure morphisms must be total and land in the target") {
  const MeasureSpace x = ab();
  CHECK_THROWS_AS(MeasMorphism(x, dirac_point(), std::vector<std::size_t>{0}), Error);
  CHECK_THROWS_AS(MeasMorphism(x, dirac_point(), std::vector<std::size_t>{0, 1}), Error);
  CHECK_THROWS_AS(MeasMorphism(x, dirac_point(), std::map<std::string, std::string>{{"a", "p"}}), Error);
}

TEST_CASE("measure spaces reject bad atoms") {
  CHECK_THROWS_AS(MeasureSpace({Atom{"a", 0.0}}), Error);
  CHECK_THROWS_AS(MeasureSpace({Atom{"a", -1.0}}), Error);
  CHECK_THROWS_AS(MeasureSpace({Atom{"a", 1.0}, Atom{"a", 2.0}}), Error);
}

TEST_CASE("product spaces") {
  const MeasureSpace x = ab();
  const MeasureSpace c({Atom{"c", 3.0}});
  MeasureSpace xc = product_space(x, c);
  REQUIRE(xc.size() == 2);
  CHECK(xc.atom(0).id == "(a,c)");
  CHECK(xc.mass(0) == 3.0);
  CHECK(xc.atom(1).id == "(b,c)");
  CHECK(xc.mass(1) == 6.0);
  MeasureSpace xp = product_space(x, dirac_point());
  CHECK(xp.size() == x.size());
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(xp.mass(k) == x.mass(k));
  CHECK(product_space(dirac_point(), dirac_point()).size() == 1);
  const MeasureSpace y({Atom{"u", 0.5}, Atom{"v", 4.0}, Atom{"w", 1.5}});
  MeasureSpace xy = product_space(x, y);
  CHECK(xy.size() == 6);
  CHECK(xy.total_mass() == doctest::Approx(x.total_mass() * y.total_mass()));
  CHECK(dirac_point().size() == 1);
  CHECK(dirac_point().mass(0) == 1.0);
}

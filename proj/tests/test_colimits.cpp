#include <cmath>
#include <map>

#include <Eigen/LU>

#include "doctest.h"

#include "banmod/audit.hpp"
#include "banmod/colimits.hpp"
#include "banmod/error.hpp"
#include "banmod/random.hpp"
#include "support.hpp"

using namespace banmod;
using testing_support::vec;

namespace {

MeasureSpace ab() { return MeasureSpace({Atom{"a", 1.0}, Atom{"b", 3.0}}); }

ModuleObj uniform(const MeasureSpace& x, PNorm p, Index d) {
  return ModuleObj(x, std::vector<NormExpr>(x.size(), lp(p, d)));
}

Morphism same_matrix(const ModuleObj& m, const ModuleObj& n, const Mat& a) {
  return Morphism::checked(m, n, std::vector<Mat>(m.size(), a));
}

// inf over t on a grid; the minimizers of the examples lie in [-4, 4].
double grid_min(double (*f)(double, double, double), double a, double b) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = -40000; k <= 40000; ++k) best = std::min(best, f(a, b, k * 1e-4));
  return best;
}

}  // namespace

TEST_CASE("cokernel examples") {
  const ModuleObj n = uniform(ab(), PNorm::two, 2);
  const ModuleObj line = uniform(ab(), PNorm::two, 1);

  Mat rot(2, 2);
  rot << 0.6, -0.8, 0.8, 0.6;
  CHECK(cokernel(same_matrix(n, n, rot)).object.is_zero());

  const Universal all = cokernel(Morphism::zero(line, n));
  CHECK(all.object.total_dim() == n.total_dim());
  CHECK(check_isometric_iso(all.map).ok);

  Mat col(2, 1);
  col << 1, 0;
  const Universal c = cokernel(same_matrix(line, n, col));
  for (std::size_t a = 0; a < n.size(); ++a) {
    REQUIRE(c.object.dim(a) == 1);
    // Orthogonal projection oracle: the distance from (3, 4) to span{(1, 0)}.
    const Vec q = c.map.mat(a) * vec({3, 4});
    CHECK(eval_norm(c.object.fiber(a), q) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(c.map.bound(a).upper <= 1.0 + 1e-9);
  }
  CHECK(is_epi(c.map));
}

TEST_CASE("coequalizer examples") {
  const ModuleObj m = uniform(ab(), PNorm::one, 2);
  Mat d(2, 2);
  d << 1, 0, 0, -1;
  const Morphism id = Morphism::identity(m);
  const Morphism flip = same_matrix(m, m, d);

  CHECK(coequalizer(flip, flip).object.total_dim() == m.total_dim());
  const ModuleObj line = uniform(ab(), PNorm::two, 1);
  CHECK(coequalizer(Morphism::identity(line), Morphism::zero(line, line)).object.is_zero());

  const Universal q = coequalizer(id, flip);
  Rng rng(8);
  for (std::size_t a = 0; a < m.size(); ++a) {
    REQUIRE(q.object.dim(a) == 1);
    CHECK(max_entry_diff(q.map.mat(a) * id.mat(a), q.map.mat(a) * flip.mat(a)) <= 1e-15);
    for (int t = 0; t < 20; ++t) {
      const double x = rng.uniform(-3, 3), y = rng.uniform(-3, 3);
      CHECK(eval_norm(q.object.fiber(a), q.map.mat(a) * vec({x, y})) == doctest::Approx(std::abs(x)).epsilon(1e-9));
    }
  }
  CHECK(is_epi(q.map));
  CHECK_THROWS_AS(coequalizer(id, Morphism::zero(m, line)), Error);
}

TEST_CASE("coproduct examples") {
  const MeasureSpace x = ab();
  const ModuleObj m = uniform(x, PNorm::inf, 2);
  const ModuleObj n = uniform(x, PNorm::two, 1);
  const Cocone c = coproduct({m, n});
  for (std::size_t a = 0; a < x.size(); ++a) {
    CHECK(eval_norm(c.nadir.fiber(a), vec({2, -1, 3})) == doctest::Approx(5.0).epsilon(1e-15));
  }
  CHECK(check_isometric_iso(coproduct({m}).legs[0]).ok);
  CHECK(coproduct({zero_module(x)}).nadir.is_zero());
}

TEST_CASE("coproduct injections are isometric and the norm is the per-atom sum") {
  Rng rng(15);
  RandomConfig cfg;
  cfg.min_dim = 1;
  for (int t = 0; t < 100; ++t) {
    const MeasureSpace x = random_space(rng, cfg);
    std::vector<ModuleObj> ms;
    const int k = rng.integer(1, 4);
    for (int i = 0; i < k; ++i) ms.push_back(random_module(rng, x, cfg));
    const Cocone c = coproduct(ms);
    std::vector<Element> parts;
    for (const ModuleObj& m : ms) parts.push_back(random_element(rng, m));
    for (std::size_t a = 0; a < x.size(); ++a) {
      Vec sum = Vec::Zero(c.nadir.dim(a));
      double oracle = 0.0;
      for (std::size_t i = 0; i < ms.size(); ++i) {
        const Vec img = c.legs[i].mat(a) * parts[i].vecs[a];
        const double own = eval_norm(ms[i].fiber(a), parts[i].vecs[a]);
        CHECK(std::abs(eval_norm(c.nadir.fiber(a), img) - own) <= 1e-12);
        sum += img;
        oracle += own;
      }
      CHECK(std::abs(eval_norm(c.nadir.fiber(a), sum) - oracle) <= 1e-12);
    }
  }
}

TEST_CASE("pushout examples") {
  const MeasureSpace x = ab();
  const ModuleObj m = uniform(x, PNorm::two, 2);
  const ModuleObj n = uniform(x, PNorm::inf, 1);
  const ModuleObj z = zero_module(x);
  CHECK(pushout(Morphism::zero(z, m), Morphism::zero(z, n)).object.total_dim() == m.total_dim() + n.total_dim());

  const ModuleObj line = uniform(x, PNorm::two, 1);
  const Morphism id = Morphism::identity(line);
  const Pushout po = pushout(id, id);
  auto objective = [](double a, double b, double t) { return std::abs(a - t) + std::abs(b + t); };
  for (std::size_t a = 0; a < x.size(); ++a) {
    REQUIRE(po.object.dim(a) == 1);
    CHECK(max_entry_diff(po.i_m.mat(a), po.i_n.mat(a)) <= 1e-15);
    for (const auto& [p, q] : std::vector<std::pair<double, double>>{{1.0, 2.0}, {-1.5, 0.5}, {0.25, -3.0}}) {
      const Vec w = po.i_m.mat(a) * vec({p}) + po.i_n.mat(a) * vec({q});
      const double oracle = grid_min(objective, p, q);
      CHECK(eval_norm(po.object.fiber(a), w) == doctest::Approx(oracle).epsilon(1e-9));
      CHECK(oracle == doctest::Approx(std::abs(p + q)).epsilon(1e-9));
    }
  }

  Rng rng(4);
  const ModuleObj q = uniform(x, PNorm::one, 2);
  const Morphism psi = Morphism::checked(q, uniform(x, PNorm::one, 2), std::vector<Mat>(x.size(), Mat::Identity(2, 2)));
  const Morphism phi = random_morphism(rng, q, m);
  const Pushout p2 = pushout(phi, psi);
  for (std::size_t a = 0; a < x.size(); ++a) {
    CHECK(p2.object.dim(a) == m.dim(a));
    CHECK(max_entry_diff(p2.i_m.mat(a) * phi.mat(a), p2.i_n.mat(a) * psi.mat(a)) <= 1e-14);
  }
  CHECK_THROWS_AS(pushout(phi, id), Error);
}

TEST_CASE("direct limit examples") {
  const ModuleObj m(dirac_point(), {lp(PNorm::one, 2)});
  std::vector<std::vector<bool>> one(1, std::vector<bool>(1, true));
  const Cocone single = direct_limit(direct_system(one, {m}, {}));
  CHECK(check_isometric_iso(single.legs[0]).ok);

  std::vector<std::vector<bool>> leq = {{true, true, true}, {false, true, true}, {false, false, true}};
  std::map<std::pair<std::size_t, std::size_t>, Morphism> ids;
  for (auto [i, j] : std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}, {0, 2}}) {
    ids.emplace(std::make_pair(i, j), Morphism::identity(m));
  }
  const Cocone flat = direct_limit(direct_system(leq, {m, m, m}, ids));
  for (const Morphism& leg : flat.legs) CHECK(check_isometric_iso(leg).ok);
}

TEST_CASE("direct limit of an inclusion chain") {
  const ModuleObj m1(dirac_point(), {lp(PNorm::two, 1)});
  const ModuleObj m2(dirac_point(), {lp(PNorm::two, 2)});
  Mat e(2, 1);
  e << 1, 0;
  std::vector<std::vector<bool>> leq = {{true, true}, {false, true}};
  std::map<std::pair<std::size_t, std::size_t>, Morphism> incl;
  incl.emplace(std::make_pair(0, 1), Morphism::checked(m1, m2, {e}));
  const Diagram sys = direct_system(leq, {m1, m2}, incl);
  const Cocone lim = direct_limit(sys);
  REQUIRE(lim.nadir.dim(0) == 2);
  CHECK(cocone_residual(sys, lim) <= 1e-15);
  CHECK(check_isometric_iso(lim.legs[1]).ok);
  CHECK(max_entry_diff(lim.legs[0].mat(0), lim.legs[1].mat(0) * e) <= 1e-15);

  // Affine infimum by projection: the only representatives of w are w itself
  // at the top and, when w lies on the first axis, its coordinate below.
  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    const Vec w = rng.vec(2);
    const Vec in_top = lim.legs[1].mat(0) * w;
    CHECK(direct_limit_seminorm(sys, lim, 0, in_top) == doctest::Approx(w.norm()).epsilon(1e-9));
  }
}

TEST_CASE("image and coimage") {
  const ModuleObj m = uniform(ab(), PNorm::inf, 2);
  const ModuleObj r = uniform(ab(), PNorm::two, 1);
  Mat row(1, 2);
  row << 1, 0;
  const Morphism phi = same_matrix(m, r, row);
  const Image im = image(phi);
  Rng rng(10);
  for (std::size_t a = 0; a < m.size(); ++a) {
    REQUIRE(im.object.dim(a) == 1);
    CHECK(max_entry_diff(im.factor.mat(a) * im.projection.mat(a), phi.mat(a)) <= 1e-15);
    for (int t = 0; t < 10; ++t) {
      const Vec v = rng.vec(2);
      // inf over the second coordinate of max(|v1|, |v2 + s|) is |v1|.
      CHECK(eval_norm(im.object.fiber(a), im.projection.mat(a) * v) == doctest::Approx(std::abs(v(0))).epsilon(1e-9));
    }
  }

  const Coimage co = coimage(phi);
  for (std::size_t a = 0; a < m.size(); ++a) {
    CHECK(max_entry_diff(co.inclusion.mat(a) * co.corestrict.mat(a), phi.mat(a)) <= 1e-15);
  }
  const Morphism cmp = image_comparison(im, co);
  CHECK(is_mono(cmp));
  CHECK(is_epi(cmp));

  Mat rot(2, 2);
  rot << 0.6, -0.8, 0.8, 0.6;
  const ModuleObj h = uniform(ab(), PNorm::two, 2);
  CHECK(image(same_matrix(h, h, rot)).object.total_dim() == h.total_dim());
  CHECK(image(Morphism::zero(m, r)).object.is_zero());
}

TEST_CASE("image factorization on random maps") {
  Rng rng(31);
  RandomConfig cfg;
  for (int t = 0; t < 40; ++t) {
    const MeasureSpace x = random_space(rng, cfg);
    const ModuleObj m = random_module(rng, x, cfg);
    const ModuleObj n = random_module(rng, x, cfg);
    const Morphism phi = random_morphism(rng, m, n, rng.integer(0, 3));
    const Image im = image(phi);
    const Coimage co = coimage(phi);
    for (std::size_t a = 0; a < x.size(); ++a) {
      CHECK(max_entry_diff(im.factor.mat(a) * im.projection.mat(a), phi.mat(a)) <= 1e-12);
      CHECK(max_entry_diff(co.inclusion.mat(a) * co.corestrict.mat(a), phi.mat(a)) <= 1e-12);
      CHECK(im.projection.bound(a).upper <= 1.0 + 1e-9);
    }
    const Morphism cmp = image_comparison(im, co);
    CHECK(is_mono(cmp));
    CHECK(is_epi(cmp));
  }
}

TEST_CASE("metric identification") {
  const MeasureSpace x = ab();
  const ModuleObj normed = uniform(x, PNorm::two, 2);
  const Universal same = metric_identification(normed);
  CHECK(same.object.total_dim() == normed.total_dim());
  CHECK(check_isometric_iso(same.map).ok);

  Mat first(1, 2);
  first << 1, 0;
  const NormExpr semi = compose_linear(first, lp(PNorm::two, 1), true);
  const Mat null = seminorm_null_space(semi);
  REQUIRE(null.cols() == 1);
  CHECK(std::abs(null(0, 0)) <= 1e-15);
  const ModuleObj sm(x, {semi, semi});
  const Universal q = metric_identification(sm);
  for (std::size_t a = 0; a < x.size(); ++a) {
    REQUIRE(q.object.dim(a) == 1);
    CHECK(eval_norm(q.object.fiber(a), q.map.mat(a) * vec({-2, 7})) == doctest::Approx(2.0).epsilon(1e-12));
  }

  const NormExpr zero = compose_linear(Mat::Zero(1, 2), lp(PNorm::one, 1), true);
  CHECK(metric_identification(ModuleObj(x, {zero, zero})).object.is_zero());
}

TEST_CASE("colimit engine agrees with the specialized constructions") {
  Rng rng(41);
  RandomConfig cfg;
  for (int t = 0; t < 10; ++t) {
    const MeasureSpace x = random_space(rng, cfg);
    const ModuleObj m = random_module(rng, x, cfg);
    const ModuleObj n = random_module(rng, x, cfg);
    const Morphism phi = random_morphism(rng, m, n);
    const Morphism psi = random_morphism(rng, m, n);

    const Cocone spec = coequalizer_cocone(coequalizer(phi, psi), phi);
    const Mediator med = mediating_morphism(spec, colimit_of_diagram(parallel_pair_diagram(phi, psi)));
    CHECK(med.residual <= 1e-9);
    CHECK(check_isometric_iso(med.map).ok);

    const Mediator cm = mediating_morphism(coproduct({m, n}), colimit_of_diagram(discrete_diagram({m, n})));
    CHECK(check_isometric_iso(cm.map).ok);

    const ModuleObj q = random_module(rng, x, cfg);
    const Morphism f = random_morphism(rng, q, m);
    const Morphism g = random_morphism(rng, q, n);
    const Mediator pm = mediating_morphism(pushout_cocone(pushout(f, g), f), colimit_of_diagram(span_diagram(f, g)));
    CHECK(check_isometric_iso(pm.map).ok);
  }
}

TEST_CASE("constructed colimits are couniversal") {
  Rng rng(7);
  RandomConfig cfg;
  const MeasureSpace x = random_space(rng, cfg);
  const ModuleObj m = random_module(rng, x, cfg);
  const ModuleObj n = random_module(rng, x, cfg);
  const Morphism phi = random_morphism(rng, m, n, 1);
  const Diagram d = parallel_pair_diagram(phi, Morphism::zero(m, n));
  const AuditReport rep = check_couniversal(d, cokernel_cocone(cokernel(phi), phi), 30, 9);
  CHECK(rep.passed);
  CHECK(rep.uniqueness);
  CHECK(rep.max_residual <= 1e-9);
}

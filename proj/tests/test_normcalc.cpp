#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "doctest.h"

#include "banmod/error.hpp"
#include "banmod/linalg.hpp"
#include "banmod/norm_expr.hpp"
#include "banmod/normcalc.hpp"
#include "banmod/simplex.hpp"
#include "support.hpp"

using namespace banmod;
using testing_support::Rng;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

// Weighted lp by hand.
double lp_oracle(PNorm p, const Vec& w, const Vec& v) {
  Vec a = (w.array() * v.array()).abs();
  switch (p) {
    case PNorm::one: return a.sum();
    case PNorm::two: return std::sqrt(a.squaredNorm());
    case PNorm::inf: return a.size() ? a.maxCoeff() : 0.0;
  }
  return 0.0;
}

// min over t on [-r, r] with the given step, then a golden-section polish is
// NOT applied: the grid value is the oracle.
double grid_1d(const NormExpr& n, const Vec& b, const Vec& v, double r, double step) {
  double best = std::numeric_limits<double>::infinity();
  const long steps = static_cast<long>(std::llround(2 * r / step));
  for (long i = 0; i <= steps; ++i) {
    const double t = -r + static_cast<double>(i) * step;
    best = std::min(best, eval_norm(n, v + t * b));
  }
  return best;
}

// Coarse-to-fine grid over a 2-dim coefficient box.
double grid_2d(const NormExpr& n, const Mat& b, const Vec& v, double r) {
  double best = std::numeric_limits<double>::infinity();
  double cx = 0, cy = 0;
  for (double h = r / 50; h > 1e-5; h /= 10) {
    double bx = cx, by = cy;
    for (int i = -60; i <= 60; ++i) {
      for (int j = -60; j <= 60; ++j) {
        const double x = cx + i * h, y = cy + j * h;
        const double f = eval_norm(n, v + x * b.col(0) + y * b.col(1));
        if (f < best) {
          best = f;
          bx = x;
          by = y;
        }
      }
    }
    cx = bx;
    cy = by;
  }
  return best;
}

// Extreme points of the unit ball of a weighted l1 / linf leaf.
std::vector<Vec> leaf_vertices(PNorm p, const Vec& w) {
  const Index d = w.size();
  std::vector<Vec> out;
  if (p == PNorm::one) {
    for (Index j = 0; j < d; ++j) {
      Vec e = Vec::Zero(d);
      e(j) = 1.0 / w(j);
      out.push_back(e);
    }
  } else {
    for (long mask = 0; mask < (1L << d); ++mask) {
      Vec s(d);
      for (Index j = 0; j < d; ++j) s(j) = ((mask >> j) & 1) ? 1.0 / w(j) : -1.0 / w(j);
      out.push_back(s);
    }
  }
  return out;
}

PNorm random_p(Rng& rng) {
  switch (rng.integer(0, 2)) {
    case 0: return PNorm::one;
    case 1: return PNorm::two;
    default: return PNorm::inf;
  }
}

}  // namespace

TEST_CASE("dual index") {
  CHECK(dual_index(PNorm::one) == PNorm::inf);
  CHECK(dual_index(PNorm::two) == PNorm::two);
  CHECK(dual_index(PNorm::inf) == PNorm::one);
}

TEST_CASE("eval examples") {
  CHECK(eval_norm(lp(PNorm::two, 2), v2(3, 4)) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(eval_norm(sup_of({lp(PNorm::two, 1), lp(PNorm::two, 1)}), v2(2, -3)) == 3.0);
  Mat b(2, 1);
  b << 1, 0;
  Evaluation q = evaluate(quotient_of(lp(PNorm::two, 2), b), v2(3, 4));
  CHECK(q.value == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(q.exact);
  CHECK(eval_norm(sum_of({lp(PNorm::one, 1), lp(PNorm::inf, 2)}), v3(-1, 2, -5)) == 6.0);
}

TEST_CASE("eval rejects bad input") {
  CHECK_THROWS_AS(eval_norm(lp(PNorm::two, 2), v3(1, 2, 3)), Error);
  Mat dep(2, 2);
  dep << 1, 2, 1, 2;
  CHECK_THROWS_AS(quotient_of(lp(PNorm::two, 2), dep), Error);
  CHECK_THROWS_AS(lp(PNorm::one, v2(1, 0)), Error);
  CHECK_THROWS_AS(lp(PNorm::one, v2(1, -2)), Error);
}

TEST_CASE("weighted leaves match the hand formula") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = rng.integer(1, 5);
    const PNorm p = random_p(rng);
    const Vec w = rng.weights(d);
    const Vec v = rng.vec(d, 3.0);
    CHECK(eval_norm(lp(p, w), v) == doctest::Approx(lp_oracle(p, w, v)).epsilon(1e-14));
  }
}

TEST_CASE("null space examples") {
  Mat a(1, 2);
  a << 1, 0;
  Mat n = null_space(a);
  REQUIRE(n.cols() == 1);
  CHECK(std::abs(n(0, 0)) < 1e-15);
  CHECK(n(1, 0) == doctest::Approx(1.0));
  Mat inv(2, 2);
  inv << 2, 1, 1, 1;
  CHECK(null_space(inv).cols() == 0);
  CHECK(null_space(Mat::Zero(2, 2)).cols() == 2);
}

TEST_CASE("null space against elimination on random rank-deficient maps") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Index r = rng.integer(1, 3), d = rng.integer(r, 5), e = rng.integer(r, 4);
    Mat a = rng.mat(e, r) * rng.mat(r, d);
    Mat n = null_space(a);
    CHECK(n.cols() == d - r);
    if (n.cols() > 0) {
      CHECK((a * n).norm() < 1e-12);
      CHECK((n.transpose() * n - Mat::Identity(n.cols(), n.cols())).norm() < 1e-12);
    }
  }
}

TEST_CASE("simplex examples") {
  LpBuilder lp1;
  Index x = lp1.add_var(true);
  lp1.add_row({{x, 1.0}}, Sense::ge, 3.0);
  lp1.set_objective({{x, 1.0}});
  LpResult r = lp1.minimize();
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.value == doctest::Approx(3.0).epsilon(1e-12));

  LpBuilder bad;
  Index y = bad.add_var(false);
  bad.add_row({{y, 1.0}}, Sense::le, -1.0);
  bad.set_objective({{y, 1.0}});
  CHECK(bad.minimize().status == LpStatus::infeasible);

  LpBuilder unb;
  Index z = unb.add_var(true);
  unb.set_objective({{z, 1.0}});
  CHECK(unb.minimize().status == LpStatus::unbounded);

  Mat b(2, 1);
  b << 1, 1;
  DistResult d = dist_to_subspace(lp(PNorm::one, 2), b, v2(1, -1));
  CHECK(d.route == DistRoute::simplex);
  CHECK(d.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("simplex agrees with vertex enumeration on random bounded LPs") {
  // min c^T x over a box intersected with one half-space; vertices by brute force.
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec c = rng.vec(2);
    const Vec a = rng.vec(2);
    const double rhs = rng.uniform(-0.5, 0.5);
    LpBuilder b;
    Index x0 = b.add_var(true), x1 = b.add_var(true);
    b.add_row({{x0, 1.0}}, Sense::le, 1.0);
    b.add_row({{x0, 1.0}}, Sense::ge, -1.0);
    b.add_row({{x1, 1.0}}, Sense::le, 1.0);
    b.add_row({{x1, 1.0}}, Sense::ge, -1.0);
    b.add_row({{x0, a(0)}, {x1, a(1)}}, Sense::le, rhs);
    b.set_objective({{x0, c(0)}, {x1, c(1)}});
    LpResult r = b.minimize();
    // Candidate vertices: pairwise intersections of the five lines.
    std::vector<std::pair<Vec, double>> lines = {
        {v2(1, 0), 1}, {v2(1, 0), -1}, {v2(0, 1), 1}, {v2(0, 1), -1}, {a, rhs}};
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lines.size(); ++i) {
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        Mat m(2, 2);
        m.row(0) = lines[i].first.transpose();
        m.row(1) = lines[j].first.transpose();
        if (std::abs(m.determinant()) < 1e-12) continue;
        Vec p = m.inverse() * v2(lines[i].second, lines[j].second);
        if (std::abs(p(0)) > 1 + 1e-12 || std::abs(p(1)) > 1 + 1e-12 || a.dot(p) > rhs + 1e-12) continue;
        best = std::min(best, c.dot(p));
      }
    }
    if (std::isinf(best)) {
      CHECK(r.status == LpStatus::infeasible);
    } else {
      REQUIRE(r.status == LpStatus::optimal);
      CHECK(r.value == doctest::Approx(best).epsilon(1e-10));
    }
  }
}

TEST_CASE("dist to subspace examples") {
  Mat b(2, 1);
  b << 1, 0;
  CHECK(dist_to_subspace(lp(PNorm::two, 2), b, v2(3, 4)).value == doctest::Approx(4.0).epsilon(1e-12));
  Mat full = Mat::Identity(2, 2);
  CHECK(dist_to_subspace(lp(PNorm::inf, v2(2, 3)), full, v2(7, -1)).value < 1e-12);
  Mat diag(2, 1);
  diag << 1, 1;
  const NormExpr linf = lp(PNorm::inf, 2);
  DistResult d = dist_to_subspace(linf, diag, v2(1, -1));
  CHECK(d.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.value == doctest::Approx(grid_1d(linf, diag.col(0), v2(1, -1), 3.0, 1e-4)).epsilon(1e-3));
}

TEST_CASE("simplex distances agree with grid search and the subgradient route") {
  Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = rng.integer(2, 3);
    const PNorm p = rng.integer(0, 1) ? PNorm::one : PNorm::inf;
    const NormExpr nrm = lp(p, rng.weights(n));
    const Vec v = rng.vec(n, 2.0);
    Mat b = rng.mat(n, 1);
    DistResult lp_route = dist_to_subspace(nrm, b, v);
    CHECK(lp_route.route == DistRoute::simplex);
    const double r = 2.0 * eval_norm(nrm, v) / eval_norm(nrm, b.col(0)) + 1.0;
    const double grid = grid_1d(nrm, b.col(0), v, r, r * 1e-4);
    CHECK(std::abs(lp_route.value - grid) <= 1e-3);
    CHECK(lp_route.value <= grid + 1e-12);
    DistResult sg = dist_to_subspace(nrm, b, v, DistOptions{1e-9, DistRoute::subgradient});
    CHECK(sg.route == DistRoute::subgradient);
    CHECK(std::abs(lp_route.value - sg.value) <= 1e-6);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const PNorm p = rng.integer(0, 1) ? PNorm::one : PNorm::inf;
    const NormExpr nrm = lp(p, rng.weights(3));
    const Vec v = rng.vec(3, 2.0);
    Mat b = rng.mat(3, 2);
    DistResult lp_route = dist_to_subspace(nrm, b, v);
    const double grid = grid_2d(nrm, b, v, 2.0 * (eval_norm(nrm, v) + 1.0) / std::max(0.05, b.jacobiSvd().singularValues()(1)));
    CHECK(std::abs(lp_route.value - grid) <= 1e-3);
    DistResult sg = dist_to_subspace(nrm, b, v, DistOptions{1e-9, DistRoute::subgradient});
    CHECK(std::abs(lp_route.value - sg.value) <= 1e-6);
  }
}

TEST_CASE("lp routes agree with subgradient routes up to dimension 6") {
  Rng rng(78);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = rng.integer(2, 6);
    const Index k = rng.integer(1, n - 1);
    std::vector<NormExpr> parts;
    Index used = 0;
    while (used < n) {
      const Index d = std::min<Index>(n - used, rng.integer(1, 3));
      parts.push_back(lp(rng.integer(0, 1) ? PNorm::one : PNorm::inf, rng.weights(d)));
      used += d;
    }
    const NormExpr nrm = rng.integer(0, 1) ? sup_of(parts) : sum_of(parts);
    const Vec v = rng.vec(n, 2.0);
    const Mat b = rng.mat(n, k);
    DistResult exact = dist_to_subspace(nrm, b, v);
    CHECK(exact.route == DistRoute::simplex);
    DistResult sg = dist_to_subspace(nrm, b, v, DistOptions{1e-9, DistRoute::subgradient});
    CHECK(std::abs(exact.value - sg.value) <= 1e-6);
    CHECK(exact.value <= eval_norm(nrm, v) + 1e-12);
    CHECK(eval_norm(nrm, v + b * exact.coeffs) == doctest::Approx(exact.value).epsilon(1e-9));
  }
}

TEST_CASE("l2 distances match the normal equations") {
  Rng rng(79);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = rng.integer(2, 5), k = rng.integer(1, n - 1);
    const Vec w = rng.weights(n);
    const Mat b = rng.mat(n, k);
    const Vec v = rng.vec(n);
    const Mat wb = w.asDiagonal() * b;
    const Vec wv = w.asDiagonal() * v;
    const Vec z = (wb.transpose() * wb).ldlt().solve(-wb.transpose() * wv);
    const double oracle = (wv + wb * z).norm();
    DistResult d = dist_to_subspace(lp(PNorm::two, w), b, v);
    CHECK(d.route == DistRoute::least_squares);
    CHECK(d.value == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("barrier route matches exact routes on mixed norms") {
  Rng rng(80);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = rng.integer(2, 5), k = rng.integer(1, n - 1);
    const NormExpr nrm = lp(random_p(rng), rng.weights(n));
    const Mat b = rng.mat(n, k);
    const Vec v = rng.vec(n, 2.0);
    DistResult exact = dist_to_subspace(nrm, b, v);
    DistResult bar = dist_to_subspace(nrm, b, v, DistOptions{1e-9, DistRoute::barrier});
    CHECK(bar.route == DistRoute::barrier);
    CHECK(std::abs(exact.value - bar.value) <= 1e-8 * std::max(1.0, exact.value));
  }
  for (int trial = 0; trial < 30; ++trial) {
    // Mixed l2 / l1 parts: barrier versus the subgradient route.
    const NormExpr nrm = sum_of({lp(PNorm::two, rng.weights(2)), lp(PNorm::one, rng.weights(2))});
    const Mat b = rng.mat(4, 2);
    const Vec v = rng.vec(4, 2.0);
    DistResult bar = dist_to_subspace(nrm, b, v);
    CHECK(bar.route == DistRoute::barrier);
    DistResult sg = dist_to_subspace(nrm, b, v, DistOptions{1e-10, DistRoute::subgradient});
    CHECK(std::abs(sg.value - bar.value) <= 1e-6);
    CHECK(bar.value <= sg.value + 1e-9);
  }
}

TEST_CASE("distance properties") {
  Rng rng(81);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = rng.integer(2, 4), k = rng.integer(1, n - 1);
    const NormExpr nrm = lp(random_p(rng), rng.weights(n));
    const Mat b = rng.mat(n, k);
    const Vec v = rng.vec(n);
    CHECK(dist_to_subspace(nrm, b, v).value <= eval_norm(nrm, v) + 1e-12);
    const Vec inside = b * rng.vec(k);
    CHECK(dist_to_subspace(nrm, b, inside).value <= 1e-10);
  }
}

TEST_CASE("norm axioms hold on random composite expressions") {
  Rng rng(82);
  for (int trial = 0; trial < 60; ++trial) {
    const NormExpr a = lp(random_p(rng), rng.weights(2));
    const NormExpr c = lp(random_p(rng), rng.weights(2));
    Mat basis = rng.mat(4, 1);
    std::vector<NormExpr> cands = {sup_of({a, c}), sum_of({a, c}), quotient_of(sum_of({a, c}), basis),
                                   dual_of(sup_of({a, c})), compose_linear(rng.mat(4, 3), sum_of({a, c}))};
    for (const NormExpr& n : cands) {
      const Vec v = rng.vec(n.dim()), w = rng.vec(n.dim());
      const double t = rng.uniform(-3, 3);
      const double nv = eval_norm(n, v);
      CHECK(eval_norm(n, t * v) == doctest::Approx(std::abs(t) * nv).epsilon(1e-9).scale(1.0));
      CHECK(eval_norm(n, v + w) <= nv + eval_norm(n, w) + 1e-9);
      CHECK(nv >= 0.0);
    }
  }
}

TEST_CASE("double dual of a leaf is the leaf") {
  Rng rng(83);
  for (int trial = 0; trial < 60; ++trial) {
    const Index d = rng.integer(1, 4);
    const NormExpr n = lp(random_p(rng), rng.weights(d));
    const NormExpr dd = dual_of(dual_of(n));
    const Vec v = rng.vec(d);
    CHECK(eval_norm(dd, v) == doctest::Approx(eval_norm(n, v)).epsilon(1e-12));
  }
}

TEST_CASE("dual norms match Hoelder duality") {
  Rng rng(84);
  for (int trial = 0; trial < 60; ++trial) {
    const Index d = rng.integer(1, 4);
    const PNorm p = random_p(rng);
    const Vec w = rng.weights(d);
    const Vec g = rng.vec(d);
    const Vec winv = w.cwiseInverse();
    CHECK(eval_norm(dual_of(lp(p, w)), g) == doctest::Approx(lp_oracle(dual_index(p), winv, g)).epsilon(1e-12));
  }
}

TEST_CASE("dual of a quotient is the restriction to the annihilator") {
  // (R^n / B, l1)* = { g : g^T B = 0 } with the linf norm; check on covectors
  // expressed in complement coordinates.
  Rng rng(85);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 3;
    const Mat b = rng.mat(n, 1);
    const NormExpr amb = lp(rng.integer(0, 1) ? PNorm::one : PNorm::inf, rng.weights(n));
    Complement comp = complement_coordinates(b, n);
    // Quotient fiber on complement coordinates.
    Mat full(n, n);
    full << comp.lift, b;
    const NormExpr q = compose_linear(comp.lift, quotient_of(amb, b));
    const Vec h = rng.vec(comp.lift.cols());
    const double via_dual = eval_norm(dual_of(q), h);
    // Oracle: sup over extreme points of the quotient ball, sampled as the
    // images of the ambient ball vertices, of <h, proj x>.
    double oracle = 0.0;
    const Vec w = amb.as_lp()->weights;
    for (const Vec& x : leaf_vertices(amb.as_lp()->p, w)) {
      const Vec coords = full.fullPivLu().solve(x).head(comp.lift.cols());
      oracle = std::max(oracle, std::abs(h.dot(coords)));
    }
    CHECK(via_dual == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("op norm examples") {
  CHECK(op_norm(Mat::Identity(2, 2), lp(PNorm::one, 2), lp(PNorm::inf, 2)).value == doctest::Approx(1.0));
  CHECK(op_norm(Mat::Zero(2, 3), lp(PNorm::two, 3), lp(PNorm::one, 2)).value == 0.0);
  Mat a(2, 2);
  a << 1, 1, 0, 1;
  OpNormResult r = op_norm(a, lp(PNorm::two, 2), lp(PNorm::two, 2));
  CHECK(r.value == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-9));
  CHECK(r.exact);
  Mat two = 2.0 * Mat::Identity(2, 2);
  CHECK(op_norm(two, lp(PNorm::inf, 2), lp(PNorm::inf, 2)).value == doctest::Approx(2.0));
}

TEST_CASE("exact op norm routes agree with extreme point enumeration") {
  Rng rng(86);
  for (int trial = 0; trial < 300; ++trial) {
    const Index d = rng.integer(1, 8), e = rng.integer(1, 8);
    PNorm ps = random_p(rng), pt = random_p(rng);
    if (ps == PNorm::two && pt == PNorm::two) continue;
    const Vec ws = rng.weights(d), wt = rng.weights(e);
    const Mat a = rng.mat(e, d);
    double oracle = 0.0;
    if (ps != PNorm::two) {
      for (const Vec& x : leaf_vertices(ps, ws)) oracle = std::max(oracle, lp_oracle(pt, wt, a * x));
    } else {
      // Source l2: go through the dual, target l1 / linf has polyhedral dual ball.
      for (const Vec& y : leaf_vertices(dual_index(pt), wt.cwiseInverse())) {
        oracle = std::max(oracle, lp_oracle(PNorm::two, ws.cwiseInverse(), a.transpose() * y));
      }
    }
    OpNormResult r = op_norm(a, lp(ps, ws), lp(pt, wt));
    CHECK(r.exact);
    CHECK(r.value == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("power iteration matches the SVD") {
  Rng rng(87);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = rng.integer(2, 3);
    const Mat a = rng.mat(n, n);
    const double sigma = a.jacobiSvd().singularValues()(0);
    OpNormResult r = op_norm(a, lp(PNorm::two, n), lp(PNorm::two, n));
    CHECK(std::abs(r.value - sigma) <= 1e-7);
  }
  Mat ties = Mat::Identity(3, 3);
  ties(2, 2) = -1;
  CHECK(op_norm(ties, lp(PNorm::two, 3), lp(PNorm::two, 3)).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("op norm certificates") {
  Rng rng(88);
  for (int trial = 0; trial < 60; ++trial) {
    const Index d = rng.integer(1, 4), e = rng.integer(1, 4);
    const NormExpr s = lp(random_p(rng), rng.weights(d));
    const NormExpr t = lp(random_p(rng), rng.weights(e));
    const Mat a = rng.mat(e, d);
    OpNormResult r = op_norm(a, s, t);
    REQUIRE(r.x.size() == d);
    CHECK(eval_norm(s, r.x) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(eval_norm(t, a * r.x) == doctest::Approx(r.value).epsilon(1e-7));
    CHECK(r.lower <= r.value + 1e-12);
    CHECK(r.upper >= r.value - 1e-12);
  }
}

TEST_CASE("op norm is submultiplicative") {
  Rng rng(89);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = rng.integer(1, 4), m = rng.integer(1, 4), e = rng.integer(1, 4);
    const NormExpr s = lp(random_p(rng), rng.weights(d));
    const NormExpr mid = lp(random_p(rng), rng.weights(m));
    const NormExpr t = lp(random_p(rng), rng.weights(e));
    const Mat b = rng.mat(m, d), a = rng.mat(e, m);
    const double ab = op_norm(a * b, s, t).value;
    CHECK(ab <= op_norm(a, mid, t).value * op_norm(b, s, mid).value + 1e-9);
  }
}

TEST_CASE("op norm over composite fibers") {
  Rng rng(90);
  for (int trial = 0; trial < 40; ++trial) {
    const NormExpr s = sup_of({lp(PNorm::one, rng.weights(2)), lp(PNorm::inf, rng.weights(2))});
    const NormExpr t = sum_of({lp(PNorm::inf, rng.weights(1)), lp(PNorm::one, rng.weights(2))});
    const Mat a = rng.mat(3, 4);
    OpNormResult r = op_norm(a, s, t);
    // The source ball is a product of polytopes: enumerate its vertices.
    double oracle = 0.0;
    const Vec w1 = s.as_sup()->parts[0].norm.as_lp()->weights;
    const Vec w2 = s.as_sup()->parts[1].norm.as_lp()->weights;
    for (const Vec& x1 : leaf_vertices(PNorm::one, w1)) {
      for (const Vec& x1s : {x1, Vec(-x1)}) {
        for (const Vec& x2 : leaf_vertices(PNorm::inf, w2)) {
          Vec x(4);
          x << x1s, x2;
          oracle = std::max(oracle, eval_norm(t, a * x));
        }
      }
    }
    CHECK(r.exact);
    CHECK(r.value == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("strict op norm refuses past the enumeration cap") {
  Rng rng(91);
  const Index d = 18;
  const Mat a = rng.mat(2, d);
  const NormExpr s = lp(PNorm::inf, d);
  const NormExpr t = lp(PNorm::two, 2);
  OpNormOptions strict;
  strict.strict = true;
  CHECK_THROWS_AS(op_norm(a, s, t, strict), Error);
  OpNormResult loose = op_norm(a, s, t);
  CHECK_FALSE(loose.exact);
  // Column sums of |a| bound the l2 image of the sign cube from above.
  CHECK(loose.upper >= loose.lower);
  CHECK(loose.lower <= loose.upper);
}

TEST_CASE("hom fiber norms") {
  // Hom((R^2, l1), R) fiber: row (a, b) has norm max(|a|, |b|).
  const NormExpr h = op_norm_of(lp(PNorm::one, 2), lp(PNorm::one, 1));
  CHECK(eval_norm(h, v2(3, -5)) == doctest::Approx(5.0));
  Rng rng(92);
  for (int trial = 0; trial < 40; ++trial) {
    const Index d = rng.integer(1, 3), e = rng.integer(1, 3);
    const NormExpr s = lp(random_p(rng), rng.weights(d));
    const NormExpr t = lp(random_p(rng), rng.weights(e));
    const Mat a = rng.mat(e, d);
    CHECK(eval_norm(op_norm_of(s, t), flatten_rowmajor(a)) == doctest::Approx(op_norm(a, s, t).value).epsilon(1e-9));
  }
}

TEST_CASE("flattening round trip") {
  Mat a(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  Vec f = flatten_rowmajor(a);
  CHECK(f(1) == 2.0);
  CHECK(f(3) == 4.0);
  CHECK(unflatten_rowmajor(f, 2, 3) == a);
}

TEST_CASE("concurrent evaluation is deterministic") {
  Rng rng(93);
  const Mat b = rng.mat(4, 2);
  const NormExpr q = quotient_of(sum_of({lp(PNorm::one, 2), lp(PNorm::inf, 2)}), b);
  std::vector<Vec> vs;
  for (int k = 0; k < 64; ++k) vs.push_back(rng.vec(4));
  std::vector<double> serial(vs.size()), par(vs.size());
  for (std::size_t k = 0; k < vs.size(); ++k) serial[k] = eval_norm(q, vs[k]);
#pragma omp parallel for
  for (long k = 0; k < static_cast<long>(vs.size()); ++k) par[k] = eval_norm(q, vs[k]);
  CHECK(serial == par);
}

#ifndef BANMOD_NORMCALC_HPP_
#define BANMOD_NORMCALC_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "banmod/linalg.hpp"
#include "banmod/norm_expr.hpp"

namespace banmod {

inline constexpr double kExactTol = 1e-8;
inline constexpr double kIterTol = 1e-6;

struct Evaluation {
  double value = 0.0;
  bool exact = true;  // false when an iterative route with a tolerance certificate was used
};

Evaluation evaluate(const NormExpr& n, const Vec& v, double tol = kExactTol);
double eval_norm(const NormExpr& n, const Vec& v, double tol = kExactTol);

// Rewrites DualOf nodes into closed form wherever possible and reduces
// OpNormOf nodes with a one-dimensional side. Semantics are unchanged.
NormExpr canonical(const NormExpr& n);

// Closed-form dual norm, if the expression admits one.
std::optional<NormExpr> dual_expr(const NormExpr& n);

// A vector g with <g, v> = n(v) and n*(g) <= 1.
Vec subgradient(const NormExpr& n, const Vec& v, double tol = kExactTol);

// c ||v||_2 <= n(v) <= C ||v||_2; c is 0 for seminorms.
struct Equivalence {
  double lower = 0.0;
  double upper = 0.0;
};
Equivalence equivalence_constants(const NormExpr& n);

// If n(v) = ||G v||_2 for some matrix G, returns G.
std::optional<Mat> euclidean_factor(const NormExpr& n);

// Points whose symmetric convex hull is a polytope with the same extreme
// points as the unit ball (up to positive scaling), when the ball is a
// polytope with at most `cap` such points.
std::optional<std::vector<Vec>> extreme_candidates(const NormExpr& n, std::size_t cap);

enum class DistRoute { direct, least_squares, simplex, barrier, subgradient };
const char* to_string(DistRoute r);

struct DistOptions {
  double tol = kIterTol;
  std::optional<DistRoute> force;  // only `subgradient` and `barrier` can be forced
};

struct DistResult {
  double value = 0.0;
  Vec coeffs;         // minimizing combination of the basis columns
  DistRoute route = DistRoute::direct;
  double gap = 0.0;   // certified optimality gap (0 on exact routes)
};

// inf_z n(v + basis z).
DistResult dist_to_subspace(const NormExpr& n, const Mat& basis, const Vec& v,
                            const DistOptions& opts = {});

struct OpNormOptions {
  double tol = kExactTol;
  bool strict = false;       // throw instead of falling back past the enumeration cap
  int enumeration_dim_cap = 16;
};

struct OpNormResult {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool exact = true;
  std::string route;
  Vec x;  // maximizing direction, src(x) = 1 (empty if unknown)
  Vec y;  // dual certificate, tgt*(y) <= 1 and y^T A x = value (empty if unknown)
};

// sup { tgt(A v) : src(v) <= 1 }.
OpNormResult op_norm(const Mat& a, const NormExpr& src, const NormExpr& tgt,
                     const OpNormOptions& opts = {});

}  // namespace banmod

#endif  // BANMOD_NORMCALC_HPP_

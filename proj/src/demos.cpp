#include <cmath>
#include <map>

#include "banmod/audit.hpp"
#include "banmod/colimits.hpp"
#include "banmod/error.hpp"
#include "banmod/functors.hpp"
#include "banmod/limits.hpp"
#include "banmod/normcalc.hpp"

namespace banmod {

namespace {

constexpr int kMaxLevels = 16;

MeasureSpace point() { return MeasureSpace({Atom{"x", 1.0}}); }

std::vector<std::vector<bool>> chain(std::size_t n) {
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) leq[i][j] = true;
  }
  return leq;
}

void check_levels(int levels) {
  if (levels < 1 || levels > kMaxLevels) {
    fail(Errc::invalid_argument, "levels must lie in 1.." + std::to_string(kMaxLevels));
  }
}

bool monotone(const std::vector<double>& v, int dir) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (dir * (v[k] - v[k - 1]) < 0) return false;
  }
  return true;
}

TrendReport start(const std::string& name, int levels) {
  check_levels(levels);
  TrendReport r;
  r.name = name;
  for (int n = 1; n <= levels; ++n) r.levels.push_back(n);
  return r;
}

// Chain {1..n} over M with P_ij = scale(i, j) id.
Diagram scaled_inverse_chain(const ModuleObj& m, std::size_t n, double (*scale)(std::size_t, std::size_t)) {
  std::map<std::pair<std::size_t, std::size_t>, Morphism> p;
  const Index d = m.dim(0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      p.emplace(std::make_pair(i, j), Morphism::checked(m, m, {scale(i + 1, j + 1) * Mat::Identity(d, d)}));
    }
  }
  return inverse_system(chain(n), std::vector<ModuleObj>(n, m), p);
}

double ratio_scale(std::size_t i, std::size_t j) { return static_cast<double>(i) / static_cast<double>(j); }
double unit_scale(std::size_t, std::size_t) { return 1.0; }

ModuleObj base_module() { return ModuleObj(point(), {lp(PNorm::inf, 2)}); }

Vec base_vector() {
  Vec v(2);
  v << 1.0, -0.5;
  return v;
}

}  // namespace

TrendReport demo_not_balanced(int levels) {
  TrendReport r = start("not-balanced", levels);
  Series inv{"inverse_norm", {}}, fwd{"norm", {}}, mono{"mono", {}}, epi{"epi", {}};
  for (int n : r.levels) {
    Vec d(n);
    for (int i = 0; i < n; ++i) d(i) = 1.0 / (i + 1);
    const ModuleObj m(point(), {lp(PNorm::inf, n)});
    const Morphism phi = Morphism::checked(m, m, {Mat(d.asDiagonal())});
    const Mat inverse = Vec(d.cwiseInverse()).asDiagonal();
    inv.values.push_back(op_norm(inverse, m.fiber(0), m.fiber(0)).value);
    fwd.values.push_back(phi.bound(0).upper);
    mono.values.push_back(is_mono(phi) ? 1.0 : 0.0);
    epi.values.push_back(is_epi(phi) ? 1.0 : 0.0);
  }
  r.monotone = monotone(inv.values, 1);
  r.verdict = "diverges: mono and epi at every level, inverse norm grows like n, so no norm-1 inverse survives";
  r.note = "the dense-range, non-surjective map needs infinitely many coordinates and has no finite realization";
  r.series = {inv, fwd, mono, epi};
  return r;
}

TrendReport demo_inverse_trivial(int levels) {
  TrendReport r = start("inverse-trivial", levels);
  const ModuleObj m = base_module();
  const Vec v = base_vector();
  const double base = eval_norm(m.fiber(0), v);
  Series thread{"thread_norm", {}}, zero{"zero_thread_norm", {}};
  for (int n : r.levels) {
    const Cone lim = inverse_limit(scaled_inverse_chain(m, static_cast<std::size_t>(n), ratio_scale));
    // The thread through v at the bottom level.
    const Vec t = least_squares(lim.legs[0].mat(0), v);
    thread.values.push_back(eval_norm(lim.apex.fiber(0), t) / base);
    zero.values.push_back(eval_norm(lim.apex.fiber(0), Vec::Zero(t.size())));
  }
  r.monotone = monotone(thread.values, 1);
  r.verdict = "diverges: thread norm n|v|, so the infinite inverse limit is the zero module";
  r.note = "values are relative to |v| at the single atom";
  r.series = {thread, zero};
  return r;
}

TrendReport demo_inverse_cokernel(int levels) {
  TrendReport r = start("inverse-cokernel", levels);
  const ModuleObj m = base_module();
  Series coker{"cokernel_dim", {}}, comp{"comparison_norm", {}};
  for (int level : r.levels) {
    const std::size_t n = static_cast<std::size_t>(level);
    const Diagram ms = scaled_inverse_chain(m, n, ratio_scale);
    const Diagram ns = scaled_inverse_chain(m, n, unit_scale);
    std::vector<Morphism> theta;
    for (std::size_t k = 0; k < n; ++k) {
      theta.push_back(Morphism::checked(m, m, {Mat::Identity(2, 2) / static_cast<double>(k + 1)}));
    }
    const NatTrans eta(ms, ns, theta);
    const NatCokernel ck = nat_cokernel(eta);
    Index worst = 0;
    for (const ModuleObj& o : ck.cokernels.objects()) worst = std::max(worst, o.total_dim());
    coker.values.push_back(static_cast<double>(worst));

    const Cone lm = inverse_limit(ms);
    const Cone ln = inverse_limit(ns);
    Cone pushed{lm.apex, {}};
    for (std::size_t k = 0; k < n; ++k) pushed.legs.push_back(compose(theta[k], lm.legs[k]));
    const Mediator med = mediating_morphism(ln, pushed);
    comp.values.push_back(op_norm(med.map.mat(0), lm.apex.fiber(0), ln.apex.fiber(0)).value);
  }
  r.monotone = monotone(comp.values, -1);
  r.verdict = "vanishes: every level cokernel is zero while the limit comparison has norm 1/n";
  r.note = "over the infinite chain the limit of M is zero, the limit of N is M, and Coker(lim theta) = M != 0";
  r.series = {coker, comp};
  return r;
}

TrendReport demo_direct_kernel(int levels) {
  TrendReport r = start("direct-kernel", levels);
  Series top{"kernel_dim", {}}, lower{"lower_kernel_dim", {}}, limit{"limit_kernel_dim", {}};
  for (int level : r.levels) {
    const std::size_t n = static_cast<std::size_t>(level);
    const Index d = level;
    const NormExpr h = lp(PNorm::two, d);
    Vec v1(d);
    for (Index i = 0; i < d; ++i) v1(i) = 1.0 / static_cast<double>(i + 1);
    Mat kill = Mat::Identity(d, d);
    kill(0, 0) = 0.0;
    // M_k is spanned by v1, e2, ..., ek, in generator coordinates.
    std::vector<ModuleObj> ms;
    std::vector<Mat> gens;
    for (Index k = 1; k <= d; ++k) {
      Mat b = Mat::Zero(d, k);
      b.col(0) = v1;
      for (Index c = 1; c < k; ++c) b(c, c) = 1.0;
      gens.push_back(b);
      ms.push_back(ModuleObj(point(), {compose_linear(b, h)}));
    }
    const ModuleObj hn(point(), {h});
    std::map<std::pair<std::size_t, std::size_t>, Morphism> incl, ident;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        Mat e = Mat::Zero(static_cast<Index>(j + 1), static_cast<Index>(i + 1));
        e.topRows(static_cast<Index>(i + 1)).setIdentity();
        incl.emplace(std::make_pair(i, j), structural(ms[i], ms[j], {e}));
        ident.emplace(std::make_pair(i, j), identity(hn));
      }
    }
    const Diagram msys = direct_system(chain(n), ms, incl);
    const Diagram nsys = direct_system(chain(n), std::vector<ModuleObj>(n, hn), ident);
    std::vector<Morphism> theta;
    for (std::size_t k = 0; k < n; ++k) theta.push_back(structural(ms[k], hn, {kill * gens[k]}));
    const NatKernel nk = nat_kernel(NatTrans(msys, nsys, theta));
    top.values.push_back(static_cast<double>(nk.kernels.object(n - 1).total_dim()));
    Index below = 0;
    for (std::size_t k = 0; k + 1 < n; ++k) below = std::max(below, nk.kernels.object(k).total_dim());
    lower.values.push_back(static_cast<double>(below));

    // Colimit of theta between the direct limits, which sit at the top level.
    const Cocone cm = direct_limit(msys);
    const Cocone cn = direct_limit(nsys);
    Cocone pushed{cn.nadir, {}};
    for (std::size_t k = 0; k < n; ++k) pushed.legs.push_back(compose(cn.legs[k], theta[k]));
    const Mediator med = mediating_morphism(cm, pushed);
    limit.values.push_back(static_cast<double>(kernel(med.map).object.total_dim()));
  }
  r.monotone = monotone(top.values, 1);
  r.verdict = "per level: Ker(theta_n) = span{e1} has dimension 1 at every truncation";
  r.note = "only the top of each truncation carries the kernel; its disappearance needs the infinite tail and is "
           "not certified here";
  r.series = {top, lower, limit};
  return r;
}

const std::vector<std::string>& demo_names() {
  static const std::vector<std::string> names = {"not-balanced", "inverse-trivial", "inverse-cokernel",
                                                 "direct-kernel"};
  return names;
}

TrendReport run_demo(const std::string& name, int levels) {
  if (name == "not-balanced") return demo_not_balanced(levels);
  if (name == "inverse-trivial") return demo_inverse_trivial(levels);
  if (name == "inverse-cokernel") return demo_inverse_cokernel(levels);
  if (name == "direct-kernel") return demo_direct_kernel(levels);
  fail(Errc::invalid_argument, "unknown demo " + name);
}

}  // namespace banmod

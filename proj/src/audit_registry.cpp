#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <omp.h>

#include "banmod/audit.hpp"
#include "banmod/colimits.hpp"
#include "banmod/error.hpp"
#include "banmod/functors.hpp"
#include "banmod/limits.hpp"

namespace banmod {

namespace {

constexpr double kFaultScale = 1.0 + 1e-3;
constexpr int kFaultAttempts = 64;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

struct LimitCase {
  Diagram d;
  Cone cone;
};
struct ColimitCase {
  Diagram d;
  Cocone cocone;
};

using LimitBuilder = std::function<LimitCase(Rng&, const MeasureSpace&, const RandomConfig&)>;
using ColimitBuilder = std::function<ColimitCase(Rng&, const MeasureSpace&, const RandomConfig&)>;

Morphism scaled(const Morphism& m, double s) {
  std::vector<Mat> mats = m.mats();
  std::vector<NormBound> b = m.bounds();
  for (Mat& x : mats) x *= s;
  for (NormBound& x : b) {
    x.lower *= s;
    x.upper *= s;
  }
  return Morphism::trusted(m.source(), m.target(), std::move(mats), std::move(b));
}

// Scales one randomly chosen nonzero leg; false if every leg is zero.
bool corrupt(Rng& rng, std::vector<Morphism>& legs, std::size_t* which) {
  std::vector<std::size_t> nonzero;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    for (const Mat& m : legs[i].mats()) {
      if (m.size() > 0 && max_abs(m) > 1e-6) {
        nonzero.push_back(i);
        break;
      }
    }
  }
  if (nonzero.empty()) return false;
  *which = nonzero[static_cast<std::size_t>(rng.integer(0, static_cast<int>(nonzero.size()) - 1))];
  legs[*which] = scaled(legs[*which], kFaultScale);
  return true;
}

TrialDiag from_probe(const ProbeResult& p) {
  TrialDiag d;
  d.passed = p.ok;
  d.unique = p.unique;
  d.residual = p.residual;
  d.detail = p.detail;
  return d;
}

TrialDiag limit_trial(Rng& rng, const AuditOptions& opts, const LimitBuilder& build) {
  RandomConfig cfg;
  for (int attempt = 0; attempt < kFaultAttempts; ++attempt) {
    const MeasureSpace x = random_space(rng, cfg);
    LimitCase c = build(rng, x, cfg);
    std::size_t which = 0;
    if (opts.inject_fault && !corrupt(rng, c.cone.legs, &which)) continue;
    ProbeOptions po;
    po.tol = opts.tol;
    TrialDiag d = from_probe(probe_limit(rng, c.d, c.cone, po));
    if (opts.inject_fault) d.detail = "fault on leg " + std::to_string(which) + ": " + d.detail;
    return d;
  }
  TrialDiag d;
  d.passed = false;
  d.detail = "no nonzero leg to corrupt";
  return d;
}

TrialDiag colimit_trial(Rng& rng, const AuditOptions& opts, const ColimitBuilder& build) {
  RandomConfig cfg;
  for (int attempt = 0; attempt < kFaultAttempts; ++attempt) {
    const MeasureSpace x = random_space(rng, cfg);
    ColimitCase c = build(rng, x, cfg);
    std::size_t which = 0;
    if (opts.inject_fault && !corrupt(rng, c.cocone.legs, &which)) continue;
    ProbeOptions po;
    po.tol = opts.tol;
    TrialDiag d = from_probe(probe_colimit(rng, c.d, c.cocone, po));
    if (opts.inject_fault) d.detail = "fault on leg " + std::to_string(which) + ": " + d.detail;
    return d;
  }
  TrialDiag d;
  d.passed = false;
  d.detail = "no nonzero leg to corrupt";
  return d;
}

int rank_cap(Rng& rng) { return rng.coin(0.3) ? rng.integer(0, 2) : -1; }

LimitCase kernel_case(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  const ModuleObj m = random_module(rng, x, cfg), n = random_module(rng, x, cfg);
  const Morphism phi = random_morphism(rng, m, n, rank_cap(rng));
  return {parallel_pair_diagram(phi, Morphism::zero(m, n)), kernel_cone(kernel(phi), phi)};
}

LimitCase equalizer_case(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  Diagram d = random_parallel_pair(rng, x, cfg);
  const Morphism& phi = d.map(2);
  return {d, equalizer_cone(equalizer(phi, d.map(3)), phi)};
}

LimitCase product_case(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  Diagram d = random_discrete(rng, x, cfg);
  return {d, product(d.objects())};
}

LimitCase pullback_case(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  Diagram d = random_cospan(rng, x, cfg);
  return {d, pullback_cone(pullback(d.map(3), d.map(4)), d.map(3))};
}

LimitCase inverse_limit_case(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  Diagram d = random_inverse_system(rng, x, cfg);
  return {d, inverse_limit(d)};
}

LimitCase limit_engine_case(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  Diagram d = random_diagram(rng, x, cfg);
  return {d, limit_of_diagram(d)};
}

ColimitCase cokernel_case(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  const ModuleObj m = random_module(rng, x, cfg), n = random_module(rng, x, cfg);
  const Morphism phi = random_morphism(rng, m, n, rank_cap(rng));
  return {parallel_pair_diagram(phi, Morphism::zero(m, n)), cokernel_cocone(cokernel(phi), phi)};
}

ColimitCase coequalizer_case(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  Diagram d = random_parallel_pair(rng, x, cfg);
  const Morphism& phi = d.map(2);
  return {d, coequalizer_cocone(coequalizer(phi, d.map(3)), phi)};
}

ColimitCase coproduct_case(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  Diagram d = random_discrete(rng, x, cfg);
  return {d, coproduct(d.objects())};
}

ColimitCase pushout_case(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  Diagram d = random_span(rng, x, cfg);
  return {d, pushout_cocone(pushout(d.map(3), d.map(4)), d.map(3))};
}

ColimitCase direct_limit_case(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  Diagram d = random_direct_system(rng, x, cfg);
  return {d, direct_limit(d)};
}

ColimitCase colimit_engine_case(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  Diagram d = random_diagram(rng, x, cfg);
  return {d, colimit_of_diagram(d)};
}

TrialDiag fail_diag(const std::string& why) {
  TrialDiag d;
  d.passed = false;
  d.detail = why;
  return d;
}

void merge_iso(TrialDiag& d, const IsoReport& iso, const std::string& what) {
  d.residual = std::max(d.residual, iso.max_error);
  if (!iso.ok && d.passed) {
    d.passed = false;
    d.detail = what + ": " + iso.detail;
  }
}

void merge_residual(TrialDiag& d, double r, double tol, const std::string& what) {
  d.residual = std::max(d.residual, r);
  if (r > tol && d.passed) {
    d.passed = false;
    d.detail = what + " (residual " + fmt(r) + ")";
  }
}

// Hom(M, -) applied to a diagram and to a cone over it.
Diagram hom_diagram(const ModuleObj& m, const Diagram& d) {
  std::vector<ModuleObj> objs;
  for (const ModuleObj& o : d.objects()) objs.push_back(hom_module(m, o));
  std::vector<Morphism> arrows;
  for (std::size_t k = d.index().num_objects(); k < d.index().num_arrows(); ++k) arrows.push_back(hom_post(m, d.map(k)));
  return Diagram(d.index(), std::move(objs), std::move(arrows));
}

TrialDiag hom_continuity(Rng& rng, const AuditOptions& opts) {
  RandomConfig cfg;
  cfg.max_dim = 3;
  RandomConfig poly = cfg;
  poly.ps = {PNorm::one, PNorm::inf};
  poly.min_dim = 1;
  const MeasureSpace x = random_space(rng, cfg);
  const Diagram d = random_diagram(rng, x, cfg);
  const Cone lim = limit_of_diagram(d);
  const ModuleObj m = random_module(rng, x, poly);
  const Diagram hd = hom_diagram(m, d);
  Cone hc{hom_module(m, lim.apex), {}};
  for (const Morphism& leg : lim.legs) hc.legs.push_back(hom_post(m, leg));
  ProbeOptions po;
  po.tol = opts.tol;
  po.check_legs = false;
  po.apex = poly;
  po.apex.min_dim = 0;
  return from_probe(probe_limit(rng, hd, hc, po));
}

TrialDiag invim_square(Rng& rng, const AuditOptions& opts) {
  RandomConfig cfg;
  const MeasureSpace x = random_space(rng, cfg), y = random_space(rng, cfg);
  const MeasMorphism tau = random_meas_morphism(rng, x, y);
  const ModuleObj m = random_module(rng, y, cfg);
  const SquareReport rep = invim_pullback_square(tau, m, 1, rng.engine()(), opts.tol);
  TrialDiag d;
  d.passed = rep.ok;
  d.residual = rep.max_residual;
  d.detail = rep.detail;
  return d;
}

TrialDiag invim_direct_limit(Rng& rng, const AuditOptions& opts) {
  RandomConfig cfg;
  const MeasureSpace y = random_space(rng, cfg), x = random_space(rng, cfg);
  const MeasMorphism tau = random_meas_morphism(rng, x, y);
  const Diagram d = random_direct_system(rng, y, cfg);
  const Diagram pulled = inverse_image_diagram(tau, d);
  const Cocone lhs = colimit_of_diagram(pulled);
  const Cocone base = direct_limit(d);
  Cocone rhs{inverse_image(tau, base.nadir).module, {}};
  for (const Morphism& leg : base.legs) rhs.legs.push_back(inverse_image_morphism(tau, leg));
  TrialDiag out;
  merge_residual(out, cocone_residual(pulled, rhs), opts.tol, "pulled-back limit is not a cocone");
  const Mediator med = mediating_morphism(lhs, rhs);
  merge_residual(out, med.residual, opts.tol, "no comparison morphism");
  out.unique = jointly_surjective(lhs);
  if (!out.unique && out.passed) out = fail_diag("colimit legs are not jointly surjective");
  merge_iso(out, check_isometric_iso(med.map, 16, opts.tol, rng.engine()()), "comparison is not an isometric iso");
  return out;
}

TrialDiag dual_direct_limit(Rng& rng, const AuditOptions& opts) {
  RandomConfig cfg;
  const MeasureSpace x = random_space(rng, cfg);
  const Diagram d = random_direct_system(rng, x, cfg);
  const Cocone lim = colimit_of_diagram(d);
  const FiniteCategory& cat = d.index();
  const std::size_t n = cat.num_objects();
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n));
  std::vector<ModuleObj> duals;
  std::map<std::pair<std::size_t, std::size_t>, Morphism> p;
  for (std::size_t i = 0; i < n; ++i) {
    duals.push_back(dual(d.object(i)));
    for (std::size_t j = 0; j < n; ++j) {
      const auto h = cat.hom(i, j);
      leq[i][j] = !h.empty();
      if (i != j && !h.empty()) p.emplace(std::make_pair(i, j), dual_map(d.map(h.front())));
    }
  }
  const Diagram sys = inverse_system(leq, duals, p);
  const Cone inv = inverse_limit(sys);
  Cone cone{dual(lim.nadir), {}};
  for (const Morphism& leg : lim.legs) cone.legs.push_back(dual_map(leg));
  TrialDiag out;
  merge_residual(out, cone_residual(sys, cone), opts.tol, "dual of the limit is not a cone");
  const Mediator med = mediating_morphism(inv, cone);
  merge_residual(out, med.residual, opts.tol, "no comparison morphism");
  out.unique = jointly_injective(inv);
  if (!out.unique && out.passed) out = fail_diag("inverse limit legs are not jointly injective");
  merge_iso(out, check_isometric_iso(med.map, 16, opts.tol, rng.engine()()), "comparison is not an isometric iso");
  return out;
}

TrialDiag engine_agreement(Rng& rng, const AuditOptions& opts) {
  RandomConfig cfg;
  const MeasureSpace x = random_space(rng, cfg);
  TrialDiag out;
  const int shape = rng.integer(0, 2);
  std::optional<Diagram> ld, cd;
  std::optional<Cone> special;
  std::optional<Cocone> cospecial;
  if (shape == 0) {
    ld = random_parallel_pair(rng, x, cfg);
    special = equalizer_cone(equalizer(ld->map(2), ld->map(3)), ld->map(2));
    cd = random_parallel_pair(rng, x, cfg);
    cospecial = coequalizer_cocone(coequalizer(cd->map(2), cd->map(3)), cd->map(2));
  } else if (shape == 1) {
    ld = random_discrete(rng, x, cfg);
    special = product(ld->objects());
    cd = random_discrete(rng, x, cfg);
    cospecial = coproduct(cd->objects());
  } else {
    ld = random_cospan(rng, x, cfg);
    special = pullback_cone(pullback(ld->map(3), ld->map(4)), ld->map(3));
    cd = random_span(rng, x, cfg);
    cospecial = pushout_cocone(pushout(cd->map(3), cd->map(4)), cd->map(3));
  }
  const Cone engine = limit_of_diagram(*ld);
  const Mediator lm = mediating_morphism(*special, engine);
  merge_residual(out, lm.residual, opts.tol, "engine limit does not factor through the specialized one");
  merge_iso(out, check_isometric_iso(lm.map, 16, opts.tol, rng.engine()()), "limit comparison");
  const Cocone coengine = colimit_of_diagram(*cd);
  const Mediator cm = mediating_morphism(coengine, *cospecial);
  merge_residual(out, cm.residual, opts.tol, "specialized colimit does not factor through the engine");
  merge_iso(out, check_isometric_iso(cm.map, 16, opts.tol, rng.engine()()), "colimit comparison");
  return out;
}

TrialDiag lb_pullback(Rng& rng, const AuditOptions& opts) {
  RandomConfig cfg;
  const MeasureSpace x = random_space(rng, cfg), y = random_space(rng, cfg);
  const ModuleObj m = random_module(rng, y, cfg);
  const Morphism c = lb_pullback_comparison(x, m);
  TrialDiag out;
  merge_iso(out, check_isometric_iso(c, 8, opts.tol, rng.engine()()), "L0(X; M) comparison");
  // |chi_E v|(x, y) = chi_E(x) |v|(y), bit for bit.
  std::vector<std::size_t> e;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (rng.coin()) e.push_back(i);
  }
  const Element v = random_element(rng, m);
  const L0Fun nv = pointwise_norm(v);
  const L0Fun ns = pointwise_norm(lb_simple(c.target(), x, e, v));
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool in = std::find(e.begin(), e.end(), i) != e.end();
    for (std::size_t j = 0; j < y.size(); ++j) worst = std::max(worst, std::abs(ns[i * y.size() + j] - (in ? nv[j] : 0.0)));
  }
  merge_residual(out, worst, 0.0, "simple-map norm rule");
  return out;
}

TrialDiag invim_functoriality(Rng& rng, const AuditOptions&) {
  RandomConfig cfg;
  const MeasureSpace z = random_space(rng, cfg), x = random_space(rng, cfg), y = random_space(rng, cfg);
  const MeasMorphism sigma = random_meas_morphism(rng, z, x);
  const MeasMorphism tau = random_meas_morphism(rng, x, y);
  const ModuleObj m = random_module(rng, y, cfg), n = random_module(rng, y, cfg), p = random_module(rng, y, cfg);
  const Morphism phi = random_morphism(rng, m, n), psi = random_morphism(rng, n, p);
  TrialDiag out;
  double worst = 0.0;
  const Morphism lhs = inverse_image_morphism(tau, compose(psi, phi));
  const Morphism rhs = compose(inverse_image_morphism(tau, psi), inverse_image_morphism(tau, phi));
  for (std::size_t a = 0; a < x.size(); ++a) worst = std::max(worst, max_entry_diff(lhs.mat(a), rhs.mat(a)));
  const Morphism id = inverse_image_morphism(tau, identity(m));
  const Morphism id2 = identity(inverse_image(tau, m).module);
  for (std::size_t a = 0; a < x.size(); ++a) worst = std::max(worst, max_entry_diff(id.mat(a), id2.mat(a)));
  // (tau sigma)^* = sigma^* tau^* on objects and morphisms.
  const MeasMorphism ts = compose(tau, sigma);
  const Morphism twice = inverse_image_morphism(sigma, inverse_image_morphism(tau, phi));
  const Morphism once = inverse_image_morphism(ts, phi);
  if (twice.source() != once.source() || twice.target() != once.target()) {
    return fail_diag("(tau sigma)^* and sigma^* tau^* disagree on objects");
  }
  for (std::size_t a = 0; a < z.size(); ++a) worst = std::max(worst, max_entry_diff(twice.mat(a), once.mat(a)));
  // |tau^* v| = |v| o tau.
  const InvImResult inv = inverse_image(tau, m);
  const Element v = random_element(rng, m);
  const L0Fun up = pointwise_norm(inv.lift(v));
  const L0Fun down = pointwise_norm(v);
  for (std::size_t a = 0; a < x.size(); ++a) worst = std::max(worst, std::abs(up[a] - down[tau(a)]));
  merge_residual(out, worst, 0.0, "inverse image is not functorial");
  return out;
}

// Mono: injective maps cancel on the left; a non-mono admits g != h with
// phi g = phi h built from its kernel. Epi dually with the left kernel.
TrialDiag mono_epi(Rng& rng, const AuditOptions& opts) {
  constexpr int kProbes = 20;
  RandomConfig cfg;
  const MeasureSpace x = random_space(rng, cfg);
  const ModuleObj m = random_module(rng, x, cfg), n = random_module(rng, x, cfg);
  const Morphism phi = random_morphism(rng, m, n, rng.coin(0.5) ? rng.integer(0, 3) : -1);
  TrialDiag out;
  const bool mono = is_mono(phi), epi = is_epi(phi);
  bool rank_mono = true, rank_epi = true;
  for (const Mat& a : phi.mats()) {
    rank_mono = rank_mono && (a.cols() == 0 || null_space(a).cols() == 0);
    rank_epi = rank_epi && (a.rows() == 0 || null_space(a.transpose()).cols() == 0);
  }
  if (mono != rank_mono || epi != rank_epi) return fail_diag("mono/epi flags disagree with the rank oracle");
  auto pair_scale = [](const std::vector<Mat>& g, const std::vector<Mat>& h, const ModuleObj& s, const ModuleObj& t) {
    double worst = 0.0;
    for (std::size_t a = 0; a < g.size(); ++a) {
      worst = std::max(worst, op_norm(g[a], s.fiber(a), t.fiber(a)).upper);
      worst = std::max(worst, op_norm(h[a], s.fiber(a), t.fiber(a)).upper);
    }
    return worst > 0.0 ? 1.0 / worst : 1.0;
  };
  for (int k = 0; k < kProbes && out.passed; ++k) {
    const ModuleObj z = random_module(rng, x, cfg);
    // Left cancellation.
    {
      std::vector<Mat> g, h;
      bool differ = false;
      for (std::size_t a = 0; a < x.size(); ++a) {
        g.push_back(rng.mat(m.dim(a), z.dim(a)));
        Mat hh = rng.mat(m.dim(a), z.dim(a));
        if (!mono) {
          const Mat ker = phi.mat(a).cols() == 0 ? Mat(0, 0) : null_space(phi.mat(a));
          hh = ker.cols() > 0 ? Mat(g.back() + ker * rng.mat(ker.cols(), z.dim(a))) : g.back();
        }
        differ = differ || max_entry_diff(hh, g.back()) > 1e-6;
        h.push_back(std::move(hh));
      }
      const double s = pair_scale(g, h, z, m);
      double gap = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) {
        g[a] *= s;
        h[a] *= s;
        gap = std::max(gap, max_entry_diff(phi.mat(a) * g[a], phi.mat(a) * h[a]));
      }
      if (!Morphism::unchecked(z, m, g).certified(opts.tol) || !Morphism::unchecked(z, m, h).certified(opts.tol)) {
        return fail_diag("probe is not a morphism");
      }
      if (mono && differ && gap <= 1e-12) return fail_diag("mono failed to cancel a probe pair");
      if (!mono && differ && gap > 1e-9) return fail_diag("kernel probe pair was separated");
    }
    // Right cancellation.
    {
      std::vector<Mat> g, h;
      bool differ = false;
      for (std::size_t a = 0; a < x.size(); ++a) {
        g.push_back(rng.mat(z.dim(a), n.dim(a)));
        Mat hh = rng.mat(z.dim(a), n.dim(a));
        if (!epi) {
          const Mat cok = phi.mat(a).rows() == 0 ? Mat(0, 0) : null_space(phi.mat(a).transpose());
          hh = cok.cols() > 0 ? Mat(g.back() + rng.mat(z.dim(a), cok.cols()) * cok.transpose()) : g.back();
        }
        differ = differ || max_entry_diff(hh, g.back()) > 1e-6;
        h.push_back(std::move(hh));
      }
      const double s = pair_scale(g, h, n, z);
      double gap = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) {
        g[a] *= s;
        h[a] *= s;
        gap = std::max(gap, max_entry_diff(g[a] * phi.mat(a), h[a] * phi.mat(a)));
      }
      if (epi && differ && gap <= 1e-12) return fail_diag("epi failed to cancel a probe pair");
      if (!epi && differ && gap > 1e-9) return fail_diag("cokernel probe pair was separated");
    }
  }
  return out;
}

using TrialFn = std::function<TrialDiag(Rng&, const AuditOptions&)>;

const std::map<std::string, TrialFn>& registry() {
  static const std::map<std::string, TrialFn> r = [] {
    std::map<std::string, TrialFn> m;
    auto lim = [&m](const std::string& name, LimitBuilder b) {
      m[name] = [b](Rng& rng, const AuditOptions& o) { return limit_trial(rng, o, b); };
    };
    auto colim = [&m](const std::string& name, ColimitBuilder b) {
      m[name] = [b](Rng& rng, const AuditOptions& o) { return colimit_trial(rng, o, b); };
    };
    lim("kernel", kernel_case);
    lim("equalizer", equalizer_case);
    lim("product", product_case);
    lim("pullback", pullback_case);
    lim("inverse-limit", inverse_limit_case);
    lim("limit-engine", limit_engine_case);
    colim("cokernel", cokernel_case);
    colim("coequalizer", coequalizer_case);
    colim("coproduct", coproduct_case);
    colim("pushout", pushout_case);
    colim("direct-limit", direct_limit_case);
    colim("colimit-engine", colimit_engine_case);
    m["hom-continuity"] = hom_continuity;
    m["invim-pullback-square"] = invim_square;
    m["invim-direct-limit"] = invim_direct_limit;
    m["dual-direct-limit"] = dual_direct_limit;
    m["engine-agreement"] = engine_agreement;
    m["lb-pullback"] = lb_pullback;
    m["invim-functoriality"] = invim_functoriality;
    m["mono-epi"] = mono_epi;
    return m;
  }();
  return r;
}

}  // namespace

const std::vector<std::string>& audit_names() {
  static const std::vector<std::string> names = {
      "kernel",         "equalizer",         "product",
      "pullback",       "inverse-limit",     "cokernel",
      "coequalizer",    "coproduct",         "pushout",
      "direct-limit",   "limit-engine",      "colimit-engine",
      "hom-continuity", "invim-pullback-square", "invim-direct-limit",
      "dual-direct-limit", "engine-agreement", "lb-pullback",
      "invim-functoriality", "mono-epi"};
  return names;
}

const std::vector<std::string>& fault_injectable() {
  static const std::vector<std::string> names = {"kernel",   "equalizer",   "product",   "pullback",
                                                 "inverse-limit", "limit-engine", "cokernel", "coequalizer",
                                                 "coproduct", "pushout",     "direct-limit", "colimit-engine"};
  return names;
}

bool is_audit_name(const std::string& name) { return registry().count(name) > 0; }

int audit_thread_cap() {
  int cap = omp_get_max_threads();
  if (const char* env = std::getenv("BANMOD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) cap = static_cast<int>(std::min<long>(v, 1024));
  }
  return std::max(1, cap);
}

TrialDiag run_trial(const std::string& name, int trial, const AuditOptions& opts) {
  auto it = registry().find(name);
  if (it == registry().end()) fail(Errc::invalid_argument, "unknown audit " + name);
  if (opts.inject_fault && std::find(fault_injectable().begin(), fault_injectable().end(), name) == fault_injectable().end()) {
    fail(Errc::invalid_argument, "audit " + name + " has no constructed legs to corrupt");
  }
  const std::uint64_t seed = derive_seed(opts.seed, static_cast<std::uint64_t>(trial));
  Rng rng(seed);
  TrialDiag d;
  try {
    d = it->second(rng, opts);
  } catch (const std::exception& e) {
    d = TrialDiag{};
    d.passed = false;
    d.detail = std::string("error: ") + e.what();
  }
  d.trial = trial;
  d.seed = seed;
  return d;
}

AuditReport run_audit(const std::string& name, const AuditOptions& opts) {
  if (!is_audit_name(name)) fail(Errc::invalid_argument, "unknown audit " + name);
  if (opts.trials < 1) fail(Errc::invalid_argument, "trials must be positive");
  if (!(opts.tol > 0.0)) fail(Errc::invalid_argument, "tolerance must be positive");
  if (opts.inject_fault && std::find(fault_injectable().begin(), fault_injectable().end(), name) == fault_injectable().end()) {
    fail(Errc::invalid_argument, "audit " + name + " has no constructed legs to corrupt");
  }
  const auto start = std::chrono::steady_clock::now();
  std::vector<TrialDiag> diags(static_cast<std::size_t>(opts.trials));
  if (opts.parallel) {
    Eigen::setNbThreads(1);
#pragma omp parallel for schedule(dynamic, 1) num_threads(audit_thread_cap())
    for (int t = 0; t < opts.trials; ++t) diags[static_cast<std::size_t>(t)] = run_trial(name, t, opts);
  } else {
    for (int t = 0; t < opts.trials; ++t) diags[static_cast<std::size_t>(t)] = run_trial(name, t, opts);
  }
  AuditReport rep;
  rep.construction = name;
  rep.seed = opts.seed;
  rep.trials = opts.trials;
  rep.tol = opts.tol;
  rep.fault_injection = opts.inject_fault;
  for (TrialDiag& d : diags) {
    rep.max_residual = std::max(rep.max_residual, d.residual);
    rep.uniqueness = rep.uniqueness && d.unique;
    if (!d.passed) {
      rep.passed = false;
      ++rep.failed_trials;
    }
  }
  rep.diagnostics = std::move(diags);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace banmod

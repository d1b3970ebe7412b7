#include "banmod/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "banmod/error.hpp"

namespace banmod {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

Mat stack_rows(const std::vector<const Mat*>& parts, Index cols) {
  Index rows = 0;
  for (const Mat* m : parts) rows += m->rows();
  Mat out(rows, cols);
  Index r = 0;
  for (const Mat* m : parts) {
    out.middleRows(r, m->rows()) = *m;
    r += m->rows();
  }
  return out;
}

Mat stack_cols(const std::vector<const Mat*>& parts, Index rows) {
  Index cols = 0;
  for (const Mat* m : parts) cols += m->cols();
  Mat out(rows, cols);
  Index c = 0;
  for (const Mat* m : parts) {
    out.middleCols(c, m->cols()) = *m;
    c += m->cols();
  }
  return out;
}

// Draws a random point of null(c) (all of R^n when c has no rows).
Vec random_in_null(Rng& rng, const Mat& c, Index n) {
  const Vec r = rng.vec(n);
  if (c.rows() == 0) return r;
  const Mat k = null_space(c);
  return k * (k.transpose() * r);
}

// Rescales per atom so that the largest leg norm becomes a random factor in
// [0.5, 1]; zero legs stay zero.
std::vector<Morphism> rescale(Rng& rng, const std::vector<ModuleObj>& sources, const std::vector<ModuleObj>& targets,
                              std::vector<std::vector<Mat>> mats) {
  const std::size_t legs = mats.size();
  const std::size_t atoms = sources.front().size();
  std::vector<std::vector<NormBound>> bounds(legs, std::vector<NormBound>(atoms));
  for (std::size_t a = 0; a < atoms; ++a) {
    const double u = rng.uniform(0.5, 1.0);
    double worst = 0.0;
    std::vector<OpNormResult> rs;
    for (std::size_t i = 0; i < legs; ++i) {
      rs.push_back(op_norm(mats[i][a], sources[i].fiber(a), targets[i].fiber(a)));
      worst = std::max(worst, rs.back().upper);
    }
    const double s = worst > 0.0 ? u / worst : 1.0;
    for (std::size_t i = 0; i < legs; ++i) {
      mats[i][a] *= s;
      bounds[i][a] = NormBound{rs[i].lower * s, rs[i].upper * s, rs[i].exact};
    }
  }
  std::vector<Morphism> out;
  for (std::size_t i = 0; i < legs; ++i) {
    out.push_back(Morphism::trusted(sources[i], targets[i], std::move(mats[i]), std::move(bounds[i])));
  }
  return out;
}

std::string leg_violation(const Morphism& leg) {
  for (std::size_t a = 0; a < leg.mats().size(); ++a) {
    const OpNormResult r = op_norm(leg.mat(a), leg.source().fiber(a), leg.target().fiber(a));
    if (r.lower > 1.0 + kAuditTol) {
      return "atom " + leg.source().space().atom(a).id + " has operator norm " + fmt(r.value);
    }
  }
  return {};
}

template <class Probe>
AuditReport fixed_audit(const std::string& name, int trials, std::uint64_t seed, double tol, Probe probe) {
  AuditReport rep;
  rep.construction = name;
  rep.seed = seed;
  rep.trials = trials;
  rep.tol = tol;
  for (int t = 0; t < trials; ++t) {
    TrialDiag d;
    d.trial = t;
    d.seed = derive_seed(seed, static_cast<std::uint64_t>(t));
    Rng rng(d.seed);
    const ProbeResult p = probe(rng);
    d.passed = p.ok;
    d.unique = p.unique;
    d.residual = p.residual;
    d.detail = p.detail;
    rep.diagnostics.push_back(d);
    rep.max_residual = std::max(rep.max_residual, p.residual);
    rep.uniqueness = rep.uniqueness && p.unique;
    if (!p.ok) {
      rep.passed = false;
      ++rep.failed_trials;
    }
  }
  return rep;
}

}  // namespace

Mediator mediating_morphism(const Cone& limit, const Cone& cone) {
  if (limit.legs.size() != cone.legs.size()) fail(Errc::invalid_argument, "cones over different diagrams");
  const ModuleObj& l = limit.apex;
  const ModuleObj& c = cone.apex;
  std::vector<Mat> phi;
  double worst = 0.0;
  for (std::size_t a = 0; a < l.size(); ++a) {
    std::vector<const Mat*> s, t;
    for (std::size_t i = 0; i < limit.legs.size(); ++i) {
      s.push_back(&limit.legs[i].mat(a));
      t.push_back(&cone.legs[i].mat(a));
    }
    const Mat sm = stack_rows(s, l.dim(a));
    const Mat tm = stack_rows(t, c.dim(a));
    Mat p = l.dim(a) == 0 || c.dim(a) == 0 ? Mat(Mat::Zero(l.dim(a), c.dim(a))) : least_squares(sm, tm);
    worst = std::max(worst, max_entry_diff(sm * p, tm));
    phi.push_back(std::move(p));
  }
  return Mediator{Morphism::unchecked(c, l, std::move(phi)), worst};
}

Mediator mediating_morphism(const Cocone& colimit, const Cocone& cocone) {
  if (colimit.legs.size() != cocone.legs.size()) fail(Errc::invalid_argument, "cocones over different diagrams");
  const ModuleObj& l = colimit.nadir;
  const ModuleObj& c = cocone.nadir;
  std::vector<Mat> phi;
  double worst = 0.0;
  for (std::size_t a = 0; a < l.size(); ++a) {
    std::vector<const Mat*> s, t;
    for (std::size_t i = 0; i < colimit.legs.size(); ++i) {
      s.push_back(&colimit.legs[i].mat(a));
      t.push_back(&cocone.legs[i].mat(a));
    }
    const Mat sm = stack_cols(s, l.dim(a));
    const Mat tm = stack_cols(t, c.dim(a));
    Mat p = l.dim(a) == 0 || c.dim(a) == 0 ? Mat(Mat::Zero(c.dim(a), l.dim(a)))
                                           : Mat(least_squares(sm.transpose(), tm.transpose()).transpose());
    worst = std::max(worst, max_entry_diff(p * sm, tm));
    phi.push_back(std::move(p));
  }
  return Mediator{Morphism::unchecked(l, c, std::move(phi)), worst};
}

bool jointly_injective(const Cone& c) {
  for (std::size_t a = 0; a < c.apex.size(); ++a) {
    if (c.apex.dim(a) == 0) continue;
    std::vector<const Mat*> s;
    for (const Morphism& leg : c.legs) s.push_back(&leg.mat(a));
    if (!has_full_column_rank(stack_rows(s, c.apex.dim(a)))) return false;
  }
  return true;
}

bool jointly_surjective(const Cocone& c) {
  for (std::size_t a = 0; a < c.nadir.size(); ++a) {
    if (c.nadir.dim(a) == 0) continue;
    std::vector<const Mat*> s;
    for (const Morphism& leg : c.legs) s.push_back(&leg.mat(a));
    if (!has_full_row_rank(stack_cols(s, c.nadir.dim(a)))) return false;
  }
  return true;
}

Cone random_cone(Rng& rng, const Diagram& d, const ModuleObj& apex) {
  const FiniteCategory& cat = d.index();
  const std::size_t n = cat.num_objects();
  std::vector<std::vector<Mat>> legs(n);
  for (std::size_t a = 0; a < d.space().size(); ++a) {
    const Index p = apex.dim(a);
    std::vector<Index> off(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) off[i + 1] = off[i] + d.object(i).dim(a) * p;
    Index rows = 0;
    for (std::size_t k = n; k < cat.num_arrows(); ++k) rows += d.object(cat.arrow(k).cod).dim(a) * p;
    // vec(D L) = (I_p kron D) vec(L), column-major.
    Mat c = Mat::Zero(rows, off[n]);
    Index r = 0;
    for (std::size_t k = n; k < cat.num_arrows(); ++k) {
      const IndexArrow& f = cat.arrow(k);
      const Index dc = d.object(f.cod).dim(a) * p;
      if (dc == 0) continue;
      c.block(r, off[f.dom], dc, off[f.dom + 1] - off[f.dom]) = kron(Mat::Identity(p, p), d.map(k).mat(a));
      c.block(r, off[f.cod], dc, dc) -= Mat::Identity(dc, dc);
      r += dc;
    }
    const Vec x = off[n] == 0 ? Vec(0) : random_in_null(rng, c, off[n]);
    for (std::size_t i = 0; i < n; ++i) {
      legs[i].push_back(Eigen::Map<const Mat>(x.data() + off[i], d.object(i).dim(a), p));
    }
  }
  std::vector<ModuleObj> sources(n, apex);
  Cone out{apex, rescale(rng, sources, d.objects(), std::move(legs))};
  return out;
}

Cocone random_cocone(Rng& rng, const Diagram& d, const ModuleObj& nadir) {
  const FiniteCategory& cat = d.index();
  const std::size_t n = cat.num_objects();
  std::vector<std::vector<Mat>> legs(n);
  for (std::size_t a = 0; a < d.space().size(); ++a) {
    const Index q = nadir.dim(a);
    std::vector<Index> off(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) off[i + 1] = off[i] + d.object(i).dim(a) * q;
    Index rows = 0;
    for (std::size_t k = n; k < cat.num_arrows(); ++k) rows += d.object(cat.arrow(k).dom).dim(a) * q;
    // vec(L D) = (D^T kron I_q) vec(L).
    Mat c = Mat::Zero(rows, off[n]);
    Index r = 0;
    for (std::size_t k = n; k < cat.num_arrows(); ++k) {
      const IndexArrow& f = cat.arrow(k);
      const Index dd = d.object(f.dom).dim(a) * q;
      if (dd == 0) continue;
      c.block(r, off[f.cod], dd, off[f.cod + 1] - off[f.cod]) = kron(d.map(k).mat(a).transpose(), Mat::Identity(q, q));
      c.block(r, off[f.dom], dd, dd) -= Mat::Identity(dd, dd);
      r += dd;
    }
    const Vec x = off[n] == 0 ? Vec(0) : random_in_null(rng, c, off[n]);
    for (std::size_t i = 0; i < n; ++i) {
      legs[i].push_back(Eigen::Map<const Mat>(x.data() + off[i], q, d.object(i).dim(a)));
    }
  }
  std::vector<ModuleObj> targets(n, nadir);
  return Cocone{nadir, rescale(rng, d.objects(), targets, std::move(legs))};
}

ProbeResult probe_limit(Rng& rng, const Diagram& d, const Cone& limit, const ProbeOptions& opts) {
  ProbeResult out;
  auto fail_with = [&](const std::string& why) {
    if (out.ok) out.detail = why;
    out.ok = false;
  };
  const double r = cone_residual(d, limit);
  out.residual = r;
  if (r > opts.tol) fail_with("limit cone does not commute (residual " + fmt(r) + ")");
  if (opts.check_legs) {
    for (std::size_t i = 0; i < limit.legs.size(); ++i) {
      const std::string v = leg_violation(limit.legs[i]);
      if (!v.empty()) fail_with("leg to object " + d.index().object(i) + ": " + v);
    }
  }
  out.unique = jointly_injective(limit);
  if (!out.unique) fail_with("limit legs are not jointly injective");
  for (int k = 0; k < opts.cones; ++k) {
    const ModuleObj apex = random_module(rng, d.space(), opts.apex);
    const Cone cone = random_cone(rng, d, apex);
    const Mediator m = mediating_morphism(limit, cone);
    out.residual = std::max(out.residual, m.residual);
    if (m.residual > opts.tol) fail_with("no mediating morphism (residual " + fmt(m.residual) + ")");
    const std::string v = leg_violation(m.map);
    if (!v.empty()) fail_with("mediating morphism: " + v);
  }
  return out;
}

ProbeResult probe_colimit(Rng& rng, const Diagram& d, const Cocone& colimit, const ProbeOptions& opts) {
  ProbeResult out;
  auto fail_with = [&](const std::string& why) {
    if (out.ok) out.detail = why;
    out.ok = false;
  };
  const double r = cocone_residual(d, colimit);
  out.residual = r;
  if (r > opts.tol) fail_with("colimit cocone does not commute (residual " + fmt(r) + ")");
  if (opts.check_legs) {
    for (std::size_t i = 0; i < colimit.legs.size(); ++i) {
      const std::string v = leg_violation(colimit.legs[i]);
      if (!v.empty()) fail_with("leg from object " + d.index().object(i) + ": " + v);
    }
  }
  out.unique = jointly_surjective(colimit);
  if (!out.unique) fail_with("colimit legs are not jointly surjective");
  for (int k = 0; k < opts.cones; ++k) {
    const ModuleObj nadir = random_module(rng, d.space(), opts.apex);
    const Cocone cocone = random_cocone(rng, d, nadir);
    const Mediator m = mediating_morphism(colimit, cocone);
    out.residual = std::max(out.residual, m.residual);
    if (m.residual > opts.tol) fail_with("no mediating morphism (residual " + fmt(m.residual) + ")");
    const std::string v = leg_violation(m.map);
    if (!v.empty()) fail_with("mediating morphism: " + v);
  }
  return out;
}

AuditReport check_universal(const Diagram& d, const Cone& limit, int trials, std::uint64_t seed, double tol) {
  ProbeOptions opts;
  opts.tol = tol;
  return fixed_audit("limit", trials, seed, tol, [&](Rng& rng) { return probe_limit(rng, d, limit, opts); });
}

AuditReport check_couniversal(const Diagram& d, const Cocone& colimit, int trials, std::uint64_t seed, double tol) {
  ProbeOptions opts;
  opts.tol = tol;
  return fixed_audit("colimit", trials, seed, tol, [&](Rng& rng) { return probe_colimit(rng, d, colimit, opts); });
}

IsoReport check_isometric_iso(const Morphism& phi, int samples, double tol, std::uint64_t seed) {
  IsoReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  const ModuleObj& s = phi.source();
  const ModuleObj& t = phi.target();
  auto fail_with = [&](const std::string& why) {
    if (rep.ok) rep.detail = why;
    rep.ok = false;
  };
  for (std::size_t a = 0; a < s.size(); ++a) {
    const std::string atom = s.space().atom(a).id;
    const Mat& m = phi.mat(a);
    if (m.rows() != m.cols()) {
      fail_with("atom " + atom + ": fiber dimensions differ");
      continue;
    }
    const Index n = m.cols();
    if (n == 0) continue;
    if (!has_full_column_rank(m)) {
      fail_with("atom " + atom + ": not invertible");
      continue;
    }
    const Mat inv = m.fullPivLu().inverse();
    std::vector<Vec> pts;
    for (Index i = 0; i < n; ++i) {
      pts.push_back(Vec::Unit(n, i));
      pts.push_back(inv.col(i));
    }
    for (int k = 0; k < samples; ++k) pts.push_back(rng.vec(n));
    if (auto c = extreme_candidates(s.fiber(a), 512)) {
      for (const Vec& v : *c) pts.push_back(v);
    }
    if (auto c = extreme_candidates(t.fiber(a), 512)) {
      for (const Vec& w : *c) pts.push_back(inv * w);
    }
    for (const Vec& v : pts) {
      // Candidate generators can emit numerically zero points.
      if (v.norm() < 1e-9) continue;
      const double nv = eval_norm(s.fiber(a), v, 1e-12);
      const double nw = eval_norm(t.fiber(a), m * v, 1e-12);
      if (nv <= 0.0) continue;
      const double ratio = nw / nv;
      const double err = std::abs(nw - nv) / nv;
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      rep.min_ratio = std::min(rep.min_ratio, ratio);
      if (err > rep.max_error) rep.max_error = err;
      if (err > tol) fail_with("atom " + atom + ": norm ratio " + fmt(ratio));
    }
  }
  if (!std::isfinite(rep.min_ratio)) rep.min_ratio = rep.max_ratio;
  return rep;
}

const Series& TrendReport::get(const std::string& series_name) const {
  for (const Series& s : series) {
    if (s.name == series_name) return s;
  }
  fail(Errc::invalid_argument, "no series named " + series_name);
}

}  // namespace banmod

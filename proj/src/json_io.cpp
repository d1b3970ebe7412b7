#include "banmod/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "banmod/colimits.hpp"
#include "banmod/error.hpp"
#include "banmod/limits.hpp"
#include "banmod/random.hpp"

namespace banmod {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(Errc::parse_error, what); }

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(where + ": missing \"" + key + "\"");
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) bad(where + ": expected a number");
  return j.get<double>();
}

std::string text(const Json& j, const std::string& where) {
  if (!j.is_string()) bad(where + ": expected a string");
  return j.get<std::string>();
}

Json mat_json(const Mat& a) {
  Json rows = Json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    Json r = Json::array();
    for (Index k = 0; k < a.cols(); ++k) r.push_back(a(i, k));
    rows.push_back(std::move(r));
  }
  return rows;
}

// Rows of numbers. `cols` < 0 infers the width from the first row.
Mat mat_from(const Json& j, Index rows, Index cols, const std::string& where) {
  if (!j.is_array()) bad(where + ": expected an array of rows");
  if (rows >= 0 && static_cast<Index>(j.size()) != rows) {
    bad(where + ": expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  }
  const Index r = static_cast<Index>(j.size());
  Index c = cols;
  if (c < 0) c = r == 0 ? 0 : (j[0].is_array() ? static_cast<Index>(j[0].size()) : -1);
  Mat out(r, std::max<Index>(c, 0));
  for (Index i = 0; i < r; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != c) {
      bad(where + ": row " + std::to_string(i) + " should have " + std::to_string(c) + " entries");
    }
    for (Index k = 0; k < c; ++k) out(i, k) = number(row[static_cast<std::size_t>(k)], where);
  }
  return out;
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vec vec_from(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where + ": expected an array of numbers");
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = number(j[i], where);
  return v;
}

Json p_json(PNorm p) {
  switch (p) {
    case PNorm::one: return 1;
    case PNorm::two: return 2;
    case PNorm::inf: return "inf";
  }
  return "inf";
}

PNorm p_from(const Json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "inf") return PNorm::inf;
  if (j.is_number()) {
    const double p = j.get<double>();
    if (p == 1.0) return PNorm::one;
    if (p == 2.0) return PNorm::two;
  }
  bad(where + ": p must be 1, 2 or \"inf\"");
}

Json parts_json(const std::vector<NormPart>& parts) {
  Json a = Json::array();
  for (const NormPart& p : parts) a.push_back(to_json(p.norm));
  return a;
}

std::vector<NormExpr> parts_from(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where + ": expected an array of norms");
  std::vector<NormExpr> out;
  for (const Json& p : j) out.push_back(norm_from_json(p));
  return out;
}

// Keys of an object in the order of the space's atoms; every atom exactly once.
std::vector<const Json*> per_atom(const Json& j, const MeasureSpace& x, const std::string& where) {
  if (!j.is_object()) bad(where + ": expected an object keyed by atom id");
  std::vector<const Json*> out(x.size(), nullptr);
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::size_t k = x.size();
    for (std::size_t a = 0; a < x.size(); ++a) {
      if (x.atom(a).id == it.key()) k = a;
    }
    if (k == x.size()) bad(where + ": unknown atom \"" + it.key() + "\"");
    out[k] = &it.value();
  }
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (out[a] == nullptr) bad(where + ": atom \"" + x.atom(a).id + "\" missing");
  }
  return out;
}

const ModuleObj& lookup_module(const Instance& inst, const Json& j, const std::string& where) {
  const std::string name = text(j, where);
  auto it = inst.modules.find(name);
  if (it == inst.modules.end()) bad(where + ": unknown module \"" + name + "\"");
  return it->second;
}

const Morphism& lookup_morphism(const Instance& inst, const Json& j, const std::string& where) {
  const std::string name = text(j, where);
  auto it = inst.morphisms.find(name);
  if (it == inst.morphisms.end()) bad(where + ": unknown morphism \"" + name + "\"");
  return it->second;
}

Diagram diagram_from(const Json& j, const Instance& inst, const std::string& where) {
  const Json& objs = field(j, "objects", where);
  if (!objs.is_array() || objs.empty()) bad(where + ".objects: expected a nonempty array");
  std::vector<std::string> names;
  std::vector<ModuleObj> modules;
  for (const Json& o : objs) {
    names.push_back(text(field(o, "id", where + ".objects"), where + ".objects.id"));
    modules.push_back(lookup_module(inst, field(o, "module", where + ".objects"), where + ".objects.module"));
  }
  auto object_index = [&](const Json& v, const std::string& w) {
    const std::string id = text(v, w);
    auto it = std::find(names.begin(), names.end(), id);
    if (it == names.end()) bad(w + ": unknown object \"" + id + "\"");
    return static_cast<std::size_t>(it - names.begin());
  };
  std::vector<IndexArrow> arrows;
  std::vector<Morphism> maps;
  std::vector<std::string> arrow_ids;
  if (j.contains("arrows")) {
    const Json& as = j.at("arrows");
    if (!as.is_array()) bad(where + ".arrows: expected an array");
    for (const Json& a : as) {
      const std::string w = where + ".arrows";
      IndexArrow ia{text(field(a, "id", w), w + ".id"), object_index(field(a, "dom", w), w + ".dom"),
                    object_index(field(a, "cod", w), w + ".cod")};
      arrow_ids.push_back(ia.id);
      arrows.push_back(ia);
      maps.push_back(lookup_morphism(inst, field(a, "map", w), w + ".map"));
    }
  }
  auto arrow_index = [&](const Json& v, const std::string& w) {
    const std::string id = text(v, w);
    if (id == "id") return FiniteCategory::kIdentity;
    auto it = std::find(arrow_ids.begin(), arrow_ids.end(), id);
    if (it == arrow_ids.end()) bad(w + ": unknown arrow \"" + id + "\"");
    return static_cast<std::size_t>(it - arrow_ids.begin());
  };
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> comp;
  if (j.contains("compose")) {
    const Json& cs = j.at("compose");
    if (!cs.is_array()) bad(where + ".compose: expected an array");
    for (const Json& c : cs) {
      const std::string w = where + ".compose";
      const std::size_t g = arrow_index(field(c, "after", w), w + ".after");
      const std::size_t f = arrow_index(field(c, "before", w), w + ".before");
      if (g == FiniteCategory::kIdentity || f == FiniteCategory::kIdentity) bad(w + ": identities compose implicitly");
      comp[{g, f}] = arrow_index(field(c, "result", w), w + ".result");
    }
  }
  return Diagram(FiniteCategory(names, arrows, comp), std::move(modules), std::move(maps));
}

Json diag_json(const TrialDiag& d) {
  return Json{{"trial", d.trial}, {"seed", d.seed}, {"passed", d.passed}, {"unique", d.unique},
              {"residual", d.residual}, {"detail", d.detail}};
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Localized commutation diagnostics: one line per arrow and atom over tol.
// Leg norms are left to the probe, which recomputes them.
void cone_diagnostics(const Diagram& d, const std::vector<Morphism>& legs, bool cocone, double tol,
                      CheckReport& rep) {
  const FiniteCategory& cat = d.index();
  for (std::size_t k = cat.num_objects(); k < cat.num_arrows(); ++k) {
    const IndexArrow& a = cat.arrow(k);
    for (std::size_t x = 0; x < d.space().size(); ++x) {
      const double r = cocone ? max_entry_diff(legs[a.cod].mat(x) * d.map(k).mat(x), legs[a.dom].mat(x))
                              : max_entry_diff(d.map(k).mat(x) * legs[a.dom].mat(x), legs[a.cod].mat(x));
      rep.max_residual = std::max(rep.max_residual, r);
      if (r > tol) {
        rep.passed = false;
        rep.diagnostics.push_back("arrow " + a.id + ", atom " + d.space().atom(x).id + ": commutation residual " +
                                  num(r));
      }
    }
  }
}

}  // namespace

Json to_json(const MeasureSpace& x) {
  Json atoms = Json::array();
  for (const Atom& a : x.atoms()) atoms.push_back(Json{{"id", a.id}, {"mass", a.mass}});
  return Json{{"atoms", atoms}};
}

MeasureSpace space_from_json(const Json& j) {
  const Json& atoms = field(j, "atoms", "space");
  if (!atoms.is_array() || atoms.empty()) bad("space.atoms: expected a nonempty array");
  std::vector<Atom> out;
  for (const Json& a : atoms) {
    out.push_back(Atom{text(field(a, "id", "space.atoms"), "space.atoms.id"),
                       number(field(a, "mass", "space.atoms"), "space.atoms.mass")});
  }
  try {
    return MeasureSpace(std::move(out));
  } catch (const Error& e) {
    bad(std::string("space: ") + e.what());
  }
}

Json to_json(const MeasMorphism& tau) {
  Json m = Json::object();
  for (std::size_t k = 0; k < tau.source().size(); ++k) m[tau.source().atom(k).id] = tau.target().atom(tau(k)).id;
  return Json{{"map", m}};
}

MeasMorphism meas_morphism_from_json(const Json& j, const MeasureSpace& source, const MeasureSpace& target) {
  const std::vector<const Json*> by_atom = per_atom(field(j, "map", "meas morphism"), source, "meas morphism.map");
  std::map<std::string, std::string> m;
  for (std::size_t k = 0; k < source.size(); ++k) m[source.atom(k).id] = text(*by_atom[k], "meas morphism.map");
  try {
    return MeasMorphism(source, target, m);
  } catch (const Error& e) {
    bad(std::string("meas morphism: ") + e.what());
  }
}

Json to_json(const NormExpr& n) {
  switch (n.kind()) {
    case NormKind::lp: {
      const LpNode& l = *n.as_lp();
      return Json{{"lp", Json{{"p", p_json(l.p)}, {"weights", vec_json(l.weights)}}}};
    }
    case NormKind::sup_of: return Json{{"sup", parts_json(n.as_sup()->parts)}};
    case NormKind::sum_of: return Json{{"sum", parts_json(n.as_sum()->parts)}};
    case NormKind::quotient: {
      const QuotientNode& q = *n.as_quotient();
      return Json{{"quotient", Json{{"ambient", to_json(q.ambient)}, {"basis", mat_json(q.basis)},
                                    {"cols", q.basis.cols()}}}};
    }
    case NormKind::dual: return Json{{"dual", to_json(n.as_dual()->inner)}};
    case NormKind::op_norm: {
      const OpNormNode& o = *n.as_op_norm();
      return Json{{"op_norm", Json{{"src", to_json(o.src)}, {"tgt", to_json(o.tgt)}}}};
    }
    case NormKind::compose: {
      const ComposeNode& c = *n.as_compose();
      Json body{{"embed", mat_json(c.embed)}, {"inner", to_json(c.inner)}, {"cols", c.embed.cols()}};
      if (!has_full_column_rank(c.embed)) body["seminorm"] = true;
      return Json{{"compose", body}};
    }
  }
  bad("unknown norm kind");
}

NormExpr norm_from_json(const Json& j) {
  if (!j.is_object() || j.size() != 1) bad("norm: expected an object with exactly one key");
  const std::string key = j.begin().key();
  const Json& body = j.begin().value();
  try {
    if (key == "lp") {
      const PNorm p = p_from(field(body, "p", "lp"), "lp.p");
      if (body.contains("weights")) return lp(p, vec_from(body.at("weights"), "lp.weights"));
      const double d = number(field(body, "dim", "lp"), "lp.dim");
      if (d < 0 || d != static_cast<double>(static_cast<Index>(d))) bad("lp.dim: expected a nonnegative integer");
      return lp(p, static_cast<Index>(d));
    }
    if (key == "sup") return sup_of(parts_from(body, "sup"));
    if (key == "sum") return sum_of(parts_from(body, "sum"));
    if (key == "quotient") {
      const NormExpr amb = norm_from_json(field(body, "ambient", "quotient"));
      const Index cols = body.contains("cols") ? static_cast<Index>(number(body.at("cols"), "quotient.cols")) : -1;
      return quotient_of(amb, mat_from(field(body, "basis", "quotient"), amb.dim(), cols, "quotient.basis"));
    }
    if (key == "dual") return dual_of(norm_from_json(body));
    if (key == "op_norm") {
      return op_norm_of(norm_from_json(field(body, "src", "op_norm")), norm_from_json(field(body, "tgt", "op_norm")));
    }
    if (key == "compose") {
      const NormExpr inner = norm_from_json(field(body, "inner", "compose"));
      const Index cols = body.contains("cols") ? static_cast<Index>(number(body.at("cols"), "compose.cols")) : -1;
      const bool semi = body.contains("seminorm") && body.at("seminorm").is_boolean() && body.at("seminorm").get<bool>();
      return compose_linear(mat_from(field(body, "embed", "compose"), inner.dim(), cols, "compose.embed"), inner, semi);
    }
  } catch (const Error& e) {
    if (e.code() == Errc::parse_error) throw;
    bad(key + ": " + e.what());
  }
  bad("norm: unknown kind \"" + key + "\"");
}

Json to_json(const ModuleObj& m) {
  Json f = Json::object();
  for (std::size_t k = 0; k < m.size(); ++k) f[m.space().atom(k).id] = to_json(m.fiber(k));
  return Json{{"fibers", f}};
}

ModuleObj module_from_json(const Json& j, const MeasureSpace& x) {
  const std::vector<const Json*> by_atom = per_atom(field(j, "fibers", "module"), x, "module.fibers");
  std::vector<NormExpr> fibers;
  for (const Json* f : by_atom) fibers.push_back(norm_from_json(*f));
  return ModuleObj(x, std::move(fibers));
}

Json to_json(const Element& v) {
  Json out = Json::object();
  for (std::size_t k = 0; k < v.vecs.size(); ++k) out[v.module.space().atom(k).id] = vec_json(v.vecs[k]);
  return Json{{"vectors", out}};
}

Element element_from_json(const Json& j, const ModuleObj& m) {
  const std::vector<const Json*> by_atom = per_atom(field(j, "vectors", "element"), m.space(), "element.vectors");
  std::vector<Vec> vecs;
  for (std::size_t k = 0; k < by_atom.size(); ++k) {
    vecs.push_back(vec_from(*by_atom[k], "element.vectors"));
    if (vecs.back().size() != m.dim(k)) bad("element: wrong length at atom " + m.space().atom(k).id);
  }
  return Element(m, std::move(vecs));
}

Json morphism_to_json(const Morphism& phi, const std::string& source, const std::string& target) {
  Json mats = Json::object();
  for (std::size_t k = 0; k < phi.mats().size(); ++k) mats[phi.source().space().atom(k).id] = mat_json(phi.mat(k));
  return Json{{"source", source}, {"target", target}, {"mats", mats}};
}

Json to_json(const AuditReport& r) {
  Json residuals = Json::array();
  Json trials = Json::array();
  for (const TrialDiag& d : r.diagnostics) {
    residuals.push_back(d.residual);
    trials.push_back(diag_json(d));
  }
  return Json{{"schema_version", kSchemaVersion},
              {"command", "audit"},
              {"construction", r.construction},
              {"seed", r.seed},
              {"trials", r.trials},
              {"tol", r.tol},
              {"fault_injection", r.fault_injection},
              {"passed", r.passed},
              {"uniqueness", r.uniqueness},
              {"failed_trials", r.failed_trials},
              {"max_residual", r.max_residual},
              {"residuals", residuals},
              {"diagnostics", trials},
              {"verdict", r.passed ? "pass" : "fail"},
              {"timing", Json{{"wall_seconds", r.wall_seconds}}}};
}

Json to_json(const TrendReport& r) {
  Json series = Json::array();
  for (const Series& s : r.series) series.push_back(Json{{"name", s.name}, {"values", s.values}});
  return Json{{"schema_version", kSchemaVersion},
              {"command", "demo"},
              {"name", r.name},
              {"levels", r.levels},
              {"series", series},
              {"monotone", r.monotone},
              {"verdict", r.verdict},
              {"note", r.note}};
}

Instance parse_instance(const Json& j) {
  try {
    if (!j.is_object()) bad("instance: expected an object");
    if (j.contains("schema_version")) {
      const Json& v = j.at("schema_version");
      if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
        bad("schema_version: only version " + std::to_string(kSchemaVersion) + " is supported");
      }
    }
    Instance inst{space_from_json(field(j, "space", "instance")), {}, {}, {}, Json()};
    if (j.contains("modules")) {
      const Json& ms = j.at("modules");
      if (!ms.is_object()) bad("modules: expected an object keyed by name");
      for (auto it = ms.begin(); it != ms.end(); ++it) {
        try {
          inst.modules.emplace(it.key(), module_from_json(it.value(), inst.space));
        } catch (const Error& e) {
          bad("module " + it.key() + ": " + e.what());
        }
      }
    }
    if (j.contains("morphisms")) {
      const Json& ms = j.at("morphisms");
      if (!ms.is_object()) bad("morphisms: expected an object keyed by name");
      for (auto it = ms.begin(); it != ms.end(); ++it) {
        const std::string w = "morphism " + it.key();
        const ModuleObj& s = lookup_module(inst, field(it.value(), "source", w), w + ".source");
        const ModuleObj& t = lookup_module(inst, field(it.value(), "target", w), w + ".target");
        const std::vector<const Json*> by_atom = per_atom(field(it.value(), "mats", w), inst.space, w + ".mats");
        std::vector<Mat> mats;
        for (std::size_t k = 0; k < by_atom.size(); ++k) {
          mats.push_back(mat_from(*by_atom[k], t.dim(k), s.dim(k), w + " at atom " + inst.space.atom(k).id));
        }
        inst.morphisms.emplace(it.key(), Morphism::unchecked(s, t, std::move(mats)));
      }
    }
    if (j.contains("diagrams")) {
      const Json& ds = j.at("diagrams");
      if (!ds.is_object()) bad("diagrams: expected an object keyed by name");
      for (auto it = ds.begin(); it != ds.end(); ++it) {
        try {
          inst.diagrams.emplace(it.key(), diagram_from(it.value(), inst, "diagram " + it.key()));
        } catch (const Error& e) {
          if (e.code() == Errc::parse_error) throw;
          bad("diagram " + it.key() + ": " + e.what());
        }
      }
    }
    if (j.contains("construction")) inst.construction = j.at("construction");
    return inst;
  } catch (const nlohmann::json::exception& e) {
    bad(e.what());
  }
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    bad(path + ": " + e.what());
  }
  return parse_instance(j);
}

const std::vector<std::string>& check_constructions() {
  static const std::vector<std::string> names = {"none",     "kernel",        "equalizer",    "product",
                                                 "pullback", "inverse-limit", "limit",        "cokernel",
                                                 "coequalizer", "coproduct",  "pushout",      "direct-limit",
                                                 "colimit"};
  return names;
}

CheckReport run_check(const Instance& inst, double tol, std::uint64_t seed, int cones) {
  CheckReport rep;
  for (const auto& [name, phi] : inst.morphisms) {
    for (std::size_t k = 0; k < phi.mats().size(); ++k) {
      if (phi.bound(k).lower > 1.0 + tol) {
        rep.passed = false;
        rep.diagnostics.push_back("morphism " + name + ", atom " + inst.space.atom(k).id + ": operator norm " +
                                  num(phi.bound(k).lower) + " exceeds 1");
      }
    }
  }
  if (inst.construction.is_null()) {
    rep.construction = "none";
    return rep;
  }
  const Json& c = inst.construction;
  const std::string kind = text(field(c, "kind", "construction"), "construction.kind");
  rep.construction = kind;
  if (kind == "none") return rep;
  if (std::find(check_constructions().begin(), check_constructions().end(), kind) == check_constructions().end()) {
    bad("construction.kind: unknown construction \"" + kind + "\"");
  }
  auto morphism_arg = [&](std::size_t i) -> const Morphism& {
    const Json& ms = field(c, "morphisms", "construction");
    if (!ms.is_array() || ms.size() <= i) bad("construction.morphisms: too few entries for " + kind);
    return lookup_morphism(inst, ms[i], "construction.morphisms");
  };
  auto diagram_arg = [&]() -> const Diagram& {
    const std::string name = text(field(c, "diagram", "construction"), "construction.diagram");
    auto it = inst.diagrams.find(name);
    if (it == inst.diagrams.end()) bad("construction.diagram: unknown diagram \"" + name + "\"");
    return it->second;
  };

  std::optional<Diagram> d;
  std::optional<Cone> cone;
  std::optional<Cocone> cocone;
  if (kind == "kernel") {
    const Morphism& phi = morphism_arg(0);
    d = parallel_pair_diagram(phi, Morphism::zero(phi.source(), phi.target()));
    cone = kernel_cone(kernel(phi), phi);
  } else if (kind == "equalizer") {
    d = parallel_pair_diagram(morphism_arg(0), morphism_arg(1));
    cone = equalizer_cone(equalizer(morphism_arg(0), morphism_arg(1)), morphism_arg(0));
  } else if (kind == "product") {
    const Json& ms = field(c, "modules", "construction");
    if (!ms.is_array() || ms.empty()) bad("construction.modules: expected a nonempty array");
    std::vector<ModuleObj> objs;
    for (const Json& m : ms) objs.push_back(lookup_module(inst, m, "construction.modules"));
    d = discrete_diagram(objs);
    cone = product(objs);
  } else if (kind == "pullback") {
    d = cospan_diagram(morphism_arg(0), morphism_arg(1));
    cone = pullback_cone(pullback(morphism_arg(0), morphism_arg(1)), morphism_arg(0));
  } else if (kind == "inverse-limit") {
    d = diagram_arg();
    cone = inverse_limit(*d);
  } else if (kind == "limit") {
    d = diagram_arg();
    cone = limit_of_diagram(*d);
  } else if (kind == "cokernel") {
    const Morphism& phi = morphism_arg(0);
    d = parallel_pair_diagram(phi, Morphism::zero(phi.source(), phi.target()));
    cocone = cokernel_cocone(cokernel(phi), phi);
  } else if (kind == "coequalizer") {
    d = parallel_pair_diagram(morphism_arg(0), morphism_arg(1));
    cocone = coequalizer_cocone(coequalizer(morphism_arg(0), morphism_arg(1)), morphism_arg(0));
  } else if (kind == "coproduct") {
    const Json& ms = field(c, "modules", "construction");
    if (!ms.is_array() || ms.empty()) bad("construction.modules: expected a nonempty array");
    std::vector<ModuleObj> objs;
    for (const Json& m : ms) objs.push_back(lookup_module(inst, m, "construction.modules"));
    d = discrete_diagram(objs);
    cocone = coproduct(objs);
  } else if (kind == "pushout") {
    d = span_diagram(morphism_arg(0), morphism_arg(1));
    cocone = pushout_cocone(pushout(morphism_arg(0), morphism_arg(1)), morphism_arg(0));
  } else if (kind == "direct-limit") {
    d = diagram_arg();
    cocone = direct_limit(*d);
  } else {
    d = diagram_arg();
    cocone = colimit_of_diagram(*d);
  }

  Rng rng(seed);
  ProbeOptions po;
  po.cones = cones;
  po.tol = tol;
  ProbeResult pr;
  if (cone) {
    cone_diagnostics(*d, cone->legs, false, tol, rep);
    rep.object = cone->apex;
    pr = probe_limit(rng, *d, *cone, po);
  } else {
    cone_diagnostics(*d, cocone->legs, true, tol, rep);
    rep.object = cocone->nadir;
    pr = probe_colimit(rng, *d, *cocone, po);
  }
  rep.max_residual = std::max(rep.max_residual, pr.residual);
  if (!pr.ok) {
    rep.passed = false;
    if (std::find(rep.diagnostics.begin(), rep.diagnostics.end(), pr.detail) == rep.diagnostics.end()) {
      rep.diagnostics.push_back(pr.detail);
    }
  }
  return rep;
}

Json to_json(const CheckReport& r) {
  Json out{{"schema_version", kSchemaVersion},
           {"command", "check"},
           {"construction", r.construction},
           {"passed", r.passed},
           {"max_residual", r.max_residual},
           {"diagnostics", r.diagnostics}};
  if (r.object) out["object"] = to_json(*r.object);
  return out;
}

}  // namespace banmod

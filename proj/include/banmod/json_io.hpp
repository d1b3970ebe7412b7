#ifndef BANMOD_JSON_IO_HPP_
#define BANMOD_JSON_IO_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "banmod/audit.hpp"
#include "banmod/category.hpp"
#include "banmod/measure.hpp"
#include "banmod/modcat.hpp"
#include "banmod/norm_expr.hpp"

namespace banmod {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Every reader throws Error(Errc::parse_error) on malformed input, naming
// the offending field.
Json to_json(const MeasureSpace& x);
MeasureSpace space_from_json(const Json& j);

Json to_json(const MeasMorphism& tau);
MeasMorphism meas_morphism_from_json(const Json& j, const MeasureSpace& source, const MeasureSpace& target);

Json to_json(const NormExpr& n);
NormExpr norm_from_json(const Json& j);

// Fibers keyed by atom id.
Json to_json(const ModuleObj& m);
ModuleObj module_from_json(const Json& j, const MeasureSpace& x);

Json to_json(const Element& v);
Element element_from_json(const Json& j, const ModuleObj& m);

// Matrices keyed by atom id; endpoints are named by the caller.
Json morphism_to_json(const Morphism& phi, const std::string& source, const std::string& target);

Json to_json(const AuditReport& r);
Json to_json(const TrendReport& r);

// A self-contained instance file: one space, named modules, morphisms and
// diagrams, and optionally the construction to check.
struct Instance {
  MeasureSpace space;
  std::map<std::string, ModuleObj> modules;
  std::map<std::string, Morphism> morphisms;
  std::map<std::string, Diagram> diagrams;
  Json construction;
};

Instance parse_instance(const Json& j);
Instance load_instance(const std::string& path);

struct CheckReport {
  bool passed = true;
  std::string construction;
  double max_residual = 0.0;
  std::vector<std::string> diagnostics;
  std::optional<ModuleObj> object;
};

// Morphism norms, then the requested (co)limit: commutation per arrow and
// atom, leg norms, joint injectivity or surjectivity and `cones` random
// probes of the universal property.
CheckReport run_check(const Instance& inst, double tol, std::uint64_t seed, int cones = 8);
Json to_json(const CheckReport& r);

const std::vector<std::string>& check_constructions();

}  // namespace banmod

#endif  // BANMOD_JSON_IO_HPP_

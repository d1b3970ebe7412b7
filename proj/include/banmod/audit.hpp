#ifndef BANMOD_AUDIT_HPP_
#define BANMOD_AUDIT_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "banmod/category.hpp"
#include "banmod/modcat.hpp"
#include "banmod/random.hpp"

namespace banmod {

inline constexpr double kAuditTol = 1e-9;

struct Mediator {
  Morphism map;
  double residual = 0.0;  // max entry of legs o map - cone legs
};

// Least-squares solve of limit.legs o Phi = cone.legs, atom by atom.
Mediator mediating_morphism(const Cone& limit, const Cone& cone);
// Solve of Phi o colimit.legs = cocone.legs.
Mediator mediating_morphism(const Cocone& colimit, const Cocone& cocone);

// Per atom, the legs have trivial joint kernel (resp. jointly span the nadir).
bool jointly_injective(const Cone& c);
bool jointly_surjective(const Cocone& c);

// Random legs solving the cone equations, rescaled to norm <= 1 per atom.
Cone random_cone(Rng& rng, const Diagram& d, const ModuleObj& apex);
Cocone random_cocone(Rng& rng, const Diagram& d, const ModuleObj& nadir);

struct ProbeResult {
  bool ok = true;
  bool unique = true;
  double residual = 0.0;
  std::string detail;
};

struct ProbeOptions {
  int cones = 1;
  double tol = kAuditTol;
  bool check_legs = true;   // recompute every leg's operator norm
  RandomConfig apex;        // shape of the random test apexes
};

// Validates the limit cone itself, certifies uniqueness, and factors random
// cones through it.
ProbeResult probe_limit(Rng& rng, const Diagram& d, const Cone& limit, const ProbeOptions& opts);
ProbeResult probe_colimit(Rng& rng, const Diagram& d, const Cocone& colimit, const ProbeOptions& opts);

struct TrialDiag {
  int trial = 0;
  std::uint64_t seed = 0;
  bool passed = true;
  bool unique = true;
  double residual = 0.0;
  std::string detail;
};

struct AuditReport {
  std::string construction;
  std::uint64_t seed = 0;
  int trials = 0;
  double tol = kAuditTol;
  bool fault_injection = false;
  bool passed = true;
  bool uniqueness = true;
  int failed_trials = 0;
  double max_residual = 0.0;
  std::vector<TrialDiag> diagnostics;
  double wall_seconds = 0.0;
};

// Fixed limit, random cones: the audit of a single construction output.
AuditReport check_universal(const Diagram& d, const Cone& limit, int trials, std::uint64_t seed,
                            double tol = kAuditTol);
AuditReport check_couniversal(const Diagram& d, const Cocone& colimit, int trials, std::uint64_t seed,
                              double tol = kAuditTol);

struct IsoReport {
  bool ok = true;
  double max_error = 0.0;   // max | |phi v| - |v| | / max(1, |v|)
  double max_ratio = 0.0;   // max |phi v| / |v| over the samples
  double min_ratio = 0.0;
  std::string detail;
};

// Bijective per atom and norm preserving on random samples, basis vectors and
// the extreme points of polyhedral fibers (both directions).
IsoReport check_isometric_iso(const Morphism& phi, int samples = 32, double tol = kAuditTol,
                              std::uint64_t seed = 0);

struct AuditOptions {
  int trials = 100;
  std::uint64_t seed = 0;
  double tol = kAuditTol;
  bool inject_fault = false;
  bool parallel = true;
};

// Every registered audit name.
const std::vector<std::string>& audit_names();
// The subset whose constructed legs can be corrupted.
const std::vector<std::string>& fault_injectable();
bool is_audit_name(const std::string& name);

// Trials are independent; per-trial seeds come from derive_seed(seed, trial)
// so the report does not depend on the thread count. BANMOD_THREADS caps
// the OpenMP team size.
AuditReport run_audit(const std::string& name, const AuditOptions& opts);
TrialDiag run_trial(const std::string& name, int trial, const AuditOptions& opts);

int audit_thread_cap();

struct Series {
  std::string name;
  std::vector<double> values;
};

struct TrendReport {
  std::string name;
  std::vector<int> levels;
  std::vector<Series> series;
  bool monotone = false;
  std::string verdict;
  std::string note;

  const Series& get(const std::string& series_name) const;
};

// phi_n = diag(1, 1/2, ..., 1/n) on n-dim l-infinity fibers; inverse norm n.
TrendReport demo_not_balanced(int levels);
// Chain {1..n} with P_ij = (i/j) id; the thread through v has norm n |v|.
TrendReport demo_inverse_trivial(int levels);
// theta_k = (1/k) id between the (i/j) id and the identity systems.
TrendReport demo_inverse_cokernel(int levels);
// theta killing the first coordinate on truncated Hilbert modules.
TrendReport demo_direct_kernel(int levels);

const std::vector<std::string>& demo_names();
TrendReport run_demo(const std::string& name, int levels);

}  // namespace banmod

#endif  // BANMOD_AUDIT_HPP_

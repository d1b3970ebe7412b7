// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "banmod/audit.hpp"
#include "banmod/colimits.hpp"
#include "banmod/json_io.hpp"
#include "banmod/limits.hpp"
#include "banmod/normcalc.hpp"
#include "banmod/random.hpp"

using namespace banmod;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs an audit and requires a clean pass at the default tolerance.
void require_audit(Outcome& out, const std::string& name, int trials, std::uint64_t seed, double max_seconds,
                   double* slowest = nullptr) {
  AuditOptions opts;
  opts.trials = trials;
  opts.seed = seed;
  const AuditReport r = run_audit(name, opts);
  if (slowest) *slowest = std::max(*slowest, r.wall_seconds);
  if (!r.passed) {
    for (const TrialDiag& d : r.diagnostics) {
      if (!d.passed) {
        out.fail(name + " trial " + std::to_string(d.trial) + ": " + d.detail);
        return;
      }
    }
  }
  if (!r.uniqueness) out.fail(name + ": uniqueness certificate missing");
  if (r.max_residual > kAuditTol) out.fail(name + ": residual " + num(r.max_residual));
  if (r.wall_seconds > max_seconds) out.fail(name + ": took " + num(r.wall_seconds) + " s");
}

Outcome universal_properties() {
  Outcome out;
  double slowest = 0.0;
  for (const char* name : {"kernel", "equalizer", "product", "pullback", "inverse-limit", "cokernel", "coequalizer",
                           "coproduct", "pushout", "direct-limit", "limit-engine", "colimit-engine"}) {
    require_audit(out, name, 100, 20261016, 60.0, &slowest);
  }
  if (out.ok) out.detail = "12 constructions x 100 trials, slowest " + num(slowest) + " s";
  return out;
}

Outcome engine_agreement() {
  Outcome out;
  require_audit(out, "engine-agreement", 50, 7, 600.0);
  if (out.ok) out.detail = "50 trials, parallel pair / discrete / cospan / span";
  return out;
}

Outcome norm_formulas() {
  Outcome out;
  Rng rng(3);
  RandomConfig cfg;
  cfg.min_dim = 1;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const MeasureSpace x = random_space(rng, cfg);
    std::vector<ModuleObj> ms;
    const int k = rng.integer(1, 4);
    for (int i = 0; i < k; ++i) ms.push_back(random_module(rng, x, cfg));

    const Cone p = product(ms);
    const Element v = random_element(rng, p.apex);
    const Cocone c = coproduct(ms);
    std::vector<Element> parts;
    for (const ModuleObj& m : ms) parts.push_back(random_element(rng, m));
    for (std::size_t a = 0; a < x.size(); ++a) {
      double mx = 0.0;
      for (std::size_t i = 0; i < ms.size(); ++i) {
        mx = std::max(mx, eval_norm(ms[i].fiber(a), p.legs[i].mat(a) * v.vecs[a]));
      }
      worst = std::max(worst, std::abs(eval_norm(p.apex.fiber(a), v.vecs[a]) - mx));

      Vec sum = Vec::Zero(c.nadir.dim(a));
      double total = 0.0;
      for (std::size_t i = 0; i < ms.size(); ++i) {
        const Vec img = c.legs[i].mat(a) * parts[i].vecs[a];
        const double own = eval_norm(ms[i].fiber(a), parts[i].vecs[a]);
        worst = std::max(worst, std::abs(eval_norm(c.nadir.fiber(a), img) - own));
        sum += img;
        total += own;
      }
      worst = std::max(worst, std::abs(eval_norm(c.nadir.fiber(a), sum) - total));
    }
  }
  if (worst > 1e-12) out.fail("max deviation " + num(worst));
  out.detail = out.ok ? "1000 products and 1000 coproducts, max deviation " + num(worst) : out.detail;
  return out;
}

Vec weights(Rng& rng, Index n) {
  Vec w(n);
  for (Index i = 0; i < n; ++i) w(i) = rng.uniform(0.5, 2.0);
  return w;
}

double lp_by_hand(PNorm p, const Vec& w, const Vec& v) {
  const Vec a = (w.array() * v.array()).abs();
  if (p == PNorm::one) return a.sum();
  if (p == PNorm::two) return a.norm();
  return a.size() ? a.maxCoeff() : 0.0;
}

std::vector<Vec> vertices(PNorm p, const Vec& w) {
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

// Plain grid with step 1e-4 over the coefficient range. In two dimensions a
// coarse pass locates the basin first, then a 1e-4 grid covers it.
double grid_search(const NormExpr& n, const Mat& b, const Vec& v) {
  const double step = 1e-4;
  double best = std::numeric_limits<double>::infinity();
  if (b.cols() == 1) {
    const double r = 2.0 * eval_norm(n, v) / eval_norm(n, b.col(0)) + 1.0;
    for (double t = -r; t <= r; t += step) best = std::min(best, eval_norm(n, v + t * b.col(0)));
    return best;
  }
  double cx = 0.0, cy = 0.0;
  const double r = 2.0 * (eval_norm(n, v) + 1.0) / std::max(0.05, b.jacobiSvd().singularValues()(1));
  for (double h = r / 50; h >= step; h /= 10) {
    double bx = cx, by = cy;
    for (int i = -60; i <= 60; ++i) {
      for (int j = -60; j <= 60; ++j) {
        const double f = eval_norm(n, v + (cx + i * h) * b.col(0) + (cy + j * h) * b.col(1));
        if (f < best) {
          best = f;
          bx = cx + i * h;
          by = cy + j * h;
        }
      }
    }
    cx = bx;
    cy = by;
  }
  return best;
}

Outcome optimization_oracles() {
  Outcome out;
  Rng rng(44);
  double grid_gap = 0.0, sg_gap = 0.0, enum_gap = 0.0, svd_gap = 0.0;
  for (int t = 0; t < 60; ++t) {
    const Index n = rng.integer(2, 3);
    const Index k = t < 40 ? 1 : 2;
    if (k == 2 && n < 3) continue;
    const PNorm p = rng.coin() ? PNorm::one : PNorm::inf;
    const NormExpr nrm = lp(p, weights(rng, n));
    const Vec v = 2.0 * rng.vec(n);
    const Mat b = rng.mat(n, k);
    const DistResult exact = dist_to_subspace(nrm, b, v);
    if (exact.route != DistRoute::simplex) out.fail("l1/linf distance did not use the simplex route");
    grid_gap = std::max(grid_gap, std::abs(exact.value - grid_search(nrm, b, v)));
    const DistResult sg = dist_to_subspace(nrm, b, v, DistOptions{1e-9, DistRoute::subgradient});
    sg_gap = std::max(sg_gap, std::abs(exact.value - sg.value));
  }
  if (grid_gap > 1e-3) out.fail("grid gap " + num(grid_gap));
  if (sg_gap > 1e-6) out.fail("subgradient gap " + num(sg_gap));

  for (int t = 0; t < 300; ++t) {
    const Index d = rng.integer(1, 8), e = rng.integer(1, 8);
    const PNorm ps = static_cast<PNorm>(rng.integer(0, 2));
    const PNorm pt = static_cast<PNorm>(rng.integer(0, 2));
    if (ps == PNorm::two && pt == PNorm::two) continue;
    const Vec ws = weights(rng, d), wt = weights(rng, e);
    const Mat a = rng.mat(e, d);
    double oracle = 0.0;
    if (ps != PNorm::two) {
      for (const Vec& x : vertices(ps, ws)) oracle = std::max(oracle, lp_by_hand(pt, wt, a * x));
    } else {
      for (const Vec& y : vertices(dual_index(pt), wt.cwiseInverse())) {
        oracle = std::max(oracle, lp_by_hand(PNorm::two, ws.cwiseInverse(), a.transpose() * y));
      }
    }
    const OpNormResult r = op_norm(a, lp(ps, ws), lp(pt, wt));
    if (!r.exact) out.fail("op norm fell back to an inexact route");
    enum_gap = std::max(enum_gap, std::abs(r.value - oracle) / std::max(1.0, oracle));
  }
  if (enum_gap > 1e-9) out.fail("enumeration gap " + num(enum_gap));

  std::vector<Mat> fixtures;
  for (Index n : {2, 3}) {
    for (int t = 0; t < 50; ++t) fixtures.push_back(rng.mat(n, n));
  }
  Mat ties = Mat::Identity(3, 3);
  ties(2, 2) = -1;
  fixtures.push_back(ties);
  Mat shear(2, 2);
  shear << 1, 1, 0, 1;
  fixtures.push_back(shear);
  for (const Mat& a : fixtures) {
    const double sigma = a.jacobiSvd().singularValues()(0);
    svd_gap = std::max(svd_gap, std::abs(op_norm(a, lp(PNorm::two, a.cols()), lp(PNorm::two, a.rows())).value - sigma));
  }
  if (svd_gap > 1e-7) out.fail("SVD gap " + num(svd_gap));
  if (out.ok) {
    out.detail = "grid " + num(grid_gap) + ", subgradient " + num(sg_gap) + ", enumeration " + num(enum_gap) +
                 ", SVD " + num(svd_gap);
  }
  return out;
}

Outcome mono_epi() {
  Outcome out;
  require_audit(out, "mono-epi", 200, 5, 600.0);
  if (out.ok) out.detail = "200 morphisms, 20 cancellation probes each";
  return out;
}

Outcome functor_suite() {
  Outcome out;
  require_audit(out, "invim-functoriality", 100, 11, 600.0);
  require_audit(out, "invim-direct-limit", 50, 12, 600.0);
  require_audit(out, "lb-pullback", 20, 13, 600.0);
  require_audit(out, "hom-continuity", 50, 14, 600.0);
  require_audit(out, "dual-direct-limit", 50, 15, 600.0);
  require_audit(out, "invim-pullback-square", 50, 16, 600.0);
  if (out.ok) out.detail = "functoriality 100, direct limits 50, LB 20, hom 50, duals 50, square 50";
  return out;
}

Outcome demos() {
  Outcome out;
  constexpr int kLevels = 16;
  auto level_check = [&](const TrendReport& r, const std::string& series, const std::function<double(int)>& want) {
    const Series& s = r.get(series);
    for (std::size_t k = 0; k < r.levels.size(); ++k) {
      const double expect = want(r.levels[k]);
      if (std::abs(s.values[k] - expect) > 1e-12 * std::max(1.0, std::abs(expect))) {
        out.fail(r.name + " " + series + " at level " + std::to_string(r.levels[k]) + ": " + num(s.values[k]));
        return;
      }
    }
  };
  double slowest = 0.0;
  for (const std::string& name : demo_names()) {
    const auto t0 = std::chrono::steady_clock::now();
    const TrendReport r = run_demo(name, kLevels);
    const double dt = seconds_since(t0);
    slowest = std::max(slowest, dt);
    if (dt > 5.0) out.fail(name + " took " + num(dt) + " s");
    if (name == "not-balanced") {
      level_check(r, "inverse_norm", [](int n) { return static_cast<double>(n); });
      level_check(r, "mono", [](int) { return 1.0; });
      level_check(r, "epi", [](int) { return 1.0; });
    } else if (name == "inverse-trivial") {
      level_check(r, "thread_norm", [](int n) { return static_cast<double>(n); });
      level_check(r, "zero_thread_norm", [](int) { return 0.0; });
    } else if (name == "inverse-cokernel") {
      level_check(r, "cokernel_dim", [](int) { return 0.0; });
      level_check(r, "comparison_norm", [](int n) { return 1.0 / n; });
    } else if (name == "direct-kernel") {
      level_check(r, "kernel_dim", [](int) { return 1.0; });
    }
  }
  if (out.ok) out.detail = "4 demos to level 16, slowest " + num(slowest) + " s";
  return out;
}

Outcome fault_injection() {
  Outcome out;
  AuditOptions opts;
  opts.trials = 50;
  opts.seed = 99;
  opts.inject_fault = true;
  for (const std::string& name : fault_injectable()) {
    const AuditReport r = run_audit(name, opts);
    if (r.failed_trials != opts.trials) {
      out.fail(name + ": only " + std::to_string(r.failed_trials) + "/50 injected trials failed");
    }
  }
  if (out.ok) out.detail = std::to_string(fault_injectable().size()) + " constructions, 50/50 detected each";
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string without_timing(const std::string& text) {
  Json j = Json::parse(text);
  j.erase("timing");
  return j.dump(2);
}

Outcome determinism() {
  Outcome out;
  const fs::path dir = fs::temp_directory_path() / ("banmod_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string data = BANMOD_DATA_DIR;
  const std::vector<std::string> commands = {
      "audit --construction product --trials 1 --seed 0",
      "audit --construction colimit-engine --trials 24 --seed 3",
      "audit --construction invim-direct-limit --trials 24 --seed 3",
      "demo --name direct-kernel --levels 6",
      "check --in \"" + data + "/pullback_two_atoms.json\" --seed 5",
  };
  const std::vector<std::string> envs = {"BANMOD_THREADS=1", "BANMOD_THREADS=1", "BANMOD_THREADS=64 OMP_NUM_THREADS=64"};
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::vector<std::string> reports;
    for (std::size_t e = 0; e < envs.size(); ++e) {
      const fs::path file = dir / ("r" + std::to_string(c) + "_" + std::to_string(e) + ".json");
      const std::string cmd =
          envs[e] + " \"" + std::string(BANMOD_CLI_PATH) + "\" " + commands[c] + " --quiet --out \"" + file.string() + "\"";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        out.fail("'" + commands[c] + "' did not exit 0");
        break;
      }
      reports.push_back(slurp(file));
    }
    if (!out.ok) break;
    for (std::size_t e = 1; e < reports.size(); ++e) {
      const bool same = reports[e].find("\"timing\"") == std::string::npos ? reports[e] == reports[0]
                                                                         : without_timing(reports[e]) == without_timing(reports[0]);
      if (!same) out.fail("'" + commands[c] + "' differs under " + envs[e]);
    }
  }
  fs::remove_all(dir);
  if (out.ok) out.detail = std::to_string(commands.size()) + " commands, serial twice and 64 threads";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"universal properties", universal_properties},
      {"engine agreement", engine_agreement},
      {"norm formulas", norm_formulas},
      {"optimization oracles", optimization_oracles},
      {"mono/epi", mono_epi},
      {"functors", functor_suite},
      {"trend demos", demos},
      {"fault injection", fault_injection},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += o.ok ? 0 : 1;
    std::cout << "criterion " << (k + 1) << " " << criteria[k].first << ": " << (o.ok ? "PASS" : "FAIL") << " ("
              << o.detail << ", " << num(seconds_since(t0)) << " s)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "banmod/audit.hpp"
#include "banmod/error.hpp"
#include "banmod/json_io.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct RunConfig {
  std::string construction;
  std::string name;
  int trials = 100;
  std::uint64_t seed = 0;
  double tol = banmod::kAuditTol;
  int levels = 8;
  std::string in;
  std::string out;
  bool quiet = false;
  bool inject_fault = false;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// JSON goes to --out when given, otherwise to stdout; the summary goes to
// stdout, or stderr when stdout carries the JSON.
void emit(const banmod::Json& j, const std::string& summary, const RunConfig& cfg) {
  if (!cfg.out.empty()) {
    std::ofstream f(cfg.out);
    if (!f) throw banmod::Error(banmod::Errc::invalid_argument, "cannot write " + cfg.out);
    f << j.dump(2) << "\n";
    if (!cfg.quiet) std::cout << summary << "\n";
  } else {
    std::cout << j.dump(2) << "\n";
    if (!cfg.quiet) std::cerr << summary << "\n";
  }
}

int cmd_audit(const RunConfig& cfg) {
  if (!banmod::is_audit_name(cfg.construction)) {
    std::cerr << "unknown construction '" << cfg.construction << "'; known:";
    for (const std::string& n : banmod::audit_names()) std::cerr << " " << n;
    std::cerr << "\n";
    return kUsage;
  }
  banmod::AuditOptions opts;
  opts.trials = cfg.trials;
  opts.seed = cfg.seed;
  opts.tol = cfg.tol;
  opts.inject_fault = cfg.inject_fault;
  const banmod::AuditReport r = banmod::run_audit(cfg.construction, opts);
  std::string summary = cfg.construction + ": " + (r.passed ? "PASS" : "FAIL") + " (" +
                        std::to_string(r.trials - r.failed_trials) + "/" + std::to_string(r.trials) +
                        " trials, max residual " + fmt(r.max_residual) + ")";
  for (const banmod::TrialDiag& d : r.diagnostics) {
    if (!d.passed && !cfg.inject_fault) {
      summary += "\n  first failure: trial " + std::to_string(d.trial) + ": " + d.detail;
      break;
    }
  }
  emit(banmod::to_json(r), summary, cfg);
  return r.passed ? kPass : kFail;
}

int cmd_demo(const RunConfig& cfg) {
  const auto& names = banmod::demo_names();
  if (std::find(names.begin(), names.end(), cfg.name) == names.end()) {
    std::cerr << "unknown demo '" << cfg.name << "'; known:";
    for (const std::string& n : names) std::cerr << " " << n;
    std::cerr << "\n";
    return kUsage;
  }
  banmod::TrendReport r;
  try {
    r = banmod::run_demo(cfg.name, cfg.levels);
  } catch (const banmod::Error& e) {
    if (e.code() != banmod::Errc::invalid_argument) throw;
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  std::string summary = r.name + ": " + r.verdict;
  for (const banmod::Series& s : r.series) {
    summary += "\n  " + s.name + ":";
    for (double v : s.values) summary += " " + fmt(v);
  }
  emit(banmod::to_json(r), summary, cfg);
  return kPass;
}

int cmd_check(const RunConfig& cfg) {
  banmod::CheckReport r;
  try {
    const banmod::Instance inst = banmod::load_instance(cfg.in);
    r = banmod::run_check(inst, cfg.tol, cfg.seed);
  } catch (const banmod::Error& e) {
    if (e.code() != banmod::Errc::parse_error) throw;
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  std::string summary = "check " + r.construction + ": " + (r.passed ? "PASS" : "FAIL");
  for (const std::string& d : r.diagnostics) summary += "\n  " + d;
  emit(banmod::to_json(r), summary, cfg);
  return r.passed ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized audits and constructions for finite Banach L0-modules"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Seed for every random choice");
    sub->add_option("--tol", cfg.tol, "Residual tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out, "Write the JSON report here");
    sub->add_flag("--quiet", cfg.quiet, "Suppress the summary");
  };

  CLI::App* audit = app.add_subcommand("audit", "Run a randomized universal-property audit");
  audit->add_option("--construction", cfg.construction, "Audit name")->required();
  audit->add_option("--trials", cfg.trials, "Number of trials")->check(CLI::PositiveNumber);
  audit->add_flag("--inject-fault", cfg.inject_fault, "Corrupt one leg per trial; every trial should fail");
  add_common(audit);

  CLI::App* demo = app.add_subcommand("demo", "Run a truncation-trend demo");
  demo->add_option("--name", cfg.name, "Demo name")->required();
  demo->add_option("--levels", cfg.levels, "Number of truncation levels");
  add_common(demo);

  CLI::App* check = app.add_subcommand("check", "Validate a JSON instance and its construction");
  check->add_option("--in", cfg.in, "Instance file")->required();
  add_common(check);

  CLI::App* list = app.add_subcommand("list", "List audits, demos and check constructions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*audit) return cmd_audit(cfg);
    if (*demo) return cmd_demo(cfg);
    if (*check) return cmd_check(cfg);
    if (*list) {
      std::cout << "audits:";
      for (const std::string& n : banmod::audit_names()) std::cout << " " << n;
      std::cout << "\ndemos:";
      for (const std::string& n : banmod::demo_names()) std::cout << " " << n;
      std::cout << "\ncheck constructions:";
      for (const std::string& n : banmod::check_constructions()) std::cout << " " << n;
      std::cout << "\n";
      return kPass;
    }
  } catch (const banmod::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == banmod::Errc::parse_error || e.code() == banmod::Errc::invalid_argument ? kUsage : kFail;
  }
  return kUsage;
}

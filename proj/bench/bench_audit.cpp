#include <benchmark/benchmark.h>

#include "banmod/audit.hpp"
#include "banmod/normcalc.hpp"
#include "banmod/random.hpp"

namespace {

void run(benchmark::State& state, const char* name, bool parallel) {
  banmod::AuditOptions opts;
  opts.trials = static_cast<int>(state.range(0));
  opts.seed = 1;
  opts.parallel = parallel;
  for (auto _ : state) {
    const banmod::AuditReport r = banmod::run_audit(name, opts);
    benchmark::DoNotOptimize(r.max_residual);
  }
  state.counters["threads"] = parallel ? banmod::audit_thread_cap() : 1;
  state.SetItemsProcessed(state.iterations() * opts.trials);
}

void BM_KernelSerial(benchmark::State& s) { run(s, "kernel", false); }
void BM_KernelParallel(benchmark::State& s) { run(s, "kernel", true); }
void BM_LimitEngineSerial(benchmark::State& s) { run(s, "limit-engine", false); }
void BM_LimitEngineParallel(benchmark::State& s) { run(s, "limit-engine", true); }
void BM_DirectLimitSerial(benchmark::State& s) { run(s, "direct-limit", false); }
void BM_DirectLimitParallel(benchmark::State& s) { run(s, "direct-limit", true); }

BENCHMARK(BM_KernelSerial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelParallel)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LimitEngineSerial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LimitEngineParallel)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DirectLimitSerial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DirectLimitParallel)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_OpNormPolyhedral(benchmark::State& state) {
  banmod::Rng rng(3);
  const banmod::Index d = state.range(0);
  const banmod::Mat a = rng.mat(d, d);
  const banmod::NormExpr src = banmod::lp(banmod::PNorm::inf, d);
  const banmod::NormExpr tgt = banmod::lp(banmod::PNorm::one, d);
  for (auto _ : state) benchmark::DoNotOptimize(banmod::op_norm(a, src, tgt).value);
}
BENCHMARK(BM_OpNormPolyhedral)->DenseRange(2, 8, 2);

}  // namespace

BENCHMARK_MAIN();

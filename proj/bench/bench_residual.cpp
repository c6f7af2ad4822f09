// Face-flux residual: OpenMP kernel against the serial scatter reference.

#include "esdf/cases.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

using namespace esdf;

namespace {

const Solver& initial_solver(const std::string& id) {
  static std::map<std::string, std::unique_ptr<Solver>> cache;
  auto& s = cache[id];
  if (!s) s = std::make_unique<Solver>(build_solver(make_case(id)));
  return *s;
}

void run(benchmark::State& st, const std::string& id, bool serial) {
  const auto& s = initial_solver(id);
  RunConfig cfg = s.config();
  cfg.threads = serial ? 1 : static_cast<int>(st.range(0));
  ResidualWork work;
  std::vector<Vec> rhs;
  for (auto _ : st) {
    if (serial)
      spatial_residual_serial(s.mesh(), s.mixture(), cfg, s.layout(), s.state().u, s.state().fp, rhs, work);
    else
      spatial_residual(s.mesh(), s.mixture(), cfg, s.layout(), s.state().u, s.state().fp, rhs, work);
    benchmark::DoNotOptimize(rhs.data());
  }
  st.counters["faces"] = static_cast<double>(s.mesh().faces().size());
  st.counters["faces_per_s"] =
      benchmark::Counter(static_cast<double>(s.mesh().faces().size()), benchmark::Counter::kIsIterationInvariantRate);
}

void BM_res2_serial(benchmark::State& st) { run(st, "res2", true); }
void BM_res2_parallel(benchmark::State& st) { run(st, "res2", false); }
void BM_res3_serial(benchmark::State& st) { run(st, "res3", true); }
void BM_res3_parallel(benchmark::State& st) { run(st, "res3", false); }

}  // namespace

BENCHMARK(BM_res2_serial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_res2_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_res3_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_res3_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

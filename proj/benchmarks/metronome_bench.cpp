#include <benchmark/benchmark.h>

#include "metronome/analytics.hpp"
#include "metronome/config.hpp"
#include "metronome/controller.hpp"
#include "metronome/metrics.hpp"
#include "metronome/sim.hpp"
#include "metronome/workload.hpp"

namespace {

using namespace metronome;

void BM_VacationCdf(benchmark::State& state) {
  analytics::ModelParams p;
  p.m_threads = static_cast<int>(state.range(0));
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytics::vacation_cdf_high_load(x, p));
    x = x > p.t_short ? 0.0 : x + 13.0;
  }
}
BENCHMARK(BM_VacationCdf)->Arg(2)->Arg(8);

void BM_AdaptiveTs(benchmark::State& state) {
  double rho = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytics::adaptive_ts_multiqueue(8, 3, rho, 10'000.0));
    rho = rho > 0.99 ? 0.0 : rho + 0.001;
  }
}
BENCHMARK(BM_AdaptiveTs);

void BM_ControllerObserve(benchmark::State& state) {
  QueueController c(ControllerSettings{}, 3, 1);
  SimDuration v = 1'000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(c.observe_cycle(v, 20'000 - v));
    v = v >= 19'000 ? 1'000 : v + 7;
  }
}
BENCHMARK(BM_ControllerObserve);

void BM_PoissonArrivals(benchmark::State& state) {
  ArrivalSpec s;
  s.kind = ArrivalKind::poisson;
  s.rate = 14.88e6;
  std::int64_t n = 0;
  for (auto _ : state) {
    ArrivalGenerator gen(s, 4, millis(10));
    while (auto a = gen.next()) {
      benchmark::DoNotOptimize(*a);
      ++n;
    }
  }
  state.SetItemsProcessed(n);
}
BENCHMARK(BM_PoissonArrivals)->Unit(benchmark::kMillisecond);

// Simulated packets per wall-clock second for a line-rate scenario.
void BM_Simulate(benchmark::State& state) {
  const auto cfg = preset_config(
      "table1", {{"m_threads", std::to_string(state.range(0))},
                 {"horizon", "20ms"},
                 {"warmup", "0ns"},
                 {"record_cycles", "off"}});
  std::int64_t packets = 0;
  std::int64_t events = 0;
  for (auto _ : state) {
    const auto out = simulate(cfg);
    packets += static_cast<std::int64_t>(out.arrivals_total);
    events += static_cast<std::int64_t>(out.events);
  }
  state.SetItemsProcessed(packets);
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Simulate)->Arg(1)->Arg(3)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Summarize(benchmark::State& state) {
  const auto raw = simulate(preset_config("fig3", {{"horizon", "500ms"}}));
  for (auto _ : state) benchmark::DoNotOptimize(metrics::summarize(raw));
}
BENCHMARK(BM_Summarize)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

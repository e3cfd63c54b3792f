#include <string>

#include <benchmark/benchmark.h>

#include "fbrelay/fb_kernel.hpp"
#include "fbrelay/montecarlo.hpp"
#include "fbrelay/optimizer.hpp"
#include "fbrelay/protocols.hpp"

using namespace fbrelay;

static void BM_AwgnOutage(benchmark::State& state) {
  double rho = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(awgn_outage(rho, 1.0, 500));
    rho = rho < 100.0 ? rho * 1.01 : 1.0;
  }
}
BENCHMARK(BM_AwgnOutage);

static void BM_LinkClosedForm(benchmark::State& state) {
  double snr = 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(link_outage_closed_form(snr, 1.0, 500.0));
    snr = snr < 1000.0 ? snr * 1.01 : 10.0;
  }
}
BENCHMARK(BM_LinkClosedForm);

static void BM_Outage(benchmark::State& state) {
  SystemConfig c;
  c.protocol = static_cast<Protocol>(state.range(0));
  const Method m = static_cast<Method>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_outage(c, m).eps_end);
  state.SetLabel(std::string(to_string(c.protocol)) + "/" + std::string(to_string(m)));
}
BENCHMARK(BM_Outage)->ArgsProduct({{0, 1, 2, 3}, {0, 1}});

static void BM_MonteCarlo(benchmark::State& state) {
  SystemConfig c;
  c.protocol = Protocol::mrc;
  McSettings s;
  s.frames = 1'000'000;
  s.workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_protocol(c, s).mean);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.frames));
}
BENCHMARK(BM_MonteCarlo)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_MinimizeLatency(benchmark::State& state) {
  SystemConfig c;
  const Regime g = state.range(0) ? Regime::opa : Regime::epa;
  for (auto _ : state) benchmark::DoNotOptimize(minimize_latency(c, Protocol::mrc, 1e-3, g).latency);
}
BENCHMARK(BM_MinimizeLatency)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_MaximizeEe(benchmark::State& state) {
  SystemConfig c;
  const Regime g = state.range(0) ? Regime::opa : Regime::epa;
  for (auto _ : state) benchmark::DoNotOptimize(maximize_ee(c, Protocol::sc, 1e-3, g).ee_achieved);
}
BENCHMARK(BM_MaximizeEe)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

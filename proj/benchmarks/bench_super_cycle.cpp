#include "dsea/md/lattice.hpp"
#include "dsea/md/md_kernel.hpp"
#include "dsea/stream/pipeline.hpp"

#include <benchmark/benchmark.h>

using namespace dsea;

namespace {

// One super-cycle of the reference fluid; counters report the throughput
// metric N * N_w / T.
void BM_MdSuperCycle(benchmark::State& state) {
    const auto devices = static_cast<std::size_t>(state.range(0));
    const auto workers = static_cast<std::size_t>(state.range(1));
    const auto mode = state.range(2) == 0 ? stream::ExecutionMode::deterministic : stream::ExecutionMode::concurrent;
    md::SimParams params;
    params.lattice_cells = 8;
    const auto geometry = md::build_domain(params);
    const auto initial = md::to_envelopes(md::generate_fcc(params, geometry, 1), 0);
    stream::PipelineConfig cfg{devices, workers, geometry.num_slices(), 0, 1};
    cfg.allow_idle_devices = true;
    cfg.slots_per_buffer = stream::minimum_slots(cfg, {1, 1});
    md::MdKernel kernel(geometry, params);
    for (auto _ : state) {
        auto r = stream::run_super_cycles(cfg, kernel, initial, mode);
        benchmark::DoNotOptimize(r.slices.data());
    }
    state.counters["molecules_per_second"] = benchmark::Counter(
        static_cast<double>(geometry.molecules * cfg.num_workers()), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_MdSuperCycle)
    ->ArgNames({"devices", "workers", "concurrent"})
    ->ArgsProduct({{1, 2}, {1, 2}, {0, 1}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

// Framework overhead alone: identity kernel, tiny payloads.
void BM_IdentitySuperCycle(benchmark::State& state) {
    const auto slices = static_cast<std::size_t>(state.range(0));
    std::vector<stream::SliceEnvelope> input;
    for (std::size_t i = 1; i <= slices; ++i) input.push_back({i, 0, stream::Payload(64)});
    stream::IdentityKernel kernel({1, 1});
    stream::PipelineConfig cfg{2, 1, slices, 0, 1};
    cfg.slots_per_buffer = stream::minimum_slots(cfg, {1, 1});
    for (auto _ : state) {
        auto r = stream::run_super_cycles(cfg, kernel, input, stream::ExecutionMode::deterministic);
        benchmark::DoNotOptimize(r.slices.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(slices * cfg.num_workers()));
}
BENCHMARK(BM_IdentitySuperCycle)->Arg(16)->Arg(256)->Arg(4096);

} // namespace

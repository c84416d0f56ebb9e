#include "dsea/md/forces.hpp"
#include "dsea/md/lattice.hpp"
#include "dsea/oracle/brute_force.hpp"
#include "dsea/oracle/reference.hpp"

#include <benchmark/benchmark.h>

using namespace dsea;

namespace {

struct State {
    md::SimParams params;
    md::Geometry geometry;
    std::vector<md::SliceData> slices;
};

State relaxed(std::size_t lattice_cells) {
    State s;
    s.params.lattice_cells = lattice_cells;
    s.geometry = md::build_domain(s.params);
    s.slices = oracle::reference_trajectory(md::generate_fcc(s.params, s.geometry, 1), 5, s.geometry, s.params);
    return s;
}

void BM_CellListForces(benchmark::State& state) {
    auto s = relaxed(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        for (std::size_t i = 0; i < s.slices.size(); ++i) {
            auto sample = md::compute_forces(s.slices[i], i > 0 ? &s.slices[i - 1] : nullptr,
                                             i + 1 < s.slices.size() ? &s.slices[i + 1] : nullptr, s.geometry,
                                             s.params);
            benchmark::DoNotOptimize(sample);
        }
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.geometry.molecules));
    state.counters["molecules"] = static_cast<double>(s.geometry.molecules);
}
BENCHMARK(BM_CellListForces)->Arg(5)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_BruteForceOracle(benchmark::State& state) {
    auto s = relaxed(static_cast<std::size_t>(state.range(0)));
    const auto molecules = oracle::gather(s.slices);
    for (auto _ : state) {
        auto r = oracle::brute_forces(molecules, s.geometry, s.params);
        benchmark::DoNotOptimize(r);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(molecules.size()));
}
BENCHMARK(BM_BruteForceOracle)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

} // namespace

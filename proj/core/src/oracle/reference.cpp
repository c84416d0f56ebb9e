#include "dsea/oracle/reference.hpp"

#include "dsea/md/md_kernel.hpp"

namespace dsea::oracle {

std::vector<md::SliceData> reference_trajectory(std::vector<md::SliceData> slices, std::size_t steps,
                                                const md::Geometry& geometry, const md::SimParams& params,
                                                md::ThermoRecorder* recorder, std::uint64_t start_step) {
    const std::size_t n = slices.size();
    for (std::size_t step = 0; step < steps; ++step) {
        std::vector<std::vector<md::Molecule>> next(n);
        for (std::size_t c = 0; c < n; ++c) {
            md::SliceData centre = slices[c];
            const md::SliceData* left = c > 0 ? &slices[c - 1] : nullptr;
            const md::SliceData* right = c + 1 < n ? &slices[c + 1] : nullptr;
            const md::MigrationTargets targets{c > 0 ? &next[c - 1] : nullptr, &next[c],
                                               c + 1 < n ? &next[c + 1] : nullptr};
            const auto outcome = md::advance_slice(centre, left, right, geometry, params, targets);
            if (recorder != nullptr) recorder->record(start_step + step, c + 1, outcome.sample);
        }
        for (std::size_t c = 0; c < n; ++c) slices[c] = md::make_slice(c + 1, std::move(next[c]), geometry);
    }
    return slices;
}

} // namespace dsea::oracle

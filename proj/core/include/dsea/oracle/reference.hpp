#pragma once

#include "dsea/md/params.hpp"
#include "dsea/md/slice_data.hpp"
#include "dsea/md/thermo.hpp"

#include <cstdint>
#include <vector>

namespace dsea::oracle {

/// Non-streamed integration: every step advances all slices in ascending
/// order on one worker, then bins the next generation. Used as the
/// comparison target for streamed runs.
std::vector<md::SliceData> reference_trajectory(std::vector<md::SliceData> slices, std::size_t steps,
                                                const md::Geometry& geometry, const md::SimParams& params,
                                                md::ThermoRecorder* recorder = nullptr,
                                                std::uint64_t start_step = 0);

} // namespace dsea::oracle

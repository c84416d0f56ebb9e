#pragma once

#include "dsea/md/integrate.hpp"
#include "dsea/md/params.hpp"
#include "dsea/md/slice_data.hpp"
#include "dsea/md/thermo.hpp"
#include "dsea/stream/kernel.hpp"

namespace dsea::md {

/// Per-slice outcome of one Velocity-Verlet step.
struct StepOutcome {
    ThermoSample sample;
    double lambda = 1.0;
    MigrationCounts migrated;
};

/// One Velocity-Verlet step for the central slice: forces, velocity update,
/// slice-local thermostat, position update and migration into `targets`.
/// The streamed kernel and the sequential reference both go through here.
StepOutcome advance_slice(SliceData& centre, const SliceData* left, const SliceData* right,
                          const Geometry& geometry, const SimParams& params, const MigrationTargets& targets);

/// Molecular dynamics as a stencil kernel with O_in = O_out = 1.
///
/// Input payloads are encoded slices. While an output slice is accumulating,
/// its payload holds raw molecule records; finalize() bins them into cells
/// and re-encodes the slice.
class MdKernel final : public stream::StencilKernel {
public:
    MdKernel(Geometry geometry, SimParams params, ThermoRecorder* recorder = nullptr);

    stream::StencilOrders orders() const override { return {1, 1}; }

    void process(const stream::StencilContext& ctx, std::span<const stream::SliceEnvelope* const> inputs,
                 std::span<stream::Payload* const> outputs) override;

    void finalize(const stream::StencilContext& ctx, stream::SliceEnvelope& slice) override;

    const Geometry& geometry() const noexcept { return geometry_; }
    const SimParams& params() const noexcept { return params_; }

private:
    Geometry geometry_;
    SimParams params_;
    ThermoRecorder* recorder_;
};

/// Wraps decoded slices into envelopes at the given timestep.
std::vector<stream::SliceEnvelope> to_envelopes(const std::vector<SliceData>& slices, std::uint64_t timestep);
std::vector<SliceData> from_envelopes(const std::vector<stream::SliceEnvelope>& envelopes);

} // namespace dsea::md

#include "dsea/md/md_kernel.hpp"

#include "dsea/common/error.hpp"

#include <optional>

#include <fmt/format.h>

namespace dsea::md {

StepOutcome advance_slice(SliceData& centre, const SliceData* left, const SliceData* right, const Geometry& g,
                          const SimParams& p, const MigrationTargets& targets) {
    StepOutcome out;
    out.sample = compute_forces(centre, left, right, g, p);
    update_velocities(centre, p.dt);
    out.sample.kinetic = kinetic_energy(centre);
    out.sample.molecules = centre.molecules.size();
    if (p.thermostat && out.sample.molecules > 0) out.lambda = thermostat_scale(out.sample, p.temperature);
    out.migrated = integrate_positions_and_migrate(centre, g, p.dt, out.lambda, targets);
    return out;
}

MdKernel::MdKernel(Geometry geometry, SimParams params, ThermoRecorder* recorder)
    : geometry_(geometry), params_(params), recorder_(recorder) {}

void MdKernel::process(const stream::StencilContext& ctx, std::span<const stream::SliceEnvelope* const> inputs,
                       std::span<stream::Payload* const> outputs) {
    SliceData centre = decode_slice(inputs[1]->payload);
    std::optional<SliceData> left, right;
    if (inputs[0] != nullptr) left = decode_slice(inputs[0]->payload);
    if (inputs[2] != nullptr) right = decode_slice(inputs[2]->payload);
    if (centre.index != ctx.central)
        throw FormatError(fmt::format("payload of slice {} carries index {}", ctx.central, centre.index));

    std::vector<Molecule> to_left, to_centre, to_right;
    const MigrationTargets targets{outputs[0] != nullptr ? &to_left : nullptr, &to_centre,
                                   outputs[2] != nullptr ? &to_right : nullptr};
    const auto outcome = advance_slice(centre, left ? &*left : nullptr, right ? &*right : nullptr, geometry_,
                                       params_, targets);
    if (recorder_ != nullptr) recorder_->record(ctx.timestep, ctx.central, outcome.sample);

    if (outputs[0] != nullptr) append_molecules(*outputs[0], to_left);
    append_molecules(*outputs[1], to_centre);
    if (outputs[2] != nullptr) append_molecules(*outputs[2], to_right);
}

void MdKernel::finalize(const stream::StencilContext&, stream::SliceEnvelope& slice) {
    auto molecules = read_molecules(slice.payload);
    slice.payload = encode_slice(make_slice(slice.index, std::move(molecules), geometry_));
}

std::vector<stream::SliceEnvelope> to_envelopes(const std::vector<SliceData>& slices, std::uint64_t timestep) {
    std::vector<stream::SliceEnvelope> out;
    out.reserve(slices.size());
    for (const auto& s : slices) out.push_back({static_cast<std::size_t>(s.index), timestep, encode_slice(s)});
    return out;
}

std::vector<SliceData> from_envelopes(const std::vector<stream::SliceEnvelope>& envelopes) {
    std::vector<SliceData> out;
    out.reserve(envelopes.size());
    for (const auto& e : envelopes) out.push_back(decode_slice(e.payload));
    return out;
}

} // namespace dsea::md

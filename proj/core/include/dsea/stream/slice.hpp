#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dsea::stream {

using Payload = std::vector<std::byte>;

/// One slice of the dataset in transit. `index` is 1-based in [1, N_S];
/// `timestep` counts algorithm steps already applied to the payload.
/// Envelopes are move-only in practice: whoever holds the envelope owns the payload.
struct SliceEnvelope {
    std::size_t index = 0;
    std::uint64_t timestep = 0;
    Payload payload;
};

} // namespace dsea::stream
